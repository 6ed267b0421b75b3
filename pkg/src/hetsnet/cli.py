"""Command-line driver.

Exit codes: 0 success, 1 usage or input error, 2 enumeration capacity exceeded.
SBS and SU indices are printed 0-based.
"""

from __future__ import annotations

import argparse
import secrets
import sys

from . import experiments as ex
from .dynamics import BrdConfig, brd_multi
from .equilibria import DEFAULT_CAP, EnumerationCapError, is_pne, poa_pos
from .games import GameKind, associated_count, make_oracle
from .instance import (
    ConfigurationError,
    GeometryConfig,
    InstanceParseError,
    InstanceValidationError,
    Seed,
    counterexample_instance,
    dumps_instance,
    generate_instance,
    load_instance,
)
from .learning import LearningConfig, mwsls_run
from .optimal import solve_optimal
from .sinr import SILENT


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _fmt_profile(profile) -> str:
    return ", ".join(f"SBS {n}: {'silent' if a == SILENT else f'SU {a}'}" for n, a in enumerate(profile))


def _seed(args) -> int:
    return args.seed if args.seed is not None else secrets.randbits(63)


def _geometry(args) -> GeometryConfig:
    return GeometryConfig(
        path_loss_exponent=args.alpha,
        reference_distance=1.0,
        distance_min=args.dmin,
        distance_max=args.dmax,
        rayleigh=not args.no_rayleigh,
    )


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    seed = _seed(args)
    inst = generate_instance(_geometry(args), args.n, args.m, args.power_db, args.beta_db, Seed(seed))
    meta = {"seed": seed, "power_db": args.power_db, "beta_db": args.beta_db, "alpha": args.alpha,
            "distance_min": args.dmin, "distance_max": args.dmax, "rayleigh": not args.no_rayleigh}
    _emit(dumps_instance(inst, meta), args.out)
    if args.out:
        print(f"wrote {args.out} (N={args.n}, M={args.m}, seed={seed})")
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    sol = solve_optimal(inst)
    print(f"optimal = {sol.count}")
    print(f"assignment: {_fmt_profile(sol.profile)}")
    return 0


def cmd_pne(args) -> int:
    oracle = make_oracle(GameKind(args.game), load_instance(args.instance))
    _print_report(poa_pos(oracle, args.cap))
    return 0


def _print_report(rep) -> None:
    print(f"{rep.num_pne} PNE found")
    for prof, w in zip(rep.pne_profiles, rep.welfare_per_pne):
        print(f"  welfare {w:+d}: {_fmt_profile(prof)}")
    print(f"max welfare = {rep.max_welfare} at {_fmt_profile(rep.argmax_profile)}")
    if rep.poa is None:
        print("PoA = n/a, PoS = n/a (no pure equilibrium)")
    else:
        print(f"PoA = {rep.poa:.6g}, PoS = {rep.pos:.6g}")


def cmd_brd(args) -> int:
    seed = _seed(args)
    oracle = make_oracle(GameKind(args.game), load_instance(args.instance))
    cfg = BrdConfig(max_rounds=args.rounds, restarts=args.q, seed=Seed(seed))
    out = brd_multi(oracle, cfg)
    print(f"seed = {seed}")
    print(f"profile: {_fmt_profile(out.profile)}")
    print(f"welfare = {out.welfare}, associated = {associated_count(oracle, out.profile)}")
    print(f"converged = {out.converged} after {out.rounds_used} round(s)")
    return 0


def cmd_mwsls(args) -> int:
    seed = _seed(args)
    inst = load_instance(args.instance)
    cfg = LearningConfig(tau=args.tau, epsilon=args.epsilon, iterations=args.iters, seed=Seed(seed))
    trace = mwsls_run(inst, cfg)
    oracle = make_oracle(GameKind.G, inst)
    final = trace.final_profile
    print(f"seed = {seed}")
    print(f"profile: {_fmt_profile(final)}")
    print(f"welfare = {sum(oracle.payoffs(final))}, associated = {associated_count(oracle, final)}")
    print(f"converged = {is_pne(oracle, final)} (final profile is a PNE)")
    print(f"PNE play: {trace.pne_fraction('full'):.3f} of iterations, "
          f"{trace.pne_fraction('last_half'):.3f} of the last half")
    if args.trace:
        for t in range(len(trace.welfare)):
            prof = tuple(int(a) for a in trace.profiles[t])
            print(f"  t={t + 1:4d} welfare={int(trace.welfare[t]):+d} pne={bool(trace.is_pne[t])} {_fmt_profile(prof)}")
    return 0


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def cmd_experiment(args) -> int:
    seed = _seed(args)
    overrides = dict(master_seed=seed, realizations=5000 if args.full_scale else args.realizations,
                     workers=args.workers, geometry=_geometry(args), power_db=args.power_db,
                     threshold_db=args.beta_db, tau=args.tau, epsilon=args.epsilon, iterations=args.iters)
    for name in ("n_values", "m_values", "q_values", "tau_values", "epsilon_values"):
        value = getattr(args, name)
        if value is not None:
            overrides[name] = value
    if args.m_values is not None:
        overrides["m_offset"] = None
    if args.q is not None:
        overrides["restarts"] = args.q
    result = ex.run_experiment(ex.default_config(args.id, **overrides))
    text = result.to_csv()
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            fh.write(text)
        print(f"wrote {len(result.rows)} rows to {args.csv} (seed={seed})")
    else:
        sys.stdout.write(text)
    return 0


def cmd_counterexample(args) -> int:
    inst = counterexample_instance()
    if args.out:
        _emit(dumps_instance(inst), args.out)
        print(f"wrote {args.out}")
    print(f"N = {inst.num_sbs}, M = {inst.num_su}, power = {inst.power.tolist()}, "
          f"noise = {inst.noise.tolist()}, threshold = {inst.threshold}")
    for m, row in enumerate(inst.gain):
        print(f"  gain SU {m}: {row.tolist()}")
    _print_report(poa_pos(make_oracle(GameKind.G, inst)))
    return 0


def _add_channel_flags(p) -> None:
    p.add_argument("--power-db", type=float, default=10.0, help="SBS transmit power in dB (default 10)")
    p.add_argument("--beta-db", type=float, default=0.0, help="SINR threshold in dB (default 0)")
    p.add_argument("--alpha", type=float, default=4.0, help="path-loss exponent (default 4)")
    p.add_argument("--dmin", type=float, default=GeometryConfig.distance_min, help="min SBS-SU distance / d0")
    p.add_argument("--dmax", type=float, default=GeometryConfig.distance_max, help="max SBS-SU distance / d0")
    p.add_argument("--no-rayleigh", action="store_true", help="disable Rayleigh fading")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hetsnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="generate a random instance file")
    p.add_argument("--n", type=int, required=True, help="number of SBSs")
    p.add_argument("--m", type=int, required=True, help="number of SUs")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path (default: stdout)")
    _add_channel_flags(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="exact maximum association")
    p.add_argument("instance")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pne", help="enumerate pure equilibria and report PoA/PoS")
    p.add_argument("instance")
    p.add_argument("--game", choices=[k.value for k in GameKind], default="g")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="max profiles to enumerate")
    p.set_defaults(func=cmd_pne)

    p = sub.add_parser("brd", help="best response dynamics with restarts")
    p.add_argument("instance")
    p.add_argument("--game", choices=[k.value for k in GameKind], default="g")
    p.add_argument("--q", type=int, default=1, help="number of restarts")
    p.add_argument("--rounds", type=int, default=10, help="round cap per run")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_brd)

    p = sub.add_parser("mwsls", help="distributed win-stay-lose-shift learning")
    p.add_argument("instance")
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--seed", type=int)
    p.add_argument("--trace", action="store_true", help="print every iteration")
    p.set_defaults(func=cmd_mwsls)

    p = sub.add_parser("experiment", help="run a Monte-Carlo sweep and write CSV")
    p.add_argument("id", choices=ex.EXPERIMENTS)
    p.add_argument("--seed", type=int)
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--full-scale", action="store_true", help="use 5000 realizations")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--csv", help="output CSV path (default: stdout)")
    p.add_argument("--n", dest="n_values", type=_ints, help="comma-separated N grid")
    p.add_argument("--m", dest="m_values", type=_ints, help="comma-separated M grid")
    p.add_argument("--q-grid", dest="q_values", type=_ints, help="comma-separated Q grid")
    p.add_argument("--tau-grid", dest="tau_values", type=_floats)
    p.add_argument("--epsilon-grid", dest="epsilon_values", type=_floats)
    p.add_argument("--q", type=int, help="BRD restarts for algo_comparison")
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--epsilon", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=100)
    _add_channel_flags(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("counterexample", help="emit the no-equilibrium instance and its report")
    p.add_argument("--out", help="write the instance here instead of stdout")
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except EnumerationCapError as exc:
        print(f"error: {exc}; try a smaller instance or raise --cap", file=sys.stderr)
        return 2
    except (InstanceParseError, InstanceValidationError, ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
