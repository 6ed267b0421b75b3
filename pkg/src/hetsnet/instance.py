"""Problem instances, the channel model that generates them, and seeding."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np


class ConfigurationError(ValueError):
    pass


class InstanceValidationError(ValueError):
    pass


class InstanceParseError(ValueError):
    pass


def to_linear(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class Seed:
    """A master seed plus a path of stream indices.

    Streams are derived through ``numpy.random.SeedSequence`` spawn keys, so
    ``Seed(s, (e, r))`` always yields the same generator and distinct paths
    yield statistically independent ones.
    """

    master_seed: int
    stream_index: tuple[int, ...] = ()

    def __post_init__(self):
        idx = self.stream_index
        if isinstance(idx, (int, np.integer)):
            idx = (int(idx),)
        idx = tuple(int(i) for i in idx)
        if any(i < 0 for i in idx):
            raise ConfigurationError(f"stream indices must be non-negative, got {idx}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ConfigurationError("master_seed must fit in 64 unsigned bits")
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "stream_index", idx)

    def spawn(self, *index: int) -> "Seed":
        return Seed(self.master_seed, self.stream_index + tuple(index))

    def rng(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=self.stream_index)
        return np.random.Generator(np.random.PCG64(ss))


@dataclass(frozen=True)
class GeometryConfig:
    """Path loss plus optional Rayleigh fading; distances in units of ``reference_distance``.

    With the default 10 dB power and 0 dB threshold a fade-free link clears the
    threshold alone up to about 1.78 reference distances, so the default
    [1, 3] range mixes usable and unusable links.
    """

    path_loss_exponent: float = 4.0
    reference_distance: float = 1.0
    distance_min: float = 1.0
    distance_max: float = 3.0
    rayleigh: bool = True

    def validate(self) -> None:
        if not self.reference_distance > 0:
            raise ConfigurationError("reference_distance must be > 0")
        if self.distance_min < self.reference_distance:
            raise ConfigurationError("distance_min must be >= reference_distance")
        if self.distance_max < self.distance_min:
            raise ConfigurationError("distance_max must be >= distance_min")
        if not self.path_loss_exponent > 0:
            raise ConfigurationError("path_loss_exponent must be > 0")


@dataclass(frozen=True, eq=False)
class Instance:
    """One association problem.

    ``gain[m, n]`` is the squared channel magnitude between SU ``m`` and SBS
    ``n``; powers and noise are per SBS, all in linear units.
    """

    num_sbs: int
    num_su: int
    power: np.ndarray
    noise: np.ndarray
    gain: np.ndarray
    threshold: float
    # plain-float copies for the scalar code paths
    _p: tuple = field(init=False, repr=False)
    _s: tuple = field(init=False, repr=False)
    _h: tuple = field(init=False, repr=False)

    def __post_init__(self):
        power = np.array(self.power, dtype=float)
        noise = np.array(self.noise, dtype=float)
        gain = np.array(self.gain, dtype=float)
        for arr in (power, noise, gain):
            arr.setflags(write=False)
        object.__setattr__(self, "power", power)
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "gain", gain)
        object.__setattr__(self, "threshold", float(self.threshold))
        self._validate()
        object.__setattr__(self, "_p", tuple(power.tolist()))
        object.__setattr__(self, "_s", tuple(noise.tolist()))
        object.__setattr__(self, "_h", tuple(tuple(row) for row in gain.tolist()))

    def _validate(self) -> None:
        n, m = self.num_sbs, self.num_su
        if int(n) != n or int(m) != m or n < 1 or m < 1:
            raise InstanceValidationError(f"need num_sbs >= 1 and num_su >= 1, got N={n}, M={m}")
        if self.power.shape != (n,):
            raise InstanceValidationError(f"power has shape {self.power.shape}, expected ({n},)")
        if self.noise.shape != (n,):
            raise InstanceValidationError(f"noise has shape {self.noise.shape}, expected ({n},)")
        if self.gain.shape != (m, n):
            raise InstanceValidationError(f"gain has shape {self.gain.shape}, expected ({m}, {n})")
        if not np.all(np.isfinite(self.power)) or np.any(self.power <= 0):
            raise InstanceValidationError("power values must be finite and > 0")
        if not np.all(np.isfinite(self.noise)) or np.any(self.noise <= 0):
            raise InstanceValidationError("noise values must be finite and > 0")
        if not np.all(np.isfinite(self.gain)) or np.any(self.gain < 0):
            raise InstanceValidationError("gain values must be finite and >= 0")
        if not (math.isfinite(self.threshold) and self.threshold > 0):
            raise InstanceValidationError("threshold must be finite and > 0")

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.num_sbs == other.num_sbs
            and self.num_su == other.num_su
            and self.threshold == other.threshold
            and np.array_equal(self.power, other.power)
            and np.array_equal(self.noise, other.noise)
            and np.array_equal(self.gain, other.gain)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        return {
            "num_sbs": self.num_sbs,
            "num_su": self.num_su,
            "power": self.power.tolist(),
            "noise": self.noise.tolist(),
            "threshold": self.threshold,
            "gain": self.gain.tolist(),
        }


def from_gain_matrix(gain, power: Sequence[float], noise: Sequence[float], threshold: float) -> Instance:
    gain = np.asarray(gain, dtype=float)
    if gain.ndim != 2:
        raise InstanceValidationError(f"gain must be a 2-D matrix, got {gain.ndim} dimensions")
    m, n = gain.shape
    return Instance(num_sbs=n, num_su=m, power=power, noise=noise, gain=gain, threshold=threshold)


def sample_fading(rng: np.random.Generator, size) -> np.ndarray:
    """Zero-mean unit-variance circular complex Gaussian draws."""
    scale = math.sqrt(0.5)
    return rng.normal(0.0, scale, size) + 1j * rng.normal(0.0, scale, size)


def generate_instance(
    geometry: GeometryConfig,
    num_sbs: int,
    num_su: int,
    power_db: float = 10.0,
    threshold_db: float = 0.0,
    seed: Seed | None = None,
) -> Instance:
    geometry.validate()
    if num_sbs < 1 or num_su < 1:
        raise ConfigurationError(f"need num_sbs >= 1 and num_su >= 1, got N={num_sbs}, M={num_su}")
    rng = (seed if seed is not None else Seed(0)).rng()
    shape = (num_su, num_sbs)
    dist = rng.uniform(geometry.distance_min, geometry.distance_max, shape)
    path = (geometry.reference_distance / dist) ** geometry.path_loss_exponent
    if geometry.rayleigh:
        path = np.abs(sample_fading(rng, shape)) ** 2 * path
    return Instance(
        num_sbs=num_sbs,
        num_su=num_su,
        power=np.full(num_sbs, to_linear(power_db)),
        noise=np.ones(num_sbs),
        gain=path,
        threshold=to_linear(threshold_db),
    )


# Rows index SBSs, columns SUs; the stored gain matrix is the transpose.
COUNTEREXAMPLE_H = (
    (1.0, 0.25, 0.3),
    (0.3, 1.0, 0.25),
    (0.25, 0.3, 1.0),
)


def counterexample_instance() -> Instance:
    """Three SBSs, three SUs, no pure equilibrium in the game with silence."""
    h = np.array(COUNTEREXAMPLE_H)
    return from_gain_matrix(h.T, power=[4.0] * 3, noise=[1.0] * 3, threshold=2.0)


_REQUIRED = ("num_sbs", "num_su", "power", "noise", "threshold", "gain")


def save_instance(instance: Instance, path, meta: dict | None = None) -> None:
    Path(path).write_text(dumps_instance(instance, meta))


def dumps_instance(instance: Instance, meta: dict | None = None) -> str:
    doc = instance.to_dict()
    if meta:
        doc["meta"] = meta
    # json writes floats with repr(), which round-trips doubles exactly
    return json.dumps(doc, indent=2) + "\n"


def loads_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceParseError("instance file must hold a JSON object")
    for key in _REQUIRED:
        if key not in doc:
            raise InstanceParseError(f"missing field {key!r}")
    for key in ("num_sbs", "num_su"):
        if not isinstance(doc[key], int) or isinstance(doc[key], bool):
            raise InstanceParseError(f"field {key!r} must be an integer")
    if not isinstance(doc["threshold"], (int, float)) or isinstance(doc["threshold"], bool):
        raise InstanceParseError("field 'threshold' must be a number")
    arrays = {}
    for key in ("power", "noise", "gain"):
        try:
            arrays[key] = np.array(doc[key], dtype=float)
        except (TypeError, ValueError):
            raise InstanceParseError(f"field {key!r} must be numeric") from None
    if arrays["gain"].ndim != 2:
        raise InstanceParseError("field 'gain' must be a list of equal-length rows")
    return Instance(
        num_sbs=doc["num_sbs"],
        num_su=doc["num_su"],
        power=arrays["power"],
        noise=arrays["noise"],
        gain=arrays["gain"],
        threshold=doc["threshold"],
    )


def load_instance(path) -> Instance:
    return loads_instance(Path(path).read_text())


def load_meta(path) -> dict:
    doc = json.loads(Path(path).read_text())
    return doc.get("meta", {}) if isinstance(doc, dict) else {}
