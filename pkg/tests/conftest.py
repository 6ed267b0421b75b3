import numpy as np
import pytest
from hypothesis import settings, strategies as st

from hetsnet import GeometryConfig, Seed, counterexample_instance, generate_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

GEOMETRY = GeometryConfig()


@st.composite
def instances(draw, max_sbs=4, max_su=4, min_sbs=1, min_su=1):
    n = draw(st.integers(min_sbs, max_sbs))
    m = draw(st.integers(min_su, max_su))
    seed = draw(st.integers(0, 2**32 - 1))
    beta_db = draw(st.sampled_from([-3.0, 0.0, 3.0]))
    return generate_instance(GEOMETRY, n, m, 10.0, beta_db, Seed(seed))


def random_instances(count, n_max, m_max, master=0, n_min=1, m_min=1):
    rng = np.random.default_rng(master)
    out = []
    for k in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        m = int(rng.integers(m_min, m_max + 1))
        out.append(generate_instance(GEOMETRY, n, m, 10.0, 0.0, Seed(master, (n, m, k))))
    return out


@pytest.fixture
def cx():
    return counterexample_instance()


_ACCEPTANCE: dict = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    props = dict(report.user_properties)
    crit = props.get("criterion")
    if crit is not None:
        note = props.get("detail", "")
        _ACCEPTANCE[crit] = ("PASS" if report.passed else "FAIL", note)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(_ACCEPTANCE):
        status, note = _ACCEPTANCE[crit]
        terminalreporter.write_line(f"criterion {crit:2d}: {status}  {note}")
