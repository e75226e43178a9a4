from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from hyperarr.algebra import Ring
from hyperarr.arrangement import Arrangement, load
from hyperarr.linalg import primitive

PAPER = Path(__file__).resolve().parent.parent / "paper_examples"

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def example(name: str) -> Arrangement:
    return load(PAPER / f"{name}.json")


@pytest.fixture
def xyz():
    R = Ring(("x", "y", "z"))
    return (R, *R.gens())


@st.composite
def arrangements(draw, l=3, min_n=1, max_n=6, coeff=3):
    """Random central arrangements with distinct hyperplanes."""
    n = draw(st.integers(min_n, max_n))
    vec = st.lists(st.integers(-coeff, coeff), min_size=l, max_size=l).filter(any)
    vecs = draw(st.lists(vec, min_size=n, max_size=n, unique_by=lambda v: primitive(v)))
    return Arrangement.from_vectors(vecs, l)


@st.composite
def polys(draw, ring, max_terms=4, max_deg=3, homogeneous_degree=None):
    from hyperarr.algebra import monomials_of_degree

    l = ring.nvars
    if homogeneous_degree is None:
        exps = st.lists(st.integers(0, max_deg), min_size=l, max_size=l)
    else:
        exps = st.sampled_from(list(monomials_of_degree(l, homogeneous_degree)))
    coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
    terms = draw(st.lists(st.tuples(exps, coeffs), max_size=max_terms))
    return ring.from_terms((tuple(e), c) for e, c in terms)


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        status, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"criterion {num:2d} {status}: {title} ({detail})")
