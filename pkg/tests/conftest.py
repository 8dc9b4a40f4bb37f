from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from exactpot import MultiPoly, PolyMatrix, catalog

ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)


small_fracs = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def polys(draw, n=2, max_terms=4, max_deg=3):
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        e = tuple(draw(st.integers(0, max_deg)) for _ in range(n))
        terms[e] = draw(small_fracs)
    return MultiPoly(n, terms)


@st.composite
def rational_points(draw, n=2):
    return [draw(small_fracs) for _ in range(n)]


def xs(n):
    return [MultiPoly.variable(i, n) for i in range(n)]


def random_points(n, k, seed, bound=10, nonzero=True):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < k:
        num = rng.integers(-bound, bound + 1, size=n)
        den = rng.integers(1, 4, size=n)
        pt = [Fraction(int(a), int(b)) for a, b in zip(num, den)]
        if nonzero and not any(pt):
            continue
        out.append(pt)
    return out


@pytest.fixture(params=["div3", "curl3", "grad_scalar", "mixed", "zero", "div2", "wave2"])
def entry(request):
    return catalog.get(request.param)
