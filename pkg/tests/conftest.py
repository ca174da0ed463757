import pytest
from gmpy2 import mpq
from hypothesis import strategies as st

from polyinv import poly
from polyinv.poly import Poly

BACKENDS = ["python"] + (["flint"] if poly._flint is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    old = poly.get_backend()
    poly.set_backend(request.param)
    yield request.param
    poly.set_backend(old)


def X(n):
    return [Poly.var(n, i) for i in range(n)]


coeffs = st.builds(mpq, st.integers(-5, 5), st.integers(1, 4))


@st.composite
def polys(draw, nvars, max_degree=4, max_terms=5, min_degree=0):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        deg = draw(st.integers(min_degree, max_degree))
        exps = [0] * nvars
        for _ in range(deg):
            exps[draw(st.integers(0, nvars - 1))] += 1
        terms[tuple(exps)] = draw(coeffs)
    return Poly(nvars, terms)


# criterion number -> PASS/FAIL line, filled by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
