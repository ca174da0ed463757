import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import X
from polyinv.abch import (
    Budget,
    Status,
    alternating_sum,
    invert,
    next_term,
    residual_check,
    sequence,
    telescoping_check,
)
from polyinv.corpus import (
    keller_plane,
    keller_plane_inverse,
    quasi_translation,
    gorni_zampieri,
    gorni_zampieri_inverse,
    random_cubic_homogeneous,
    random_triangular_automorphism,
)
from polyinv.poly import Poly, truncate_low
from polyinv.polymap import PolynomialMap, compose_maps, degree_data, identity_map, normalize


def test_next_term_first_step_is_h():
    F = keller_plane()
    N = normalize(F)
    for i in range(2):
        assert next_term(Poly.var(2, i), N) == N.H[i]


def test_next_term_gz_zeros():
    F = gorni_zampieri()
    x4 = Poly.var(4, 3)
    assert next_term(x4, F).is_zero()
    assert next_term(x4**3, F).is_zero()


def test_next_term_capped_is_truncation():
    F = gorni_zampieri()
    P = Poly.var(4, 0) * Poly.var(4, 2)
    assert next_term(P, F, 7) == next_term(P, F).truncate(7)


def test_sequence_gz_component_3():
    tr = sequence(gorni_zampieri(), 2, 5)
    assert tr.terms[1] == Poly.var(4, 3) ** 3
    assert tr.terms[2].is_zero()
    assert tr.early_stop and tr.first_zero == 2


def test_sequence_gz_no_early_zero():
    tr = sequence(gorni_zampieri(), 0, 14)
    assert len(tr.terms) == 15 and not tr.early_stop
    assert all(not p.is_zero() for p in tr.terms)


def test_sequence_quasi_translation_quasi_translation():
    F = quasi_translation()
    for i in range(5):
        tr = sequence(F, i, 5)
        # F4 = x4 stops at P_1 already; P_2 is then zero as well
        assert tr.early_stop and tr.first_zero <= 2


def test_sequence_budget_terms():
    tr = sequence(gorni_zampieri(), 0, 14, budget=Budget(max_terms=20))
    assert tr.budget_hit and not tr.early_stop
    assert "terms" in tr.budget_reason


def test_sequence_budget_degree():
    tr = sequence(gorni_zampieri(), 0, 14, budget=Budget(max_degree=30))
    assert tr.budget_hit and "degree" in tr.budget_reason
    assert all(p.degree() <= 30 for p in tr.terms)


def test_sequence_capped_vanish_is_not_exact():
    # x + x^2 never reaches an exact zero, but truncation at 1 kills P_1
    x = X(1)[0]
    tr = sequence([x + x**2], 0, 3, cap=1)
    assert tr.vanished and not tr.early_stop
    assert tr.first_zero == 1


def test_alternating_sum_m1():
    tr = sequence(keller_plane(), 0, 6, cap=6)
    assert alternating_sum(tr, 1) == Poly.var(2, 0)


def test_alternating_sum_keller_plane():
    x, y = X(2)
    # exact P_5 has degree up to 6^5; the capped sequence is exact through degree 12
    tr = sequence(keller_plane(), 0, 6, cap=12)
    low, R = truncate_low(alternating_sum(tr, 6), 6)
    assert low == x - y**2
    assert R.lower_degree() == 9


def test_alternating_sum_gz_component_2():
    x1, x2, x3, x4 = X(4)
    tr = sequence(gorni_zampieri(), 1, 14)
    low, _ = truncate_low(alternating_sum(tr, 14), 27)
    assert low == x2 - 2 * x1 * x3 * x4**3 + x2 * x3 * x4 - x2 * x4**4 + x1 * x4**6 + x1 * x3**2


def test_alternating_sum_short_trace():
    tr = sequence(gorni_zampieri(), 0, 3)
    with pytest.raises(ValueError):
        alternating_sum(tr, 6)
    # an early stop pads with zeros
    tr = sequence(gorni_zampieri(), 2, 5)
    assert alternating_sum(tr, 6) == Poly.var(4, 2) - Poly.var(4, 3) ** 3


def test_residual_check_trivial():
    F = gorni_zampieri()
    ok, diff = residual_check(Poly.zero(4), F, Poly.zero(4), 3)
    assert ok and diff.is_zero()


def test_residual_check_gz():
    F = gorni_zampieri()
    for i in range(2):
        tr = sequence(F, i, 14)
        _, R = truncate_low(alternating_sum(tr, 14), 27)
        ok, _ = residual_check(R, F, tr.terms[14], 14)
        assert ok


def test_residual_check_fails_for_x_plus_x2():
    x = X(1)[0]
    F = [x + x**2]
    tr = sequence(F, 0, 1)
    G, R = truncate_low(alternating_sum(tr, 1), 1)
    assert (G, R.is_zero()) == (x, True)
    ok, diff = residual_check(R, F, tr.terms[1], 1)
    assert not ok and diff == -(x**2)


def test_telescoping_basic():
    x1, x2 = X(2)
    F = keller_plane()
    assert telescoping_check(x1, F, 1).is_zero()
    assert telescoping_check(x1, F, 2).is_zero()
    # m = 6 exactly would need degree 6^6 terms; check it below degree 40
    assert telescoping_check(x1, F, 6, cap=40).is_zero()
    F, _ = random_triangular_automorphism(3, 3, seed=7)
    assert telescoping_check(Poly.var(3, 1), F, 4).is_zero()


def test_invert_keller_plane():
    out = invert(keller_plane())
    assert out.status is Status.INVERTIBLE
    assert out.inverse == keller_plane_inverse()
    assert [c.m for c in out.certificate] == [6, 5]
    # exact P_6 is far beyond the default degree guard of 4*B = 24
    out = invert(keller_plane(), mode="residual")
    assert out.status is Status.BUDGET_EXCEEDED
    assert "degree" in out.diagnostics["budget"]["reason"]


def test_invert_gz_residual_certificate():
    out = invert(gorni_zampieri(), mode="residual")
    assert out.status is Status.INVERTIBLE
    assert out.inverse == gorni_zampieri_inverse()
    assert [c.m for c in out.certificate] == [14, 14, 14, 1]
    assert all(c.residual_verified for c in out.certificate)


def test_invert_identity():
    out = invert(identity_map(3))
    assert out.status is Status.INVERTIBLE and out.inverse == identity_map(3)


def test_invert_affine():
    x1, x2 = X(2)
    F = [2 * x1 + x2 + 1, x2 - 3]
    out = invert(F)
    assert out.status is Status.INVERTIBLE
    assert compose_maps(out.inverse, F) == identity_map(2)


def test_invert_not_invertible():
    x1, x2 = X(2)
    for mode in ("capped", "residual"):
        out = invert([x1 + x2**2, x2 + x1**2], mode=mode)
        assert out.status is Status.NOT_INVERTIBLE
        assert not out.witness.difference.is_zero()


def test_invert_budget_exceeded():
    out = invert(gorni_zampieri(), mode="residual", budget=Budget(max_terms=30))
    assert out.status is Status.BUDGET_EXCEEDED
    assert out.diagnostics["budget"]["component"] in (1, 2)


def test_invert_rejects_unknown_mode():
    with pytest.raises(ValueError):
        invert(keller_plane(), mode="fast")


def test_condition_two_at_m_plus_one():
    # the split and residual identity also hold one step past the minimal m
    F = gorni_zampieri()
    G = gorni_zampieri_inverse()
    for i in range(2):
        tr = sequence(F, i, 15)
        low, R = truncate_low(alternating_sum(tr, 15), 27)
        assert low == G[i]
        ok, _ = residual_check(R, F, tr.terms[15], 15)
        assert ok
    tr = sequence(keller_plane(), 1, 6, cap=6)
    assert alternating_sum(tr, 6).truncate(6) == keller_plane_inverse()[1]


# properties

_seeds = st.integers(0, 10_000)


def _degree_bounds_ok(F, kmax):
    N = normalize(F)
    if N.is_affine():
        return
    dd = degree_data(N)
    for i in range(N.nvars):
        if N.H[i].is_zero():
            continue
        tr = sequence(N, i, kmax)
        for k, P in enumerate(tr.terms[1:], start=1):
            if P.is_zero():
                break
            assert P.degree() <= dd.D ** (k - 1) * dd.D_i[i]
            assert P.lower_degree() >= (k - 1) * (dd.d - 1) + dd.d_i[i]


@given(st.integers(2, 4), st.integers(2, 3), _seeds)
@settings(max_examples=40, deadline=None)
def test_degree_bounds_triangular(n, deg, seed):
    F, _ = random_triangular_automorphism(n, deg, seed)
    _degree_bounds_ok(F, 5)


def test_degree_bounds_gz():
    _degree_bounds_ok(gorni_zampieri(), 5)


def _allowed_degrees(k, d):
    top = (d**k - 1) // (d - 1) - k + 1
    return {(k + j - 1) * (d - 1) + 1 for j in range(1, top + 1)}


@given(st.integers(1, 3), _seeds)
@settings(max_examples=30, deadline=None)
def test_homogeneous_degree_set(n, seed):
    H = random_cubic_homogeneous(n, seed)
    F = PolynomialMap([Poly.var(n, i) + h for i, h in enumerate(H)])
    for i in range(n):
        tr = sequence(F, i, 4)
        for k, P in enumerate(tr.terms[1:], start=1):
            assert set(P.homogeneous_degrees()) <= _allowed_degrees(k, 3)


@given(st.integers(1, 4), st.integers(2, 3), _seeds)
@settings(max_examples=30, deadline=None)
def test_capped_and_residual_agree(n, deg, seed):
    F, Finv = random_triangular_automorphism(n, deg, seed)
    a = invert(F, mode="capped")
    b = invert(F, mode="residual")
    assert a.status is b.status is Status.INVERTIBLE
    assert a.inverse == b.inverse == Finv
    if a.degrees is not None:
        assert all(g.is_zero() or g.degree() <= a.degrees.B for g in a.normalized_inverse)


@given(st.integers(1, 3), _seeds, st.integers(1, 3))
@settings(max_examples=30, deadline=None)
def test_modes_agree_on_arbitrary_maps(n, seed, nterms):
    # mostly non-invertible cubic perturbations: both modes must reach the same verdict
    H = random_cubic_homogeneous(n, seed, nterms)
    F = PolynomialMap([Poly.var(n, i) + h for i, h in enumerate(H)])
    budget = Budget(max_terms=200_000)
    a = invert(F, mode="capped", budget=budget)
    b = invert(F, mode="residual", budget=budget)
    if Status.BUDGET_EXCEEDED in (a.status, b.status):
        return
    assert a.status is b.status
    if a.invertible:
        assert a.inverse == b.inverse
        assert compose_maps(a.inverse, F) == compose_maps(F, a.inverse) == identity_map(n)
    else:
        assert not a.witness.difference.is_zero()
        assert not b.witness.difference.is_zero()


@given(st.integers(2, 4), st.integers(2, 3), _seeds, st.sampled_from([mpq(2), mpq(-1, 3)]), st.integers(-2, 2))
@settings(max_examples=20, deadline=None)
def test_invert_with_linear_and_translation(n, deg, seed, scale, shift):
    F, Finv = random_triangular_automorphism(n, deg, seed)
    xs = X(n)
    # conjugate-free twist: A o F with A affine, inverse is Finv o A^-1
    A = PolynomialMap([x * scale + shift for x in xs])
    Ainv = PolynomialMap([(x - shift) / scale for x in xs])
    out = invert(compose_maps(A, F))
    assert out.status is Status.INVERTIBLE
    assert out.inverse == compose_maps(Finv, Ainv)
