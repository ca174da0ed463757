import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import X
from polyinv.abch import invert
from polyinv.corpus import (
    keller_plane,
    keller_plane_inverse,
    gorni_zampieri,
    gorni_zampieri_inverse,
    random_cubic_homogeneous,
    random_triangular_automorphism,
)
from polyinv.oracle import dr_inverse_components, nesting_check, trilinear_phi, truncated_formal_inverse
from polyinv.poly import Poly
from polyinv.polymap import PolynomialMap, compose_maps, identity_map, normalize


def _id_minus(H):
    n = len(H)
    return PolynomialMap([Poly.var(n, i) - h for i, h in enumerate(H)])


def test_formal_inverse_identity():
    assert truncated_formal_inverse(identity_map(3), 5) == identity_map(3)


def test_formal_inverse_catalan():
    x = X(1)[0]
    G = truncated_formal_inverse([x + x**2], 4)
    assert G == PolynomialMap([x - x**2 + 2 * x**3 - 5 * x**4])
    # substitute back: G(F) = x up to degree 4
    assert compose_maps(G, [x + x**2])[0].truncate(4) == x


def test_formal_inverse_keller_plane():
    assert truncated_formal_inverse(normalize(keller_plane()), 6) == keller_plane_inverse()


def test_formal_inverse_gz():
    assert truncated_formal_inverse(gorni_zampieri(), 27) == gorni_zampieri_inverse()


def test_formal_inverse_rejects_linear_h():
    x1, x2 = X(2)
    with pytest.raises(ValueError):
        truncated_formal_inverse([x1 + x2, x2], 3)


def test_phi_recovers_h():
    H = random_cubic_homogeneous(3, seed=5, nterms=3)
    Xs = identity_map(3)
    assert trilinear_phi(H, Xs, Xs, Xs) == H


def test_phi_one_variable():
    x = X(1)[0]
    u, v, w = [x + 1], [2 * x], [x**2]
    assert trilinear_phi([x**3], u, v, w) == PolynomialMap([u[0] * v[0] * w[0]])


def test_phi_symmetric():
    H = random_cubic_homogeneous(2, seed=3, nterms=3)
    x1, x2 = X(2)
    u, v, w = [x1, x2**2], [x1 + x2, 3 * x2], [x2, x1 * x2]
    assert trilinear_phi(H, u, v, w) == trilinear_phi(H, w, u, v) == trilinear_phi(H, v, u, w)


def test_phi_rejects_non_cubic():
    x1, x2 = X(2)
    with pytest.raises(ValueError):
        trilinear_phi([x1**2, x2**3], identity_map(2), identity_map(2), identity_map(2))


def test_dr_one_variable():
    x = X(1)[0]
    comps = dr_inverse_components([x**3], 2)
    assert comps[1] == identity_map(1)
    assert comps[3] == PolynomialMap([x**3])
    assert comps[5] == PolynomialMap([3 * x**5])
    assert comps.truncated_sum(5) == truncated_formal_inverse([x - x**3], 5)


def test_dr_even_components_vanish():
    comps = dr_inverse_components(random_cubic_homogeneous(2, seed=11, nterms=3), 4)
    assert all(comps.is_zero(j) for j in range(0, comps.max_degree + 1, 2))


def test_nesting_one_variable():
    x = X(1)[0]
    assert not nesting_check(dr_inverse_components([x**3], 4), 1)


def test_nesting_zero_h():
    comps = dr_inverse_components([Poly.zero(2), Poly.zero(2)], 14)
    assert all(nesting_check(comps, k) for k in range(3))


def test_nesting_needs_components():
    x = X(1)[0]
    with pytest.raises(ValueError):
        nesting_check(dr_inverse_components([x**3], 2), 1)


def test_gz_dr_form_first_levels():
    # GZ = Id + H with H cubic, so the DR form uses -H
    H = [-h for h in normalize(gorni_zampieri()).H]
    comps = dr_inverse_components(H, 4)
    assert not nesting_check(comps, 0)
    assert not nesting_check(comps, 1)


# properties

_seed = st.integers(0, 10_000)


@given(st.integers(1, 3), _seed)
@settings(max_examples=20, deadline=None)
def test_dr_matches_fixed_point(n, seed):
    H = random_cubic_homogeneous(n, seed, nterms=2)
    comps = dr_inverse_components(H, 4)
    assert comps.truncated_sum(9) == truncated_formal_inverse(_id_minus(H), 9)


@given(st.integers(1, 3), st.integers(2, 3), _seed)
@settings(max_examples=20, deadline=None)
def test_oracle_matches_invert(n, deg, seed):
    F, _ = random_triangular_automorphism(n, deg, seed)
    out = invert(F)
    if out.degrees is None:
        return
    assert truncated_formal_inverse(out.normalized, out.degrees.B) == out.normalized_inverse


@given(st.integers(1, 3), _seed, st.integers(2, 9))
@settings(max_examples=20, deadline=None)
def test_substitution_identity(n, seed, cap):
    H = random_cubic_homogeneous(n, seed, nterms=2)
    F = _id_minus(H)
    G = truncated_formal_inverse(F, cap)
    assert PolynomialMap([g.truncate(cap) for g in compose_maps(G, F)]) == identity_map(n)
