"""Formal power series inversion, used to cross-check the sequence method.

Two independent routes to the formal inverse of a map:

* fixed-point iteration ``G <- Id - H o G`` with all arithmetic truncated at
  a degree cap, for ``F = Id + H``;
* the homogeneous-component recursion for cubic homogeneous ``H`` with
  ``F = Id - H`` (note the sign), built from the symmetric trilinear form
  ``phi_H`` obtained by polarization.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .poly import Poly, compose
from .polymap import NormalizedMap, PolynomialMap, identity_map

__all__ = [
    "HomogeneousComponents",
    "truncated_formal_inverse",
    "trilinear_phi",
    "dr_inverse_components",
    "nesting_check",
]


def _h_of(F: NormalizedMap | Sequence[Poly]) -> list[Poly]:
    if isinstance(F, NormalizedMap):
        return list(F.H)
    n = len(F)
    return [f - Poly.var(n, i) for i, f in enumerate(F)]


def truncated_formal_inverse(F: NormalizedMap | Sequence[Poly], cap: int) -> PolynomialMap:
    """Degree-``<= cap`` truncation of the formal inverse of ``F = Id + H``.

    ``F`` is a :class:`NormalizedMap` or a map already of the form ``Id + H``
    with every nonzero H_i of lower degree >= 2.
    """
    H = _h_of(F)
    n = len(H)
    for h in H:
        if not h.is_zero() and h.lower_degree() < 2:
            raise ValueError("F must be Id + H with H of lower degree >= 2")
    X = identity_map(n)
    G = [x.truncate(cap) for x in X]
    if cap < 1 or all(h.is_zero() for h in H):
        return PolynomialMap(G)
    # each pass fixes at least one more degree, so cap passes suffice
    for _ in range(cap + 1):
        new = [x - compose(h, G, cap) if not h.is_zero() else x for x, h in zip(X, H)]
        if new == G:
            return PolynomialMap(G)
        G = new
    raise AssertionError("fixed-point iteration did not become stationary")


def _check_cubic(H: Sequence[Poly]) -> None:
    for i, h in enumerate(H):
        if not h.is_zero() and not (h.is_homogeneous() and h.degree() == 3):
            raise ValueError(f"H_{i + 1} is not cubic homogeneous")


def _is_zero_map(u: Sequence[Poly]) -> bool:
    return all(p.is_zero() for p in u)


def trilinear_phi(H: Sequence[Poly], u: Sequence[Poly], v: Sequence[Poly], w: Sequence[Poly]) -> PolynomialMap:
    """The symmetric trilinear map with ``phi_H(X, X, X) = H(X)``, by polarization."""
    _check_cubic(H)
    m = u[0].nvars if u else 0
    if _is_zero_map(u) or _is_zero_map(v) or _is_zero_map(w):
        return PolynomialMap([Poly.zero(m) for _ in H])

    def at(*args):
        arg = [sum(parts[1:], parts[0]) for parts in zip(*args)]
        return [compose(h, arg) for h in H]

    pieces = [
        (1, at(u, v, w)),
        (-1, at(u, v)),
        (-1, at(v, w)),
        (-1, at(u, w)),
        (1, at(u)),
        (1, at(v)),
        (1, at(w)),
    ]
    out = []
    for i in range(len(H)):
        acc = Poly.zero(m)
        for sign, vals in pieces:
            acc = acc + vals[i] if sign > 0 else acc - vals[i]
        out.append(acc / 6)
    return PolynomialMap(out)


@dataclass
class HomogeneousComponents:
    """``components[j]`` is the degree-``j`` homogeneous piece ``G_j``."""

    components: list[PolynomialMap]

    @property
    def max_degree(self) -> int:
        return len(self.components) - 1

    def __getitem__(self, j: int) -> PolynomialMap:
        return self.components[j]

    def is_zero(self, j: int) -> bool:
        return _is_zero_map(self.components[j])

    def truncated_sum(self, cap: int) -> PolynomialMap:
        n = len(self.components[1])
        acc = [Poly.zero(n) for _ in range(n)]
        for j in range(min(cap, self.max_degree) + 1):
            acc = [a + g for a, g in zip(acc, self.components[j])]
        return PolynomialMap(acc)


def dr_inverse_components(H: Sequence[Poly], k_max: int) -> HomogeneousComponents:
    """Homogeneous components of the formal inverse of ``F = Id - H``, H cubic.

    ``G_1 = Id``, ``G_{2k} = 0`` and
    ``G_{2k+1} = sum over ordered (p, q, r) with p+q+r = k-1 of
    phi_H(G_{2p+1}, G_{2q+1}, G_{2r+1})``, for ``k = 1 .. k_max``.
    """
    _check_cubic(H)
    n = len(H)
    zero = PolynomialMap([Poly.zero(n) for _ in range(n)])
    comps: list[PolynomialMap] = [zero, identity_map(n)]
    odd = {0: comps[1]}  # odd[k] = G_{2k+1}
    for k in range(1, k_max + 1):
        acc = [Poly.zero(n) for _ in range(n)]
        for p in range(k):
            for q in range(k - p):
                r = k - 1 - p - q
                term = trilinear_phi(H, odd[p], odd[q], odd[r])
                acc = [a + t for a, t in zip(acc, term)]
        odd[k] = PolynomialMap(acc)
        comps.append(zero)
        comps.append(odd[k])
    return HomogeneousComponents(comps)


def nesting_check(components: HomogeneousComponents, k: int) -> bool:
    """True iff ``G_j = 0`` for every ``j`` in ``[3^k + 2, 3^(k+1)]``."""
    if k < 0:
        raise ValueError("k must be non-negative")
    lo, hi = 3**k + 2, 3 ** (k + 1)
    if components.max_degree < hi:
        raise ValueError(f"components known through degree {components.max_degree}, need {hi}")
    return all(components.is_zero(j) for j in range(lo, hi + 1))
