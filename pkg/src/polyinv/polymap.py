"""Polynomial maps K^n -> K^n: Jacobians, the Keller test, normalization."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from gmpy2 import mpq

from .poly import Poly, compose, evaluate, exact_divide, partial_derivative

__all__ = [
    "PolynomialMap",
    "NormalizedMap",
    "DegreeData",
    "SingularLinearPart",
    "identity_map",
    "compose_maps",
    "evaluate_map",
    "jacobian_matrix",
    "jacobian_det",
    "is_keller",
    "normalize",
    "degree_data",
    "denormalize_inverse",
    "termination_index",
]


class SingularLinearPart(ValueError):
    """The linear part J_F(0) is singular, so F cannot be an automorphism."""


class PolynomialMap(tuple):
    """An n-tuple of polynomials in n variables, ``F = (F_1, ..., F_n)``."""

    def __new__(cls, components: Sequence[Poly]):
        comps = tuple(components)
        n = len(comps)
        for i, c in enumerate(comps):
            if not isinstance(c, Poly):
                raise TypeError(f"component {i + 1} is not a Poly")
            if c.nvars != n:
                raise ValueError(f"component {i + 1} has {c.nvars} variables, expected {n}")
        return super().__new__(cls, comps)

    @property
    def nvars(self) -> int:
        return len(self)

    def degree(self) -> int:
        """max deg F_i (0 when every component is zero)."""
        return max((c.degree() for c in self if not c.is_zero()), default=0)

    def __call__(self, *point):
        return evaluate_map(self, point)

    def format(self, names: Sequence[str] | None = None) -> list[str]:
        return [c.format(names) for c in self]

    def __repr__(self) -> str:
        return f"PolynomialMap({self.format()!r})"


def identity_map(n: int) -> PolynomialMap:
    return PolynomialMap([Poly.var(n, i) for i in range(n)])


def compose_maps(F: Sequence[Poly], G: Sequence[Poly], *, max_terms: int | None = None) -> PolynomialMap:
    """``F o G``, i.e. ``X -> F(G(X))``."""
    if not F:
        return PolynomialMap([])
    if len(G) != F[0].nvars:
        raise ValueError(f"arity mismatch: F takes {F[0].nvars} arguments, G has {len(G)} components")
    return PolynomialMap([compose(f, G, max_terms=max_terms) for f in F])


def evaluate_map(F: Sequence[Poly], point: Sequence) -> list[mpq]:
    return [evaluate(f, point) for f in F]


def jacobian_matrix(F: Sequence[Poly]) -> list[list[Poly]]:
    n = len(F)
    return [[partial_derivative(F[i], j) for j in range(n)] for i in range(n)]


def jacobian_det(F: Sequence[Poly]) -> Poly:
    """Exact determinant of the Jacobian by fraction-free Bareiss elimination."""
    n = len(F)
    if n == 0:
        return Poly.constant(0, 1)
    M = jacobian_matrix(F)
    sign = 1
    prev = Poly.constant(n, 1)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((r for r in range(k + 1, n) if not M[r][k].is_zero()), None)
            if swap is None:
                return Poly.zero(n)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        pivot = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * pivot - M[i][k] * M[k][j]
                M[i][j] = exact_divide(num, prev)
            M[i][k] = Poly.zero(n)
        prev = pivot
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def is_keller(F: Sequence[Poly]) -> bool:
    return jacobian_det(F) == 1


# exact linear algebra over Q for the affine part


def _mat_inverse(L: list[list[mpq]]) -> list[list[mpq]]:
    n = len(L)
    A = [list(row) + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(L)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col]), None)
        if piv is None:
            raise SingularLinearPart("linear part J_F(0) is singular")
        A[col], A[piv] = A[piv], A[col]
        inv = 1 / A[col][col]
        A[col] = [v * inv for v in A[col]]
        for r in range(n):
            if r != col and A[r][col]:
                f = A[r][col]
                A[r] = [a - f * b for a, b in zip(A[r], A[col])]
    return [row[n:] for row in A]


def _is_identity(L: list[list[mpq]]) -> bool:
    return all(L[i][j] == (i == j) for i in range(len(L)) for j in range(len(L)))


@dataclass(frozen=True)
class NormalizedMap:
    """``F(X) = L (X + H(X)) + c`` with every nonzero H_i of lower degree >= 2."""

    H: tuple[Poly, ...]
    L: tuple[tuple[mpq, ...], ...]
    c: tuple[mpq, ...]

    @property
    def nvars(self) -> int:
        return len(self.H)

    def is_affine(self) -> bool:
        return all(h.is_zero() for h in self.H)

    def inner_map(self) -> PolynomialMap:
        """``Id + H``."""
        n = self.nvars
        return PolynomialMap([Poly.var(n, i) + h for i, h in enumerate(self.H)])

    def linear_inverse(self) -> list[list[mpq]]:
        return _mat_inverse([list(r) for r in self.L])

    def reconstruct(self) -> PolynomialMap:
        inner = self.inner_map()
        n = self.nvars
        out = []
        for i in range(n):
            acc = Poly.constant(n, self.c[i])
            for j in range(n):
                if self.L[i][j]:
                    acc = acc + inner[j] * self.L[i][j]
            out.append(acc)
        return PolynomialMap(out)


def normalize(F: Sequence[Poly]) -> NormalizedMap:
    n = len(F)
    F = PolynomialMap(F)
    c = tuple(f.constant_term() for f in F)
    L = [[f.coefficient(tuple(int(k == j) for k in range(n))) for j in range(n)] for f in F]
    Linv = _mat_inverse(L)
    shifted = [f - ci for f, ci in zip(F, c)]
    H = []
    for i in range(n):
        if _is_identity(L):
            comb = shifted[i]
        else:
            comb = Poly.zero(n)
            for j in range(n):
                if Linv[i][j]:
                    comb = comb + shifted[j] * Linv[i][j]
        h = comb - Poly.var(n, i)
        assert h.is_zero() or h.lower_degree() >= 2
        H.append(h)
    return NormalizedMap(tuple(H), tuple(tuple(r) for r in L), c)


def termination_index(B: int, d_i: int, d: int) -> int:
    """``floor((B - d_i)/(d - 1) + 1) + 1``, the sequence length needed for component i."""
    if d < 2:
        raise ValueError("lower degree d must be at least 2")
    return (B - d_i) // (d - 1) + 2


@dataclass(frozen=True)
class DegreeData:
    d_i: tuple[int | None, ...]
    D_i: tuple[int | None, ...]
    d: int
    D: int
    B: int
    m_i: tuple[int, ...]

    def as_dict(self) -> dict:
        return {
            "d_i": list(self.d_i),
            "D_i": list(self.D_i),
            "d": self.d,
            "D": self.D,
            "B": self.B,
            "m_i": list(self.m_i),
        }


def degree_data(N: NormalizedMap) -> DegreeData:
    """Degrees and termination indices; zero H_i get ``None`` degrees and m_i = 1."""
    n = N.nvars
    lows = tuple(None if h.is_zero() else h.lower_degree() for h in N.H)
    highs = tuple(None if h.is_zero() else h.degree() for h in N.H)
    present = [x for x in lows if x is not None]
    if not present:
        raise ValueError("affine map: every H_i is zero")
    d = min(present)
    D = max(x for x in highs if x is not None)
    B = D ** (n - 1)
    m = tuple(1 if di is None else termination_index(B, di, d) for di in lows)
    return DegreeData(lows, highs, d, D, B, m)


def affine_map(M: Sequence[Sequence], shift: Sequence) -> PolynomialMap:
    """``Y -> M Y + shift`` as a polynomial map."""
    n = len(M)
    comps = []
    for i in range(n):
        p = Poly.constant(n, shift[i])
        for j in range(n):
            if M[i][j]:
                p = p + Poly.var(n, j) * M[i][j]
        comps.append(p)
    return PolynomialMap(comps)


def denormalize_inverse(N: NormalizedMap, Gn: Sequence[Poly]) -> PolynomialMap:
    """Turn an inverse of ``Id + H`` into the inverse of ``F``: ``Y -> Gn(L^-1 (Y - c))``."""
    n = N.nvars
    if _is_identity([list(r) for r in N.L]) and not any(N.c):
        return PolynomialMap(Gn)
    Linv = N.linear_inverse()
    shift = [-sum((Linv[i][j] * N.c[j] for j in range(n)), mpq(0)) for i in range(n)]
    return compose_maps(Gn, affine_map(Linv, shift))

