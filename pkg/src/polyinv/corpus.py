"""Example maps and generators of known-invertible maps."""

from __future__ import annotations

import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from gmpy2 import mpq

from .parser import format_map
from .poly import Poly, to_rational
from .polymap import PolynomialMap, compose_maps

__all__ = [
    "ExampleSpec",
    "gorni_zampieri",
    "gorni_zampieri_inverse",
    "keller_plane",
    "keller_plane_inverse",
    "quasi_translation",
    "cubic_sixfold",
    "QUASI_TRANSLATION_PARAMS",
    "CUBIC_SIXFOLD_PARAMS",
    "druzkowski_map",
    "random_triangular_automorphism",
    "random_cubic_homogeneous",
    "gz_lowest_form_oracle",
    "EXAMPLES",
    "write_corpus",
]


def _vars(n: int) -> list[Poly]:
    return [Poly.var(n, i) for i in range(n)]


def gorni_zampieri() -> PolynomialMap:
    x1, x2, x3, x4 = _vars(4)
    p = x1 * x3 + x2 * x4
    return PolynomialMap([x1 + p * x4, x2 - p * x3, x3 + x4**3, x4])


def gorni_zampieri_inverse() -> PolynomialMap:
    x1, x2, x3, x4 = _vars(4)
    return PolynomialMap(
        [
            x1 - x1 * x3 * x4 - x2 * x4**2 + x1 * x4**4,
            x2 - 2 * x1 * x3 * x4**3 + x2 * x3 * x4 - x2 * x4**4 + x1 * x4**6 + x1 * x3**2,
            x3 - x4**3,
            x4,
        ]
    )


def keller_plane() -> PolynomialMap:
    x1, x2 = _vars(2)
    return PolynomialMap([x1 + (x2 + x1**3) ** 2, x2 + x1**3])


def keller_plane_inverse() -> PolynomialMap:
    y1, y2 = _vars(2)
    return PolynomialMap([y1 - y2**2, y2 - y1**3 + 3 * y1**2 * y2**2 - 3 * y1 * y2**4 + y2**6])


QUASI_TRANSLATION_PARAMS = ("a1", "a2", "a3", "a4", "b1", "c1", "c2", "c5", "e2")
CUBIC_SIXFOLD_PARAMS = ("a4", "a5", "c1", "c2", "c3", "c4", "c5", "d4", "e1")


def _params(names: Sequence[str], given: Mapping[str, object] | None, nonzero: Sequence[str]) -> dict[str, mpq]:
    given = dict(given or {})
    unknown = set(given) - set(names)
    if unknown:
        raise ValueError(f"unknown parameters: {sorted(unknown)}")
    vals = {k: to_rational(given.get(k, 1)) for k in names}
    for k in nonzero:
        if not vals[k]:
            raise ValueError(f"parameter {k} appears in a denominator and must be nonzero")
    return vals


def quasi_translation(params: Mapping[str, object] | None = None) -> PolynomialMap:
    """Five-dimensional quasi-translation; parameters default to 1.

    Every H_i is a function of the invariants ``X4`` and
    ``W = X5 + (c5 X2 - e2 X3)/c2``, so ``H(F) = H`` and the inverse is
    ``2 Id - F``.
    """
    v = _params(QUASI_TRANSLATION_PARAMS, params, nonzero=("c2",))
    a1, a2, a3, a4 = v["a1"], v["a2"], v["a3"], v["a4"]
    b1, c1, c2, c5, e2 = v["b1"], v["c1"], v["c2"], v["c5"], v["e2"]
    X1, X2, X3, X4, X5 = _vars(5)
    F1 = (
        X1
        + a1 * X4**3
        + a2 * X4**2 * X5
        + a3 * X4 * X5**2
        + a4 * X5**3
        + (a2 * c5 / c2) * X2 * X4**2
        + (2 * a3 * c5 / c2) * X2 * X4 * X5
        + (3 * a4 * c5 / c2) * X2 * X5**2
        - (a2 * e2 / c2) * X3 * X4**2
        - (2 * a3 * e2 / c2) * X3 * X4 * X5
        - (3 * a4 * e2 / c2) * X3 * X5**2
        + (a3 * c5**2 / c2**2) * X2**2 * X4
        + (3 * a4 * c5**2 / c2**2) * X2**2 * X5
        - (2 * a3 * c5 * e2 / c2**2) * X2 * X3 * X4
        - (6 * a4 * c5 * e2 / c2**2) * X2 * X3 * X5
        + (a3 * e2**2 / c2**2) * X3**2 * X4
        + (3 * a4 * e2**2 / c2**2) * X3**2 * X5
        + (a4 * c5**3 / c2**3) * X2**3
        - (3 * a4 * c5**2 * e2 / c2**3) * X2**2 * X3
        + (3 * a4 * c5 * e2**2 / c2**3) * X2 * X3**2
        - (a4 * e2**3 / c2**3) * X3**3
    )
    F2 = X2 + b1 * X4**3
    F3 = X3 + c5 * X2 * X4**2 + c1 * X4**3 + c2 * X4**2 * X5 - e2 * X3 * X4**2
    F4 = X4
    F5 = (
        X5
        + e2 * X4**2 * X5
        + (c5 * e2 / c2) * X2 * X4**2
        - (e2**2 / c2) * X3 * X4**2
        - ((b1 * c5 - c1 * e2) / c2) * X4**3
    )
    return PolynomialMap([F1, F2, F3, F4, F5])


def cubic_sixfold(params: Mapping[str, object] | None = None) -> PolynomialMap:
    """Six-dimensional cubic map with P_8^1 = P_9^2 = 0; parameters default to 1."""
    v = _params(CUBIC_SIXFOLD_PARAMS, params, nonzero=("a4",))
    a4, a5, c1, c2, c3, c4, c5, d4, e1 = (v[k] for k in CUBIC_SIXFOLD_PARAMS)
    X1, X2, X3, X4, X5, X6 = _vars(6)
    s3 = (X1 + X2) ** 3
    return PolynomialMap(
        [
            X1 + (a5 * e1 / a4) * s3 + a4 * X2 * X4 * X6 + a5 * X4 * X5 * X6,
            X2 - (a5 * e1 / a4) * s3,
            X3 + c1 * X1**3 + c2 * (X1 + X5) ** 3 + c3 * s3 + c4 * (X1 + X4) ** 3 + c5 * X6**3,
            X4 + d4 * X2 * X6**2 + (a5 * d4 / a4) * X5 * X6**2,
            X5 + e1 * s3,
            X6,
        ]
    )


def druzkowski_map(A: Sequence[Sequence[object]]) -> PolynomialMap:
    """``X + (AX)^3`` componentwise; ``A`` must satisfy ``A^2 = 0``."""
    n = len(A)
    M = [[to_rational(a) for a in row] for row in A]
    if any(len(row) != n for row in M):
        raise ValueError("A must be square")
    for i in range(n):
        for j in range(n):
            if sum((M[i][k] * M[k][j] for k in range(n)), mpq(0)):
                raise ValueError("A^2 must vanish for a Druzkowski map")
    X = _vars(n)
    out = []
    for i in range(n):
        lin = Poly.zero(n)
        for j in range(n):
            if M[i][j]:
                lin = lin + X[j] * M[i][j]
        out.append(X[i] + lin**3)
    return PolynomialMap(out)


def _random_sparse(rng: random.Random, n: int, allowed: Sequence[int], max_degree: int, nterms: int) -> Poly:
    terms: dict[tuple[int, ...], mpq] = {}
    for _ in range(nterms):
        deg = rng.randint(2, max_degree)
        exps = [0] * n
        for _ in range(deg):
            exps[rng.choice(allowed)] += 1
        c = mpq(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 1, 2, 3]))
        terms[tuple(exps)] = terms.get(tuple(exps), mpq(0)) + c
    return Poly(n, terms)


def random_triangular_automorphism(
    n: int, max_degree: int, seed: int, *, steps: int | None = None, max_terms: int = 2
) -> tuple[PolynomialMap, PolynomialMap]:
    """A random composition of elementary maps ``x_i <- x_i + q(x_{i+1}, ..., x_n)``.

    Returns ``(F, F^-1)``; the inverse undoes the elementary maps in reverse
    order. ``steps`` defaults to ``n - 1`` (one per index that has later
    variables to depend on).
    """
    if n < 1 or max_degree < 2:
        raise ValueError("need n >= 1 and max_degree >= 2")
    rng = random.Random(seed)
    if n == 1:
        return PolynomialMap(_vars(1)), PolynomialMap(_vars(1))
    steps = n - 1 if steps is None else steps
    X = _vars(n)
    F = PolynomialMap(X)
    Finv = PolynomialMap(X)
    order = list(range(n - 1)) if steps == n - 1 else [rng.randrange(n - 1) for _ in range(steps)]
    for i in order:
        q = _random_sparse(rng, n, range(i + 1, n), max_degree, rng.randint(1, max_terms))
        step = PolynomialMap([X[j] + q if j == i else X[j] for j in range(n)])
        undo = PolynomialMap([X[j] - q if j == i else X[j] for j in range(n)])
        # apply F first, then the new step
        F = compose_maps(step, F)
        Finv = compose_maps(Finv, undo)
    return F, Finv


def random_cubic_homogeneous(n: int, seed: int, nterms: int = 2) -> PolynomialMap:
    """A random H with every component zero or homogeneous of degree 3."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        terms: dict[tuple[int, ...], mpq] = {}
        for _ in range(rng.randint(0, nterms)):
            exps = [0] * n
            for _ in range(3):
                exps[rng.randrange(n)] += 1
            terms[tuple(exps)] = mpq(rng.choice([-2, -1, 1, 2]), rng.choice([1, 2]))
        out.append(Poly(n, terms))
    return PolynomialMap(out)


def gz_lowest_form_oracle(i: int, j: int) -> Poly:
    """Closed form of the lowest homogeneous part of P_j^i for the Gorni-Zampieri map.

    ``i`` is the one-based component (1 or 2), ``j >= 2`` the sequence index.
    """
    if i not in (1, 2) or j < 2:
        raise IndexError("closed forms exist for i in {1, 2} and j >= 2")
    x1, x2, x3, x4 = _vars(4)
    k, odd = divmod(j, 2)
    if i == 1:
        if not odd:
            return x1 * x4 ** (4 * k)
        return x1 * x3 * x4 ** (4 * k + 1) + x2 * x4 ** (4 * k + 2)
    if not odd:
        return -2 * k * x1 * x3 * x4 ** (4 * k - 1) - (2 * k - 1) * x2 * x4 ** (4 * k)
    return -x1 * x3**2 * x4 ** (4 * k) - x2 * x3 * x4 ** (4 * k + 1) - 2 * k * x1 * x4 ** (4 * k + 2)


@dataclass(frozen=True)
class ExampleSpec:
    name: str
    dimension: int
    builder: Callable[[], PolynomialMap]
    names: tuple[str, ...]
    parameters: dict[str, mpq] = field(default_factory=dict)
    expected_inverse: Callable[[], PolynomialMap] | None = None
    note: str = ""


EXAMPLES: dict[str, ExampleSpec] = {
    "keller_plane": ExampleSpec(
        "keller_plane", 2, keller_plane, ("x", "y"), expected_inverse=keller_plane_inverse,
        note="nonhomogeneous Keller map in dimension 2",
    ),
    "quasi_translation": ExampleSpec(
        "quasi_translation", 5, quasi_translation, ("x1", "x2", "x3", "x4", "x5"),
        parameters={k: mpq(1) for k in QUASI_TRANSLATION_PARAMS},
        expected_inverse=lambda: PolynomialMap([2 * x - f for x, f in zip(_vars(5), quasi_translation())]),
        note="quasi-translation, all parameters 1",
    ),
    "cubic_sixfold": ExampleSpec(
        "cubic_sixfold", 6, cubic_sixfold, ("x1", "x2", "x3", "x4", "x5", "x6"),
        parameters={k: mpq(1) for k in CUBIC_SIXFOLD_PARAMS},
        note="cubic map in dimension 6, all parameters 1",
    ),
    "gorni_zampieri": ExampleSpec(
        "gorni_zampieri", 4, gorni_zampieri, ("x1", "x2", "x3", "x4"),
        expected_inverse=gorni_zampieri_inverse,
        note="Gorni-Zampieri automorphism, p = x1*x3 + x2*x4",
    ),
}


def write_corpus(directory: str | Path) -> list[Path]:
    """Write every example as a ``<name>.map`` file; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for spec in EXAMPLES.values():
        path = directory / f"{spec.name}.map"
        path.write_text(format_map(spec.builder(), spec.names, comment=spec.note), encoding="utf-8")
        paths.append(path)
    return paths

