"""Invertibility decision for ``F = Id + H`` from the sequences P_k^i.

For a polynomial ``P`` the sequence is ``P_0 = P`` and
``P_k = P_{k-1}(F) - P_{k-1}``. Starting from ``P = x_i`` the alternating sum
``S = sum_{j<m} (-1)^j P_j`` splits at degree ``B = D^(n-1)`` into a candidate
inverse component ``G_i`` (degrees <= B) and a remainder ``R_i``. The map is
invertible exactly when ``R_i(F) + (-1)^m P_m = 0`` for every ``i``.

Two modes are offered. ``capped`` truncates all sequence arithmetic at
degree B and accepts when ``G o F = Id``; it stays small even when the exact
P_m are enormous. ``residual`` computes the sequences exactly and checks the
remainder identity itself, producing the full certificate.
"""

from __future__ import annotations

import time
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

from .poly import BudgetExceeded, Poly, compose, substitution_degree_bound, truncate_low
from .polymap import (
    DegreeData,
    NormalizedMap,
    PolynomialMap,
    compose_maps,
    degree_data,
    denormalize_inverse,
    identity_map,
    normalize,
)

__all__ = [
    "Budget",
    "SequenceTrace",
    "Status",
    "ComponentCertificate",
    "Witness",
    "InversionOutcome",
    "next_term",
    "sequence",
    "alternating_sum",
    "residual_check",
    "telescoping_check",
    "invert",
]

DEFAULT_MAX_TERMS = 5_000_000


@dataclass(frozen=True)
class Budget:
    """Limits for uncapped computations; ``max_degree=None`` means 4*B."""

    max_terms: int = DEFAULT_MAX_TERMS
    max_degree: int | None = None

    def resolve(self, B: int | None) -> Budget:
        if self.max_degree is not None or B is None:
            return self
        return Budget(self.max_terms, 4 * B)


class Status(str, Enum):
    INVERTIBLE = "invertible"
    NOT_INVERTIBLE = "not_invertible"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class SequenceTrace:
    component: int
    terms: list[Poly]
    capped: int | None = None
    early_stop: bool = False
    vanished: bool = False
    budget_hit: bool = False
    budget_reason: str | None = None

    @property
    def first_zero(self) -> int | None:
        """Index of the terminating zero term, exact or truncated."""
        return len(self.terms) - 1 if (self.early_stop or self.vanished) else None


def _as_inner(F: NormalizedMap | Sequence[Poly]) -> PolynomialMap:
    if isinstance(F, NormalizedMap):
        return F.inner_map()
    return PolynomialMap(F)


def next_term(P: Poly, F: NormalizedMap | Sequence[Poly], cap: int | None = None, *, max_terms: int | None = None) -> Poly:
    """``P(F) - P``, truncated to degree <= cap when a cap is given."""
    F = _as_inner(F)
    if cap is None:
        return compose(P, F, max_terms=max_terms) - P
    return compose(P, F, cap, max_terms=max_terms) - P.truncate(cap)


def sequence(
    F: NormalizedMap | Sequence[Poly],
    i: int,
    k_max: int,
    cap: int | None = None,
    budget: Budget | None = None,
    *,
    start: Poly | None = None,
) -> SequenceTrace:
    """P_0 = x_i (or ``start``), ..., P_{k_max}; stops at the first zero term.

    ``i`` is zero-based. ``early_stop`` marks an exact zero. With a cap, a
    term may vanish only after truncation (``vanished``); every later
    truncated term is then zero too, so stopping loses nothing. A capped
    term counts as exact while the substitution degree bound stays within
    the cap. Budget exhaustion is recorded in the trace rather than raised.
    """
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    Fm = _as_inner(F)
    n = len(Fm)
    P = Poly.var(n, i) if start is None else start
    if cap is not None:
        P = P.truncate(cap)
    trace = SequenceTrace(component=i, terms=[P], capped=cap)
    if P.is_zero():
        trace.early_stop = True
        return trace
    budget = budget or Budget()
    fdeg = [f.degree() for f in Fm]
    exact = True
    for _ in range(k_max):
        bound = substitution_degree_bound(P, fdeg)
        if cap is not None:
            exact = exact and bound <= cap
        elif budget.max_degree is not None:
            if bound > budget.max_degree:
                trace.budget_hit = True
                trace.budget_reason = f"degree bound {bound} exceeds max_degree {budget.max_degree}"
                return trace
        try:
            P = next_term(P, Fm, cap, max_terms=budget.max_terms)
        except BudgetExceeded as exc:
            trace.budget_hit = True
            trace.budget_reason = str(exc)
            return trace
        trace.terms.append(P)
        if P.is_zero():
            if cap is None or exact:
                trace.early_stop = True
            else:
                trace.vanished = True
            break
    return trace


def alternating_sum(trace: SequenceTrace | Sequence[Poly], m: int) -> Poly:
    """``sum_{j<m} (-1)^j P_j``; terms past an early stop count as zero."""
    terms = trace.terms if isinstance(trace, SequenceTrace) else list(trace)
    if isinstance(trace, SequenceTrace):
        stopped = trace.early_stop or trace.vanished
    else:
        stopped = bool(terms) and terms[-1].is_zero()
    if m < 1:
        raise ValueError("m must be positive")
    if len(terms) < m and not stopped:
        raise ValueError(f"trace holds {len(terms)} terms, need {m}")
    acc = Poly.zero(terms[0].nvars)
    for j, P in enumerate(terms[:m]):
        acc = acc + P if j % 2 == 0 else acc - P
    return acc


def residual_check(
    R: Poly,
    F: NormalizedMap | Sequence[Poly],
    P_m: Poly,
    m: int,
    *,
    max_terms: int | None = None,
) -> tuple[bool, Poly]:
    """Difference ``R(F) - (-1)^(m+1) P_m``; the check passes when it is zero."""
    RF = compose(R, _as_inner(F), max_terms=max_terms)
    diff = RF + P_m if m % 2 == 0 else RF - P_m
    return diff.is_zero(), diff


def telescoping_check(P: Poly, F: NormalizedMap | Sequence[Poly], m: int, cap: int | None = None) -> Poly:
    """``P - [sum_{l<m} (-1)^l P_l(F) + (-1)^m P_m]``, identically zero.

    With a cap every piece is truncated at that degree, so the result is the
    low part of the exact difference.
    """
    if m < 1:
        raise ValueError("m must be positive")
    Fm = _as_inner(F)
    terms = [P if cap is None else P.truncate(cap)]
    for _ in range(m):
        terms.append(next_term(terms[-1], Fm, cap))
    rhs = Poly.zero(P.nvars)
    for l in range(m):
        PF = compose(terms[l], Fm, cap)
        rhs = rhs + PF if l % 2 == 0 else rhs - PF
    rhs = rhs + terms[m] if m % 2 == 0 else rhs - terms[m]
    return terms[0] - rhs


@dataclass
class ComponentCertificate:
    component: int
    m: int
    steps: int
    early_stop: bool
    G: Poly
    R: Poly | None = None
    P_m: Poly | None = None
    residual_verified: bool = False

    def as_dict(self, names: Sequence[str] | None = None) -> dict:
        return {
            "component": self.component + 1,
            "m": self.m,
            "steps": self.steps,
            "early_stop": self.early_stop,
            "residual_verified": self.residual_verified,
            "R_terms": None if self.R is None else self.R.nterms,
        }


@dataclass
class Witness:
    component: int
    difference: Poly


@dataclass
class InversionOutcome:
    status: Status
    mode: str
    inverse: PolynomialMap | None = None
    normalized_inverse: PolynomialMap | None = None
    normalized: NormalizedMap | None = None
    degrees: DegreeData | None = None
    certificate: list[ComponentCertificate] = field(default_factory=list)
    witness: Witness | None = None
    traces: list[SequenceTrace] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    @property
    def invertible(self) -> bool:
        return self.status is Status.INVERTIBLE


def _trace_stats(traces: list[SequenceTrace]) -> tuple[list[list[int]], list[int | None]]:
    counts = [[t.nterms for t in tr.terms] for tr in traces]
    maxdeg = []
    for tr in traces:
        nz = [t.degree() for t in tr.terms if not t.is_zero()]
        maxdeg.append(max(nz) if nz else None)
    return counts, maxdeg


def invert(
    F: Sequence[Poly],
    mode: str = "capped",
    budget: Budget | None = None,
) -> InversionOutcome:
    """Decide invertibility of ``F`` and return the inverse when it exists.

    Raises :class:`~polyinv.polymap.SingularLinearPart` when ``J_F(0)`` is
    singular.
    """
    if mode not in ("capped", "residual"):
        raise ValueError(f"unknown mode {mode!r}")
    t0 = time.perf_counter()
    F = PolynomialMap(F)
    n = len(F)
    N = normalize(F)
    budget = budget or Budget()
    out = InversionOutcome(status=Status.INVERTIBLE, mode=mode, normalized=N)

    def finish() -> InversionOutcome:
        counts, maxdeg = _trace_stats(out.traces)
        out.diagnostics.setdefault("term_counts", counts)
        out.diagnostics.setdefault("max_degrees", maxdeg)
        out.diagnostics["elapsed_ms"] = round((time.perf_counter() - t0) * 1000, 3)
        return out

    if N.is_affine():
        Gn = identity_map(n)
        out.normalized_inverse = Gn
        out.inverse = denormalize_inverse(N, Gn)
        out.certificate = [ComponentCertificate(i, 1, 1, True, Gn[i], residual_verified=True) for i in range(n)]
        return finish()

    dd = degree_data(N)
    out.degrees = dd
    budget = budget.resolve(dd.B)
    inner = N.inner_map()
    G: list[Poly] = []
    for i in range(n):
        m = dd.m_i[i]
        cap = dd.B if mode == "capped" else None
        tr = sequence(inner, i, m, cap=cap, budget=budget)
        out.traces.append(tr)
        if tr.budget_hit:
            out.status = Status.BUDGET_EXCEEDED
            out.diagnostics["budget"] = {
                "component": i + 1,
                "reason": tr.budget_reason,
                "max_terms": budget.max_terms,
                "max_degree": budget.max_degree,
            }
            return finish()
        steps = len(tr.terms) - 1
        S = alternating_sum(tr, m)
        if tr.early_stop and steps <= m:
            # exact P_k = 0 with k <= m: S is the inverse component outright
            G.append(S if mode == "residual" else S.truncate(dd.B))
            cert = ComponentCertificate(i, m, steps, True, G[-1])
            if mode == "residual":
                cert.R, cert.P_m, cert.residual_verified = Poly.zero(n), Poly.zero(n), True
            out.certificate.append(cert)
            continue
        Gi, Ri = truncate_low(S, dd.B)
        G.append(Gi)
        cert = ComponentCertificate(i, m, steps, False, Gi)
        out.certificate.append(cert)
        if mode == "residual":
            P_m = tr.terms[m]
            cert.R, cert.P_m = Ri, P_m
            try:
                ok, diff = residual_check(Ri, inner, P_m, m, max_terms=budget.max_terms)
            except BudgetExceeded as exc:
                out.status = Status.BUDGET_EXCEEDED
                out.diagnostics["budget"] = {"component": i + 1, "reason": str(exc)}
                return finish()
            cert.residual_verified = ok
            if not ok:
                out.status = Status.NOT_INVERTIBLE
                out.witness = Witness(i, diff)
                out.normalized_inverse = PolynomialMap(G + [Poly.var(n, j) for j in range(i + 1, n)])
                return finish()

    Gn = PolynomialMap(G)
    out.normalized_inverse = Gn
    try:
        left = compose_maps(Gn, inner, max_terms=budget.max_terms)
        right = compose_maps(inner, Gn, max_terms=budget.max_terms)
    except BudgetExceeded as exc:
        out.status = Status.BUDGET_EXCEEDED
        out.diagnostics["budget"] = {"component": None, "reason": f"verification: {exc}"}
        return finish()
    for i in range(n):
        for side in (left, right):
            diff = side[i] - Poly.var(n, i)
            if not diff.is_zero():
                if mode == "residual":
                    raise AssertionError("residual certificate accepted a map that fails composition")
                out.status = Status.NOT_INVERTIBLE
                out.witness = Witness(i, diff)
                return finish()
    Ginv = denormalize_inverse(N, Gn)
    for i, (a, b) in enumerate(zip(compose_maps(Ginv, F), compose_maps(F, Ginv))):
        x = Poly.var(n, i)
        if a != x or b != x:
            raise AssertionError("denormalized inverse fails the two-sided check")
    out.inverse = Ginv
    return finish()
