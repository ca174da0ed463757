"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are packed into a single Python integer: the total degree sits in
the most significant field, followed by the exponents of ``x1, x2, ..., xn``.
With that layout, multiplying two monomials is integer addition, and integer
comparison of packed keys is graded-lexicographic comparison of monomials,
so degree truncation reduces to a comparison against ``(bound + 1) << shift``.
"""

from __future__ import annotations

from bisect import bisect_left
from collections.abc import Iterable, Iterator, Mapping, Sequence
from fractions import Fraction
from numbers import Rational as _RationalABC

from gmpy2 import mpq

try:  # optional C backend for substitution
    import flint as _flint
except ImportError:  # pragma: no cover - depends on environment
    _flint = None

__all__ = [
    "Rational",
    "Poly",
    "BudgetExceeded",
    "FIELD_BITS",
    "MAX_DEGREE",
    "to_rational",
    "add",
    "mul",
    "mul_capped",
    "compose",
    "partial_derivative",
    "truncate_low",
    "evaluate",
    "set_backend",
    "get_backend",
]

Rational = mpq

FIELD_BITS = 24
MAX_DEGREE = (1 << FIELD_BITS) - 1
_MASK = MAX_DEGREE


class BudgetExceeded(Exception):
    """Raised when an intermediate result grows past a configured limit."""

    def __init__(self, message: str, *, terms: int | None = None, degree: int | None = None):
        super().__init__(message)
        self.terms = terms
        self.degree = degree


def to_rational(value) -> mpq:
    """Coerce ints, Fractions, decimal strings like ``"3/2"`` and mpq to mpq."""
    if isinstance(value, type(mpq())):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(value, (int, Fraction, _RationalABC)):
        return mpq(value)
    if isinstance(value, str):
        return mpq(Fraction(value))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def _pack(exps: Sequence[int]) -> int:
    key = 0
    total = 0
    for e in exps:
        if e < 0:
            raise ValueError("negative exponent")
        if e > MAX_DEGREE:
            raise OverflowError(f"exponent {e} exceeds {MAX_DEGREE}")
        key = (key << FIELD_BITS) | e
        total += e
    if total > MAX_DEGREE:
        raise OverflowError(f"total degree {total} exceeds {MAX_DEGREE}")
    return (total << (FIELD_BITS * len(exps))) | key


def _unpack(key: int, nvars: int) -> tuple[int, ...]:
    out = [0] * nvars
    for i in range(nvars - 1, -1, -1):
        out[i] = key & _MASK
        key >>= FIELD_BITS
    return tuple(out)


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables over the rationals.

    ``terms`` may be a mapping from exponent tuples to coefficients; zero
    coefficients are dropped and duplicate exponents are impossible by
    construction. Iteration order (``items()``) is ascending graded-lex,
    the canonical order used for printing.
    """

    __slots__ = ("nvars", "_t", "_shift")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        self._shift = FIELD_BITS * nvars
        t: dict[int, mpq] = {}
        if terms:
            for exps, c in terms.items():
                if len(exps) != nvars:
                    raise ValueError(f"exponent vector {tuple(exps)} has length != {nvars}")
                c = to_rational(c)
                if c:
                    k = _pack(exps)
                    v = t.get(k)
                    if v is None:
                        t[k] = c
                    else:
                        v += c
                        if v:
                            t[k] = v
                        else:
                            del t[k]
        self._t = t

    @classmethod
    def _raw(cls, nvars: int, t: dict[int, mpq]) -> Poly:
        # caller guarantees: packed keys for nvars, no zero coefficients
        p = object.__new__(cls)
        p.nvars = nvars
        p._shift = FIELD_BITS * nvars
        p._t = t
        return p

    # constructors

    @classmethod
    def zero(cls, nvars: int) -> Poly:
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> Poly:
        c = to_rational(value)
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def var(cls, nvars: int, i: int) -> Poly:
        """The coordinate ``x_{i+1}`` (``i`` is zero-based)."""
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[i] = 1
        return cls._raw(nvars, {_pack(exps): mpq(1)})

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> Poly:
        return cls(len(exps), {tuple(exps): coeff})

    # inspection

    def is_zero(self) -> bool:
        return not self._t

    def __bool__(self) -> bool:
        return bool(self._t)

    def __len__(self) -> int:
        return len(self._t)

    @property
    def nterms(self) -> int:
        return len(self._t)

    def degree(self) -> int:
        if not self._t:
            raise ValueError("the zero polynomial has no degree")
        return max(self._t) >> self._shift

    def lower_degree(self) -> int:
        if not self._t:
            raise ValueError("the zero polynomial has no lower degree")
        return min(self._t) >> self._shift

    def is_homogeneous(self) -> bool:
        return bool(self._t) and self.degree() == self.lower_degree()

    def items(self) -> Iterator[tuple[tuple[int, ...], mpq]]:
        """(exponents, coefficient) pairs in ascending graded-lex order."""
        n = self.nvars
        for k in sorted(self._t):
            yield _unpack(k, n), self._t[k]

    def as_dict(self) -> dict[tuple[int, ...], mpq]:
        return dict(self.items())

    def coefficient(self, exps: Sequence[int]) -> mpq:
        return self._t.get(_pack(exps), mpq(0))

    def constant_term(self) -> mpq:
        return self._t.get(0, mpq(0))

    def homogeneous_part(self, degree: int) -> Poly:
        s = self._shift
        return Poly._raw(self.nvars, {k: c for k, c in self._t.items() if k >> s == degree})

    def lowest_part(self) -> Poly:
        """Homogeneous summand of lowest degree (zero for the zero polynomial)."""
        if not self._t:
            return self
        return self.homogeneous_part(self.lower_degree())

    def homogeneous_degrees(self) -> list[int]:
        s = self._shift
        return sorted({k >> s for k in self._t})

    def variables_used(self) -> set[int]:
        used: set[int] = set()
        for exps, _ in self.items():
            used.update(i for i, e in enumerate(exps) if e)
        return used

    # equality and hashing

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._t == other._t
        if isinstance(other, (int, Fraction, type(mpq()))):
            c = to_rational(other)
            return self._t == ({0: c} if c else {})
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._t.items())))

    # arithmetic

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable-count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other) -> Poly:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, other)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly._raw(self.nvars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other) -> Poly:
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return add(self, -other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if isinstance(other, Poly):
            return mul(self, other)
        try:
            c = to_rational(other)
        except TypeError:
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, other) -> Poly:
        if isinstance(other, Poly):
            return exact_divide(self, other)
        c = to_rational(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self.scale(1 / c)

    def __pow__(self, e: int) -> Poly:
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        return power(self, e)

    def scale(self, c) -> Poly:
        c = to_rational(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {k: v * c for k, v in self._t.items()})

    def truncate(self, cap: int) -> Poly:
        return truncate_low(self, cap)[0]

    def __call__(self, *point):
        return evaluate(self, point)

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.format()!r})"

    def __str__(self) -> str:
        return self.format()

    def format(self, names: Sequence[str] | None = None) -> str:
        """Render as ``3/2*x1^2 - x2``; parseable by :mod:`polyinv.parser`."""
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        if len(names) != self.nvars:
            raise ValueError("need one name per variable")
        if not self._t:
            return "0"
        pieces: list[str] = []
        for exps, c in self.items():
            factors = [n if e == 1 else f"{n}^{e}" for n, e in zip(names, exps) if e]
            mag = abs(c)
            if not factors:
                body = _fmt_rational(mag)
            elif mag == 1:
                body = "*".join(factors)
            else:
                body = _fmt_rational(mag) + "*" + "*".join(factors)
            if not pieces:
                pieces.append(("-" if c < 0 else "") + body)
            else:
                pieces.append((" - " if c < 0 else " + ") + body)
        return "".join(pieces)


def _fmt_rational(c: mpq) -> str:
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _check(p: Poly, q: Poly) -> None:
    if p.nvars != q.nvars:
        raise ValueError(f"variable-count mismatch: {p.nvars} vs {q.nvars}")


def add(p: Poly, q: Poly) -> Poly:
    _check(p, q)
    if len(p._t) < len(q._t):
        p, q = q, p
    t = dict(p._t)
    for k, c in q._t.items():
        v = t.get(k)
        if v is None:
            t[k] = c
        else:
            v = v + c
            if v:
                t[k] = v
            else:
                del t[k]
    return Poly._raw(p.nvars, t)


def linear_combination(pairs: Iterable[tuple[object, Poly]], nvars: int) -> Poly:
    """Sum of ``c * p`` over ``pairs`` with a single accumulator."""
    t: dict[int, mpq] = {}
    for c, p in pairs:
        c = to_rational(c)
        if not c:
            continue
        if p.nvars != nvars:
            raise ValueError(f"variable-count mismatch: {p.nvars} vs {nvars}")
        for k, v in p._t.items():
            w = t.get(k)
            t[k] = v * c if w is None else w + v * c
    return Poly._raw(nvars, {k: v for k, v in t.items() if v})


def _mul_into(t: dict, p: Poly, q: Poly, cap: int | None, limit: int | None) -> None:
    pa = p._t
    qa = q._t
    if len(pa) > len(qa):
        pa, qa = qa, pa
    s = p._shift
    if cap is None:
        qitems = list(qa.items())
        for ka, ca in pa.items():
            for kb, cb in qitems:
                k = ka + kb
                w = t.get(k)
                t[k] = ca * cb if w is None else w + ca * cb
            if limit is not None and len(t) > limit:
                raise BudgetExceeded(f"intermediate product exceeded {limit} terms", terms=len(t))
        return
    qkeys = sorted(qa)
    qitems = [(k, qa[k]) for k in qkeys]
    for ka, ca in pa.items():
        room = cap - (ka >> s)
        if room < 0:
            continue
        stop = bisect_left(qkeys, (room + 1) << s)
        for kb, cb in qitems[:stop]:
            k = ka + kb
            w = t.get(k)
            t[k] = ca * cb if w is None else w + ca * cb
        if limit is not None and len(t) > limit:
            raise BudgetExceeded(f"intermediate product exceeded {limit} terms", terms=len(t))


def _check_degree(p: Poly, q: Poly) -> None:
    if p._t and q._t and p.degree() + q.degree() > MAX_DEGREE:
        raise OverflowError(f"product degree exceeds {MAX_DEGREE}")


def mul(p: Poly, q: Poly, *, max_terms: int | None = None) -> Poly:
    _check(p, q)
    _check_degree(p, q)
    t: dict[int, mpq] = {}
    _mul_into(t, p, q, None, max_terms)
    return Poly._raw(p.nvars, {k: v for k, v in t.items() if v})


def mul_capped(p: Poly, q: Poly, cap: int, *, max_terms: int | None = None) -> Poly:
    """``mul(p, q)`` with every term of total degree above ``cap`` discarded.

    Terms beyond the cap are never formed.
    """
    _check(p, q)
    if cap < 0:
        raise ValueError("cap must be non-negative")
    t: dict[int, mpq] = {}
    _mul_into(t, p, q, cap, max_terms)
    return Poly._raw(p.nvars, {k: v for k, v in t.items() if v})


def _mul_opt(p: Poly, q: Poly, cap: int | None, max_terms: int | None) -> Poly:
    if cap is None:
        return mul(p, q, max_terms=max_terms)
    return mul_capped(p, q, cap, max_terms=max_terms)


def power(p: Poly, e: int, cap: int | None = None) -> Poly:
    result = Poly.constant(p.nvars, 1)
    base = p
    while e:
        if e & 1:
            result = _mul_opt(result, base, cap, None)
        e >>= 1
        if e:
            base = _mul_opt(base, base, cap, None)
    return result


def truncate_low(p: Poly, bound: int) -> tuple[Poly, Poly]:
    """Split ``p`` into (terms of degree <= bound, terms of degree > bound)."""
    if bound < 0:
        raise ValueError("bound must be non-negative")
    edge = (bound + 1) << p._shift
    low: dict[int, mpq] = {}
    high: dict[int, mpq] = {}
    for k, c in p._t.items():
        (low if k < edge else high)[k] = c
    return Poly._raw(p.nvars, low), Poly._raw(p.nvars, high)


class _PowerCache:
    """Memoized ``F_j ** e`` truncated at a fixed cap."""

    def __init__(self, maps: Sequence[Poly], cap: int | None, max_terms: int | None):
        self.maps = maps
        self.cap = cap
        self.max_terms = max_terms
        self._cache: list[dict[int, Poly]] = [{} for _ in maps]

    def get(self, j: int, e: int) -> Poly:
        cache = self._cache[j]
        hit = cache.get(e)
        if hit is not None:
            return hit
        if e == 0:
            r = Poly.constant(self.maps[j].nvars, 1)
        elif e == 1:
            r = self.maps[j] if self.cap is None else self.maps[j].truncate(self.cap)
        else:
            half = self.get(j, e // 2)
            r = _mul_opt(half, half, self.cap, self.max_terms)
            if e & 1:
                r = _mul_opt(r, self.get(j, 1), self.cap, self.max_terms)
        cache[e] = r
        return r


_BACKEND = "flint" if _flint is not None else "python"
_FLINT_CTX: dict[int, object] = {}


def set_backend(name: str) -> None:
    """Select the substitution kernel: ``"python"`` or ``"flint"`` (python-flint)."""
    global _BACKEND
    if name == "flint" and _flint is None:
        raise RuntimeError("python-flint is not installed")
    if name not in ("python", "flint"):
        raise ValueError(f"unknown backend {name!r}")
    _BACKEND = name


def get_backend() -> str:
    return _BACKEND


def _flint_ctx(n: int):
    ctx = _FLINT_CTX.get(n)
    if ctx is None:
        ctx = _flint.fmpq_mpoly_ctx.get(("x", n), "deglex")
        _FLINT_CTX[n] = ctx
    return ctx


def _to_flint(p: Poly, ctx):
    fq = _flint.fmpq
    n = p.nvars
    return ctx.from_dict({_unpack(k, n): fq(int(c.numerator), int(c.denominator)) for k, c in p._t.items()})


def _from_flint(q, nvars: int) -> Poly:
    t = {}
    for exps, c in q.to_dict().items():
        t[_pack([int(e) for e in exps])] = mpq(int(c.p), int(c.q))
    return Poly._raw(nvars, t)


def _compose_flint(p: Poly, maps: Sequence[Poly], cap: int | None, max_terms: int | None) -> Poly:
    m = maps[0].nvars
    if cap is not None:
        # terms above the cap only feed degrees above the cap (filtration)
        p = p.truncate(cap)
        maps = [f.truncate(cap) for f in maps]
    ctx_in = _flint_ctx(p.nvars)
    ctx_out = _flint_ctx(m)
    q = _to_flint(p, ctx_in).compose(*[_to_flint(f, ctx_out) for f in maps], ctx=ctx_out)
    if max_terms is not None and len(q) > max_terms:
        raise BudgetExceeded(f"composition exceeded {max_terms} terms", terms=len(q))
    out = _from_flint(q, m)
    return out if cap is None else out.truncate(cap)


def compose(
    p: Poly,
    maps: Sequence[Poly],
    cap: int | None = None,
    *,
    max_terms: int | None = None,
) -> Poly:
    """Substitute ``maps[j]`` for ``x_{j+1}`` in ``p``.

    With ``cap`` set, returns the exact substitution truncated to total
    degree ``<= cap``. This requires every ``maps[j]`` to be nonzero with
    no constant term, so that a monomial of degree ``s`` only feeds terms
    of degree ``>= s`` and the truncation can be applied at every step.
    ``max_terms`` bounds intermediate sizes (raises :class:`BudgetExceeded`).
    """
    if len(maps) != p.nvars:
        raise ValueError(f"arity mismatch: polynomial has {p.nvars} variables, got {len(maps)} maps")
    if not maps:
        return Poly._raw(0, dict(p._t))
    m = maps[0].nvars
    for f in maps:
        if f.nvars != m:
            raise ValueError("substituted polynomials must share a variable count")
    low = [1] * len(maps)
    if cap is not None:
        if cap < 0:
            raise ValueError("cap must be non-negative")
        for j, f in enumerate(maps):
            if f.is_zero() or f.constant_term():
                raise ValueError(
                    f"capped composition needs substituted polynomial {j + 1} to be nonzero "
                    "with no constant term"
                )
            low[j] = f.lower_degree()
    if p.is_zero():
        return Poly.zero(m)
    if _BACKEND == "flint" and p.nvars > 0:
        return _compose_flint(p, maps, cap, max_terms)
    n = p.nvars
    powers = _PowerCache(maps, cap, max_terms)
    terms = [(_unpack(k, n), c) for k, c in p._t.items()]
    return _compose_rec(terms, 0, n, m, powers, cap, low, max_terms)


def _compose_rec(terms, v, n, m, powers, cap, low, max_terms) -> Poly:
    # Sum over exponent e of x_v: powers(v, e) * compose(rest with x_v stripped).
    if v == n:
        c = sum((c for _, c in terms), mpq(0))
        return Poly.constant(m, c)
    groups: dict[int, list] = {}
    for exps, c in terms:
        groups.setdefault(exps[v], []).append((exps, c))
    acc: dict[int, mpq] = {}
    for e in sorted(groups):
        sub_cap = None
        if cap is not None:
            sub_cap = cap - e * low[v]
            if sub_cap < 0:
                continue
        inner = _compose_rec(groups[e], v + 1, n, m, powers, sub_cap, low, max_terms)
        if inner.is_zero():
            continue
        if e == 0:
            piece = inner
        else:
            piece = _mul_opt(powers.get(v, e), inner, cap, max_terms)
        for k, c in piece._t.items():
            w = acc.get(k)
            acc[k] = c if w is None else w + c
        if max_terms is not None and len(acc) > max_terms:
            raise BudgetExceeded(f"composition exceeded {max_terms} terms", terms=len(acc))
    return Poly._raw(m, {k: c for k, c in acc.items() if c})


def substitution_degree_bound(p: Poly, degrees: Sequence[int]) -> int:
    """Upper bound on ``deg p(F)`` given ``deg F_j = degrees[j]``."""
    if p.is_zero():
        return 0
    n = p.nvars
    return max(sum(e * d for e, d in zip(_unpack(k, n), degrees)) for k in p._t)


def partial_derivative(p: Poly, i: int) -> Poly:
    """Formal derivative with respect to ``x_{i+1}`` (``i`` zero-based)."""
    if not 0 <= i < p.nvars:
        raise IndexError(f"variable index {i} out of range for {p.nvars} variables")
    n = p.nvars
    unit = 1 << (FIELD_BITS * (n - 1 - i))
    top = 1 << p._shift
    t: dict[int, mpq] = {}
    for k, c in p._t.items():
        e = (k // unit) & _MASK
        if e:
            t[k - unit - top] = c * e
    return Poly._raw(n, t)


def evaluate(p: Poly, point: Sequence) -> mpq:
    if len(point) != p.nvars:
        raise ValueError(f"arity mismatch: {p.nvars} variables, point of length {len(point)}")
    vals = [to_rational(a) for a in point]
    n = p.nvars
    pows: list[dict[int, mpq]] = [{0: mpq(1)} for _ in range(n)]
    total = mpq(0)
    for k, c in p._t.items():
        term = c
        for i, e in enumerate(_unpack(k, n)):
            if e:
                cache = pows[i]
                pv = cache.get(e)
                if pv is None:
                    pv = vals[i] ** e
                    cache[e] = pv
                term *= pv
        total += term
    return total


def _leading(p: Poly) -> tuple[int, mpq]:
    k = max(p._t)
    return k, p._t[k]


def exact_divide(p: Poly, q: Poly) -> Poly:
    """Quotient ``p / q`` when ``q`` divides ``p`` exactly; ValueError otherwise."""
    _check(p, q)
    if q.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    n = p.nvars
    kq, cq = _leading(q)
    eq = _unpack(kq, n)
    if len(q._t) == 1:
        out: dict[int, mpq] = {}
        for k, c in p._t.items():
            if any(a < b for a, b in zip(_unpack(k, n), eq)):
                raise ValueError("polynomial division is not exact")
            out[k - kq] = c / cq
        return Poly._raw(n, out)
    rem = dict(p._t)
    quot: dict[int, mpq] = {}
    qitems = list(q._t.items())
    while rem:
        kr = max(rem)
        cr = rem[kr]
        if any(a < b for a, b in zip(_unpack(kr, n), eq)):
            raise ValueError("polynomial division is not exact")
        km = kr - kq
        cm = cr / cq
        quot[km] = cm
        for kb, cb in qitems:
            k = km + kb
            v = rem.get(k, 0) - cm * cb
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    return Poly._raw(n, quot)
