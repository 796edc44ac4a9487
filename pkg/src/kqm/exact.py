"""Exact rational scalars and univariate polynomials.

Everything here works over :class:`fractions.Fraction`; no floating point is
involved anywhere.  Polynomials store coefficients lowest degree first, e.g.
``Poly.of(1, 0, 3)`` is ``3x^2 + 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence, Union

from .errors import DomainError, DuplicateNode, PositivityError, RangeError

Number = Union[int, Fraction]


def Q(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to a Fraction.

    Floats are rejected: they would smuggle rounding into exact code.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass an int, Fraction or 'p/q' string")
    return Fraction(value)


def fmt(x: Fraction) -> str:
    """Canonical text form: ``"p/q"``, or ``"p"`` when the denominator is 1."""
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Poly:
    coeffs: tuple

    def __post_init__(self):
        cs = [Q(c) for c in self.coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def of(cls, *coeffs: Number) -> "Poly":
        return cls(tuple(coeffs))

    @classmethod
    def const(cls, c: Number) -> "Poly":
        return cls((c,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> "Poly":
        p = cls.const(1)
        for r in roots:
            p = p * cls((-Q(r), 1))
        return p

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def lead(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x: Number) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Poly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return Poly(())
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, scalar: Number) -> "Poly":
        s = Q(scalar)
        return Poly(tuple(c / s for c in self.coeffs))

    def shift(self, a: Number) -> "Poly":
        """Return ``x -> self(x + a)``."""
        out = Poly(())
        step = Poly((Q(a), 1))
        for c in reversed(self.coeffs):
            out = out * step + c
        return out

    def sample(self, nodes: Iterable[int]) -> list:
        return [(n, self(n)) for n in nodes]

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Poly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{fmt(c)}" + ("" if i == 0 else "*x" if i == 1 else f"*x^{i}"))
        return "Poly(" + " + ".join(terms) + ")"


def _as_poly(v) -> Poly:
    return v if isinstance(v, Poly) else Poly.const(v)


# ---------------------------------------------------------------------------
# Interpolation and finite differences
# ---------------------------------------------------------------------------

def interpolate(points: Sequence[tuple]) -> Poly:
    """Unique polynomial of degree <= len(points)-1 through ``points``.

    Newton divided differences, expanded to monomial form.  The result may
    have lower degree when the data lie on a lower-degree polynomial.
    """
    xs = [int(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise DuplicateNode(f"abscissas not distinct: {xs}")
    table = [Q(y) for _, y in points]
    n = len(xs)
    newton = [table[0]] if n else []
    for level in range(1, n):
        table = [
            (table[i + 1] - table[i]) / (xs[i + level] - xs[i])
            for i in range(n - level)
        ]
        newton.append(table[0])
    out = Poly(())
    for level in reversed(range(n)):
        out = out * Poly((-xs[level], 1)) + newton[level]
    return out


def alt_diff(seq: Sequence[Number], m: int, n: int) -> Fraction:
    """``sum_{j=0}^{m} (-1)^j C(m, j) seq[n + j]``."""
    if m < 0:
        raise ValueError("order must be non-negative")
    if n < 0 or n + m >= len(seq):
        raise RangeError(f"need entries {n}..{n + m}, have 0..{len(seq) - 1}")
    return sum(
        ((-1) ** j * math.comb(m, j) * Q(seq[n + j]) for j in range(m + 1)),
        Fraction(0),
    )


def binomial_row(m: int) -> list:
    """``[(-1)^p C(m, p) for p in 0..m]``."""
    return [(-1) ** p * math.comb(m, p) for p in range(m + 1)]


# ---------------------------------------------------------------------------
# Positivity on integer tails
# ---------------------------------------------------------------------------

class Positivity(NamedTuple):
    holds: bool
    witness: int | None


def cauchy_bound(w: Poly) -> Fraction:
    """Every real root of ``w`` satisfies ``|x| <= 1 + max|a_i| / |a_d|``."""
    if w.degree <= 0:
        return Fraction(1)
    lead = abs(w.lead)
    return 1 + max(abs(c) for c in w.coeffs[:-1]) / lead


def _integer_poly(w: Poly) -> list:
    scale = math.lcm(*(c.denominator for c in w.coeffs))
    return [int(c * scale) for c in w.coeffs]


def _int_eval(icoeffs: list, n: int) -> int:
    acc = 0
    for c in reversed(icoeffs):
        acc = acc * n + c
    return acc


def positive_from(w: Poly, N: int) -> Positivity:
    """Decide whether ``w(n) > 0`` for every integer ``n >= N``.

    Scans the integers up to the Cauchy root bound; beyond it ``w`` has the
    sign of its leading coefficient.  On failure the witness is the smallest
    failing integer.
    """
    if w.is_zero():
        return Positivity(False, N)
    icoeffs = _integer_poly(w)
    r = math.ceil(cauchy_bound(w))
    start = N
    if N < -r:
        if _int_eval(icoeffs, N) <= 0:
            return Positivity(False, N)
        # no roots below -r, so the sign there is that of w(N)
        start = -r
    for n in range(start, r + 1):
        if _int_eval(icoeffs, n) <= 0:
            return Positivity(False, n)
    if w.lead > 0:
        return Positivity(True, None)
    return Positivity(False, max(N, r + 1))


# ---------------------------------------------------------------------------
# Polynomial extension with a prescribed next value
# ---------------------------------------------------------------------------

def extension_family(b: Sequence[Number]) -> tuple:
    """Return ``(p, q)`` with ``w_t = p + (t - p(l+1)) * q / q(l+1)``.

    ``p`` interpolates ``b`` on ``0..l`` and ``q`` vanishes there.
    """
    l = len(b) - 1
    p = interpolate([(n, bn) for n, bn in enumerate(b)])
    q = Poly.from_roots(range(l + 1))
    return p, q


def extend_at(b: Sequence[Number], t: Number) -> Poly:
    l = len(b) - 1
    p, q = extension_family(b)
    return p + q * ((Q(t) - p(l + 1)) / q(l + 1))


def lemma_extension(b: Sequence[Number], t: Number | str | None = "auto",
                    max_doublings: int = 256) -> tuple:
    """Extend ``b_0..b_l`` to a polynomial positive on every integer ``n >= 0``.

    Returns ``(t, w)`` with ``w(n) = b_n`` on ``0..l``, ``w(l+1) = t``,
    ``deg w <= l+1`` and ``w(n) > 0`` for ``n >= l+2``.  With ``t="auto"`` the
    search doubles ``t`` starting at ``max(1, p(l+1) + 1)``; the value found is
    valid but not necessarily the smallest one.
    """
    bs = [Q(x) for x in b]
    if not bs:
        raise DomainError("need at least one value to extend")
    bad = [i for i, x in enumerate(bs) if x <= 0]
    if bad:
        raise DomainError(f"non-positive entry at index {bad[0]}: {fmt(bs[bad[0]])}")
    l = len(bs) - 1
    p, q = extension_family(bs)
    qq = q(l + 1)

    def build(tv: Fraction) -> Poly:
        return p + q * ((tv - p(l + 1)) / qq)

    if t is not None and t != "auto":
        tv = Q(t)
        if tv <= 0:
            raise PositivityError("requested value at l+1 is not positive", l + 1)
        w = build(tv)
        ok, witness = positive_from(w, l + 2)
        if not ok:
            raise PositivityError(f"t={fmt(tv)} gives a non-positive extension", witness)
        return tv, w

    tv = max(Fraction(1), p(l + 1) + 1)
    for _ in range(max_doublings):
        w = build(tv)
        if positive_from(w, l + 2).holds:
            return tv, w
        tv *= 2
    raise PositivityError("doubling search exhausted", l + 2)
