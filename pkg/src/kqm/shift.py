"""Completion of unilateral weighted shifts to k-quasi-m-isometries.

Weights are indexed from 1, with ``S e_n = lambda_{n+1} e_{n+1}``.  Only
squared weights are ever stored: completed weights are square roots of
rationals and are irrational in general.

The shift is a k-quasi-m-isometry exactly when the moment sequence
``gamma_s = ||S^s e_k||^2 = prod_{i=1}^{s} lambda_{k+i}^2`` has vanishing
m-th finite differences, i.e. agrees with a polynomial of degree <= m-1.
Computations run in the normalized frame ``alpha_s = lambda_{k+s}`` where
that polynomial is ``w`` with ``w(0) = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Union

from .errors import DomainError, RangeError
from .exact import Poly, Q, alt_diff, interpolate, lemma_extension, positive_from


def beta(weights: Sequence, s: int) -> Fraction:
    """Running product of squared weights: 1 for ``s = 0``, else ``prod_{i<=s} lambda_i^2``."""
    if s < 0:
        raise RangeError("s must be non-negative")
    if s > len(weights):
        raise RangeError(f"beta({s}) needs {s} weights, have {len(weights)}")
    out = Fraction(1)
    for lam in weights[:s]:
        out *= Q(lam) ** 2
    return out


def beta_squared(squared: Sequence, s: int) -> Fraction:
    """Same as :func:`beta` but for already squared weights."""
    if s > len(squared):
        raise RangeError(f"beta({s}) needs {s} weights, have {len(squared)}")
    out = Fraction(1)
    for v in squared[:s]:
        out *= Q(v)
    return out


@dataclass(frozen=True)
class ShiftProblem:
    m: int
    k: int
    weights: tuple                 # lambda_1..lambda_l
    filler: tuple | None = None    # explicit lambda_{l+1}.. used in case (i)
    filler_constant: Fraction = Fraction(1)
    t: Fraction | str = "auto"

    def __post_init__(self):
        if self.m < 1 or self.k < 1:
            raise DomainError("m and k must be >= 1")
        ws = tuple(Q(x) for x in self.weights)
        if not ws:
            raise DomainError("need at least one initial weight")
        if any(x <= 0 for x in ws):
            raise DomainError("weights must be positive")
        object.__setattr__(self, "weights", ws)
        if self.filler is not None:
            fl = tuple(Q(x) for x in self.filler)
            if any(x <= 0 for x in fl):
                raise DomainError("filler weights must be positive")
            need = max(self.prefix_length - len(ws), 0)
            if len(fl) != need:
                raise DomainError(f"explicit filler needs exactly {need} entries, got {len(fl)}")
            object.__setattr__(self, "filler", fl)
        if Q(self.filler_constant) <= 0:
            raise DomainError("filler constant must be positive")
        if self.t != "auto":
            object.__setattr__(self, "t", Q(self.t))

    @property
    def l(self) -> int:
        return len(self.weights)

    @property
    def prefix_length(self) -> int:
        """Number of weights fixed before the polynomial tail takes over (case i)."""
        return self.k + max(self.m, 2) - 2

    @property
    def free_case(self) -> bool:
        """True for case (i), ``l <= k + m - 2``: a completion always exists."""
        return self.l <= self.k + self.m - 2


@dataclass(frozen=True)
class ShiftCompletion:
    """A certified completion.

    ``squared_prefix`` holds ``lambda_1^2..lambda_P^2``; beyond it
    ``lambda_{k+s}^2 = w(s) / w(s-1)`` for ``s >= tail_from`` where
    ``P = k + tail_from - 1``.
    """
    m: int
    k: int
    w: Poly
    squared_prefix: tuple
    tail_from: int
    strict: bool
    t_used: Fraction | None = None

    def squared_weight(self, s: int) -> Fraction:
        if s < 1:
            raise RangeError("weights are indexed from 1")
        if s <= len(self.squared_prefix):
            return self.squared_prefix[s - 1]
        j = s - self.k
        return self.w(j) / self.w(j - 1)

    def squared_weights(self, count: int) -> list:
        return [self.squared_weight(s) for s in range(1, count + 1)]

    def moment(self, s: int) -> Fraction:
        """``||S^s e_k||^2``."""
        out = Fraction(1)
        for i in range(1, s + 1):
            out *= self.squared_weight(self.k + i)
        return out


@dataclass(frozen=True)
class AltDiffNonzero:
    n: int
    value: Fraction


@dataclass(frozen=True)
class InterpolantMismatch:
    node: int
    expected: Fraction
    got: Fraction


@dataclass(frozen=True)
class PositivityFail:
    witness: int


@dataclass(frozen=True)
class NonexistenceCertificate:
    failing_condition: Union[AltDiffNonzero, InterpolantMismatch, PositivityFail]

    def recheck(self, problem: ShiftProblem) -> bool:
        """Re-derive the failing condition from the problem data alone."""
        frame = alpha_frame(problem.weights, problem.k)
        cond = self.failing_condition
        if isinstance(cond, AltDiffNonzero):
            return alt_diff(frame, problem.m, cond.n) == cond.value != 0
        w = interpolate([(n, frame[n]) for n in range(problem.m)])
        if isinstance(cond, InterpolantMismatch):
            return w(cond.node) == cond.got != cond.expected == frame[cond.node]
        return positive_from(w, problem.m).witness == cond.witness


def alpha_frame(weights: Sequence, k: int) -> list:
    """``(beta alpha)_n = prod_{i=1}^{n} lambda_{k+i}^2`` for ``n = 0..l-k``."""
    out = [Fraction(1)]
    for lam in weights[k:]:
        out.append(out[-1] * Q(lam) ** 2)
    return out


def complete_shift(problem: ShiftProblem) -> ShiftCompletion | NonexistenceCertificate:
    m, k = problem.m, problem.k
    if problem.free_case:
        return _complete_free(problem)

    # case (ii): the data already pin down the polynomial
    frame = alpha_frame(problem.weights, k)
    for n in range(problem.l - (k + m) + 1):
        value = alt_diff(frame, m, n)
        if value != 0:
            return NonexistenceCertificate(AltDiffNonzero(n, value))
    w = interpolate([(n, frame[n]) for n in range(m)])
    for node in range(m, len(frame)):
        if w(node) != frame[node]:
            return NonexistenceCertificate(InterpolantMismatch(node, frame[node], w(node)))
    ok, witness = positive_from(w, m)
    if not ok:
        return NonexistenceCertificate(PositivityFail(witness))
    return ShiftCompletion(
        m=m, k=k, w=w,
        squared_prefix=tuple(x ** 2 for x in problem.weights),
        tail_from=problem.l - k + 1,
        strict=w.degree == m - 1,
    )


def _complete_free(problem: ShiftProblem) -> ShiftCompletion:
    m, k = problem.m, problem.k
    need = max(problem.prefix_length - problem.l, 0)
    filler = problem.filler if problem.filler is not None else (Q(problem.filler_constant),) * need
    lam = problem.weights + filler
    if m == 1:
        # gamma must be constant: every lambda_{k+s} with s >= 1 equals 1
        return ShiftCompletion(m=1, k=k, w=Poly.const(1),
                               squared_prefix=tuple(x ** 2 for x in lam),
                               tail_from=len(lam) - k + 1, strict=True)
    frame = alpha_frame(lam, k)          # m-1 values, indices 0..m-2
    t_used, w = lemma_extension(frame, problem.t)
    return ShiftCompletion(
        m=m, k=k, w=w,
        squared_prefix=tuple(x ** 2 for x in lam),
        tail_from=m - 1,
        strict=w.degree == m - 1,
        t_used=t_used,
    )


SquaredRule = Union[ShiftCompletion, Callable[[int], Fraction]]


def check_shift(rule: SquaredRule, m: int, k: int, horizon: int) -> tuple:
    """Check the k-quasi-m-isometry criterion on ``n = 0..horizon``.

    Returns ``(ok, first_failing_n)``.
    """
    sq = rule.squared_weight if isinstance(rule, ShiftCompletion) else rule
    gamma = [Fraction(1)]
    for i in range(1, horizon + m + 1):
        gamma.append(gamma[-1] * Q(sq(k + i)))
    for n in range(horizon + 1):
        if alt_diff(gamma, m, n) != 0:
            return False, n
    return True, None

