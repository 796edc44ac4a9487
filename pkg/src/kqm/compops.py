"""k-quasi-m-isometric composition operators on one-circuit graphs.

``C_phi`` is a k-quasi-m-isometry iff every branch sequence
``q -> mu(x^r_{i,q})``, ``q >= k+1``, is a polynomial of degree <= m-2 and
the circuit defects ``sum_p (-1)^p C(m,p) h_{p+k}(x_r)`` vanish.  The
circuit conditions are linear in the circuit masses; for ``kappa > m`` the
coefficient matrix is circulant with kernel spanned by the all-ones vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import AdmissibilityError, DomainError
from .exact import Poly, Q, binomial_row, fmt, interpolate, lemma_extension
from .graph import (BranchRule, Circuit, CircuitGraph, MeasureModel, boundedness_constant,
                    cyc, h_p_closed)
from .linalg import solve


# ---------------------------------------------------------------------------
# Criterion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchCheck:
    ok: bool
    interpolant: Poly          # through the first m-1 (or m) tested nodes, in the position q
    polynomial: Poly | None    # the certified polynomial when ok


@dataclass(frozen=True)
class KqmReport:
    m: int
    k: int
    branch: dict               # (r, i) -> BranchCheck
    circuit_defects: dict      # r -> Fraction
    bound: Fraction            # boundedness constant M

    @property
    def holds(self) -> bool:
        return all(b.ok for b in self.branch.values()) and \
            all(d == 0 for d in self.circuit_defects.values())

    def to_json(self) -> dict:
        return {
            "m": self.m, "k": self.k, "holds": self.holds, "bound": fmt(self.bound),
            "branches": [
                {"r": r, "i": i, "ok": chk.ok, "interpolant": [fmt(c) for c in chk.interpolant.coeffs]}
                for (r, i), chk in sorted(self.branch.items())
            ],
            "circuit_defects": {str(r): fmt(d) for r, d in sorted(self.circuit_defects.items())},
        }


def _branch_check(rule: BranchRule, start: int, max_degree: int) -> BranchCheck:
    nodes = range(start, start + max(max_degree + 1, 1))
    interp = interpolate([(q, rule.mass(q)) for q in nodes])
    poly = rule.polynomial_from(start, max_degree)
    return BranchCheck(poly is not None, interp, poly)


def circuit_defect(mu: MeasureModel, r: int, m: int, k: int) -> Fraction:
    return sum((c * h_p_closed(Circuit(r), p + k, mu) for p, c in enumerate(binomial_row(m))),
               Fraction(0))


def is_kqm(mu: MeasureModel, m: int, k: int) -> KqmReport:
    g = mu.graph
    branch = {bid: _branch_check(rule, k + 1, m - 2) for bid, rule in mu.branches.items()}
    defects = {r: circuit_defect(mu, r, m, k) for r in range(1, g.kappa + 1)}
    return KqmReport(m, k, branch, defects, boundedness_constant(mu))


# ---------------------------------------------------------------------------
# Circuit masses from branch data
# ---------------------------------------------------------------------------

def branch_tree_mass(mu: MeasureModel, n: int, r: int) -> Fraction:
    """Branch part of ``mu(phi^{-n}{x_r})``: levels ``j <= n`` of branches
    rooted at ``x_s`` with ``s + j = n + r (mod kappa)``."""
    g = mu.graph
    target = cyc(n + r, g.kappa)
    total = Fraction(0)
    for j in range(1, n + 1):
        for s in range(1, g.kappa + 1):
            if cyc(s + j, g.kappa) == target:
                total += mu.level_sum(s, j)
    return total


@dataclass(frozen=True)
class CirculantSystem:
    """``A X = B`` with ``X_q = mu(x_{labels[q]})``, ``labels[q] = Phi2(k + q + 1)``."""
    A: tuple
    B: tuple
    labels: tuple

    def natural(self) -> tuple:
        """``(A', B)`` with columns reordered to ``mu(x_1), ..., mu(x_kappa)``."""
        kappa = len(self.labels)
        cols = [self.labels.index(c) for c in range(1, kappa + 1)]
        return tuple(tuple(row[q] for q in cols) for row in self.A), self.B


def circuit_system(mu: MeasureModel, m: int, k: int) -> CirculantSystem:
    """Assemble the circuit conditions; the circuit masses of ``mu`` are ignored.

    For ``kappa <= m`` the binomial coefficients wrap around and add up; the
    matrix is then still circulant but no longer banded.
    """
    kappa = mu.graph.kappa
    a = binomial_row(m)
    A = []
    B = []
    for r in range(1, kappa + 1):
        row = [Fraction(0)] * kappa
        for p, ap in enumerate(a):
            row[cyc(r + p, kappa) - 1] += ap
        A.append(tuple(row))
        B.append(-sum((ap * branch_tree_mass(mu, p + k, r) for p, ap in enumerate(a)), Fraction(0)))
    labels = tuple(cyc(k + q, kappa) for q in range(1, kappa + 1))
    return CirculantSystem(tuple(A), tuple(B), labels)


@dataclass(frozen=True)
class MassSolutionFamily:
    """Circuit masses ``base + t * direction``, positive exactly for
    ``t_lower < t < t_upper`` (``None`` meaning unbounded)."""
    base: tuple
    direction: tuple | None
    t_lower: Fraction | None
    t_upper: Fraction | None

    def member(self, t=0) -> tuple:
        if self.direction is None:
            return self.base
        t = Q(t)
        return tuple(b + t * d for b, d in zip(self.base, self.direction))

    def admits(self, t) -> bool:
        t = Q(t)
        return (self.t_lower is None or t > self.t_lower) and (self.t_upper is None or t < self.t_upper)

    def sample_t(self) -> Fraction:
        lo, hi = self.t_lower, self.t_upper
        if lo is not None and hi is not None:
            return (lo + hi) / 2
        if lo is not None:
            return lo + 1
        if hi is not None:
            return hi - 1
        return Fraction(0)

    def sample(self) -> tuple:
        return self.member(self.sample_t())

    @property
    def translation_invariant(self) -> bool:
        """True when the kernel direction is the all-ones vector."""
        return self.direction is not None and all(d == 1 for d in self.direction)

    def to_json(self) -> dict:
        opt = lambda x: None if x is None else fmt(x)
        return {
            "base": [fmt(x) for x in self.base],
            "direction": None if self.direction is None else [fmt(x) for x in self.direction],
            "t_lower": opt(self.t_lower),
            "t_upper": opt(self.t_upper),
            "sample_t": fmt(self.sample_t()),
        }


@dataclass(frozen=True)
class Infeasible:
    reason: str
    residual: Fraction | None = None

    def to_json(self) -> dict:
        return {"reason": self.reason, "residual": None if self.residual is None else fmt(self.residual)}


def positivity_family(base: Sequence, kernel: Sequence) -> MassSolutionFamily | Infeasible:
    """Turn a particular solution and a kernel basis into a positive family."""
    base = tuple(base)
    if not kernel:
        if all(x > 0 for x in base):
            return MassSolutionFamily(base, None, None, None)
        return Infeasible("unique solution is not positive")
    if len(kernel) > 1:
        raise NotImplementedError(f"kernel of dimension {len(kernel)}; only lines are supported")
    d = kernel[0]
    at = next(i for i, x in enumerate(d) if x != 0)
    d = tuple(x / d[at] for x in d)
    # canonical base: zero in the first coordinate the direction moves
    base = tuple(b - base[at] * di for b, di in zip(base, d))
    lo = hi = None
    for b, di in zip(base, d):
        if di > 0:
            lo = -b / di if lo is None else max(lo, -b / di)
        elif di < 0:
            hi = -b / di if hi is None else min(hi, -b / di)
        elif b <= 0:
            return Infeasible("a circuit mass is fixed at a non-positive value")
    if lo is not None and hi is not None and lo >= hi:
        return Infeasible("no positive member in the solution line")
    return MassSolutionFamily(base, d, lo, hi)


def solve_circuit(mu: MeasureModel, m: int, k: int) -> MassSolutionFamily | Infeasible:
    """Circuit masses making ``C_phi`` a k-quasi-m-isometry for the given branches."""
    g = mu.graph
    if not g.kappa > m >= 2:
        raise AdmissibilityError(f"need kappa > m >= 2, got kappa={g.kappa}, m={m}")
    for bid, rule in mu.branches.items():
        if rule.polynomial_from(k + 1, m - 2) is None:
            raise AdmissibilityError(f"branch {bid} is not a polynomial of degree <= {m - 2} from q={k + 1}")
    system = circuit_system(mu, m, k)
    sol = solve(system.A, system.B)
    if sol.particular is None:
        return Infeasible("circuit system is inconsistent", sol.residual)
    base = [Fraction(0)] * g.kappa
    kernel = [[Fraction(0)] * g.kappa for _ in sol.kernel]
    for q, c in enumerate(system.labels):
        base[c - 1] = sol.particular[q]
        for kv, src in zip(kernel, sol.kernel):
            kv[c - 1] = src[q]
    return positivity_family(base, [tuple(v) for v in kernel])


# ---------------------------------------------------------------------------
# Closed forms for 1-quasi-3-isometries, kappa in {2, 3, 4}
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AffineData:
    """Per circuit vertex: level-1 mass sum ``L``, and ``c``, ``d`` with
    ``sum_i mu(x^r_{i,j+1}) = c + d (j - 1)``."""
    L: tuple
    c: tuple
    d: tuple

    @classmethod
    def from_model(cls, mu: MeasureModel) -> "AffineData":
        kappa = mu.graph.kappa
        for bid, rule in mu.branches.items():
            if rule.polynomial_from(2, 1) is None:
                raise AdmissibilityError(f"branch {bid} is not affine from j=2")
        L = tuple(mu.level_sum(r, 1) for r in range(1, kappa + 1))
        c = tuple(mu.level_sum(r, 2) for r in range(1, kappa + 1))
        d = tuple(mu.level_sum(r, 3) - mu.level_sum(r, 2) for r in range(1, kappa + 1))
        return cls(L, c, d)


@dataclass(frozen=True)
class Constraint:
    name: str
    lhs: Fraction
    rhs: Fraction

    @property
    def satisfied(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True)
class Characterization:
    """Circuit masses ``mu(x_r) = W(r)`` with ``W(x) = a x^2 + b x + t``,
    positive exactly for ``t > t_lower``."""
    kappa: int
    a: Fraction
    b: Fraction
    t_lower: Fraction
    constraints: tuple
    literal: bool = False

    def masses(self, t) -> tuple:
        t = Q(t)
        return tuple(self.a * r * r + self.b * r + t for r in range(1, self.kappa + 1))

    def sample(self) -> tuple:
        return self.masses(self.t_lower + 1)

    def to_json(self) -> dict:
        return {
            "kappa": self.kappa, "a": fmt(self.a), "b": fmt(self.b),
            "t_lower": fmt(self.t_lower), "literal": self.literal,
            "constraints": [{"name": c.name, "lhs": fmt(c.lhs), "rhs": fmt(c.rhs),
                             "satisfied": c.satisfied} for c in self.constraints],
            "sample_masses": [fmt(x) for x in self.sample()],
        }


def _closed_form(kappa: int, data: AffineData, literal: bool) -> tuple:
    """``(a, b, constraints)``; for kappa = 2 only ``3a + b`` is determined and
    ``a = 0`` is returned."""
    L, c, d = data.L, data.c, data.d
    if kappa == 2:
        if literal:
            three_a_b = (7 * L[0] - 5 * c[0] + d[0] - 2 * c[1] - d[1]) / (2 * kappa)
            cons = (Constraint("L1 + L2 = c1 + c2", L[0] + L[1], c[0] + c[1]),)
        else:
            three_a_b = L[1] - L[0] + (2 * c[0] - 2 * c[1] - d[0] + d[1]) / 4
            cons = ()
        return Fraction(0), three_a_b, cons
    if kappa == 3:
        a = (6 * L[0] - 3 * L[1] - 3 * L[2] - 3 * c[0] + d[0] + d[1] + 3 * c[2] - 2 * d[2]) / (2 * kappa)
        b = (-24 * L[0] + 9 * L[1] + 15 * L[2] + 11 * c[0] - 3 * d[0] + 2 * c[1] - 5 * d[1]
             - 13 * c[2] + 8 * d[2]) / (2 * kappa)
        return a, b, ()
    if kappa == 4:
        cons = (Constraint("-3L1 + 3L2 - L3 + L4 = -2c1 + d1 + c2 + c4 - d4",
                           -3 * L[0] + 3 * L[1] - L[2] + L[3],
                           -2 * c[0] + d[0] + c[1] + c[3] - d[3]),)
        a = (-L[0] + 5 * L[1] - 3 * L[2] - L[3] + 2 * c[0] - 2 * d[0] - 3 * c[1] + d[1]
             + d[2] + c[3]) / (2 * kappa)
        b_num = (2 * L[0] - 12 * L[1] + 6 * L[2] + 4 * L[3] - 5 * c[0] + 5 * d[0] + 7 * c[1]
                 - 2 * d[1] + c[2] - 3 * d[2] - 3 * c[3])
        b = b_num / (2 * kappa) if literal else b_num / kappa
        return a, b, cons
    raise DomainError(f"closed forms exist for kappa in {{2, 3, 4}}, not {kappa}")


def characterize_1q3(mu: MeasureModel, kappa: int | None = None,
                     literal: bool = False) -> Characterization | Infeasible:
    """Circuit masses for a 1-quasi-3-isometry from affine branch data.

    ``literal=True`` applies the published displays verbatim, including the
    kappa = 2 side condition and the kappa = 4 ``b`` normalization; the
    default uses the values that make every circuit defect vanish.
    """
    g = mu.graph
    if kappa is not None and kappa != g.kappa:
        raise DomainError(f"--kappa {kappa} does not match the graph's kappa {g.kappa}")
    data = AffineData.from_model(mu)
    a, b, cons = _closed_form(g.kappa, data, literal)
    for con in cons:
        if not con.satisfied:
            return Infeasible(f"constraint violated: {con.name}", con.lhs - con.rhs)
    t_lower = max(-(a * r * r + b * r) for r in range(1, g.kappa + 1))
    return Characterization(g.kappa, a, b, t_lower, cons, literal)


# ---------------------------------------------------------------------------
# Single-branch completion (kappa = 1, eta = 1)
# ---------------------------------------------------------------------------

def complete_single_branch(b: Sequence, k: int, m: int, t="auto", root_mass=1,
                           filler=1) -> MeasureModel:
    """Measure on the one-branch graph with ``mu(x_n) = b_n`` for ``n <= m``
    whose composition operator is a k-quasi-(m+2)-isometry.

    From position ``k+1`` on the masses follow a polynomial ``w`` of degree
    ``m`` in ``j = q - k`` (built by :func:`lemma_extension`; unspecified
    nodes take ``filler``).  For ``m = 1`` the tail is the constant
    ``filler`` and the operator is a k-quasi-2-isometry.
    """
    bs = tuple(Q(x) for x in b)
    if len(bs) != m or m < 1 or k < 1:
        raise DomainError(f"need m >= 1 initial masses and k >= 1, got {len(bs)} masses, m={m}, k={k}")
    if any(x <= 0 for x in bs) or Q(filler) <= 0 or Q(root_mass) <= 0:
        raise DomainError("masses must be positive")
    filler = Q(filler)
    prefix = tuple(bs[q - 1] if q <= m else filler for q in range(1, k + 1))
    if m == 1:
        tail = Poly.const(filler)
    else:
        nodes = [bs[k + j - 1] if k + j <= m else filler for j in range(1, m + 1)]
        _, w0 = lemma_extension(nodes, t)        # w0(n) = w(n + 1)
        tail = w0.shift(-(k + 1))                # tail(q) = w(q - k)
    graph = CircuitGraph(1, (1,))
    return MeasureModel(graph, {(1, 1): BranchRule(prefix=prefix, tail=tail)}, (Q(root_mass),))
