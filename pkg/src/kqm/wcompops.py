"""Weighted composition operators ``W f = pi * (f o phi)`` on one-circuit graphs.

``W*^n W^n`` is multiplication by ``h_n F_n`` where ``F_n o phi^n`` is the
conditional expectation of ``pi_n^2`` on ``phi^{-n}F``.  On a branch vertex
``x_q`` this gives ``h_n F_n(x_q) = u(q + n) / u(q)`` with

    u(q) = pi_q(x_q)^2 mu(x_q),    pi_q(x_q) = pi(x_q) pi(x_{q-1}) ... pi(x_1),

so the branch part of the k-quasi-m criterion asks ``u`` to be a polynomial
of degree <= m-1 from ``q = k+1`` on.  The variant with ``pi_k^2`` in place
of ``pi_q^2`` is reported separately as the literal reading.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .compops import BranchCheck, Infeasible, MassSolutionFamily, positivity_family
from .errors import AdmissibilityError, ConstructionError, DomainError, PositivityError
from .exact import Poly, Q, binomial_row, fmt, interpolate, lemma_extension
from .graph import (Branch, BranchRule, Circuit, CircuitGraph, MeasureModel, Vertex, cyc,
                    eventually_polynomial, h_p_closed, label, phi, phi_power,
                    preimage, vertex_key, vertices)
from .linalg import solve


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightRule:
    """``pi(x_j)`` along one branch: explicit prefix, then the constant ``tail``."""
    prefix: tuple = ()
    tail: Fraction = Fraction(1)

    def __post_init__(self):
        prefix = tuple(Q(x) for x in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "tail", Q(self.tail))
        if any(x <= 0 for x in prefix) or self.tail <= 0:
            raise DomainError("weights must be positive")

    @property
    def tail_from(self) -> int:
        return len(self.prefix) + 1

    def value(self, j: int) -> Fraction:
        return self.prefix[j - 1] if j <= len(self.prefix) else self.tail

    def squared_product(self, q: int) -> Fraction:
        """``pi_q(x_q)^2 = prod_{t=1}^{q} pi(x_t)^2``."""
        out = Fraction(1)
        for t in range(1, q + 1):
            out *= self.value(t) ** 2
        return out

    def sup(self) -> Fraction:
        return max(self.prefix + (self.tail,))


@dataclass(frozen=True)
class WeightFunction:
    graph: CircuitGraph
    circuit: tuple                                    # pi(x_1) .. pi(x_kappa)
    branches: Mapping = field(default_factory=dict)   # (r, i) -> WeightRule

    def __post_init__(self):
        cv = tuple(Q(x) for x in self.circuit)
        if len(cv) != self.graph.kappa:
            raise DomainError(f"need {self.graph.kappa} circuit weights, got {len(cv)}")
        if any(x <= 0 for x in cv):
            raise DomainError("weights must be positive")
        object.__setattr__(self, "circuit", cv)
        ids = self.graph.branch_ids()
        extra = [b for b in self.branches if b not in ids]
        if extra:
            raise DomainError(f"weights for nonexistent branches {extra}")
        # branches without an explicit rule carry weight 1
        full = {b: self.branches.get(b, WeightRule()) for b in ids}
        object.__setattr__(self, "branches", full)

    @classmethod
    def constant(cls, g: CircuitGraph, c=1) -> "WeightFunction":
        c = Q(c)
        return cls(g, (c,) * g.kappa, {b: WeightRule((), c) for b in g.branch_ids()})

    def value(self, v: Vertex) -> Fraction:
        if isinstance(v, Circuit):
            return self.circuit[v.r - 1]
        return self.branches[(v.r, v.i)].value(v.j)

    def sup(self) -> Fraction:
        return max(self.circuit + tuple(w.sup() for w in self.branches.values()))

    @property
    def is_one(self) -> bool:
        return all(x == 1 for x in self.circuit) and all(
            w.tail == 1 and all(x == 1 for x in w.prefix) for w in self.branches.values())


def pi_p(v: Vertex, p: int, pi: WeightFunction, g: CircuitGraph) -> Fraction:
    """``pi(v) pi(phi v) ... pi(phi^{p-1} v)``, unsquared."""
    out = Fraction(1)
    for _ in range(p):
        out *= pi.value(v)
        v = phi(v, g)
    return out


def weighted_boundedness_constant(mu: MeasureModel, pi: WeightFunction) -> Fraction:
    """Weighted analogue of :func:`graph.boundedness_constant`: level-one sums
    ``sum_i pi^2 mu`` and ``sup_j pi(x_{j+1})^2 mu(x_{j+1}) / mu(x_j)``."""
    g = mu.graph
    vals = []
    for r in range(1, g.kappa + 1):
        vals.append(sum((pi.value(Branch(r, i, 1)) ** 2 * mu.mass(Branch(r, i, 1))
                         for i in range(1, g.eta(r) + 1)), Fraction(0)))
    for bid, rule in mu.branches.items():
        w = pi.branches[bid]
        # beyond both the weight prefix and the monotone point the product is non-increasing
        last = max(rule.monotone_from(), w.tail_from)
        vals.append(max(w.value(j + 1) ** 2 * rule.step_ratio(j) for j in range(1, last + 1)))
    return max(vals)


# ---------------------------------------------------------------------------
# Conditional expectations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CondExpTable:
    """``F_p(v)`` for every vertex of depth <= ``depth``; ``E_p(pi_p^2) = F_p o phi^p``."""
    p: int
    depth: int
    values: Mapping

    def F(self, v: Vertex) -> Fraction:
        return self.values[v]

    def E(self, x: Vertex, g: CircuitGraph) -> Fraction:
        """``E_p(pi_p^2)(x)``; needs ``phi^p(x)`` inside the table."""
        return self.values[phi_power(x, self.p, g)]

    def to_json(self) -> dict:
        return {"p": self.p, "depth": self.depth,
                "F": {label(v): fmt(x) for v, x in sorted(self.values.items(),
                                                         key=lambda kv: vertex_key(kv[0]))}}


def _circuit_tree(mu: MeasureModel, pi: WeightFunction, r: int, p: int) -> tuple:
    """``(weighted mass, mass)`` of ``phi^{-p}{x_r}`` from the two-part description:
    one circuit vertex plus branch levels ``j <= p`` rooted where ``s + j = p + r``."""
    g = mu.graph
    target = cyc(p + r, g.kappa)
    x = Circuit(target)
    weighted = pi_p(x, p, pi, g) ** 2 * mu.mass(x)
    plain = mu.mass(x)
    for j in range(1, p + 1):
        for s in range(1, g.kappa + 1):
            if cyc(s + j, g.kappa) != target:
                continue
            for i in range(1, g.eta(s) + 1):
                y = Branch(s, i, j)
                weighted += pi_p(y, p, pi, g) ** 2 * mu.mass(y)
                plain += mu.mass(y)
    return weighted, plain


def cond_exp(p: int, pi: WeightFunction, mu: MeasureModel, depth: int) -> CondExpTable:
    """Closed-form table: ``K^r_{i,j+p} = pi_p^2(x^r_{i,j+p})`` on branches and
    the mass-weighted quotient ``K^r_p`` on the circuit (needs ``p >= kappa``)."""
    g = mu.graph
    if p < g.kappa:
        raise DomainError(f"closed-form circuit entries need p >= kappa = {g.kappa}, got p={p}")
    values = {}
    for r in range(1, g.kappa + 1):
        weighted, plain = _circuit_tree(mu, pi, r, p)
        values[Circuit(r)] = weighted / plain
    for r, i in g.branch_ids():
        for j in range(1, depth + 1):
            values[Branch(r, i, j)] = pi_p(Branch(r, i, j + p), p, pi, g) ** 2
    return CondExpTable(p, depth, values)


def atom_oracle(p: int, pi: WeightFunction, mu: MeasureModel, depth: int) -> CondExpTable:
    """Average ``pi_p^2`` over each atom of ``phi^{-p}F``.

    Atoms are found by grouping vertices on their forward image ``phi^p``,
    which keeps this independent of the preimage enumeration used elsewhere.
    Every preimage of a vertex of depth <= ``depth`` has depth <= ``depth + p``.
    """
    g = mu.graph
    weighted: dict = defaultdict(Fraction)
    plain: dict = defaultdict(Fraction)
    for x in vertices(g, depth + p):
        v = phi_power(x, p, g)
        if isinstance(v, Branch) and v.j > depth:
            continue
        weight = pi_p(x, p, pi, g) ** 2
        weighted[v] += weight * mu.mass(x)
        plain[v] += mu.mass(x)
    return CondExpTable(p, depth, {v: weighted[v] / plain[v] for v in plain})


def hF(v: Vertex, n: int, mu: MeasureModel, pi: WeightFunction) -> Fraction:
    """``h_n F_n(v)``: closed form for ``n >= kappa`` on the circuit, the atom otherwise."""
    g = mu.graph
    if isinstance(v, Branch):
        w = pi.branches[(v.r, v.i)]
        u = lambda q: w.squared_product(q) * mu.mass(Branch(v.r, v.i, q))
        return u(v.j + n) / u(v.j)
    if n >= g.kappa:
        weighted, plain = _circuit_tree(mu, pi, v.r, n)
        return h_p_closed(v, n, mu) * (weighted / plain)
    total = sum((pi_p(y, n, pi, g) ** 2 * mu.mass(y) for y in preimage(v, n, g)), Fraction(0))
    return total / mu.mass(v)


# ---------------------------------------------------------------------------
# Criterion
# ---------------------------------------------------------------------------

def _check(value, start: int, tail_start: int, tail: Poly, ratio: Fraction,
           max_degree: int) -> BranchCheck:
    nodes = range(start, start + max(max_degree + 1, 1))
    interp = interpolate([(q, value(q)) for q in nodes])
    poly = eventually_polynomial(value, start, tail_start, tail, ratio, max_degree)
    return BranchCheck(poly is not None, interp, poly)


def branch_check(rule: BranchRule, w: WeightRule, k: int, max_degree: int) -> BranchCheck:
    """Is ``q -> pi_q^2(x_q) mu(x_q)`` a polynomial of degree <= ``max_degree`` for ``q >= k+1``?"""
    q0 = max(rule.from_j, w.tail_from, k + 1)
    scale = w.squared_product(q0) * rule.ratio ** (q0 - rule.from_j)
    value = lambda q: w.squared_product(q) * rule.mass(q)
    return _check(value, k + 1, q0, rule.tail * scale, w.tail ** 2 * rule.ratio, max_degree)


def literal_branch_check(rule: BranchRule, w: WeightRule, k: int, max_degree: int) -> BranchCheck:
    """Same test with the fixed-length product ``pi_k^2(x_q)`` in place of ``pi_q^2(x_q)``."""
    def pk2(q):
        out = Fraction(1)
        for t in range(q - k + 1, q + 1):
            out *= w.value(t) ** 2
        return out
    q0 = max(rule.from_j, w.tail_from + k - 1, k + 1)
    scale = w.tail ** (2 * k) * rule.ratio ** (q0 - rule.from_j)
    value = lambda q: pk2(q) * rule.mass(q)
    return _check(value, k + 1, q0, rule.tail * scale, rule.ratio, max_degree)


@dataclass(frozen=True)
class WeightedKqmReport:
    m: int
    k: int
    branch: dict               # (r, i) -> BranchCheck with pi_q^2
    literal_branch: dict       # (r, i) -> BranchCheck with pi_k^2
    circuit_defects: dict      # r -> Fraction
    bound: Fraction

    @property
    def holds(self) -> bool:
        return all(b.ok for b in self.branch.values()) and \
            all(d == 0 for d in self.circuit_defects.values())

    def to_json(self) -> dict:
        return {
            "m": self.m, "k": self.k, "holds": self.holds, "bound": fmt(self.bound),
            "branches": [
                {"r": r, "i": i, "ok": chk.ok, "literal_ok": self.literal_branch[(r, i)].ok,
                 "interpolant": [fmt(c) for c in chk.interpolant.coeffs]}
                for (r, i), chk in sorted(self.branch.items())
            ],
            "circuit_defects": {str(r): fmt(d) for r, d in sorted(self.circuit_defects.items())},
        }


def weighted_circuit_defect(mu: MeasureModel, pi: WeightFunction, r: int, m: int, k: int) -> Fraction:
    return sum((c * hF(Circuit(r), p + k, mu, pi) for p, c in enumerate(binomial_row(m))),
               Fraction(0))


def is_kqm_weighted(mu: MeasureModel, pi: WeightFunction, m: int, k: int) -> WeightedKqmReport:
    g = mu.graph
    branch = {bid: branch_check(rule, pi.branches[bid], k, m - 1) for bid, rule in mu.branches.items()}
    literal = {bid: literal_branch_check(rule, pi.branches[bid], k, m - 1)
               for bid, rule in mu.branches.items()}
    defects = {r: weighted_circuit_defect(mu, pi, r, m, k) for r in range(1, g.kappa + 1)}
    return WeightedKqmReport(m, k, branch, literal, defects, weighted_boundedness_constant(mu, pi))


# ---------------------------------------------------------------------------
# Circuit masses from branch data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightedSystem:
    """``A X = B`` in the natural unknowns ``X_r = mu(x_r)``."""
    A: tuple
    B: tuple


def weighted_circuit_system(mu: MeasureModel, pi: WeightFunction, m: int, k: int) -> WeightedSystem:
    """Row ``r``: ``sum_p a_p [pi_n^2(x_t) X_t + branch part]`` with ``n = p + k``
    and ``t = Phi2(n + r)``; the circuit masses of ``mu`` are ignored."""
    g = mu.graph
    probe = mu.with_circuit_masses((1,) * g.kappa)
    A, B = [], []
    for r in range(1, g.kappa + 1):
        row = [Fraction(0)] * g.kappa
        rhs = Fraction(0)
        for p, ap in enumerate(binomial_row(m)):
            n = p + k
            t = cyc(n + r, g.kappa)
            coeff = pi_p(Circuit(t), n, pi, g) ** 2
            row[t - 1] += ap * coeff
            weighted, _ = _circuit_tree(probe, pi, r, n)
            rhs -= ap * (weighted - coeff)        # drop the circuit term (unit mass)
        A.append(tuple(row))
        B.append(rhs)
    return WeightedSystem(tuple(A), tuple(B))


def solve_weighted_circuit(mu: MeasureModel, pi: WeightFunction, m: int,
                           k: int) -> MassSolutionFamily | Infeasible:
    """Circuit masses making ``W`` a k-quasi-m-isometry for the given branches.

    The kernel direction is whatever elimination finds; it is the all-ones
    vector only when the weighted row sums vanish.
    """
    g = mu.graph
    if not g.kappa > m >= 2:
        raise AdmissibilityError(f"need kappa > m >= 2, got kappa={g.kappa}, m={m}")
    for bid, rule in mu.branches.items():
        if not branch_check(rule, pi.branches[bid], k, m - 1).ok:
            raise AdmissibilityError(
                f"branch {bid}: pi_q^2 mu is not a polynomial of degree <= {m - 1} from q={k + 1}")
    system = weighted_circuit_system(mu, pi, m, k)
    sol = solve(system.A, system.B)
    if sol.particular is None:
        return Infeasible("circuit system is inconsistent", sol.residual)
    return positivity_family(sol.particular, list(sol.kernel))


# ---------------------------------------------------------------------------
# Single-branch completion (kappa = 1, eta = 1)
# ---------------------------------------------------------------------------

def _solve_recurrence(U: Poly, c2: Fraction) -> Poly:
    """The polynomial ``Q`` with ``Q(x) - c2 Q(x-1) = U(x)``, for ``c2 != 1``."""
    Qp = Poly.const(0)
    R = U
    while not R.is_zero():
        d = R.degree
        term = Poly(tuple([Fraction(0)] * d + [R.lead / (1 - c2)]))
        Qp = Qp + term
        R = R - (term - term.shift(-1) * c2)
    return Qp


def complete_single_branch_weighted(b: Sequence, pi: WeightFunction | None, k: int, m: int,
                                    t="auto", root_mass=None, filler=1,
                                    max_doublings: int = 256) -> MeasureModel:
    """Measure on the one-branch graph with ``mu(x_n) = b_n`` for ``n <= m`` whose
    weighted composition operator is a k-quasi-(m+1)-isometry.

    With ``u(q) = pi_q^2(x_q) mu(x_q)`` the branch masses follow a polynomial
    ``U`` for ``q >= k+1`` and the root mass makes the circuit moments
    polynomial.  For ``c = pi(x_1) = 1`` the root mass is free (``root_mass``,
    default 1) and ``deg U <= m-1``.  For ``c < 1`` the root mass is forced and
    ``U`` (degree <= m) is searched until it is positive.  ``c > 1`` admits no
    solution: the circuit moments then grow geometrically.
    """
    bs = tuple(Q(x) for x in b)
    if len(bs) != m or m < 1 or k < 1:
        raise DomainError(f"need m >= 1 initial masses and k >= 1, got {len(bs)} masses, m={m}, k={k}")
    filler = Q(filler)
    if any(x <= 0 for x in bs) or filler <= 0:
        raise DomainError("masses must be positive")
    graph = CircuitGraph(1, (1,))
    if pi is None:
        pi = WeightFunction.constant(graph)
    if pi.graph != graph:
        raise DomainError("weights must live on the one-branch graph")
    w = pi.branches[(1, 1)]
    c2 = pi.circuit[0] ** 2
    if c2 > 1:
        raise ConstructionError("pi(x_1) > 1: circuit moments grow geometrically, no completion exists")

    def given(q):
        return bs[q - 1] if q <= m else filler
    u = lambda q: w.squared_product(q) * given(q)
    data = [u(q) for q in range(k + 1, m + 1)]       # node n = q - (k+1)

    if c2 == 1:
        root = Fraction(1) if root_mass is None else Q(root_mass)
        if root <= 0:
            raise DomainError("root mass must be positive")
        if m == 1 or not data:
            U = Poly.const(filler)
        else:
            _, w0 = lemma_extension(data, t)
            U = w0.shift(-(k + 1))
    else:
        if root_mass is not None:
            raise DomainError("the root mass is forced when pi(x_1) != 1")
        U, root = _search_contracting(data, u, k, c2, t, filler, max_doublings)

    q0 = max(k + 1, w.tail_from)
    prefix = tuple(given(q) if q <= k else U(q) / w.squared_product(q) for q in range(1, q0))
    tail = U / w.squared_product(q0)
    rule = BranchRule(prefix=prefix, tail=tail, from_j=q0, ratio=1 / w.tail ** 2)
    return MeasureModel(graph, {(1, 1): rule}, (root,))


def _search_contracting(data: list, u, k: int, c2: Fraction, t, filler: Fraction,
                        max_doublings: int) -> tuple:
    """Find ``U`` through ``data`` and the forced root mass, positive, for ``c2 < 1``.

    The root mass is ``(Q(k) - sum_{j<=k} u(j) c2^(k-j)) / c2^k``.  Large values
    at the free node make it positive once the node count is even, because
    ``U`` then grows to the left of the data as well.
    """
    def root_of(U):
        Qp = _solve_recurrence(U, c2)
        rest = sum((u(j) * c2 ** (k - j) for j in range(1, k + 1)), Fraction(0))
        return (Qp(k) - rest) / c2 ** k

    if not data:
        C = filler
        for _ in range(max_doublings):
            U = Poly.const(C)
            root = root_of(U)
            if root > 0:
                return U, root
            C *= 2
        raise ConstructionError("no positive root mass found")
    nodes = list(data) if len(data) % 2 == 0 else list(data) + [filler]
    if t != "auto":
        _, w0 = lemma_extension(nodes, t)
        U = w0.shift(-(k + 1))
        root = root_of(U)
        if root <= 0:
            raise ConstructionError(f"t={fmt(Q(t))} forces a non-positive root mass {fmt(root)}")
        return U, root
    tv, _ = lemma_extension(nodes, "auto")
    for _ in range(max_doublings):
        try:
            _, w0 = lemma_extension(nodes, tv)
        except PositivityError:
            tv *= 2
            continue
        U = w0.shift(-(k + 1))
        root = root_of(U)
        if root > 0:
            return U, root
        tv *= 2
    raise ConstructionError("doubling search found no positive root mass")
