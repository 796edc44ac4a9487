"""Directed graphs with one circuit and finitely many branches per circuit vertex.

Vertices are ``Circuit(r)`` for ``r = 1..kappa`` and ``Branch(r, i, j)``,
the ``j``-th vertex on the ``i``-th branch hanging off ``x_r``.  The parent
map sends each vertex one step toward the circuit and each circuit vertex to
its predecessor:

    Branch(r, i, j+1) -> Branch(r, i, j)
    Branch(r, i, 1)   -> Circuit(r)
    Circuit(r)        -> Circuit(r - 1)   (cyclically)

Measures are atomic and described finitely: circuit masses plus, for every
branch, a prefix of explicit masses followed by a tail
``mu(x_j) = p(j) * ratio**(j - from_j)`` for a polynomial ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import CapError, DomainError
from .exact import Poly, Q, fmt, positive_from


@dataclass(frozen=True, order=True)
class Circuit:
    r: int


@dataclass(frozen=True, order=True)
class Branch:
    r: int
    i: int
    j: int


Vertex = Union[Circuit, Branch]


def vertex_key(v: Vertex) -> tuple:
    return (0, v.r, 0, 0) if isinstance(v, Circuit) else (1, v.r, v.i, v.j)


def depth(v: Vertex) -> int:
    return 0 if isinstance(v, Circuit) else v.j


def label(v: Vertex) -> str:
    return f"x{v.r}" if isinstance(v, Circuit) else f"x{v.r}_{v.i},{v.j}"


@dataclass(frozen=True)
class CircuitGraph:
    kappa: int
    etas: tuple

    def __post_init__(self):
        etas = tuple(int(e) for e in self.etas)
        if self.kappa < 1:
            raise DomainError("kappa must be >= 1")
        if len(etas) != self.kappa:
            raise DomainError(f"need {self.kappa} branch counts, got {len(etas)}")
        if any(e < 0 for e in etas):
            raise DomainError("branch counts must be non-negative")
        if not any(etas):
            raise DomainError("at least one branch count must be nonzero")
        object.__setattr__(self, "etas", etas)

    def eta(self, r: int) -> int:
        return self.etas[r - 1]

    def branch_ids(self) -> list:
        return [(r, i) for r in range(1, self.kappa + 1) for i in range(1, self.eta(r) + 1)]

    def contains(self, v: Vertex) -> bool:
        if not 1 <= v.r <= self.kappa:
            return False
        if isinstance(v, Circuit):
            return True
        return 1 <= v.i <= self.eta(v.r) and v.j >= 1


# ---------------------------------------------------------------------------
# Parent map and preimages
# ---------------------------------------------------------------------------

def phi2(p: int, kappa: int) -> tuple:
    """Split ``p = Phi1 * kappa + Phi2`` with ``Phi2`` in ``1..kappa``."""
    phi1, rem = divmod(p - 1, kappa)
    return phi1, rem + 1


def cyc(p: int, kappa: int) -> int:
    """Just the ``Phi2`` part: the circuit index congruent to ``p``."""
    return (p - 1) % kappa + 1


def phi(v: Vertex, g: CircuitGraph) -> Vertex:
    if isinstance(v, Branch):
        return Branch(v.r, v.i, v.j - 1) if v.j > 1 else Circuit(v.r)
    return Circuit(cyc(v.r - 1, g.kappa))


def phi_power(v: Vertex, p: int, g: CircuitGraph) -> Vertex:
    for _ in range(p):
        v = phi(v, g)
    return v


def children(v: Vertex, g: CircuitGraph) -> list:
    """One-step preimage ``phi^{-1}({v})``."""
    if isinstance(v, Branch):
        return [Branch(v.r, v.i, v.j + 1)]
    out = [Circuit(cyc(v.r + 1, g.kappa))]
    out.extend(Branch(v.r, i, 1) for i in range(1, g.eta(v.r) + 1))
    return out


def preimage(v: Vertex, p: int, g: CircuitGraph, depth_cap: int | None = None) -> set:
    """``phi^{-p}({v})``, enumerated level by level.

    Raises :class:`CapError` if a preimage vertex lies deeper than ``depth_cap``.
    """
    if p < 0:
        raise ValueError("p must be non-negative")
    level = {v}
    for _ in range(p):
        level = {c for u in level for c in children(u, g)}
    if depth_cap is not None:
        deep = [u for u in level if depth(u) > depth_cap]
        if deep:
            raise CapError(f"preimage reaches depth {max(map(depth, deep))} > cap {depth_cap}")
    return level


def vertices(g: CircuitGraph, max_depth: int) -> list:
    """All vertices of depth <= ``max_depth`` in canonical order."""
    out: list = [Circuit(r) for r in range(1, g.kappa + 1)]
    out.extend(Branch(r, i, j) for r, i in g.branch_ids() for j in range(1, max_depth + 1))
    return out


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchRule:
    """Masses ``mu(x_j)`` along one branch, ``j >= 1``.

    Explicit ``prefix`` values cover ``j = 1..len(prefix)``; afterwards
    ``mu(x_j) = tail(j) * ratio**(j - from_j)``.  When ``from_j`` lies inside
    the prefix, the overlapping prefix values must agree with the tail.
    """
    prefix: tuple = ()
    tail: Poly = Poly.const(1)
    from_j: int | None = None
    ratio: Fraction = Fraction(1)

    def __post_init__(self):
        prefix = tuple(Q(x) for x in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        object.__setattr__(self, "ratio", Q(self.ratio))
        from_j = len(prefix) + 1 if self.from_j is None else int(self.from_j)
        object.__setattr__(self, "from_j", from_j)
        if from_j < 1 or from_j > len(prefix) + 1:
            raise DomainError(f"tail start {from_j} leaves a gap after a prefix of {len(prefix)}")
        if any(x <= 0 for x in prefix):
            raise DomainError("branch masses must be positive")
        if self.ratio <= 0:
            raise DomainError("tail ratio must be positive")
        ok, witness = positive_from(self.tail, from_j)
        if not ok:
            raise DomainError(f"tail polynomial {self.tail} is not positive at j={witness}")
        for j in range(from_j, len(prefix) + 1):
            if prefix[j - 1] != self._tail_value(j):
                raise DomainError(f"prefix value at j={j} disagrees with the tail")

    @classmethod
    def polynomial(cls, tail: Poly, prefix: Sequence = ()) -> "BranchRule":
        return cls(prefix=tuple(prefix), tail=tail)

    @classmethod
    def affine(cls, level1: Fraction, c: Fraction, d: Fraction) -> "BranchRule":
        """``mu(x_1) = level1`` and ``mu(x_{j+1}) = c + d (j - 1)`` for ``j >= 1``."""
        return cls(prefix=(level1,), tail=Poly.of(Q(c) - 2 * Q(d), d))

    def _tail_value(self, j: int) -> Fraction:
        return self.tail(j) * self.ratio ** (j - self.from_j)

    def mass(self, j: int) -> Fraction:
        if j < 1:
            raise DomainError("branch positions start at 1")
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        return self._tail_value(j)

    def masses(self, count: int) -> list:
        return [self.mass(j) for j in range(1, count + 1)]

    def scaled(self, c: Fraction) -> "BranchRule":
        return replace(self, prefix=tuple(c * x for x in self.prefix), tail=self.tail * c)

    def polynomial_from(self, start: int, max_degree: int) -> Poly | None:
        """The polynomial that ``j -> mu(x_j)`` equals for all ``j >= start``,
        if one of degree <= ``max_degree`` exists."""
        return eventually_polynomial(self.mass, start, self.from_j, self.tail,
                                     self.ratio, max_degree)

    def step_ratio(self, j: int) -> Fraction:
        return self.mass(j + 1) / self.mass(j)

    def monotone_from(self) -> int:
        """Smallest ``J >= from_j`` beyond which ``step_ratio(j)`` is non-increasing.

        Certified through ``p(j+1)^2 - p(j) p(j+2) > 0``, which holds
        eventually for every positive polynomial of degree >= 1.
        """
        p, J = self.tail, self.from_j
        if p.degree <= 0:
            return J
        concavity = p.shift(1) * p.shift(1) - p.shift(2) * p
        while True:
            ok, witness = positive_from(concavity, J)
            if ok:
                return J
            J = witness + 1

    def ratio_sup(self) -> Fraction:
        """Exact ``sup_j mu(x_{j+1}) / mu(x_j)``."""
        return max(self.step_ratio(j) for j in range(1, self.monotone_from() + 1))


def eventually_polynomial(value, start: int, tail_start: int, tail: Poly,
                          ratio: Fraction, max_degree: int) -> Poly | None:
    """Check that ``value(q)`` agrees with one polynomial for all ``q >= start``.

    ``value(q) = tail(q) * ratio**(q - tail_start)`` is known for
    ``q >= tail_start``; values before that are compared individually.
    Returns the polynomial or ``None``.
    """
    if ratio != 1:
        return None
    if tail.degree > max_degree:
        return None
    for q in range(start, tail_start):
        if value(q) != tail(q):
            return None
    return tail


@dataclass(frozen=True)
class MeasureModel:
    graph: CircuitGraph
    branches: Mapping = field(default_factory=dict)   # (r, i) -> BranchRule
    circuit_masses: tuple | None = None

    def __post_init__(self):
        missing = [b for b in self.graph.branch_ids() if b not in self.branches]
        if missing:
            raise DomainError(f"no mass rule for branches {missing}")
        extra = [b for b in self.branches if b not in self.graph.branch_ids()]
        if extra:
            raise DomainError(f"mass rules for nonexistent branches {extra}")
        if self.circuit_masses is not None:
            cm = tuple(Q(x) for x in self.circuit_masses)
            if len(cm) != self.graph.kappa:
                raise DomainError(f"need {self.graph.kappa} circuit masses, got {len(cm)}")
            if any(x <= 0 for x in cm):
                raise DomainError("circuit masses must be positive")
            object.__setattr__(self, "circuit_masses", cm)

    def mass(self, v: Vertex) -> Fraction:
        if isinstance(v, Circuit):
            if self.circuit_masses is None:
                raise DomainError("circuit masses are not specified")
            return self.circuit_masses[v.r - 1]
        return self.branches[(v.r, v.i)].mass(v.j)

    def level_sum(self, r: int, j: int) -> Fraction:
        """``sum_i mu(x^r_{i,j})``."""
        return sum((self.branches[(r, i)].mass(j) for i in range(1, self.graph.eta(r) + 1)),
                   Fraction(0))

    def with_circuit_masses(self, masses: Sequence) -> "MeasureModel":
        return replace(self, circuit_masses=tuple(masses))

    def scaled(self, c) -> "MeasureModel":
        c = Q(c)
        cm = None if self.circuit_masses is None else tuple(c * x for x in self.circuit_masses)
        return MeasureModel(self.graph, {b: rule.scaled(c) for b, rule in self.branches.items()}, cm)


def boundedness_constant(mu: MeasureModel) -> Fraction:
    """Smallest ``M`` with ``sum_i mu(x^r_{i,1}) <= M`` and every branch ratio ``<= M``."""
    g = mu.graph
    vals = [mu.level_sum(r, 1) for r in range(1, g.kappa + 1)]
    vals.extend(rule.ratio_sup() for rule in mu.branches.values())
    return max(vals)


# ---------------------------------------------------------------------------
# Radon-Nikodym derivatives
# ---------------------------------------------------------------------------

def h_p_closed(v: Vertex, p: int, mu: MeasureModel) -> Fraction:
    """``h_p(v)`` from the closed-form expressions on branches and on the circuit."""
    if p == 0:
        return Fraction(1)
    g = mu.graph
    if isinstance(v, Branch):
        return mu.mass(Branch(v.r, v.i, v.j + p)) / mu.mass(v)
    target = cyc(p + v.r, g.kappa)
    num = mu.mass(Circuit(target))
    for j in range(1, p + 1):
        for s in range(1, g.kappa + 1):
            if cyc(s + j, g.kappa) == target:
                num += mu.level_sum(s, j)
    return num / mu.mass(v)


def h_p_oracle(v: Vertex, p: int, mu: MeasureModel, depth_cap: int | None = None) -> Fraction:
    """``mu(phi^{-p}{v}) / mu({v})`` by explicit preimage enumeration."""
    atoms = preimage(v, p, mu.graph, depth_cap)
    return sum((mu.mass(u) for u in atoms), Fraction(0)) / mu.mass(v)


# ---------------------------------------------------------------------------
# Export
# ---------------------------------------------------------------------------

def to_dot(g: CircuitGraph, max_depth: int, mu: MeasureModel | None = None) -> str:
    """Graphviz text for the depth-capped graph; edges point from parent to child."""
    lines = ["digraph circuit {", "  rankdir=LR;"]
    for v in vertices(g, max_depth):
        text = label(v)
        if mu is not None and (isinstance(v, Branch) or mu.circuit_masses is not None):
            text += f"\\n{fmt(mu.mass(v))}"
        shape = "doublecircle" if isinstance(v, Circuit) else "circle"
        lines.append(f'  "{label(v)}" [label="{text}", shape={shape}];')
    for v in vertices(g, max_depth):
        lines.append(f'  "{label(phi(v, g))}" -> "{label(v)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"

