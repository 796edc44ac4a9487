"""Brute-force moment oracle.

For the weighted composition operator ``W f = pi * (f o phi)`` the operator
``W*^n W^n`` is multiplication by

    g_n(v) = sum_{y in phi^{-n}(v)} pi_n(y)^2 mu(y) / mu(v) = ||W^n e_v||^2,

with ``e_v`` the normalized indicator of the atom ``{v}``.  Consequently
``W*^k B_m(W) W^k = 0`` holds exactly when the diagonal defects
``sum_p (-1)^p C(m, p) g_{p+k}(v)`` vanish at every vertex; off-diagonal
entries of a multiplication operator are zero, so no other test is needed.

Nothing here reuses the closed-form expressions of the other modules: every
moment is a sum over an explicitly enumerated preimage set with the weight
product recomputed along each orbit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import binomial_row, fmt
from .graph import MeasureModel, Vertex, label, phi, preimage, vertex_key, vertices


def orbit_weight(y: Vertex, n: int, mu: MeasureModel, pi) -> Fraction:
    """``pi_n(y) = pi(y) pi(phi y) ... pi(phi^{n-1} y)``; 1 when ``pi`` is None."""
    out = Fraction(1)
    if pi is None:
        return out
    for _ in range(n):
        out *= pi.value(y)
        y = phi(y, mu.graph)
    return out


def moment(v: Vertex, n: int, mu: MeasureModel, pi=None, depth_cap: int | None = None) -> Fraction:
    """``||W^n e_v||^2`` (``||C_phi^n e_v||^2`` when ``pi`` is None)."""
    total = Fraction(0)
    for y in preimage(v, n, mu.graph, depth_cap):
        total += orbit_weight(y, n, mu, pi) ** 2 * mu.mass(y)
    return total / mu.mass(v)


@dataclass(frozen=True)
class VertexDefect:
    vertex: Vertex
    moments: tuple      # g_0(v) .. g_{k+m}(v)
    defect: Fraction


@dataclass(frozen=True)
class MomentReport:
    m: int
    k: int
    depth: int
    rows: tuple

    @property
    def all_zero(self) -> bool:
        return all(row.defect == 0 for row in self.rows)

    @property
    def max_abs_defect(self) -> Fraction:
        return max((abs(row.defect) for row in self.rows), default=Fraction(0))

    @property
    def first_failure(self) -> Vertex | None:
        return next((row.vertex for row in self.rows if row.defect != 0), None)

    def to_json(self) -> dict:
        return {
            "m": self.m,
            "k": self.k,
            "depth": self.depth,
            "rows": [
                {"vertex": label(r.vertex), "moments": [fmt(x) for x in r.moments],
                 "defect": fmt(r.defect)}
                for r in self.rows
            ],
            "summary": {
                "all_zero": self.all_zero,
                "max_abs_defect": fmt(self.max_abs_defect),
                "first_failure": None if self.first_failure is None else label(self.first_failure),
            },
        }


def defect_suite(mu: MeasureModel, m: int, k: int, pi=None, depth: int | None = None) -> MomentReport:
    """Defects at every vertex of depth <= ``depth`` (default ``k + m + 8``)."""
    if depth is None:
        depth = k + m + 8
    if depth < k + m + 1:
        raise ValueError(f"depth must be at least k+m+1 = {k + m + 1}")
    coeffs = binomial_row(m)
    rows = []
    for v in sorted(vertices(mu.graph, depth), key=vertex_key):
        ms = tuple(moment(v, n, mu, pi) for n in range(k + m + 1))
        defect = sum((c * ms[p + k] for p, c in enumerate(coeffs)), Fraction(0))
        rows.append(VertexDefect(v, ms, defect))
    return MomentReport(m, k, depth, tuple(rows))
