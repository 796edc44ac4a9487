"""Weighted composition operators W f = pi * (f o phi).

Run with ``python demos/weighted_operators.py``.
"""

from fractions import Fraction

from kqm.exact import Poly, fmt
from kqm.graph import BranchRule, CircuitGraph, Circuit, MeasureModel
from kqm.verify import defect_suite, moment
from kqm.wcompops import (WeightFunction, WeightRule, atom_oracle, complete_single_branch_weighted,
                          cond_exp, hF, is_kqm_weighted, solve_weighted_circuit)
from kqm.errors import ConstructionError

g = CircuitGraph(2, (1, 1))
mu = MeasureModel(g, {(1, 1): BranchRule(prefix=(3,), tail=Poly.of(1)),
                      (2, 1): BranchRule(tail=Poly.of(2))}, (1, 2))
pi = WeightFunction(g, (2, 3), {(1, 1): WeightRule((Fraction(1, 2),), 1)})

# E_2(pi_2^2) is constant on the atoms phi^{-2}{v}; both routes agree.
closed = cond_exp(2, pi, mu, depth=3)
print("F_2(x1) closed form:", fmt(closed.F(Circuit(1))))
print("tables agree:", closed.values == atom_oracle(2, pi, mu, depth=3).values)
# and h_n F_n is the moment ||W^n e_v||^2
print("h_3 F_3(x1) =", fmt(hF(Circuit(1), 3, mu, pi)), "=", fmt(moment(Circuit(1), 3, mu, pi)))

# Solving for circuit masses with a weight that varies along the circuit:
# the solution line is not a translate along (1, 1, 1).
g3 = CircuitGraph(3, (1, 1, 0))
mu3 = MeasureModel(g3, {(1, 1): BranchRule(prefix=(2,), tail=Poly.of(3)),
                        (2, 1): BranchRule(prefix=(1,), tail=Poly.of(2))})
pi3 = WeightFunction(g3, (Fraction(3, 4), 1, Fraction(4, 3)), {})
family = solve_weighted_circuit(mu3, pi3, 2, 1)
print("\nkernel direction:", [fmt(x) for x in family.direction])
print("translation invariant:", family.translation_invariant)
solved = mu3.with_circuit_masses(family.sample())
print("weighted criterion:", is_kqm_weighted(solved, pi3, 2, 1).holds,
      "oracle:", defect_suite(solved, 2, 1, pi3).all_zero)

# One branch on a loop: extend three masses to a k-quasi-4-isometry.
loop = CircuitGraph(1, (1,))
w = WeightFunction(loop, (Fraction(2, 3),), {(1, 1): WeightRule((2, Fraction(1, 3)), Fraction(5, 4))})
mu1 = complete_single_branch_weighted([1, 2, 3], w, k=2, m=3)
print("\nroot mass:", fmt(mu1.circuit_masses[0]))
print("branch masses:", [fmt(x) for x in mu1.branches[(1, 1)].masses(6)])
print("order 4 holds:", is_kqm_weighted(mu1, w, 4, 2).holds)

# A loop weight above 1 makes the circuit moments grow geometrically.
try:
    complete_single_branch_weighted([1, 2, 3], WeightFunction(loop, (2,), {}), k=2, m=3)
except ConstructionError as exc:
    print("pi(x1) = 2:", exc)
