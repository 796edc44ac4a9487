"""Choosing circuit masses so that C_phi is a k-quasi-m-isometry.

Branch masses are given; the circuit conditions are linear in the
circuit masses and solved exactly.  Run with ``python demos/circuit_masses.py``.
"""

from kqm.compops import characterize_1q3, circuit_system, is_kqm, solve_circuit
from kqm.exact import Poly, fmt
from kqm.graph import BranchRule, CircuitGraph, MeasureModel, to_dot
from kqm.verify import defect_suite

# A five-cycle with branches at x1, x2 (two of them) and x4.
g = CircuitGraph(5, (1, 2, 0, 1, 0))
mu = MeasureModel(g, {
    (1, 1): BranchRule(prefix=(3, "1/2"), tail=Poly.of(2, 1)),
    (2, 1): BranchRule(prefix=(5,), tail=Poly.of("7/3")),
    (2, 2): BranchRule(tail=Poly.of(1, "1/4")),
    (4, 1): BranchRule(prefix=(1, 2), tail=Poly.of(4)),
})
m, k = 3, 2

system = circuit_system(mu, m, k)
print("circulant rows:")
for row in system.natural()[0]:
    print("   ", [fmt(x) for x in row])

family = solve_circuit(mu, m, k)
print("family:", family.to_json())

# Any member with t above the bound works; the oracle agrees.
solved = mu.with_circuit_masses(family.sample())
print("criterion holds:", is_kqm(solved, m, k).holds)
print("oracle max defect:", defect_suite(solved, m, k).max_abs_defect)

# Affine branches on short circuits have closed forms.  On kappa = 2 the
# published side condition L1 + L2 = c1 + c2 is not needed: this instance
# violates it and still gets zero defects.
g2 = CircuitGraph(2, (1, 1))
mu2 = MeasureModel(g2, {(1, 1): BranchRule.affine(1, 1, 1), (2, 1): BranchRule.affine(5, 1, 1)})
ch = characterize_1q3(mu2)
print("\nkappa = 2 masses:", [fmt(x) for x in ch.sample()])
print("defects zero:", defect_suite(mu2.with_circuit_masses(ch.sample()), 3, 1).all_zero)
print("literal reading:", characterize_1q3(mu2, literal=True))

print()
print(to_dot(g2, 2, mu2.with_circuit_masses(ch.sample())))
