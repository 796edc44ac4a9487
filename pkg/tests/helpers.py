"""Random instance generators shared by the test modules."""

import random
from fractions import Fraction

from kqm.exact import Poly
from kqm.graph import BranchRule, CircuitGraph, MeasureModel
from kqm.wcompops import WeightFunction, WeightRule


def rat(R: random.Random, lo=1, hi=9, den=5) -> Fraction:
    return Fraction(R.randint(lo, hi), R.randint(1, den))


def random_graph(R, kappa, max_eta=2):
    etas = [R.randint(0, max_eta) for _ in range(kappa)]
    if not any(etas):
        etas[R.randrange(kappa)] = 1
    return CircuitGraph(kappa, tuple(etas))


def random_rule(R, max_prefix=3, max_degree=2, geometric=False):
    prefix = [rat(R) for _ in range(R.randint(0, max_prefix))]
    tail = Poly(tuple(rat(R) for _ in range(R.randint(1, max_degree + 1))))
    ratio = Fraction(R.randint(1, 3), R.randint(1, 3)) if geometric and R.random() < 0.5 else 1
    return BranchRule(prefix=prefix, tail=tail, ratio=ratio)


def random_model(R, kappa, geometric=True, circuit=True):
    g = random_graph(R, kappa)
    branches = {b: random_rule(R, geometric=geometric) for b in g.branch_ids()}
    cm = tuple(rat(R) for _ in range(kappa)) if circuit else None
    return MeasureModel(g, branches, cm)


def admissible_model(R, kappa, m, k):
    """Branches polynomial of degree <= m-2 from position k+1; no circuit masses."""
    g = random_graph(R, kappa)
    branches = {}
    for b in g.branch_ids():
        prefix = [rat(R) for _ in range(R.randint(0, k))]
        tail = Poly(tuple(rat(R) for _ in range(R.randint(1, m - 1))))
        branches[b] = BranchRule(prefix=prefix, tail=tail)
    return MeasureModel(g, branches)


def random_weight(R, g, max_prefix=3):
    circuit = tuple(rat(R, 1, 4, 4) for _ in range(g.kappa))
    branches = {b: WeightRule([rat(R, 1, 4, 4) for _ in range(R.randint(0, max_prefix))],
                              rat(R, 1, 4, 4))
                for b in g.branch_ids()}
    return WeightFunction(g, circuit, branches)


def affine_model(R, kappa, max_tries=200):
    """Affine branch data; for kappa = 4 the level-one mass at x_4 is chosen to
    satisfy the solvability constraint."""
    for _ in range(max_tries):
        etas = [R.randint(1, 2) for _ in range(kappa)]
        g = CircuitGraph(kappa, tuple(etas))
        data = {b: [rat(R), rat(R), rat(R, 0, 6)] for b in g.branch_ids()}   # level1, c, d
        if kappa == 4:
            level = lambda r, idx: sum(data[(r, i)][idx] for i in range(1, etas[r - 1] + 1))
            L = [level(r, 0) for r in range(1, 5)]
            c = [level(r, 1) for r in range(1, 5)]
            d = [level(r, 2) for r in range(1, 5)]
            L4 = -2 * c[0] + d[0] + c[1] + c[3] - d[3] + 3 * L[0] - 3 * L[1] + L[2]
            rest = L4 - (L[3] - data[(4, 1)][0])
            if rest <= 0:
                continue
            data[(4, 1)][0] = rest
        return MeasureModel(g, {b: BranchRule.affine(*v) for b, v in data.items()})
    raise RuntimeError("could not draw an admissible instance")
