"""Exact constructions and checks for k-quasi-m-isometric weighted shifts and
(weighted) composition operators on directed graphs with one circuit."""

from .compops import (Characterization, Infeasible, KqmReport, MassSolutionFamily,
                      characterize_1q3, circuit_system, complete_single_branch, is_kqm,
                      solve_circuit)
from .errors import (AdmissibilityError, CapError, ConstructionError, DomainError, DuplicateNode,
                     KqmError, PositivityError, RangeError, SchemaError)
from .exact import Poly, alt_diff, interpolate, lemma_extension, positive_from
from .graph import (Branch, BranchRule, Circuit, CircuitGraph, MeasureModel, h_p_closed,
                    h_p_oracle, preimage)
from .shift import (NonexistenceCertificate, ShiftCompletion, ShiftProblem, check_shift,
                    complete_shift)
from .verify import MomentReport, defect_suite, moment
from .wcompops import (CondExpTable, WeightFunction, WeightRule, atom_oracle, cond_exp,
                       complete_single_branch_weighted, is_kqm_weighted, pi_p,
                       solve_weighted_circuit)

__version__ = "0.1.0"

__all__ = [
    "AdmissibilityError",
    "Branch",
    "BranchRule",
    "CapError",
    "Characterization",
    "Circuit",
    "CircuitGraph",
    "CondExpTable",
    "ConstructionError",
    "DomainError",
    "DuplicateNode",
    "Infeasible",
    "KqmError",
    "KqmReport",
    "MassSolutionFamily",
    "MeasureModel",
    "MomentReport",
    "NonexistenceCertificate",
    "Poly",
    "PositivityError",
    "RangeError",
    "SchemaError",
    "ShiftCompletion",
    "ShiftProblem",
    "WeightFunction",
    "WeightRule",
    "alt_diff",
    "atom_oracle",
    "characterize_1q3",
    "check_shift",
    "circuit_system",
    "complete_shift",
    "complete_single_branch",
    "complete_single_branch_weighted",
    "cond_exp",
    "defect_suite",
    "h_p_closed",
    "h_p_oracle",
    "interpolate",
    "is_kqm",
    "is_kqm_weighted",
    "lemma_extension",
    "moment",
    "pi_p",
    "positive_from",
    "preimage",
    "solve_circuit",
    "solve_weighted_circuit",
]
