"""Exact simulation and analysis of 1-way quantum finite automata."""

from .automata import (
    ClassicalAutomaton,
    ProbabilisticAutomaton,
    QuantumAutomaton,
    RunOutcome,
    is_reversible,
    make_qfa,
    non_halting_state_count,
    prfa_to_qfa,
    rfa_to_prfa,
    validate,
)
from .linalg import OutcomeDistribution, complete_unitary, is_unitary, measure, tv_distance
from .semantics import (
    ScanReport,
    run_dfa,
    run_measure_many,
    run_measure_once,
    run_multiscan,
    run_prfa,
)
from .analysis import (
    ConstructionWitness,
    dfa_equivalent,
    find_forbidden_construction,
    find_prfa_forbidden_construction,
    minimize_dfa,
    reversibilize,
    transition_monoid,
)

__all__ = [
    "ClassicalAutomaton",
    "ConstructionWitness",
    "OutcomeDistribution",
    "ProbabilisticAutomaton",
    "QuantumAutomaton",
    "RunOutcome",
    "ScanReport",
    "complete_unitary",
    "dfa_equivalent",
    "find_forbidden_construction",
    "find_prfa_forbidden_construction",
    "is_reversible",
    "is_unitary",
    "make_qfa",
    "measure",
    "minimize_dfa",
    "non_halting_state_count",
    "prfa_to_qfa",
    "reversibilize",
    "rfa_to_prfa",
    "run_dfa",
    "run_measure_many",
    "run_measure_once",
    "run_multiscan",
    "run_prfa",
    "transition_monoid",
    "tv_distance",
    "validate",
]

__version__ = "0.1.0"
