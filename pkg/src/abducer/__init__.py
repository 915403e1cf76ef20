"""Abductive diagnosis over causal networks with an isa taxonomy.

Scenarios (culprit plus a tree of causation links) are validated against
a most-specific-attachment rule, weighted by -ln of their probability,
and the best explanations of an observation set are found either by an
exhaustive oracle or by a Steiner-tree dynamic program with k-best
enumeration.  A recognition layer maps concept taxonomies with instance
counts onto the same machinery.
"""

from .errors import (
    AbducerError,
    AmbiguousReferenceClassError,
    CountExceedsParentError,
    DuplicateDeclarationError,
    InconsistentConstraintsError,
    InvalidScenarioError,
    IsaCycleError,
    MalformedTreeError,
    MissingDisorderPriorError,
    MissingPriorError,
    NetworkTooLargeError,
    NoRelevantConceptError,
    ParseError,
    ProbabilityOutOfRangeError,
    ReservedNameError,
    TooManyTerminalsError,
    UnionCycleError,
    UnknownConceptError,
    UnknownEventError,
    UnknownLinkError,
    UnknownPropertyValueError,
)
from .kb import (
    CausalLink,
    CausalNetwork,
    EventNode,
    IsaLink,
    TOP_NAME,
    add_top,
    isa_ancestors,
    parse_network,
    serialize_network,
)
from .oracle import (
    RankedExplanation,
    best_explanations_bruteforce,
    enumerate_valid_scenarios,
)
from .recognition import (
    Concept,
    PropertySpec,
    RecognitionKB,
    RecognitionQuery,
    RecognitionResult,
    parse_recognition_kb,
    recognize,
    relevant_concept,
    serialize_recognition_kb,
    shastri_score,
)
from .scenario import (
    Scenario,
    ValidityResult,
    is_explanation,
    is_valid_scenario,
    log_weight,
    participants,
    probability,
)
from .solver import (
    DPTable,
    GraphEdge,
    SolveStats,
    SteinerTree,
    WeightedSearchGraph,
    build_search_graph,
    explain,
    steiner_dp,
    tree_to_scenario,
)

__version__ = "0.1.0"

__all__ = [
    "AbducerError",
    "AmbiguousReferenceClassError",
    "CausalLink",
    "CausalNetwork",
    "Concept",
    "CountExceedsParentError",
    "DPTable",
    "DuplicateDeclarationError",
    "EventNode",
    "GraphEdge",
    "InconsistentConstraintsError",
    "InvalidScenarioError",
    "IsaCycleError",
    "IsaLink",
    "MalformedTreeError",
    "MissingDisorderPriorError",
    "MissingPriorError",
    "NetworkTooLargeError",
    "NoRelevantConceptError",
    "ParseError",
    "ProbabilityOutOfRangeError",
    "PropertySpec",
    "RankedExplanation",
    "RecognitionKB",
    "RecognitionQuery",
    "RecognitionResult",
    "ReservedNameError",
    "Scenario",
    "SolveStats",
    "SteinerTree",
    "TOP_NAME",
    "TooManyTerminalsError",
    "UnionCycleError",
    "UnknownConceptError",
    "UnknownEventError",
    "UnknownLinkError",
    "UnknownPropertyValueError",
    "ValidityResult",
    "WeightedSearchGraph",
    "add_top",
    "best_explanations_bruteforce",
    "build_search_graph",
    "enumerate_valid_scenarios",
    "explain",
    "is_explanation",
    "is_valid_scenario",
    "isa_ancestors",
    "log_weight",
    "parse_network",
    "parse_recognition_kb",
    "participants",
    "probability",
    "recognize",
    "relevant_concept",
    "serialize_network",
    "serialize_recognition_kb",
    "shastri_score",
    "steiner_dp",
    "tree_to_scenario",
]
