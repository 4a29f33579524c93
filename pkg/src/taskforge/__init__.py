"""taskforge: procedural generation of long-horizon manipulation tasks.

Composes atomic actions into logically consistent grounded sequences
(symbolic validation), checks every intermediate state for a collision-free,
reachable geometric realization (physical validation), and exports the
surviving tasks as a similarity-annotated dataset.
"""

__version__ = "0.1.0"

from .dsl import (
    Bundle,
    DomainDefinition,
    SamplingWeights,
    load_bundle,
    parse_domain,
    serialize_domain,
    validate_domain,
)
from .errors import (
    ConfigError,
    DomainError,
    DomainMismatchError,
    ExportError,
    GenerationExhausted,
    OracleCeilingError,
    SamplingError,
    TaskforgeError,
)
from .exhaustive import count_unconstrained, enumerate_valid_sequences, iter_valid_sequences
from .generate import GenerationConfig, generate_sequence, seed_initial_state
from .model import (
    ActionSchema,
    ClassHierarchy,
    Entity,
    GroundAction,
    GroundPredicate,
    Literal,
    PredicateSchema,
    TaskSpec,
    WorldState,
    apply_postconditions,
    check_preconditions,
    holds,
    is_subclass,
    revalidate,
    state_diff,
)

__all__ = [
    "__version__",
    "Bundle",
    "DomainDefinition",
    "SamplingWeights",
    "load_bundle",
    "parse_domain",
    "serialize_domain",
    "validate_domain",
    "TaskforgeError",
    "DomainError",
    "ConfigError",
    "SamplingError",
    "GenerationExhausted",
    "OracleCeilingError",
    "ExportError",
    "DomainMismatchError",
    "count_unconstrained",
    "enumerate_valid_sequences",
    "iter_valid_sequences",
    "GenerationConfig",
    "generate_sequence",
    "seed_initial_state",
    "ActionSchema",
    "ClassHierarchy",
    "Entity",
    "GroundAction",
    "GroundPredicate",
    "Literal",
    "PredicateSchema",
    "TaskSpec",
    "WorldState",
    "apply_postconditions",
    "check_preconditions",
    "holds",
    "is_subclass",
    "revalidate",
    "state_diff",
]
