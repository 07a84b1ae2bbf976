"""History-register automata: exact semantics, closure constructions, and
emptiness/containment decision procedures via counter machines."""

from .constructions import (
    PackedHra,
    PackedTransition,
    StateTag,
    complement_deterministic,
    concatenation,
    containment_deterministic,
    fix_names,
    intersection,
    kleene_star,
    pad_type,
    packed_determinism_witness,
    packed_membership,
    registers_to_histories,
    to_packed,
    union,
    unpack,
)
from .core import (
    Accept,
    Assignment,
    Hra,
    Reset,
    SubclassFlags,
    TraceStep,
    Transition,
    bounded_determinism_check,
    check_strong_determinism,
    classify,
    eps_closure,
    initial_config,
    make_hra,
    membership,
    permute_word,
    reset_summaries,
    step,
    trace,
    validate,
)
from .counters import (
    Add,
    CounterMachine,
    CTransition,
    ForwardProbe,
    ResetDim,
    Transfer,
    UpSet,
    apply_effect,
    backward_coverability,
    counter_step,
    forward_witness_search,
    one_dim_rvass_reachability,
    one_dim_rvass_witness,
    pre_basis,
)
from .errors import (
    BadPlaceIndex,
    DanglingState,
    DuplicateFixName,
    HistraError,
    NoWitness,
    NonUnitEffect,
    NotDeterministic,
    NotUnary,
    RegisterOverfull,
    RegistersPresent,
    ResetsPresent,
    RestrictionViolated,
    ScopeViolation,
    TransfersOrResetsPresent,
    TransfersPresent,
    ValidationError,
    WrongDimension,
)
from .oracles import (
    EmptinessProbe,
    Lang,
    LangId,
    bounded_bisimulation,
    bounded_emptiness,
    enumerate_words,
    oracle_membership,
    random_counter_machine,
    random_hra,
)
from .reductions import (
    CounterReduction,
    DimensionMap,
    EmptinessResult,
    applicable_engines,
    colouring_scope_ok,
    eliminate_registers_colouring,
    emptiness,
    hra_to_trvass,
    nonreset_to_vass,
    restricted_hra_to_rvass,
    restriction_ok,
    rvass_to_hra,
    unary_to_one_rvass,
    vass_to_nonreset_hra,
)
from .skeletons import (
    Skeleton,
    enumerate_skeletons,
    skel_at,
    skel_move,
    skel_reset,
    skeleton_of,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
