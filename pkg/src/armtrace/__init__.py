"""Refinement checking and emergent-behavior localization over trace languages."""

from .emergence import (
    Case,
    CaseClassification,
    EmergentReport,
    ExtendedDecomposition,
    MembershipVector,
    OriginPhase,
    TraceLog,
    decompose_extended,
    extract_emergent,
    localize_case,
    membership_vector,
    parse_log,
    per_trace_origin,
)
from .errors import (
    AlphabetMismatchError,
    ArmError,
    AutomatonSemanticError,
    AutomatonSyntaxError,
    ForeignSymbolError,
    InputError,
    ResourceLimitError,
)
from .lang import (
    Alphabet,
    Combine,
    Trace,
    TraceAutomaton,
    Verdict,
    Witness,
    WitnessKind,
    accepts,
    canonical,
    combine,
    complement,
    determinize,
    enumerate_traces,
    equivalent,
    from_traces,
    includes,
    is_empty,
    minimize,
    parse_automaton,
    serialize,
    state_budget,
)
from .relations import (
    ChainReport,
    EvolutionClass,
    EvolutionReport,
    ModelChain,
    check_chain,
    classify_evolution,
)

__version__ = "0.1.0"
