"""Reduction pipeline: source game, answer binarisation, oracularisation,
repetition with confuse questions and the 3-player XOR gadget."""

from .fourier import (
    FourierDecoder,
    FourierTable,
    chi,
    decode_strategy,
    dictator,
    fold,
    fourier_transform,
    negate_index,
    walsh_hadamard,
)
from .gphi import (
    AssignmentAnswers,
    ClauseVariableGame,
    FieldChoice,
    GphiHandle,
    ReductionConfig,
    build_game_Gphi,
    choose_modulus,
    decode_assignment,
    satisfied_fraction,
)
from .manifest import STAGES, PipelineManifest, build_stage, cnf_digest, honest_strategy
from .quadeq_reduce import (
    BinarizedGame,
    LiftedStrategy,
    PairArithmetization,
    anf,
    binarize_game,
    predicate_to_quadeq,
    satisfying_pairs,
)
from .repetition import (
    CoordinatewiseStrategy,
    OracularizedGame,
    RepeatedConfuseGame,
    oracularize,
    oracularized_classical_value,
    repeat_with_confuse,
)
from .xorgadget import LongCodeStrategy, XorGadgetGame, representative, xor_gadget

__all__ = [
    "FourierDecoder",
    "FourierTable",
    "chi",
    "decode_strategy",
    "dictator",
    "fold",
    "fourier_transform",
    "negate_index",
    "walsh_hadamard",
    "AssignmentAnswers",
    "ClauseVariableGame",
    "FieldChoice",
    "GphiHandle",
    "ReductionConfig",
    "build_game_Gphi",
    "choose_modulus",
    "decode_assignment",
    "satisfied_fraction",
    "STAGES",
    "PipelineManifest",
    "build_stage",
    "cnf_digest",
    "honest_strategy",
    "BinarizedGame",
    "LiftedStrategy",
    "PairArithmetization",
    "anf",
    "binarize_game",
    "predicate_to_quadeq",
    "satisfying_pairs",
    "CoordinatewiseStrategy",
    "OracularizedGame",
    "RepeatedConfuseGame",
    "oracularize",
    "oracularized_classical_value",
    "repeat_with_confuse",
    "LongCodeStrategy",
    "XorGadgetGame",
    "representative",
    "xor_gadget",
]
