"""Nonlocal games: finite fields and polynomials, referee protocols, the
reduction pipeline from 3-SAT to 3-player XOR games, strategy evaluation and
the consistency and consolidation metrics behind the soundness analysis."""

from .errors import (
    DegreeError,
    DimensionMismatch,
    DivisionByZero,
    FieldMismatch,
    InputError,
    InvalidGame,
    InvariantError,
    NlgError,
    NotPrime,
    StrategyError,
    TooLarge,
    Unsolved,
)
from .gamecore import (
    DeterministicStrategy,
    Game,
    MonteCarloResult,
    QuantumStrategy,
    Round,
    Strategy,
    SymmetricStrategy,
    TableGame,
    chsh_game,
    classical_value_bruteforce,
    compile_rounds,
    constant_game,
    evaluate_deterministic,
    evaluate_quantum,
    monte_carlo_value,
    parity_game,
    replay_round,
    symmetrize,
    xor_bias,
)

__version__ = "0.1.0"

__all__ = [
    "DegreeError",
    "DimensionMismatch",
    "DivisionByZero",
    "FieldMismatch",
    "InputError",
    "InvalidGame",
    "InvariantError",
    "NlgError",
    "NotPrime",
    "StrategyError",
    "TooLarge",
    "Unsolved",
    "DeterministicStrategy",
    "Game",
    "MonteCarloResult",
    "QuantumStrategy",
    "Round",
    "Strategy",
    "SymmetricStrategy",
    "TableGame",
    "chsh_game",
    "classical_value_bruteforce",
    "compile_rounds",
    "constant_game",
    "evaluate_deterministic",
    "evaluate_quantum",
    "monte_carlo_value",
    "parity_game",
    "replay_round",
    "symmetrize",
    "xor_bias",
]
