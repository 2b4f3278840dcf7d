"""Named pipeline stages and the manifest that rebuilds them.

Stage chain, starting from a CNF formula:

* ``gphi``      polynomial 3-SAT test over a field chosen from the config
* ``binary``    clause-variable game with answers reduced to one bit via QUADEQ
* ``oracular``  oracularised ``binary``
* ``repeat``    ``oracular`` repeated K times with K' confuse slots
* ``xor``       3-player XOR game built from ``binary`` by long-code folding
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from ..errors import InputError
from ..gamecore import Game, Strategy
from ..protocols.cnf import CNF
from ..protocols.sat import honest_sat_strategy
from .gphi import AssignmentAnswers, ClauseVariableGame, ReductionConfig, build_game_Gphi
from .quadeq_reduce import LiftedStrategy, binarize_game
from .repetition import CoordinatewiseStrategy, oracularize, repeat_with_confuse
from .xorgadget import LongCodeStrategy, xor_gadget

STAGES = ("gphi", "binary", "oracular", "repeat", "xor")
CHAIN = {
    "gphi": ("gphi",),
    "binary": ("source", "binary"),
    "oracular": ("source", "binary", "oracular"),
    "repeat": ("source", "binary", "oracular", "repeat"),
    "xor": ("source", "binary", "xor"),
}


def cnf_digest(cnf: CNF) -> str:
    return hashlib.sha256(cnf.to_dimacs().encode()).hexdigest()


@dataclass
class PipelineManifest:
    """Ordered stages with their parameters; enough to rebuild the game exactly."""

    stage: str
    config: ReductionConfig
    cnf_sha256: str
    seed: int = 0
    stages: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "stage": self.stage,
            "config": self.config.as_dict(),
            "cnf_sha256": self.cnf_sha256,
            "seed": self.seed,
            "stages": self.stages,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineManifest":
        try:
            return cls(data["stage"], ReductionConfig(**data["config"]), data["cnf_sha256"], data.get("seed", 0), data.get("stages", []))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed pipeline manifest: {exc}") from None


def stage_parameters(step: str, config: ReductionConfig) -> dict:
    if step == "gphi":
        return {k: config.as_dict()[k] for k in ("eps1", "exponent", "modulus")}
    if step == "repeat":
        return {"K": config.K, "K2": config.K2}
    if step == "xor":
        return {"eps": config.eps_xor, "K": config.xor_K, "K2": config.xor_K2}
    return {}


def build_stage(cnf: CNF, stage: str, config: ReductionConfig | None = None, seed: int = 0):
    """(game, manifest, extra report fields) for one named stage."""
    if stage not in STAGES:
        raise InputError(f"unknown stage {stage!r}; choose from {', '.join(STAGES)}")
    config = config or ReductionConfig()
    extra: dict = {}
    game: Game | None = None
    for step in CHAIN[stage]:
        if step == "gphi":
            handle = build_game_Gphi(cnf, config)
            game = handle.game
            extra.update(handle.report())
        elif step == "source":
            game = ClauseVariableGame(cnf)
        elif step == "binary":
            game = binarize_game(game)
        elif step == "oracular":
            game = oracularize(game)
        elif step == "repeat":
            game = repeat_with_confuse(game, config.K, config.K2)
        elif step == "xor":
            game = xor_gadget(game, config.eps_xor, config.xor_K, config.xor_K2)
    stages = [{"stage": s, "params": stage_parameters(s, config)} for s in CHAIN[stage]]
    manifest = PipelineManifest(stage, config, cnf_digest(cnf), seed, stages)
    return game, manifest, extra


def honest_strategy(game: Game, cnf: CNF, stage: str, assignment) -> Strategy:
    """The completeness strategy of a stage built by :func:`build_stage`."""
    if len(assignment) != cnf.n:
        raise InputError(f"witness has {len(assignment)} values for {cnf.n} variables")
    if stage == "gphi":
        return honest_sat_strategy(cnf, assignment, params=game.params)
    base = AssignmentAnswers(cnf, assignment)
    binary = game
    while not hasattr(binary, "psi"):
        binary = binary.source if hasattr(binary, "source") else binary.base
    lifted = LiftedStrategy(binary, base)
    if stage == "binary":
        return lifted
    if stage == "xor":
        return LongCodeStrategy(lifted.answer)
    return CoordinatewiseStrategy(lifted.answer)
