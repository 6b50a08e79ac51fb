"""Bounded decision for S4, S4.2 and S4.3.

``decide`` sweeps the finite frames of the theory's class up to a
world-count bound.  A refutation carries its witness model and world
and is re-checked before being returned; a "valid" verdict is always
relative to the bound.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import kripke
from .formula import Formula
from .kripke import Frame, KripkeModel

REFUTED = "refuted"
VALID_UP_TO_BOUND = "valid-up-to-bound"


class Theory(Enum):
    S4 = "S4"
    S4_2 = "S4.2"
    S4_3 = "S4.3"

    @property
    def frame_class(self) -> str:
        return {
            Theory.S4: "preorder",
            Theory.S4_2: "directed-preorder",
            Theory.S4_3: "linear-preorder",
        }[self]

    @classmethod
    def from_name(cls, name: str) -> "Theory":
        for theory in cls:
            if theory.value == name:
                return theory
        raise ValueError(f"unknown theory {name!r}")


@dataclass(frozen=True, eq=False)
class DecisionOutcome:
    verdict: str
    theory: Theory
    bound_used: int
    frame: Optional[Frame] = None
    valuation: Optional[dict[str, frozenset[int]]] = None
    world: Optional[int] = None

    @property
    def refuted(self) -> bool:
        return self.verdict == REFUTED

    def witness_model(self) -> KripkeModel:
        if not self.refuted:
            raise ValueError("no witness on a valid-up-to-bound outcome")
        return KripkeModel(self.frame, self.valuation)


def decide(f: Formula, theory: Theory, frame_bound: int,
           budget: int = kripke.DEFAULT_VALUATION_BUDGET) -> DecisionOutcome:
    """Search the theory's frames up to ``frame_bound`` for a countermodel.

    Frames are scanned in the fixed enumeration order and valuations in
    ascending bitmask order, so the first witness is deterministic.
    """
    if frame_bound < 1:
        raise ValueError("frame_bound must be at least 1")
    for frame in kripke.enumerate_frames(frame_bound, theory.frame_class):
        hit = kripke.countermodel_in_frame(frame, f, budget)
        if hit is None:
            continue
        valuation, world = hit
        model = KripkeModel(frame, valuation)
        if kripke.check(model, world, f):
            raise RuntimeError("witness failed re-verification; enumeration bug")
        return DecisionOutcome(REFUTED, theory, frame_bound,
                               frame=frame, valuation=valuation, world=world)
    return DecisionOutcome(VALID_UP_TO_BOUND, theory, frame_bound)
