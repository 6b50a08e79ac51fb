"""Toolkit for modal validities of potentialist systems.

Finite Kripke machinery, bounded decision for S4 and its directed and
linear strengthenings, control-statement certification, and desk-scale
renderings of truth-iteration potentialist systems.
"""

from .formula import (
    Atom, AxiomScheme, Bottom, Box, Diamond, Formula, Not, S4_SCHEMES, Top,
    instantiate, parse, substitute,
)
from .kripke import Frame, KripkeModel, enumerate_frames, frame_properties
from .logics import Theory, decide
from .ordinal import OrdinalCNF, closed_under_addition_below, parse_ordinal
from .potentialist import (
    PotentialistSystem, World, certify_button, certify_independent_controls,
    certify_ratchet, certify_switch, compare_systems, evaluate,
    refute_via_controls, refute_via_ratchet, scheme_report,
)
from .systems import (
    TruncationSpec, amalgamated_variant, cohen_truth_system,
    killing_truth_system, lambda_star, mostowski_fork, smallest_truth_system,
)

__version__ = "0.1.0"

__all__ = [
    "Atom", "AxiomScheme", "Bottom", "Box", "Diamond", "Formula", "Frame",
    "KripkeModel", "Not", "OrdinalCNF", "PotentialistSystem", "S4_SCHEMES",
    "Theory", "Top", "TruncationSpec", "World", "amalgamated_variant",
    "certify_button", "certify_independent_controls", "certify_ratchet",
    "certify_switch", "closed_under_addition_below", "cohen_truth_system",
    "compare_systems", "decide", "enumerate_frames", "evaluate",
    "frame_properties", "instantiate", "killing_truth_system", "lambda_star",
    "mostowski_fork", "parse", "parse_ordinal", "refute_via_controls",
    "refute_via_ratchet", "scheme_report", "smallest_truth_system",
    "substitute",
]
