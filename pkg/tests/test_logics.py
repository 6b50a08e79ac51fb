"""Bounded decision over the three bounded theories.

The frozen witnesses below (fork, diamond, two-world cluster) were
picked by the deterministic enumeration order; any change to frame
enumeration or valuation order will show up here first.
"""
import random

import pytest

from helpers import random_formula, slow_check
from potmodal.formula import AxiomScheme, instantiate, parse
from potmodal.kripke import frame_properties
from potmodal.logics import (
    REFUTED,
    VALID_UP_TO_BOUND,
    DecisionOutcome,
    Theory,
    decide,
)

DIRECTEDNESS = parse("<>[]p -> []<>p")
LINEARITY = parse("([](([]p) -> q)) | ([](([]q) -> p))")
FINALITY = parse("[]<>p -> <>[]p")


def test_theory_lookup_and_frame_classes():
    assert Theory.from_name("S4") is Theory.S4
    assert Theory.from_name("S4.2") is Theory.S4_2
    assert Theory.from_name("S4.3") is Theory.S4_3
    with pytest.raises(ValueError):
        Theory.from_name("S5")
    assert Theory.S4.frame_class == "preorder"
    assert Theory.S4_2.frame_class == "directed-preorder"
    assert Theory.S4_3.frame_class == "linear-preorder"


def test_s4_axioms_hold_up_to_bound():
    p = parse("p")
    q = parse("q")
    for scheme in (AxiomScheme.K, AxiomScheme.T, AxiomScheme.FOUR,
                   AxiomScheme.DUAL):
        if scheme is AxiomScheme.K:
            f = instantiate(scheme, p, q)
        else:
            f = instantiate(scheme, p)
        out = decide(f, Theory.S4, 3)
        assert out.verdict == VALID_UP_TO_BOUND, str(f)
        assert out.frame is None and out.world is None
    # propositional tautologies never get a countermodel either
    assert decide(parse("p | ~p"), Theory.S4, 3).verdict == VALID_UP_TO_BOUND


def test_directedness_scheme_splits_s4_from_s42():
    """The two-pronged fork is the first S4 countermodel to .2."""
    out = decide(DIRECTEDNESS, Theory.S4, 3)
    assert out.refuted
    assert out.frame.world_count == 3
    assert sorted(out.frame.access) == [
        (0, 0), (1, 1), (2, 0), (2, 1), (2, 2)]
    assert out.valuation == {"p": frozenset({0})}
    assert out.world == 2
    assert not frame_properties(out.frame).directed
    # no countermodel on one or two worlds
    assert decide(DIRECTEDNESS, Theory.S4, 2).verdict == VALID_UP_TO_BOUND
    # and none among directed frames at all (up to the bound)
    assert decide(DIRECTEDNESS, Theory.S4_2, 5).verdict == VALID_UP_TO_BOUND


def test_linearity_scheme_splits_s42_from_s43():
    out = decide(LINEARITY, Theory.S4_2, 4)
    assert out.refuted
    assert out.frame.world_count == 4
    assert sorted(out.frame.access) == [
        (0, 0), (0, 3), (1, 1), (1, 3),
        (2, 0), (2, 1), (2, 2), (2, 3), (3, 3)]
    assert out.valuation == {"p": frozenset({0, 3}), "q": frozenset({1, 3})}
    assert out.world == 2
    props = frame_properties(out.frame)
    assert props.directed and not props.linear
    assert decide(LINEARITY, Theory.S4_2, 3).verdict == VALID_UP_TO_BOUND
    assert decide(LINEARITY, Theory.S4_3, 5).verdict == VALID_UP_TO_BOUND
    # the plain fork already refutes it when directedness is not required
    fork = decide(LINEARITY, Theory.S4, 3)
    assert fork.refuted and fork.frame.world_count == 3


def test_finality_pattern_fails_even_on_linear_frames():
    # []<>p -> <>[]p dies on the two-world cluster, which is linear,
    # so all three theories refute it at bound 2
    for theory in Theory:
        out = decide(FINALITY, theory, 2)
        assert out.refuted, theory
        assert out.frame.world_count == 2
        assert sorted(out.frame.access) == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert out.valuation == {"p": frozenset({0})}
        assert out.world == 0


def test_witnesses_survive_independent_reverification():
    cases = [
        (DIRECTEDNESS, Theory.S4, 3),
        (LINEARITY, Theory.S4_2, 4),
        (FINALITY, Theory.S4_3, 2),
    ]
    for f, theory, bound in cases:
        out = decide(f, theory, bound)
        assert out.refuted
        assert not slow_check(out.frame.world_count, out.frame.access,
                              out.valuation, out.world, f)
        model = out.witness_model()
        assert model.frame is out.frame


def test_first_witness_is_deterministic_and_stable_across_bounds():
    first = decide(DIRECTEDNESS, Theory.S4, 3)
    again = decide(DIRECTEDNESS, Theory.S4, 3)
    wider = decide(DIRECTEDNESS, Theory.S4, 5)
    for other in (again, wider):
        assert other.frame.access == first.frame.access
        assert other.valuation == first.valuation
        assert other.world == first.world
    assert first.bound_used == 3
    assert wider.bound_used == 5


def test_refutations_lift_to_weaker_theories_and_larger_bounds():
    # a linear countermodel is also a directed one and a plain preorder,
    # and raising the bound only extends the sweep
    rng = random.Random(202)
    lifted = 0
    for _ in range(40):
        f = random_formula(rng, ("p", "q"), 2)
        out = decide(f, Theory.S4_3, 2)
        if not out.refuted:
            continue
        lifted += 1
        assert decide(f, Theory.S4_2, 2).refuted
        assert decide(f, Theory.S4, 2).refuted
        assert decide(f, Theory.S4_3, 3).refuted
    assert lifted >= 5


def test_decide_rejects_silly_bounds():
    with pytest.raises(ValueError):
        decide(DIRECTEDNESS, Theory.S4, 0)


def test_witness_model_requires_a_refutation():
    out = DecisionOutcome(VALID_UP_TO_BOUND, Theory.S4, 3)
    assert not out.refuted
    with pytest.raises(ValueError):
        out.witness_model()
    assert REFUTED != VALID_UP_TO_BOUND
