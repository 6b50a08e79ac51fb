import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from potmodal.errors import ParseError
from potmodal.ordinal import (
    OMEGA, OMEGA_SQUARED, ONE, ZERO, OrdinalCNF, add,
    closed_under_addition_below, mul, parse_ordinal,
)


def o(text):
    return parse_ordinal(text)


def sample_ordinals(max_exp=3, max_coeff=3):
    """Every CNF ordinal whose exponents are <= max_exp and coefficients
    <= max_coeff.  Small but order-dense enough to exercise absorption."""
    out = [ZERO]
    exps = list(range(max_exp, -1, -1))
    for k in range(1, max_exp + 2):
        for chosen in itertools.combinations(exps, k):
            for coeffs in itertools.product(range(1, max_coeff + 1),
                                            repeat=k):
                out.append(OrdinalCNF(tuple(zip(chosen, coeffs))))
    return out


def slow_add(a: OrdinalCNF, b: OrdinalCNF) -> OrdinalCNF:
    """Oracle: drop the a-terms strictly below b's leading exponent,
    then merge term lists directly."""
    if not b.terms:
        return a
    lead = b.terms[0][0]
    kept = [t for t in a.terms if t[0] >= lead]
    if kept and kept[-1][0] == lead:
        merged = kept[:-1] + [(lead, kept[-1][1] + b.terms[0][1])] + \
            list(b.terms[1:])
    else:
        merged = kept + list(b.terms)
    return OrdinalCNF(tuple(merged))


def test_construction_and_validation():
    assert OrdinalCNF.from_int(0) == ZERO
    assert OrdinalCNF.from_int(3).terms == ((0, 3),)
    assert OMEGA.terms == ((1, 1),)
    with pytest.raises(ValueError):
        OrdinalCNF(((0, 1), (1, 1)))
    with pytest.raises(ValueError):
        OrdinalCNF(((1, 0),))


def test_parse_and_str():
    assert str(o("w^2*3 + w + 5")) == "w^2*3 + w + 5"
    assert o("w*2+3") == OrdinalCNF(((1, 2), (0, 3)))
    assert o("0") == ZERO
    assert str(o("1 + w")) == "w"
    with pytest.raises(ParseError):
        o("w^")
    with pytest.raises(ParseError):
        o("x")
    with pytest.raises(ParseError):
        o("")


def test_parse_round_trip_on_samples():
    for a in sample_ordinals():
        assert parse_ordinal(str(a)) == a


def test_order_is_total_and_matches_tuples():
    xs = sample_ordinals(2, 2)
    for a, b in itertools.product(xs, repeat=2):
        assert (a < b) + (a == b) + (b < a) == 1
    assert ZERO < ONE < OMEGA < o("w+1") < o("w*2") < OMEGA_SQUARED


def test_addition_matches_oracle():
    xs = sample_ordinals()
    for a, b in itertools.product(xs, repeat=2):
        assert add(a, b) == slow_add(a, b)


def test_addition_identities():
    assert o("w+1") + OMEGA == o("w*2")
    assert ONE + OMEGA == OMEGA
    assert OMEGA + ONE == o("w+1")
    assert o("w^2") + o("w") + o("w^2") == o("w^2*2")


def test_addition_associative_on_samples():
    xs = sample_ordinals(2, 2)
    rng = random.Random(3)
    for _ in range(4000):
        a, b, c = (rng.choice(xs) for _ in range(3))
        assert add(add(a, b), c) == add(a, add(b, c))


def test_mul_by_finite_is_repeated_addition():
    for a in sample_ordinals(2, 2):
        acc = ZERO
        for k in range(5):
            assert mul(a, OrdinalCNF.from_int(k)) == acc
            acc = add(acc, a)


def test_mul_identities():
    assert mul(o("w+1"), OMEGA) == OMEGA_SQUARED
    assert mul(o("w*2"), OMEGA) == OMEGA_SQUARED
    assert mul(OMEGA, OMEGA) == OMEGA_SQUARED
    assert mul(o("2"), OMEGA) == OMEGA
    assert mul(OMEGA, o("2")) == o("w*2")
    assert mul(ZERO, OMEGA) == ZERO
    assert mul(OMEGA, ZERO) == ZERO
    assert mul(o("w^2+w"), OMEGA) == o("w^3")


def test_mul_left_distributes_on_samples():
    xs = sample_ordinals(2, 2)
    rng = random.Random(4)
    for _ in range(2000):
        a, b, c = (rng.choice(xs) for _ in range(3))
        assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_strict_monotone_right_addition(seed):
    rng = random.Random(seed)
    xs = sample_ordinals(2, 3)
    a = rng.choice(xs)
    b, c = sorted((rng.choice(xs), rng.choice(xs)))
    if b < c:
        assert add(a, b) < add(a, c)
    assert add(b, a) <= add(c, a)


def brute_closed(lam, gamma, probes):
    return all(add(x, e) < lam
               for x in probes if x < lam for e in probes if e < gamma)


def test_closed_under_addition_matches_brute_force():
    # coefficients up to 5 so every violation among the cases below has
    # a witness inside the probe set (e.g. 4 + 1 for lam = 5)
    probes = sample_ordinals(3, 5)
    cases = [o(s) for s in
             ("0", "1", "2", "5", "w", "w+1", "w*2", "w*2+1", "w*3",
              "w^2", "w^2+w", "w^2*2", "w^3")]
    for lam, gamma in itertools.product(cases, repeat=2):
        got = closed_under_addition_below(lam, gamma)
        expect = brute_closed(lam, gamma, probes)
        assert got == expect, (str(lam), str(gamma), got)


def test_closed_known_cases():
    assert not closed_under_addition_below(o("w*2"), o("w*2"))
    assert closed_under_addition_below(o("w^2"), o("w^2"))
    assert closed_under_addition_below(OMEGA, OMEGA)
    assert closed_under_addition_below(ONE, ONE)
    assert not closed_under_addition_below(o("2"), o("2"))
    assert closed_under_addition_below(o("w*2"), OMEGA)
    assert not closed_under_addition_below(o("w*2"), o("w+1"))
