"""Slow reference implementations used as oracles by the tests.

Everything here recomputes semantics from definitions with plain sets
and recursion, deliberately sharing no code with the bitmask evaluator
in the package.
"""
from __future__ import annotations

import random

from potmodal.formula import (
    And, Atom, Bottom, Box, Diamond, Formula, Iff, Implies, Not, Or, Top,
)


def slow_check(world_count, access_pairs, valuation, world, f) -> bool:
    """Naive Kripke satisfaction over explicit pair sets."""
    access = set(access_pairs)

    def sat(w, g) -> bool:
        if isinstance(g, Atom):
            return w in valuation[g.name]
        if isinstance(g, Top):
            return True
        if isinstance(g, Bottom):
            return False
        if isinstance(g, Not):
            return not sat(w, g.operand)
        if isinstance(g, And):
            return sat(w, g.left) and sat(w, g.right)
        if isinstance(g, Or):
            return sat(w, g.left) or sat(w, g.right)
        if isinstance(g, Implies):
            return not sat(w, g.left) or sat(w, g.right)
        if isinstance(g, Iff):
            return sat(w, g.left) == sat(w, g.right)
        if isinstance(g, Box):
            return all(sat(v, g.operand) for v in range(world_count)
                       if (w, v) in access)
        if isinstance(g, Diamond):
            return any(sat(v, g.operand) for v in range(world_count)
                       if (w, v) in access)
        raise TypeError(type(g))

    return sat(world, f)


def random_preorder(rng: random.Random, n: int):
    """Reflexive-transitive closure of a random pair set, as pair list."""
    pairs = {(w, w) for w in range(n)}
    for _ in range(rng.randrange(2 * n + 1)):
        pairs.add((rng.randrange(n), rng.randrange(n)))
    changed = True
    while changed:
        changed = False
        for (a, b) in list(pairs):
            for (c, d) in list(pairs):
                if b == c and (a, d) not in pairs:
                    pairs.add((a, d))
                    changed = True
    return sorted(pairs)


def random_formula(rng: random.Random, atom_names, depth: int) -> Formula:
    if depth == 0 or rng.random() < 0.3:
        return Atom(rng.choice(atom_names))
    shape = rng.randrange(7)
    if shape == 0:
        return Not(random_formula(rng, atom_names, depth - 1))
    if shape == 1:
        return Box(random_formula(rng, atom_names, depth - 1))
    if shape == 2:
        return Diamond(random_formula(rng, atom_names, depth - 1))
    left = random_formula(rng, atom_names, depth - 1)
    right = random_formula(rng, atom_names, depth - 1)
    return [And, Or, Implies, Iff][shape - 3](left, right)


def naive_independence(system, buttons, switches, evaluate, box) -> bool:
    """Definition-chasing independence check, one pattern at a time."""
    import itertools

    interior = [w.id for w in system.worlds if w.id not in system.frontier]
    n = len(system.worlds)
    for w in interior:
        pushed = [evaluate(system, w, box(b)) for b in buttons]
        for include in itertools.product((False, True), repeat=len(buttons)):
            if any(p and not inc for p, inc in zip(pushed, include)):
                continue
            for assign in itertools.product((False, True),
                                            repeat=len(switches)):
                found = False
                for v in range(n):
                    if not system.order_masks[w] >> v & 1:
                        continue
                    if all(evaluate(system, v, box(b)) == inc
                           for b, inc in zip(buttons, include)) and \
                       all(evaluate(system, v, s) == a
                           for s, a in zip(switches, assign)):
                        found = True
                        break
                if not found:
                    return False
    return True
