"""Constructors for the named potentialist systems, truncated to desk scale.

Infinite systems are rendered by sampling finitely many worlds below an
ordinal cut; the topmost sampled world is marked frontier so that
universal certifications do not trust box-truths created by the cut.
Validity claims about the untruncated systems are not certified here,
only their finite renderings.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .formula import Atom, Formula
from .ordinal import OMEGA, OrdinalCNF, closed_under_addition_below, mul
from .potentialist import (
    ControlStatement, PotentialistSystem, World, ratchet_element,
)

DEFAULT_BLOCK_WIDTH = 6


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class TruncationSpec:
    """Finite-rendering parameters.

    ``ordinal_cut`` bounds the sampled world indices of ordinal-indexed
    systems; ``height_cap`` and ``coordinates`` are the grid parameters
    used by the Cohen-style constructor.
    """

    ordinal_cut: OrdinalCNF
    height_cap: int = DEFAULT_BLOCK_WIDTH
    coordinates: int = 2

    def __post_init__(self):
        if self.height_cap <= 0 or self.coordinates <= 0:
            raise ValueError("caps must be positive")
        if not self.ordinal_cut.terms:
            raise TruncationError("ordinal cut must be positive")


def lambda_star(lam: OrdinalCNF) -> OrdinalCNF:
    """The index bound the construction actually uses.

    A length already closed under its own addition is kept; otherwise
    the construction runs to lam * w, which is always closed.
    """
    if closed_under_addition_below(lam, lam):
        return lam
    return mul(lam, OMEGA)


def _coerce_trunc(trunc) -> TruncationSpec:
    if isinstance(trunc, TruncationSpec):
        return trunc
    if isinstance(trunc, int):
        trunc = OrdinalCNF.from_int(trunc)
    if isinstance(trunc, OrdinalCNF):
        return TruncationSpec(trunc)
    raise TypeError("expected TruncationSpec, OrdinalCNF or int")


def ordinal_slug(xi: OrdinalCNF) -> str:
    """Short dotted name for an ordinal below w^2: 0, 5, w, w.3, w2.1."""
    a = 0
    b = 0
    for exp, coeff in xi.terms:
        if exp == 0:
            b = coeff
        elif exp == 1:
            a = coeff
        else:
            raise TruncationError("slug only defined below w^2")
    if a == 0:
        return str(b)
    head = "w" if a == 1 else f"w{a}"
    return head if b == 0 else f"{head}.{b}"


def sampled_indices(trunc) -> tuple[OrdinalCNF, ...]:
    """The finite sample of world indices below the ordinal cut.

    A cut w*a + b yields blocks w*j + i for j up to a; b > 0 fixes the
    block width, a limit cut uses the default width.
    """
    spec = _coerce_trunc(trunc)
    cut = spec.ordinal_cut
    a = 0
    b = 0
    for exp, coeff in cut.terms:
        if exp == 0:
            b = coeff
        elif exp == 1:
            a = coeff
        else:
            raise TruncationError(
                "finite sampling needs a cut below w^2")
    width = b if b > 0 else DEFAULT_BLOCK_WIDTH
    blocks = a + 1 if b > 0 else a
    out = []
    for j in range(blocks):
        for i in range(width):
            out.append(OrdinalCNF.omega(1, j) + OrdinalCNF.from_int(i)
                       if j else OrdinalCNF.from_int(i))
    return tuple(out)


@lru_cache(maxsize=None)
def _smallest_cached(lam: OrdinalCNF, cut: OrdinalCNF) -> PotentialistSystem:
    star = lambda_star(lam)
    if star < cut:
        raise TruncationError(
            f"cut {cut} exceeds the construction bound {star}")
    indices = sampled_indices(cut)
    atom_names = [f"r.{ordinal_slug(xi)}" for xi in indices]
    worlds = []
    for wid, xi in enumerate(indices):
        content = frozenset(atom_names[k] for k, eta in enumerate(indices)
                            if eta <= xi)
        worlds.append(World(wid, f"X_{ordinal_slug(xi)}", content))
    n = len(worlds)
    order = [(u, v) for u in range(n) for v in range(u, n)]
    return PotentialistSystem.from_pairs(
        worlds, order, frontier=(n - 1,), atom_alphabet=atom_names)


def smallest_truth_system(lam: OrdinalCNF, trunc) -> PotentialistSystem:
    """Linear system of worlds X_xi carrying iterated truth atoms.

    Atom r.<slug> is true at X_xi when its index is at most xi.  The
    sample runs below trunc.ordinal_cut, which must not exceed
    lambda_star(lam); the topmost sampled world is the frontier.
    """
    spec = _coerce_trunc(trunc)
    return _smallest_cached(lam, spec.ordinal_cut)


def smallest_truth_ratchet(trunc) -> tuple[ControlStatement, ...]:
    """The sampled truth atoms as ratchet elements, in index order."""
    spec = _coerce_trunc(trunc)
    return tuple(
        ratchet_element(Atom(f"r.{ordinal_slug(xi)}"), xi)
        for xi in sampled_indices(spec.ordinal_cut))


@lru_cache(maxsize=None)
def cohen_truth_system(n: int, h: int) -> PotentialistSystem:
    """Grid of mutually generic truth-iteration heights.

    Worlds are height vectors in {0..h}^n ordered coordinatewise.  Atom
    t.<i>.<xi> says coordinate i reached height xi; parity atom s.<i>
    says coordinate i currently sits at an even height.  Worlds with
    any coordinate at the cap h are frontier.
    """
    if n < 2 or h < 2:
        raise ValueError("need at least 2 coordinates and height 2")
    alphabet = [f"t.{i}.{xi}" for i in range(n) for xi in range(1, h + 1)]
    alphabet += [f"s.{i}" for i in range(n)]
    vectors = list(itertools.product(range(h + 1), repeat=n))
    index = {vec: k for k, vec in enumerate(vectors)}
    worlds = []
    frontier = []
    for k, vec in enumerate(vectors):
        content = {f"t.{i}.{xi}"
                   for i, mu in enumerate(vec) for xi in range(1, mu + 1)}
        content.update(f"s.{i}" for i, mu in enumerate(vec) if mu % 2 == 0)
        label = "(" + ",".join(map(str, vec)) + ")"
        worlds.append(World(k, label, frozenset(content)))
        if any(mu == h for mu in vec):
            frontier.append(k)
    masks = [0] * len(vectors)
    for k, vec in enumerate(vectors):
        for above in itertools.product(*(range(mu, h + 1) for mu in vec)):
            masks[k] |= 1 << index[above]
    return PotentialistSystem(tuple(worlds), tuple(masks),
                              frozenset(alphabet), frozenset(frontier))


def cohen_buttons(n: int) -> tuple[Formula, ...]:
    """First-height statements of the even coordinates."""
    return tuple(Atom(f"t.{i}.1") for i in range(0, n, 2))


def cohen_switches(n: int) -> tuple[Formula, ...]:
    """Parity statements of the odd coordinates."""
    return tuple(Atom(f"s.{i}") for i in range(1, n, 2))


def killing_truth_system() -> PotentialistSystem:
    """Three worlds: a root, a truth expansion, and a dead end.

    W_T carries the truth predicate atom t; W_C is the branch where
    the generic class forecloses it.  At W0 the atom is possibly
    necessary but not necessarily possible.  The frame is exact, so
    there is no frontier.
    """
    worlds = (
        World(0, "W0", frozenset()),
        World(1, "W_T", frozenset({"t"})),
        World(2, "W_C", frozenset()),
    )
    order = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)]
    return PotentialistSystem.from_pairs(worlds, order,
                                         atom_alphabet=("t",))


def mostowski_fork() -> PotentialistSystem:
    """Root with two incomparable expansions marked cB and cC."""
    worlds = (
        World(0, "W0", frozenset()),
        World(1, "WB", frozenset({"cB"})),
        World(2, "WC", frozenset({"cC"})),
    )
    order = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)]
    return PotentialistSystem.from_pairs(worlds, order,
                                         atom_alphabet=("cB", "cC"))


def amalgamated_variant(system: PotentialistSystem) -> PotentialistSystem:
    """Close a system under joins of compatible pairs.

    Whenever two worlds share a lower bound but no upper bound, a join
    world is added whose atoms are the pointwise disjunction over the
    joined worlds' down-sets.  Joins are keyed by those down-sets, so
    amalgamating an already amalgamated system changes nothing.
    """
    n = len(system.worlds)
    down = [frozenset(v for v in range(n)
                      if system.order_masks[v] >> w & 1)
            for w in range(n)]
    join_keys: list[frozenset[int]] = []
    key_pos: dict[frozenset[int], int] = {}

    def up_mask(w: int) -> int:
        mask = system.order_masks[w] if w < n else 1 << w
        base = down[w] if w < n else join_keys[w - n]
        for j, key in enumerate(join_keys):
            if base <= key:
                mask |= 1 << (n + j)
        return mask

    def base_set(w: int) -> frozenset[int]:
        return down[w] if w < n else join_keys[w - n]

    changed = True
    while changed:
        changed = False
        total = n + len(join_keys)
        ups = [up_mask(w) for w in range(total)]
        for x in range(total):
            for y in range(x + 1, total):
                if not any(ups[w] >> x & 1 and ups[w] >> y & 1
                           for w in range(total)):
                    continue
                if ups[x] & ups[y]:
                    continue
                key = base_set(x) | base_set(y)
                if key not in key_pos:
                    key_pos[key] = len(join_keys)
                    join_keys.append(key)
                    changed = True

    join_keys.sort(key=lambda k: (len(k), sorted(k)))
    worlds = list(system.worlds)
    for j, key in enumerate(join_keys):
        members = sorted(key)
        maximal = [w for w in members
                   if all(v == w or w not in down[v] for v in members)]
        label = "J(" + "+".join(system.worlds[w].label for w in maximal) + ")"
        content = frozenset().union(
            *(system.worlds[w].true_atoms for w in members))
        worlds.append(World(n + j, label, content))
    pairs = list(system.order_pairs())
    for j, key in enumerate(join_keys):
        jid = n + j
        pairs.append((jid, jid))
        for w in key:
            pairs.append((w, jid))
        for j2, key2 in enumerate(join_keys):
            if key <= key2:
                pairs.append((jid, n + j2))
    return PotentialistSystem.from_pairs(
        worlds, pairs, frontier=system.frontier,
        atom_alphabet=system.atom_alphabet)
