"""Finite analogue of definable class families over a structure.

This module stands in for class-family machinery over models of set
theory: finite structures play the universe, subsets play classes, and
parametric first-order definability is computed exactly via the Galois
criterion (invariance under automorphisms fixing the parameters).  An
Ehrenfeucht-Fraisse style enumeration oracle provides an independent
semantic route at small quantifier rank; agreement is checked in tests,
not assumed.  Everything here is an analogue, not an instance, of the
set-theoretic setting: a finite structure has no set/class distinction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import CapExceededError
from .potentialist import PotentialistSystem, World

STRUCTURE_CAP = 8
TOP_DOWN_CAP = 4


@dataclass(frozen=True)
class FiniteStructure:
    """Domain 0..size-1 with named finite relation tables."""

    size: int
    relations: tuple[tuple[str, int, frozenset[tuple[int, ...]]], ...]

    def __post_init__(self):
        if self.size <= 0:
            raise ValueError("domain must be nonempty")
        if self.size > STRUCTURE_CAP:
            raise CapExceededError(
                f"structure size {self.size} exceeds cap {STRUCTURE_CAP}")
        seen = set()
        for name, arity, table in self.relations:
            if name in seen:
                raise ValueError(f"duplicate relation {name!r}")
            seen.add(name)
            if arity <= 0:
                raise ValueError("relation arity must be positive")
            for tup in table:
                if len(tup) != arity or not all(
                        0 <= x < self.size for x in tup):
                    raise ValueError(f"tuple {tup} invalid for {name!r}")

    @classmethod
    def build(cls, size: int,
              relations: Mapping[str, Iterable[Sequence[int]]] = ()
              ) -> "FiniteStructure":
        rels = []
        for name in sorted(relations) if relations else ():
            table = frozenset(tuple(t) for t in relations[name])
            arities = {len(t) for t in table}
            if len(arities) > 1:
                raise ValueError(f"mixed arities in relation {name!r}")
            arity = arities.pop() if arities else 1
            rels.append((name, arity, table))
        return cls(size, tuple(rels))

    def to_json_dict(self) -> dict:
        return {
            "size": self.size,
            "relations": {
                name: {"arity": arity,
                       "tuples": sorted(list(t) for t in table)}
                for name, arity, table in self.relations
            },
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FiniteStructure":
        rels = []
        for name in sorted(data.get("relations", {})):
            entry = data["relations"][name]
            table = frozenset(tuple(t) for t in entry["tuples"])
            rels.append((name, entry["arity"], table))
        return cls(data["size"], tuple(rels))


@dataclass(frozen=True)
class ClassFamily:
    subsets: frozenset[frozenset[int]]
    closed: bool


def automorphisms(structure: FiniteStructure) -> list[tuple[int, ...]]:
    """All relation-preserving bijections, brute force."""
    out = []
    for perm in itertools.permutations(range(structure.size)):
        if all(frozenset(tuple(perm[x] for x in tup) for tup in table)
               == table
               for _name, _arity, table in structure.relations):
            out.append(perm)
    return out


def _stabilizer(auts: Sequence[tuple[int, ...]],
                params: Sequence[int],
                extra: Sequence[frozenset[int]]) -> list[tuple[int, ...]]:
    kept = []
    for g in auts:
        if any(g[p] != p for p in params):
            continue
        if any(frozenset(g[x] for x in s) != s for s in extra):
            continue
        kept.append(g)
    return kept


def definable_subsets(structure: FiniteStructure,
                      params: Sequence[int] = (),
                      extra: Iterable[Iterable[int]] = ()) -> ClassFamily:
    """Subsets definable with the given element and set parameters.

    Computed as invariance under every automorphism fixing the params
    pointwise and each extra set setwise.  Exact for full first-order
    definability on a finite structure.
    """
    for p in params:
        if not 0 <= p < structure.size:
            raise ValueError(f"parameter {p} outside the domain")
    extra_sets = [frozenset(s) for s in extra]
    group = _stabilizer(automorphisms(structure), params, extra_sets)
    subsets = []
    for bits in range(1 << structure.size):
        s = frozenset(x for x in range(structure.size) if bits >> x & 1)
        if all(frozenset(g[x] for x in s) == s for g in group):
            subsets.append(s)
    return ClassFamily(frozenset(subsets), closed=True)


def def_closure(structure: FiniteStructure,
                seed: Iterable[Iterable[int]] | ClassFamily) -> ClassFamily:
    """Least family containing the seed and closed under definability.

    One definability pass suffices: sets invariant under the seed's
    stabilizer are invariant under the (larger) stabilizer of the
    resulting family, so the result is already closed.
    """
    if isinstance(seed, ClassFamily):
        seed_sets = seed.subsets
    else:
        seed_sets = frozenset(frozenset(s) for s in seed)
    return definable_subsets(structure, (), sorted(seed_sets, key=sorted))


def _atomic_matches(structure: FiniteStructure,
                    ta: tuple[int, ...], tb: tuple[int, ...]) -> bool:
    k = len(ta)
    for i in range(k):
        for j in range(k):
            if (ta[i] == ta[j]) != (tb[i] == tb[j]):
                return False
    for _name, arity, table in structure.relations:
        for pos in itertools.product(range(k), repeat=arity):
            ina = tuple(ta[p] for p in pos) in table
            inb = tuple(tb[p] for p in pos) in table
            if ina != inb:
                return False
    return True


def rank_definable_subsets(structure: FiniteStructure,
                           rank: int) -> ClassFamily:
    """Formula-semantics oracle: subsets definable at bounded rank.

    A subset is definable by a one-free-variable formula of quantifier
    rank at most ``rank`` exactly when it is a union of classes of the
    rank-round Ehrenfeucht-Fraisse equivalence on elements.  This route
    never looks at automorphisms, which is what makes it a genuinely
    independent check on definable_subsets.
    """
    if rank < 0:
        raise ValueError("rank must be non-negative")
    memo: dict = {}

    def equiv(k: int, ta: tuple[int, ...], tb: tuple[int, ...]) -> bool:
        key = (k, ta, tb)
        if key in memo:
            return memo[key]
        if not _atomic_matches(structure, ta, tb):
            memo[key] = False
            return False
        if k == 0:
            memo[key] = True
            return True
        ok = True
        for x in range(structure.size):
            if not any(equiv(k - 1, ta + (x,), tb + (y,))
                       for y in range(structure.size)):
                ok = False
                break
        if ok:
            for y in range(structure.size):
                if not any(equiv(k - 1, ta + (x,), tb + (y,))
                           for x in range(structure.size)):
                    ok = False
                    break
        memo[key] = ok
        return ok

    classes: list[list[int]] = []
    for a in range(structure.size):
        for cls in classes:
            if equiv(rank, (a,), (cls[0],)):
                cls.append(a)
                break
        else:
            classes.append([a])
    subsets = set()
    for picks in itertools.product((False, True), repeat=len(classes)):
        s = frozenset(x for cls, take in zip(classes, picks)
                      if take for x in cls)
        subsets.add(s)
    return ClassFamily(frozenset(subsets), closed=False)


def _closure_of(generators: Sequence[tuple[int, ...]],
                identity: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    group = {identity}
    frontier = [identity]
    while frontier:
        g = frontier.pop()
        for h in generators:
            comp = tuple(g[h[i]] for i in range(len(identity)))
            if comp not in group:
                group.add(comp)
                frontier.append(comp)
    return frozenset(group)


def _subgroups(auts: Sequence[tuple[int, ...]],
               size: int) -> list[frozenset[tuple[int, ...]]]:
    identity = tuple(range(size))
    found = {frozenset({identity})}
    for g, h in itertools.combinations_with_replacement(auts, 2):
        found.add(_closure_of((g, h), identity))
    return sorted(found, key=lambda grp: (len(grp), sorted(grp)))


def _invariant_masks(group: Iterable[tuple[int, ...]],
                     size: int) -> frozenset[int]:
    masks = []
    for bits in range(1 << size):
        good = True
        for g in group:
            image = 0
            for x in range(size):
                if bits >> x & 1:
                    image |= 1 << g[x]
            if image != bits:
                good = False
                break
        if good:
            masks.append(bits)
    return frozenset(masks)


def top_down_system(structure: FiniteStructure) -> PotentialistSystem:
    """All definably closed subset families, ordered by inclusion.

    The closed families are exactly the fixed-set families of subgroups
    of the automorphism group; subgroups are enumerated as closures of
    at most two generators, which is complete for the groups arising at
    the enforced cap.  Atoms c<mask> assert membership of one subset of
    the domain in the current family.  The full powerset family is the
    genuine top world, so the frontier is empty.
    """
    if structure.size > TOP_DOWN_CAP:
        raise CapExceededError(
            f"top-down construction capped at size {TOP_DOWN_CAP}")
    auts = automorphisms(structure)
    families = sorted(
        {_invariant_masks(grp, structure.size)
         for grp in _subgroups(auts, structure.size)},
        key=lambda fam: (len(fam), sorted(fam)))
    alphabet = [f"c{m}" for m in range(1 << structure.size)]
    worlds = []
    for wid, fam in enumerate(families):
        label = "F(" + ",".join(str(m) for m in sorted(fam)) + ")"
        worlds.append(World(wid, label,
                            frozenset(f"c{m}" for m in fam)))
    pairs = [(i, j) for i, a in enumerate(families)
             for j, b in enumerate(families) if a <= b]
    return PotentialistSystem.from_pairs(worlds, pairs,
                                         atom_alphabet=alphabet)
