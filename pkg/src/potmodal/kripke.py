"""Finite Kripke frames and models.

Worlds are 0..n-1.  Sets of worlds are bitmasks (world w is bit 1<<w),
which keeps satisfaction checking cheap enough for the exhaustive
sweeps elsewhere in the package.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Optional

from .errors import BudgetExceededError, CapExceededError, UnknownAtomError
from .formula import (
    And, Atom, Bottom, Box, Diamond, Formula, Iff, Implies, Not, Or, Top, atoms,
)

DEFAULT_VALUATION_BUDGET = 1 << 20
DEFAULT_ENUMERATION_CAP = 6
FRAME_CLASSES = ("preorder", "directed-preorder", "linear-preorder")


@dataclass(frozen=True)
class Frame:
    """A finite frame: world count plus accessibility pairs."""

    world_count: int
    access: frozenset[tuple[int, int]]

    def __post_init__(self):
        if self.world_count < 1:
            raise ValueError("a frame needs at least one world")
        for u, v in self.access:
            if not (0 <= u < self.world_count and 0 <= v < self.world_count):
                raise ValueError(f"access pair {(u, v)} out of range")

    @classmethod
    def from_pairs(cls, world_count: int, pairs) -> "Frame":
        return cls(world_count, frozenset((int(u), int(v)) for u, v in pairs))

    @classmethod
    def preorder(cls, world_count: int, pairs) -> "Frame":
        """Reflexive-transitive closure of ``pairs``."""
        masks = [1 << w for w in range(world_count)]
        for u, v in pairs:
            masks[u] |= 1 << v
        changed = True
        while changed:
            changed = False
            for u in range(world_count):
                m = masks[u]
                acc = m
                while m:
                    v = (m & -m).bit_length() - 1
                    m &= m - 1
                    acc |= masks[v]
                if acc != masks[u]:
                    masks[u] = acc
                    changed = True
        return cls(world_count, frozenset(
            (u, v) for u in range(world_count) for v in _bits(masks[u])))

    def successor_masks(self) -> tuple[int, ...]:
        return _successor_masks(self)

    def to_json_dict(self) -> dict:
        return {"worlds": self.world_count,
                "access": [list(p) for p in sorted(self.access)]}


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@lru_cache(maxsize=4096)
def _successor_masks(frame: Frame) -> tuple[int, ...]:
    masks = [0] * frame.world_count
    for u, v in frame.access:
        masks[u] |= 1 << v
    return tuple(masks)


@dataclass(frozen=True, eq=False)
class KripkeModel:
    """A frame with a valuation: atom name -> set of worlds."""

    frame: Frame
    valuation: Mapping[str, frozenset[int]]

    def __post_init__(self):
        for name, worlds in self.valuation.items():
            for w in worlds:
                if not 0 <= w < self.frame.world_count:
                    raise ValueError(f"valuation of {name!r} mentions world {w}")

    def atom_masks(self) -> dict[str, int]:
        return {name: sum(1 << w for w in worlds)
                for name, worlds in self.valuation.items()}

    def to_json_dict(self) -> dict:
        d = self.frame.to_json_dict()
        d["valuation"] = {name: sorted(worlds)
                          for name, worlds in sorted(self.valuation.items())}
        return d


def eval_mask(f: Formula, succ: tuple[int, ...], atom_masks: Mapping[str, int],
              memo: Optional[dict] = None) -> int:
    """Extension of ``f`` as a bitmask over the worlds of ``succ``."""
    n = len(succ)
    full = (1 << n) - 1
    if memo is None:
        memo = {}

    def go(node: Formula) -> int:
        cached = memo.get(node)
        if cached is not None:
            return cached
        if isinstance(node, Atom):
            try:
                out = atom_masks[node.name]
            except KeyError:
                raise UnknownAtomError(node.name) from None
        elif isinstance(node, Top):
            out = full
        elif isinstance(node, Bottom):
            out = 0
        elif isinstance(node, Not):
            out = full & ~go(node.operand)
        elif isinstance(node, And):
            out = go(node.left) & go(node.right)
        elif isinstance(node, Or):
            out = go(node.left) | go(node.right)
        elif isinstance(node, Implies):
            out = (full & ~go(node.left)) | go(node.right)
        elif isinstance(node, Iff):
            a, b = go(node.left), go(node.right)
            out = full & ~(a ^ b)
        elif isinstance(node, Box):
            sub = go(node.operand)
            out = 0
            for w in range(n):
                if succ[w] & ~sub == 0:
                    out |= 1 << w
        elif isinstance(node, Diamond):
            sub = go(node.operand)
            out = 0
            for w in range(n):
                if succ[w] & sub:
                    out |= 1 << w
        else:
            raise TypeError(f"not a formula: {node!r}")
        memo[node] = out
        return out

    return go(f)


def check(model: KripkeModel, world: int, f: Formula) -> bool:
    """Does ``f`` hold at ``world`` of ``model``?"""
    n = model.frame.world_count
    if not 0 <= world < n:
        raise IndexError(f"world {world} out of range for {n} worlds")
    ext = eval_mask(f, model.frame.successor_masks(), model.atom_masks())
    return bool(ext >> world & 1)

def valid_in_model(model: KripkeModel, f: Formula) -> bool:
    """Does ``f`` hold at every world of ``model``?"""
    full = (1 << model.frame.world_count) - 1
    ext = eval_mask(f, model.frame.successor_masks(), model.atom_masks())
    return ext == full


def countermodel_in_frame(frame: Frame, f: Formula,
                          budget: int = DEFAULT_VALUATION_BUDGET
                          ) -> Optional[tuple[dict[str, frozenset[int]], int]]:
    """First valuation and world falsifying ``f`` on ``frame``, if any.

    Valuations range over the atoms of ``f`` only, enumerated in
    ascending bitmask order (atoms sorted), so the witness is
    deterministic.  Raises BudgetExceededError when the enumeration
    would need more than ``budget`` valuations.
    """
    names = sorted(atoms(f))
    n = frame.world_count
    full = (1 << n) - 1
    required = (1 << n) ** len(names)
    if required > budget:
        raise BudgetExceededError(
            f"{required} valuations needed, budget is {budget}", required=required)
    succ = frame.successor_masks()
    for combo in itertools.product(range(1 << n), repeat=len(names)):
        masks = dict(zip(names, combo))
        ext = eval_mask(f, succ, masks)
        if ext != full:
            bad = full & ~ext
            world = (bad & -bad).bit_length() - 1
            valuation = {name: frozenset(_bits(mask)) for name, mask in masks.items()}
            return valuation, world
    return None


def valid_in_frame(frame: Frame, f: Formula,
                   budget: int = DEFAULT_VALUATION_BUDGET) -> bool:
    """Does ``f`` hold at every world under every valuation of its atoms?"""
    return countermodel_in_frame(frame, f, budget) is None


@dataclass(frozen=True)
class FrameProperties:
    reflexive: bool
    transitive: bool
    antisymmetric: bool
    directed: bool
    pairwise_directed: bool
    linear: bool


def frame_properties(frame: Frame) -> FrameProperties:
    """Structural flags of a frame.

    ``directed`` is the Church-Rosser condition (any two worlds above a
    common point share an upper bound), which is the frame condition for
    .2; ``pairwise_directed`` asks for upper bounds of arbitrary pairs.
    ``linear`` means any two worlds are comparable.
    """
    n = frame.world_count
    succ = frame.successor_masks()
    reflexive = all(succ[w] >> w & 1 for w in range(n))
    transitive = all(succ[v] & ~succ[u] == 0
                     for u in range(n) for v in _bits(succ[u]))
    antisymmetric = all(not (succ[u] >> v & 1 and succ[v] >> u & 1)
                        for u in range(n) for v in range(n) if u != v)
    def joined(u: int, v: int) -> bool:
        return bool(succ[u] & succ[v])
    pairwise = all(joined(u, v) for u in range(n) for v in range(n))
    directed = all(joined(u, v)
                   for w in range(n)
                   for u in _bits(succ[w])
                   for v in _bits(succ[w]))
    linear = all(succ[u] >> v & 1 or succ[v] >> u & 1
                 for u in range(n) for v in range(n))
    return FrameProperties(reflexive, transitive, antisymmetric,
                           directed, pairwise, linear)


# --- enumeration up to isomorphism ---------------------------------------

def canonical_key(world_count: int, access) -> tuple[int, int]:
    """Isomorphism-invariant key: (world count, minimal adjacency integer).

    Vertices are first partitioned by iterated degree refinement; the
    adjacency matrix integer is then minimized over all permutations
    that respect the partition.  Two frames get the same key exactly
    when they are isomorphic.
    """
    n = world_count
    rows = [0] * n
    for u, v in access:
        rows[u] |= 1 << v
    cols = [0] * n
    for u in range(n):
        for v in _bits(rows[u]):
            cols[v] |= 1 << u

    colors = [0] * n
    while True:
        desc = []
        for v in range(n):
            out_colors = tuple(sorted(colors[u] for u in _bits(rows[v])))
            in_colors = tuple(sorted(colors[u] for u in _bits(cols[v])))
            desc.append((colors[v], rows[v] >> v & 1, out_colors, in_colors))
        ranking = {d: i for i, d in enumerate(sorted(set(desc)))}
        new = [ranking[d] for d in desc]
        if new == colors:
            break
        colors = new

    classes: dict[int, list[int]] = {}
    for v in range(n):
        classes.setdefault(colors[v], []).append(v)
    ordered_classes = [classes[c] for c in sorted(classes)]

    best = None
    for parts in itertools.product(*(itertools.permutations(c) for c in ordered_classes)):
        perm = [v for part in parts for v in part]
        bits = 0
        for i in range(n):
            row = rows[perm[i]]
            for j in range(n):
                bits = bits << 1 | (row >> perm[j] & 1)
        if best is None or bits < best:
            best = bits
    return (n, best)


def _ideals(down: tuple[int, ...], k: int) -> list[int]:
    out = []
    for s in range(1 << k):
        ok = True
        rest = s
        while rest:
            v = (rest & -rest).bit_length() - 1
            rest &= rest - 1
            if down[v] & ~s:
                ok = False
                break
        if ok:
            out.append(s)
    return out


@lru_cache(maxsize=None)
def _posets_up_to_iso(k: int) -> tuple[tuple[int, ...], ...]:
    """All partial orders on k points, as up-set masks, one per iso class."""
    seen = {}
    def extend(up: tuple[int, ...], m: int):
        if m == k:
            key = canonical_key(k, [(u, v) for u in range(k) for v in _bits(up[u])])
            if key not in seen:
                seen[key] = up
            return
        down = tuple(sum(1 << u for u in range(m) if up[u] >> v & 1)
                     for v in range(m))
        ideals = _ideals(down, m)
        filters = _ideals(tuple(up[v] & ((1 << m) - 1) & ~(1 << v) for v in range(m)), m)
        for d_set in ideals:
            for u_set in filters:
                if d_set & u_set:
                    continue
                ok = True
                for dd in _bits(d_set):
                    if u_set & ~up[dd]:
                        ok = False
                        break
                if not ok:
                    continue
                new_up = list(up)
                for dd in _bits(d_set):
                    new_up[dd] |= 1 << m
                new_up.append(1 << m | u_set)
                extend(tuple(new_up), m + 1)
    extend((), 0)
    return tuple(seen.values())


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _frames_exact(size: int, frame_class: str) -> tuple[Frame, ...]:
    found: dict[tuple[int, int], Frame] = {}
    for k in range(1, size + 1):
        for up in _posets_up_to_iso(k):
            for sizes in _compositions(size, k):
                offsets = [0]
                for s in sizes:
                    offsets.append(offsets[-1] + s)
                pairs = []
                for ci in range(k):
                    for cj in _bits(up[ci]):
                        for u in range(offsets[ci], offsets[ci + 1]):
                            for v in range(offsets[cj], offsets[cj + 1]):
                                pairs.append((u, v))
                                if ci == cj and u != v:
                                    pairs.append((v, u))
                key = canonical_key(size, pairs)
                if key in found:
                    continue
                found[key] = Frame.from_pairs(size, pairs)
    frames = []
    for key in sorted(found):
        fr = found[key]
        props = frame_properties(fr)
        if frame_class == "directed-preorder" and not props.directed:
            continue
        if frame_class == "linear-preorder" and not props.linear:
            continue
        frames.append(fr)
    return tuple(frames)


def enumerate_frames(n: int, frame_class: str = "preorder",
                     cap: int = DEFAULT_ENUMERATION_CAP) -> Iterator[Frame]:
    """Yield every frame of ``frame_class`` with up to ``n`` worlds.

    Each isomorphism class appears exactly once, in a fixed order:
    ascending world count, then ascending canonical key.
    """
    if frame_class not in FRAME_CLASSES:
        raise ValueError(f"unknown frame class {frame_class!r}")
    if n > cap:
        raise CapExceededError(f"requested {n} worlds, cap is {cap}")
    for size in range(1, n + 1):
        yield from _frames_exact(size, frame_class)


def to_dot(frame: Frame, labels: Optional[Mapping[int, str]] = None) -> str:
    """GraphViz rendering; self-loops are omitted for readability."""
    lines = ["digraph frame {"]
    for w in range(frame.world_count):
        name = labels[w] if labels else f"w{w}"
        lines.append(f'  n{w} [label="{name}"];')
    for u, v in sorted(frame.access):
        if u != v:
            lines.append(f"  n{u} -> n{v};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def frame_from_json_dict(data: Mapping) -> Frame:
    return Frame.from_pairs(data["worlds"], data["access"])


def model_from_json_dict(data: Mapping) -> KripkeModel:
    frame = frame_from_json_dict(data)
    valuation = {name: frozenset(worlds)
                 for name, worlds in data.get("valuation", {}).items()}
    return KripkeModel(frame, valuation)
