"""Potentialist systems over a finite world set.

A system is a reflexive-transitive order on finitely many worlds, each
carrying a total valuation over the system's atom alphabet.  Worlds in
``frontier`` sit at a truncation edge: modal operators still quantify
over them, but universal certifications (buttons, switches, ratchets,
independence) quantify only over the interior, because a frontier
world's box-truths reflect the cut rather than the modelled object.

``refute_via_controls`` and ``refute_via_ratchet`` turn a bounded
refutation (from ``logics.decide``) into a substitution built from
control statements plus a system world, and only return witnesses that
re-verify under ``evaluate``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Mapping, Optional, Sequence

from . import kripke, logics
from .errors import BudgetExceededError, UnknownAtomError
from .formula import (
    And, Atom, AxiomScheme, Bottom, Box, Diamond, Formula, Implies, Not, Or,
    Top, atoms, instantiate, substitute,
)
from .kripke import Frame, KripkeModel, _bits
from .ordinal import OMEGA_SQUARED, OrdinalCNF, closed_under_addition_below

DEFAULT_POOL_LIMIT = 256
DEFAULT_PAIR_LIMIT = 40000

BUTTON = "button"
SWITCH = "switch"
RATCHET_ELEMENT = "ratchet-element"


@dataclass(frozen=True)
class World:
    id: int
    label: str
    true_atoms: frozenset[str]


@dataclass(frozen=True)
class ControlStatement:
    kind: str
    statement: Formula
    index: Optional[OrdinalCNF] = None

    def __post_init__(self):
        if self.kind not in (BUTTON, SWITCH, RATCHET_ELEMENT):
            raise ValueError(f"unknown control kind {self.kind!r}")


def button(statement: Formula) -> ControlStatement:
    return ControlStatement(BUTTON, statement)


def switch(statement: Formula) -> ControlStatement:
    return ControlStatement(SWITCH, statement)


def ratchet_element(statement: Formula, index: OrdinalCNF) -> ControlStatement:
    return ControlStatement(RATCHET_ELEMENT, statement, index)


@dataclass(frozen=True)
class SystemComparison:
    covers: bool
    refines: bool


@dataclass(eq=False)
class PotentialistSystem:
    """Worlds, order (as successor bitmasks), alphabet and frontier."""

    worlds: tuple[World, ...]
    order_masks: tuple[int, ...]
    atom_alphabet: frozenset[str]
    frontier: frozenset[int]
    _ext_memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        n = len(self.worlds)
        if n == 0:
            raise ValueError("a system needs at least one world")
        for i, w in enumerate(self.worlds):
            if w.id != i:
                raise ValueError("world ids must be 0..n-1 in order")
            if not w.true_atoms <= self.atom_alphabet:
                raise ValueError(f"world {w.label} uses undeclared atoms")
        if len(self.order_masks) != n:
            raise ValueError("order_masks length must match world count")
        full = (1 << n) - 1
        for w in range(n):
            if self.order_masks[w] & ~full:
                raise ValueError("order mask out of range")
            if not self.order_masks[w] >> w & 1:
                raise ValueError("order must be reflexive")
        for w in range(n):
            for v in _bits(self.order_masks[w]):
                if self.order_masks[v] & ~self.order_masks[w]:
                    raise ValueError("order must be transitive")
        if not all(0 <= w < n for w in self.frontier):
            raise ValueError("frontier world out of range")

    @classmethod
    def from_pairs(cls, worlds: Sequence[World], order_pairs,
                   frontier=(), atom_alphabet=None) -> "PotentialistSystem":
        n = len(worlds)
        masks = [0] * n
        for u, v in order_pairs:
            masks[u] |= 1 << v
        if atom_alphabet is None:
            atom_alphabet = frozenset().union(*(w.true_atoms for w in worlds)) \
                if worlds else frozenset()
        return cls(tuple(worlds), tuple(masks), frozenset(atom_alphabet),
                   frozenset(frontier))

    @property
    def world_count(self) -> int:
        return len(self.worlds)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.worlds)) - 1

    @property
    def interior_mask(self) -> int:
        mask = self.full_mask
        for w in self.frontier:
            mask &= ~(1 << w)
        return mask

    @cached_property
    def atom_masks(self) -> dict[str, int]:
        masks = {name: 0 for name in self.atom_alphabet}
        for w in self.worlds:
            for name in w.true_atoms:
                masks[name] |= 1 << w.id
        return masks

    def order_pairs(self) -> Iterator[tuple[int, int]]:
        for w in range(len(self.worlds)):
            for v in _bits(self.order_masks[w]):
                yield (w, v)

    def to_frame(self) -> Frame:
        return Frame(len(self.worlds), frozenset(self.order_pairs()))

    def to_model(self) -> KripkeModel:
        valuation = {name: frozenset(_bits(mask))
                     for name, mask in self.atom_masks.items()}
        return KripkeModel(self.to_frame(), valuation)

    def to_json_dict(self) -> dict:
        return {
            "worlds": [
                {"id": w.id, "label": w.label,
                 "atoms": {a: (a in w.true_atoms)
                           for a in sorted(self.atom_alphabet)}}
                for w in self.worlds
            ],
            "order": [list(p) for p in sorted(self.order_pairs())],
            "frontier": sorted(self.frontier),
        }


def system_from_json_dict(data: dict) -> PotentialistSystem:
    worlds = []
    alphabet: set[str] = set()
    for entry in data["worlds"]:
        true_atoms = frozenset(a for a, val in entry["atoms"].items() if val)
        alphabet.update(entry["atoms"].keys())
        worlds.append(World(entry["id"], entry["label"], true_atoms))
    worlds.sort(key=lambda w: w.id)
    return PotentialistSystem.from_pairs(
        worlds, data["order"], data.get("frontier", ()),
        atom_alphabet=alphabet)


def _world_id(system: PotentialistSystem, world) -> int:
    wid = world.id if isinstance(world, World) else int(world)
    if not 0 <= wid < len(system.worlds):
        raise IndexError(f"world {wid} out of range")
    return wid


def _interior_mask(system: PotentialistSystem, interior) -> int:
    if interior is None:
        return system.interior_mask
    mask = 0
    for w in interior:
        mask |= 1 << _world_id(system, w)
    return mask


def extension(system: PotentialistSystem, f: Formula) -> int:
    """Bitmask of worlds where ``f`` holds; results are memoized per system."""
    unknown = atoms(f) - system.atom_alphabet
    if unknown:
        raise UnknownAtomError(sorted(unknown)[0])
    return kripke.eval_mask(f, system.order_masks, system.atom_masks,
                            system._ext_memo)


def evaluate(system: PotentialistSystem, world, f: Formula,
             subst: Optional[Mapping[str, Formula]] = None) -> bool:
    """Truth of ``f`` (after optional substitution) at a world."""
    wid = _world_id(system, world)
    if subst:
        f = substitute(f, subst)
    return bool(extension(system, f) >> wid & 1)


def content_monotone(system: PotentialistSystem) -> bool:
    """True when every world's true atoms persist to all later worlds."""
    for w in system.worlds:
        for v in _bits(system.order_masks[w.id]):
            if not w.true_atoms <= system.worlds[v].true_atoms:
                return False
    return True


# --- substitution pools and scheme reports --------------------------------

def substitution_pool(atom_names: Sequence[str], depth: int,
                      limit: Optional[int] = DEFAULT_POOL_LIMIT) -> tuple[Formula, ...]:
    """Deterministic pool of substitution instances over ``atom_names``.

    Depth 0 gives constants and atoms; depth 1 adds ~a, []a, <>a; depth 2
    adds [] <>a, <>[]a, ~[]a and a ring of binary combinations of
    neighbouring atoms.  Deeper pools are not generated.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if depth > 2:
        raise BudgetExceededError(
            "pools beyond depth 2 are not generated; pass an explicit pool")
    names = list(atom_names)
    base = [Atom(a) for a in names]
    pool: list[Formula] = [Top(), Bottom()] + base
    if depth >= 1:
        for a in base:
            pool.extend((Not(a), Box(a), Diamond(a)))
    if depth >= 2:
        for a in base:
            pool.extend((Box(Diamond(a)), Diamond(Box(a)), Not(Box(a))))
        if len(base) >= 2:
            for i, a in enumerate(base):
                b = base[(i + 1) % len(base)]
                pool.extend((And(a, b), Or(a, b), Implies(a, b)))
    if limit is not None and len(pool) > limit:
        raise BudgetExceededError(
            f"pool of {len(pool)} formulas exceeds limit {limit}",
            required=len(pool))
    return tuple(pool)


@dataclass(eq=False)
class SchemeResult:
    scheme: AxiomScheme
    instances_checked: int
    substitution: Optional[dict[str, Formula]] = None
    world: Optional[int] = None

    @property
    def failed(self) -> bool:
        return self.substitution is not None


@dataclass(eq=False)
class SchemeReport:
    results: tuple[SchemeResult, ...]
    pool: tuple[Formula, ...]
    worlds_mode: str

    @property
    def failures(self) -> list[SchemeResult]:
        return [r for r in self.results if r.failed]


def scheme_report(system: PotentialistSystem,
                  schemes: Sequence[AxiomScheme],
                  depth: int = 2,
                  pool: Optional[Sequence[Formula]] = None,
                  worlds: str = "all",
                  pool_limit: Optional[int] = DEFAULT_POOL_LIMIT,
                  pair_limit: int = DEFAULT_PAIR_LIMIT) -> SchemeReport:
    """Check scheme instances over a substitution pool.

    ``worlds`` is "all" or "interior".  For each scheme the first
    falsifying substitution and world (in pool / world order) is
    reported; every reported failure is re-verified via ``evaluate``.
    """
    if worlds not in ("all", "interior"):
        raise ValueError("worlds must be 'all' or 'interior'")
    the_pool = tuple(pool) if pool is not None else substitution_pool(
        sorted(system.atom_alphabet), depth, pool_limit)
    required = system.full_mask if worlds == "all" else system.interior_mask
    results = []
    for scheme in schemes:
        if scheme.arity == 2:
            count = len(the_pool) ** 2
            if count > pair_limit:
                raise BudgetExceededError(
                    f"{count} scheme instances exceed pair limit {pair_limit}",
                    required=count)
            candidates: Iterable = itertools.product(the_pool, the_pool)
        else:
            count = len(the_pool)
            candidates = ((phi, None) for phi in the_pool)
        hit = None
        checked = 0
        for phi, psi in candidates:
            inst = instantiate(scheme, phi, psi)
            miss = required & ~extension(system, inst)
            checked += 1
            if miss:
                world = (miss & -miss).bit_length() - 1
                if evaluate(system, world, inst):
                    raise RuntimeError("scheme failure did not re-verify")
                sub = {"p": phi} if psi is None else {"p": phi, "q": psi}
                hit = SchemeResult(scheme, checked, sub, world)
                break
        results.append(hit if hit is not None else SchemeResult(scheme, checked))
    return SchemeReport(tuple(results), the_pool, worlds)


# --- control certification ------------------------------------------------

def certify_button(system: PotentialistSystem, statement: Formula,
                   interior=None) -> bool:
    """Is <>[] statement true at every interior world?"""
    req = _interior_mask(system, interior)
    ext = extension(system, Diamond(Box(statement)))
    return req & ~ext == 0


def certify_switch(system: PotentialistSystem, statement: Formula,
                   interior=None) -> bool:
    """Are <> statement and <>~statement both true at every interior world?"""
    req = _interior_mask(system, interior)
    ext = extension(system, Diamond(statement)) & \
        extension(system, Diamond(Not(statement)))
    return req & ~ext == 0


def _pushed_masks(system: PotentialistSystem,
                  statements: Sequence[Formula]) -> list[int]:
    return [extension(system, Box(s)) for s in statements]


def certify_independent_controls(system: PotentialistSystem,
                                 buttons: Sequence[Formula],
                                 switches: Sequence[Formula],
                                 interior=None) -> bool:
    """Joint freedom of a finite control family.

    From every interior world, every target pattern consisting of a
    superset of the currently pushed buttons together with an arbitrary
    switch assignment is realized exactly at some accessible world.
    """
    if not certify_all_buttons(system, buttons, interior):
        return False
    for s in switches:
        if not certify_switch(system, s, interior):
            return False
    req_base = _interior_mask(system, interior)
    pushed = _pushed_masks(system, buttons)
    sw_masks = [extension(system, s) for s in switches]
    full = system.full_mask
    n = len(system.worlds)
    for include in itertools.product((False, True), repeat=len(buttons)):
        target_p = full
        required = req_base
        for mask, inc in zip(pushed, include):
            if inc:
                target_p &= mask
            else:
                target_p &= ~mask
                required &= ~mask
        for bits_on in itertools.product((False, True), repeat=len(switches)):
            target = target_p
            for mask, on in zip(sw_masks, bits_on):
                target &= mask if on else full & ~mask
            reach = 0
            for w in range(n):
                if system.order_masks[w] & target:
                    reach |= 1 << w
            if required & ~reach:
                return False
    return True


def certify_all_buttons(system: PotentialistSystem,
                        statements: Sequence[Formula], interior=None) -> bool:
    return all(certify_button(system, s, interior) for s in statements)


def certify_ratchet(system: PotentialistSystem,
                    elements: Sequence[ControlStatement],
                    interior=None, long_form: bool = False) -> bool:
    """Certify an ordered button family as a ratchet.

    Every element must be a button, and pushing element i must push
    every earlier element at every world.  With ``long_form`` the family
    must additionally never be fully pushed at an interior world, which
    is the defining extra condition of a limit-length ratchet.
    """
    statements = [e.statement for e in elements]
    if not certify_all_buttons(system, statements, interior):
        return False
    pushed = _pushed_masks(system, statements)
    for i in range(1, len(pushed)):
        if pushed[i] & ~pushed[i - 1]:
            return False
    if long_form and pushed:
        all_pushed = system.full_mask
        for mask in pushed:
            all_pushed &= mask
        if all_pushed & _interior_mask(system, interior):
            return False
    return True


# --- comparison -----------------------------------------------------------

def compare_systems(a: PotentialistSystem,
                    b: PotentialistSystem) -> SystemComparison:
    """Containment-based comparison.

    ``covers``: every world content of ``b`` is included in some world
    content of ``a``.  ``refines``: every content of ``a`` occurs in
    ``b`` and ``a`` covers ``b``.
    """
    contents_a = {w.true_atoms for w in a.worlds}
    contents_b = {w.true_atoms for w in b.worlds}
    covers = all(any(cb <= ca for ca in contents_a) for cb in contents_b)
    refines = contents_a <= contents_b and covers
    return SystemComparison(covers, refines)


# --- refutation transfer --------------------------------------------------

@dataclass(eq=False)
class Refutation:
    substitution: dict[str, Formula]
    world: int
    formula: Formula

    @property
    def applied(self) -> Formula:
        return substitute(self.formula, self.substitution)


@dataclass(frozen=True)
class NotApplicable:
    reason: str


def _or_all(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return Bottom()
    out = parts[0]
    for p in parts[1:]:
        out = Or(out, p)
    return out


def _and_all(parts: Sequence[Formula]) -> Formula:
    if not parts:
        return Top()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def _cone_clusters(frame: Frame, root: int):
    """Clusters of the subframe generated by ``root``.

    Returns (clusters, le) with clusters listed bottom-up (the root's
    cluster first, then ascending by reachability, ties by least node),
    and le[i][j] true when cluster i reaches cluster j.
    """
    succ = frame.successor_masks()
    cone = succ[root]
    nodes = list(_bits(cone))
    cluster_of: dict[int, int] = {}
    clusters: list[list[int]] = []
    for u in nodes:
        if u in cluster_of:
            continue
        members = [v for v in nodes
                   if succ[u] >> v & 1 and succ[v] >> u & 1]
        idx = len(clusters)
        clusters.append(sorted(members))
        for v in members:
            cluster_of[v] = idx
    k = len(clusters)
    le = [[bool(succ[clusters[i][0]] >> clusters[j][0] & 1)
           for j in range(k)] for i in range(k)]
    above = [sum(le[i]) for i in range(k)]
    order = sorted(range(k), key=lambda i: (-above[i], clusters[i][0]))
    clusters = [clusters[i] for i in order]
    le = [[le[oi][oj] for oj in order] for oi in order]
    root_cluster = next(i for i, c in enumerate(clusters) if root in c)
    if root_cluster != 0:
        raise RuntimeError("root cluster not minimal in its cone")
    return clusters, le


def _subsets_by_size(b: int) -> list[int]:
    return sorted(range(1 << b), key=lambda s: (bin(s).count("1"), s))


def _lattice_onto_map(le, bottom: int, b: int) -> Optional[dict[int, int]]:
    """Monotone onto map 2^b -> clusters with the back property, or None."""
    k = len(le)
    subsets = _subsets_by_size(b)
    assignment: dict[int, int] = {}

    def ok_monotone(s: int, q: int) -> bool:
        for s2, q2 in assignment.items():
            if s2 & s == s2 and not le[q2][q]:
                return False
            if s2 & s == s and not le[q][q2]:
                return False
        return True

    def backtrack(pos: int) -> Optional[dict[int, int]]:
        if pos == len(subsets):
            if set(assignment.values()) != set(range(k)):
                return None
            for s in subsets:
                q = assignment[s]
                for q2 in range(k):
                    if le[q][q2] and not any(
                            s2 & s == s and assignment[s2] == q2
                            for s2 in subsets):
                        return None
            return dict(assignment)
        s = subsets[pos]
        choices = [bottom] if s == 0 else range(k)
        for q in choices:
            if not ok_monotone(s, q):
                continue
            assignment[s] = q
            found = backtrack(pos + 1)
            if found is not None:
                return found
            del assignment[s]
        return None

    return backtrack(0)


def _exact_pattern(statements: Sequence[Formula], included: int) -> Formula:
    parts = []
    for i, s in enumerate(statements):
        parts.append(s if included >> i & 1 else Not(s))
    return _and_all(parts)


def refute_via_controls(system: PotentialistSystem, f: Formula,
                        buttons: Sequence[Formula],
                        switches: Sequence[Formula],
                        interior=None, bound: int = 4,
                        max_candidates: int = 8):
    """Transfer a bounded S4.2 refutation of ``f`` into the system.

    The witness frame's clusters are labelled by pushed-button subsets
    and switch patterns; atoms of ``f`` become disjunctions of the
    labelling descriptions.  Returns a Refutation whose substitution
    and world re-verify under ``evaluate``, or NotApplicable.
    """
    if not certify_independent_controls(system, buttons, switches, interior):
        raise ValueError("controls failed independence certification")
    outcome = logics.decide(f, logics.Theory.S4_2, bound)
    if not outcome.refuted:
        return NotApplicable(f"no S4.2 refutation up to bound {bound}")
    clusters, le = _cone_clusters(outcome.frame, outcome.world)
    max_cluster = max(len(c) for c in clusters)
    s_used = 0
    while (1 << s_used) < max_cluster:
        s_used += 1
    if s_used > len(switches):
        return NotApplicable(
            f"witness needs {s_used} switches, only {len(switches)} supplied")
    lattice_map = None
    for b_used in range(0, min(len(buttons), 3) + 1):
        lattice_map = _lattice_onto_map(le, 0, b_used)
        if lattice_map is not None:
            break
    if lattice_map is None:
        return NotApplicable(
            f"no button labelling of the witness with {len(buttons)} buttons")

    node_list = [n for c in clusters for n in c]
    refuting = outcome.world
    bottom = clusters[0]
    rotated = bottom[bottom.index(refuting):] + bottom[:bottom.index(refuting)]
    clusters = [rotated] + clusters[1:]

    btn = list(buttons[:b_used])
    sws = list(switches[:s_used])
    pushed = _pushed_masks(system, btn)
    sw_masks = [extension(system, s) for s in sws]
    box_btn = [Box(b) for b in btn]

    req = _interior_mask(system, interior)
    candidates = req
    for mask in pushed:
        candidates &= ~mask
    tried = 0
    for w_star in _bits(candidates):
        if tried >= max_candidates:
            break
        tried += 1
        a_base = sum(1 << j for j, m in enumerate(sw_masks) if m >> w_star & 1)
        descriptions = {}
        for qi, members in enumerate(clusters):
            p_parts = [_exact_pattern(box_btn, p)
                       for p in range(1 << b_used) if lattice_map[p] == qi]
            for mi, node in enumerate(members):
                a_parts = [_exact_pattern(sws, a)
                           for a in range(1 << s_used)
                           if (a ^ a_base) % len(members) == mi]
                descriptions[node] = _and_all(
                    [_or_all(p_parts), _or_all(a_parts)])
        sub = {}
        for name in sorted(atoms(f)):
            worlds_true = outcome.valuation.get(name, frozenset())
            sub[name] = _or_all([descriptions[nd] for nd in node_list
                                 if nd in worlds_true])
        if not evaluate(system, w_star, f, sub):
            return Refutation(sub, w_star, f)
    return NotApplicable("labelling produced no verifiable witness")


def refute_via_ratchet(system: PotentialistSystem, f: Formula,
                       ratchet: Sequence[ControlStatement],
                       nominal_length: OrdinalCNF,
                       interior=None, bound: int = 4,
                       max_candidates: int = 8):
    """Transfer a bounded S4.3 refutation of ``f`` via ratchet positions.

    Chain clusters of the witness are mapped to contiguous position
    blocks of the ratchet; cluster members are told apart by position
    residues, the switch-like statements a long ratchet provides.
    """
    if not certify_ratchet(system, ratchet, interior, long_form=True):
        raise ValueError("ratchet failed long-form certification")
    if not closed_under_addition_below(nominal_length, OMEGA_SQUARED):
        raise ValueError("nominal ratchet length is not closed under "
                         "addition below w^2")
    outcome = logics.decide(f, logics.Theory.S4_3, bound)
    if not outcome.refuted:
        return NotApplicable(f"no S4.3 refutation up to bound {bound}")
    clusters, _le = _cone_clusters(outcome.frame, outcome.world)
    statements = [e.statement for e in ratchet]
    m = len(statements)
    pushed = _pushed_masks(system, statements)
    n = len(system.worlds)
    positions = [sum(1 for mask in pushed if mask >> w & 1) for w in range(n)]

    def exact_position(p: int) -> Formula:
        if p == 0:
            return Not(Box(statements[0]))
        if p == m:
            return Box(statements[m - 1])
        return And(Box(statements[p - 1]), Not(Box(statements[p])))

    refuting = outcome.world
    bottom = clusters[0]
    rotated = bottom[bottom.index(refuting):] + bottom[:bottom.index(refuting)]
    clusters = [rotated] + clusters[1:]
    node_list = [nd for c in clusters for nd in c]

    req = _interior_mask(system, interior)
    tried = 0
    for w_star in _bits(req):
        if tried >= max_candidates:
            break
        tried += 1
        p0 = positions[w_star]
        block_start = p0
        blocks = []
        feasible = True
        for qi, members in enumerate(clusters):
            last = qi == len(clusters) - 1
            if block_start > m:
                feasible = False
                break
            if last:
                blocks.append((block_start, m))
            else:
                if block_start + len(members) - 1 > m:
                    feasible = False
                    break
                blocks.append((block_start, block_start + len(members) - 1))
                block_start += len(members)
        if not feasible:
            continue
        descriptions = {}
        for qi, members in enumerate(clusters):
            lo, hi = blocks[qi]
            for mi, node in enumerate(members):
                pts = [p for p in range(lo, hi + 1)
                       if (p - lo) % len(members) == mi]
                descriptions[node] = _or_all([exact_position(p) for p in pts])
        sub = {}
        for name in sorted(atoms(f)):
            worlds_true = outcome.valuation.get(name, frozenset())
            sub[name] = _or_all([descriptions[nd] for nd in node_list
                                 if nd in worlds_true])
        if not evaluate(system, w_star, f, sub):
            return Refutation(sub, w_star, f)
    return NotApplicable("ratchet labelling produced no verifiable witness")
