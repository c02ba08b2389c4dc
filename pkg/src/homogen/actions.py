"""Invariant D-structure on G-sets: orientations, semifinals, nice actions.

Every "pick an orbit representative" uses the least k-set of the orbit and
every free choice takes the least admissible option, so results do not
depend on evaluation order.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations
from typing import Iterable, Sequence

from .classd import is_i3_free, is_in_class_d, is_semifinal
from .core import Structure, automorphism_group, partner
from .errors import ConstructionError, InputError, IntegrityError, Verdict
from .perms import (GroupAction, Permutation, PermGroup, contains_c4_or_klein,
                    left_regular_action, natural_action_stabilizer)


def swapping_elements(action: GroupAction) -> dict[tuple[int, int], Permutation]:
    """For each swappable pair ``u < v``, the first group element swapping them."""
    out: dict[tuple[int, int], Permutation] = {}
    for g in action.group.elements:
        img = action.perm(g).images
        for u, w in enumerate(img):
            if u < w and img[w] == u and (u, w) not in out:
                out[(u, w)] = g
    return out


def check_three_set_condition(action: GroupAction) -> Verdict:
    """Every 3-set contains a pair that no group element swaps.

    On failure the witness is ``(triple, {pair: swapping element})``.
    """
    swaps = swapping_elements(action)
    for triple in combinations(action.points, 3):
        pairs = list(combinations(triple, 2))
        if all(p in swaps for p in pairs):
            return Verdict(False, (triple, {p: swaps[p] for p in pairs}))
    return Verdict(True, None)


def orient_from_action(action: GroupAction) -> frozenset:
    """G-invariant I3-free orientation; unswappable orbits get an edge.

    Each orbit of 2-sets is represented by its least member ``(u, v)``; if
    no element swaps ``u`` and ``v`` the orbit of ``(u, v)`` is added.
    """
    verdict = check_three_set_condition(action)
    if not verdict:
        triple, _ = verdict.witness
        raise ConstructionError(f"every pair of {triple} is swapped by the group", verdict.witness)
    swaps = swapping_elements(action)
    perms = action.point_perms()
    R: set[tuple[int, int]] = set()
    seen: set[tuple[int, int]] = set()
    for u, v in combinations(action.points, 2):
        if (u, v) in seen:
            continue
        orbit = {(p.images[u], p.images[v]) for p in perms}
        seen |= {(min(a, b), max(a, b)) for a, b in orbit}
        if (u, v) not in swaps:
            R |= orbit
    return frozenset(R)


def _moving_restrictions(action: GroupAction, quad: Sequence[int]) -> set[tuple[int, ...]]:
    """Distinct restrictions to ``quad`` of elements in G_{U} minus G_(U)."""
    quad = tuple(quad)
    qs = set(quad)
    out = set()
    for p in action.point_perms():
        img = tuple(p.images[x] for x in quad)
        if set(img) == qs and img != quad:
            out.add(img)
    return out


def admissible_enumerations(action: GroupAction, quad: Sequence[int]) -> list[tuple[int, ...]]:
    """Enumerations (v0, v1, v2, v3) of ``quad`` under which every element of
    the setwise stabilizer that moves ``quad`` acts as (v0 v2)(v1 v3), in
    lexicographic order."""
    quad = tuple(sorted(quad))
    restrictions = _moving_restrictions(action, quad)
    maps = [dict(zip(quad, img)) for img in restrictions]
    out = []
    for e in permutations(quad):
        v0, v1, v2, v3 = e
        if all(m[v0] == v2 and m[v2] == v0 and m[v1] == v3 and m[v3] == v1 for m in maps):
            out.append(e)
    return out


def check_four_set_condition(action: GroupAction) -> Verdict:
    """Every 4-set admits an enumeration absorbing its setwise stabilizer.

    The condition is invariant under the group, so one 4-set per orbit is
    checked (the least). Witness on success: ``{representative:
    least admissible enumeration}``; on failure the offending 4-set.
    """
    chosen = {}
    for orbit in _orbits_of_sets(action, 4):
        rep = orbit[0]
        options = admissible_enumerations(action, rep)
        if not options:
            return Verdict(False, rep)
        chosen[rep] = options[0]
    return Verdict(True, chosen)


def _orbits_of_sets(action: GroupAction, k: int, skip: set | frozenset = frozenset()):
    perms = action.point_perms()
    seen: set[tuple[int, ...]] = set()
    for subset in combinations(action.points, k):
        if subset in seen or subset in skip:
            continue
        orbit = {tuple(sorted(p.images[x] for x in subset)) for p in perms}
        seen |= orbit
        yield sorted(orbit)


def _tuple_orbit(perms: Iterable[Permutation], t: Sequence[int]) -> set[tuple[int, ...]]:
    return {tuple(p.images[x] for x in t) for p in perms}


def semifinal_from_action(action: GroupAction) -> frozenset:
    """G-invariant semifinal relation on the points of ``action``."""
    verdict = check_four_set_condition(action)
    if not verdict:
        raise ConstructionError(f"no admissible enumeration of {verdict.witness}", verdict.witness)
    perms = action.point_perms()
    S: set[tuple[int, ...]] = set()
    for enum in verdict.witness.values():
        S |= _tuple_orbit(perms, enum)
        S |= _tuple_orbit(perms, partner(enum))
    return frozenset(S)


def action_preserves(action: GroupAction, M: Structure) -> bool:
    """Every group element acts as an automorphism of ``M``."""
    for p in action.point_perms():
        img = p.images
        if any((img[u], img[v]) not in M.R for u, v in M.R):
            return False
        if any(tuple(img[x] for x in t) not in M.S for t in M.S):
            return False
    return True


@dataclass
class GroupStructure:
    """Result of building a D-structure on a group.

    Either ``structure`` and ``action`` are set, or ``refusal`` holds the
    elements of a C4 or C2 x C2 subgroup.
    """

    group: PermGroup
    structure: Structure | None = None
    action: GroupAction | None = None
    refusal: list[Permutation] | None = None

    @property
    def ok(self) -> bool:
        return self.structure is not None

    def __bool__(self):
        return self.ok


def d_structure_on_group(G: PermGroup) -> GroupStructure:
    """D-structure on the elements of G, invariant under left multiplication.

    Refuses (without raising) when G has a subgroup C4 or C2 x C2.
    """
    witness = contains_c4_or_klein(G)
    if witness:
        return GroupStructure(G, refusal=witness.witness)
    action = left_regular_action(G)
    try:
        R = orient_from_action(action)
        S = semifinal_from_action(action) if action.size >= 4 else frozenset()
    except ConstructionError as exc:
        raise IntegrityError(f"group {G.name} has no C4 or C2 x C2 subgroup yet: {exc}") from exc
    M = Structure(action.size, R, S, name=f"D_on_{G.name or 'G'}")
    if not is_in_class_d(M) or not action_preserves(action, M) or not action.is_faithful():
        raise IntegrityError(f"structure built on {G.name} fails its postconditions")
    return GroupStructure(G, structure=M, action=action)


class NiceAction:
    """An action of G = Aut(A) whose point stabilizers fix at least 4 points of A.

    ``hat_table[v]`` is the set of vertices of ``ambient`` fixed by the
    whole stabilizer of ``v``.
    """

    def __init__(self, base: GroupAction, ambient: Structure, require_faithful: bool = True,
                 check_group: bool = True, hat_table: Sequence[frozenset] | None = None):
        G = base.group
        if G.degree != ambient.n:
            raise InputError("acting group does not permute the ambient structure")
        if check_group and G != automorphism_group(ambient):
            raise InputError("acting group must be the full automorphism group of the ambient structure")
        self.base = base
        self.ambient = ambient
        self.group = G
        self.faithful = base.is_faithful()
        if require_faithful and not self.faithful:
            raise InputError("action is not faithful")
        if hat_table is None:
            hat_table = [self._compute_hat(v) for v in base.points]
        self.hat_table = tuple(frozenset(h) for h in hat_table)
        self._validate()

    def _stabilizer(self, v: int) -> list[Permutation]:
        return [g for g in self.group.elements if self.base.act(g, v) == v]

    def _compute_hat(self, v: int) -> frozenset:
        stab = self._stabilizer(v)
        return frozenset(a for a in self.ambient.domain if all(g.images[a] == a for g in stab))

    def _validate(self):
        for v in self.base.points:
            h = self.hat_table[v]
            if len(h) < 4:
                raise InputError(f"point {v} fixes only {len(h)} ambient vertices (need 4)")
            stab = set(self._stabilizer(v))
            if stab != set(natural_action_stabilizer(self.group, h).elements):
                raise InputError(f"stabilizer of point {v} is not a pointwise stabilizer in the ambient")
            for g in self.group.generators:
                if self.hat_table[self.base.act(g, v)] != frozenset(g.images[a] for a in h):
                    raise InputError(f"hat table is not equivariant at point {v}")

    @property
    def size(self) -> int:
        return self.base.size

    def index_of(self, label) -> int:
        return self.base.labels.index(label)

    def __repr__(self):
        return f"<NiceAction on {self.size} points over {self.ambient.name}>"


def hat(na: NiceAction, v: int) -> frozenset:
    return na.hat_table[v]


def build_nice_orbit(A: Structure, A_prime: Iterable[int], group: PermGroup | None = None) -> NiceAction:
    """G-orbit of the ascending enumeration of ``A_prime`` among distinct tuples of A.

    The orbit need not be faithful on its own (it is faithful when the orbit
    of ``A_prime`` covers A); ``NiceAction.faithful`` records which.
    """
    rep = tuple(sorted(set(A_prime)))
    if len(rep) < 4:
        raise InputError(f"need at least 4 ambient vertices, got {len(rep)}")
    if any(not 0 <= a < A.n for a in rep):
        raise InputError("A' is not a subset of dom(A)")
    G = group if group is not None else automorphism_group(A)
    orbit = sorted({g.apply(rep) for g in G.elements})
    base = GroupAction.from_function(G, orbit, lambda g, t: g.apply(t), name="nice-orbit")
    return NiceAction(base, A, require_faithful=False, check_group=group is None)


def orient_nice(na: NiceAction) -> frozenset:
    verdict = check_three_set_condition(na.base)
    if not verdict:
        raise IntegrityError(f"A-nice action violates the 3-set condition at {verdict.witness[0]}")
    R = orient_from_action(na.base)
    if not is_i3_free(Structure(na.size, R)):
        raise IntegrityError("orientation of an A-nice action is not I3-free")
    return R


@dataclass(frozen=True)
class PartialSemifinal:
    """Semifinal relation given on ``support`` (a union of orbits of 4-sets)."""

    support: frozenset
    s_tilde: frozenset

    @classmethod
    def make(cls, support: Iterable[Sequence[int]], s_tilde: Iterable[Sequence[int]]):
        return cls(frozenset(tuple(sorted(U)) for U in support),
                   frozenset(tuple(t) for t in s_tilde))

    def check(self, action: GroupAction):
        by_set: dict[tuple[int, ...], set] = {}
        for t in self.s_tilde:
            key = tuple(sorted(t))
            if len(set(t)) != 4:
                raise InputError(f"S-tuple {t} has repeated entries")
            if key not in self.support:
                raise InputError(f"S-tuple {t} lies outside the support")
            by_set.setdefault(key, set()).add(t)
        for U in self.support:
            tuples = by_set.get(U, set())
            if len(tuples) != 2 or partner(min(tuples)) not in tuples:
                raise InputError(f"support 4-set {U} does not carry exactly one semifinal")
        for g in action.group.generators:
            p = action.perm(g).images
            if {tuple(sorted(p[x] for x in U)) for U in self.support} != self.support:
                raise InputError("support is not a union of orbits")
            if {tuple(p[x] for x in t) for t in self.s_tilde} != self.s_tilde:
                raise InputError("partial semifinal is not G-invariant")


def complete_semifinal(na: NiceAction, ps: PartialSemifinal) -> frozenset:
    """Extend a G-invariant partial semifinal to every 4-set, orbit by orbit."""
    ps.check(na.base)
    perms = na.base.point_perms()
    S = set(ps.s_tilde)
    for orbit in _orbits_of_sets(na.base, 4, skip=ps.support):
        rep = orbit[0]
        options = admissible_enumerations(na.base, rep)
        if not options:
            raise IntegrityError(f"no admissible enumeration of {rep} in an A-nice action")
        enum = options[0]
        S |= _tuple_orbit(perms, enum)
        S |= _tuple_orbit(perms, partner(enum))
    return frozenset(S)


def nice_d_structure(na: NiceAction) -> Structure:
    """D-structure on an A-nice G-set from its orientation and a full semifinal."""
    R = orient_nice(na)
    S = complete_semifinal(na, PartialSemifinal(frozenset(), frozenset())) if na.size >= 4 else frozenset()
    M = Structure(na.size, R, S, name="M0")
    if not is_semifinal(M):
        raise IntegrityError("completed semifinal is not semifinal")
    return M
