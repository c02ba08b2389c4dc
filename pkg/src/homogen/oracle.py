"""Brute-force oracles for the orbit conditions, and the small actions they run on.

The searches assign every pair (resp. 4-set) a state in a fixed order and
reject a partial assignment as soon as a generator maps an assigned pair to
an assigned pair with a different state, or a 3-set is left without an
edge. Nothing here looks at orbits or stabilizers, so the results are
independent of the constructions in ``actions``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterator

from .actions import check_four_set_condition, check_three_set_condition
from .catalog import NAMES, load
from .classd import semifinals_on
from .perms import GroupAction, PermGroup, closure


def _generator_perms(action: GroupAction) -> list[tuple[int, ...]]:
    out = {action.perm(g).images for g in action.group.generators}
    return sorted(p for p in out if list(p) != list(range(action.size)))


def invariant_i3_free_orientation(action: GroupAction) -> frozenset | None:
    """Some G-invariant I3-free orientation of the points, or None."""
    n = action.size
    pairs = list(combinations(range(n), 2))
    index = {p: i for i, p in enumerate(pairs)}
    gens = _generator_perms(action)
    closing = [[] for _ in pairs]
    for a, b, c in combinations(range(n), 3):
        ids = (index[(a, b)], index[(a, c)], index[(b, c)])
        closing[max(ids)].append(ids)
    # image of pair k under each generator, with a flag for reversed order
    moves = []
    for u, v in pairs:
        row = []
        for p in gens:
            x, y = p[u], p[v]
            row.append((index[(min(x, y), max(x, y))], x > y))
        moves.append(row)
    states = [None] * len(pairs)

    def image_state(s, flipped):
        return s if s == 0 or not flipped else 3 - s

    def consistent(k):
        # only constraints touching the pair just assigned are new
        for j in range(k + 1):
            for target, flipped in moves[j]:
                if (j == k or target == k) and target <= k \
                        and states[target] != image_state(states[j], flipped):
                    return False
        return True

    def rec(k):
        if k == len(pairs):
            return True
        for s in (0, 1, 2):
            states[k] = s
            if all(states[x] or states[y] or states[z] for x, y, z in closing[k]) and consistent(k):
                if rec(k + 1):
                    return True
        states[k] = None
        return False

    if not rec(0):
        return None
    R = set()
    for (u, v), s in zip(pairs, states):
        if s == 1:
            R.add((u, v))
        elif s == 2:
            R.add((v, u))
    return frozenset(R)


def invariant_semifinal(action: GroupAction) -> frozenset | None:
    """Some G-invariant semifinal relation on the points, or None."""
    n = action.size
    quads = list(combinations(range(n), 4))
    index = {q: i for i, q in enumerate(quads)}
    options = [semifinals_on(q) for q in quads]
    gens = _generator_perms(action)
    choice: list[frozenset | None] = [None] * len(quads)

    def image(p, S):
        return frozenset(tuple(p[x] for x in t) for t in S)

    def target(p, q):
        return index[tuple(sorted(p[x] for x in q))]

    def consistent(k):
        for p in gens:
            t = target(p, quads[k])
            if t <= k and choice[t] != image(p, choice[k]):
                return False
        # preimages: any assigned j whose image is k
        for j in range(k):
            for p in gens:
                if target(p, quads[j]) == k and choice[k] != image(p, choice[j]):
                    return False
        return True

    def rec(k):
        if k == len(quads):
            return True
        for S in options[k]:
            choice[k] = S
            if consistent(k) and rec(k + 1):
                return True
        choice[k] = None
        return False

    if not rec(0):
        return None
    return frozenset().union(*choice) if choice else frozenset()


def subgroups(G: PermGroup) -> list[frozenset]:
    """All subgroups of a small group, as element sets (closures of pairs)."""
    found = {frozenset(G.elements[:1])}
    elems = G.elements
    for a, b in combinations_with_replacement(elems, 2):
        found.add(frozenset(closure([a, b], degree=G.degree).elements))
    return sorted(found, key=lambda H: (len(H), sorted(H)))


def coset_action(G: PermGroup, H: frozenset, name=None) -> GroupAction:
    """Left multiplication on the left cosets gH, ordered by least element."""
    cosets = sorted({frozenset(g * h for h in H) for g in G.elements}, key=min)
    return GroupAction.from_function(G, cosets, lambda g, C: frozenset(g * x for x in C), name=name)


def _conjugacy_representatives(G: PermGroup, subs: list[frozenset]) -> list[frozenset]:
    reps, seen = [], set()
    for H in subs:
        if H in seen:
            continue
        reps.append(H)
        for g in G.elements:
            gi = g.inverse()
            seen.add(frozenset(g * h * gi for h in H))
    return reps


@dataclass
class SmallAction:
    group_name: str
    label: str
    action: GroupAction


def small_actions(max_order: int = 8, max_points: int = 5,
                  names: tuple[str, ...] = NAMES) -> Iterator[SmallAction]:
    """Faithful actions of catalog groups, built as disjoint unions of coset actions.

    Coset actions of G on G/H come from the regular representation; H = G
    gives a fixed point. Conjugate subgroups give isomorphic actions, so one
    representative per class is used. Every faithful action of degree at
    most ``max_points`` arises this way up to isomorphism.
    """
    for name in names:
        G = load(name)
        if G.order() > max_order:
            continue
        comps = []
        for i, H in enumerate(_conjugacy_representatives(G, subgroups(G))):
            index = G.order() // len(H)
            if index <= max_points:
                # tag: which subgroup class, and its order
                comps.append((index, f"H{i}o{len(H)}", coset_action(G, H)))
        for total in range(1, max_points + 1):
            for combo in _partitions(comps, total):
                act = combo[0][2]
                for c in combo[1:]:
                    act = act.disjoint_union(c[2])
                if not act.is_faithful():
                    continue
                label = "+".join(f"G/{c[1]}" if c[0] > 1 else "1" for c in combo)
                act = GroupAction(G, {g: act.perm(g) for g in G.elements},
                                  labels=act.labels, name=f"{name}[{label}]")
                yield SmallAction(name, label, act)


def _partitions(comps, total, start=0):
    """Multisets of components (non-decreasing index) with degrees summing to total."""
    if total == 0:
        yield []
        return
    for i in range(start, len(comps)):
        if comps[i][0] <= total:
            for rest in _partitions(comps, total - comps[i][0], i):
                yield [comps[i]] + rest


@dataclass
class LemmaRow:
    action: str
    points: int
    three_condition: bool
    three_oracle: bool
    four_condition: bool | None = None
    four_oracle: bool | None = None

    @property
    def agrees(self) -> bool:
        return self.three_condition == self.three_oracle and self.four_condition == self.four_oracle

    def as_dict(self) -> dict:
        return {"action": self.action, "points": self.points,
                "three_condition": self.three_condition, "three_oracle": self.three_oracle,
                "four_condition": self.four_condition, "four_oracle": self.four_oracle,
                "agrees": self.agrees}


def lemma_equivalence_rows(max_order: int = 8, max_points: int = 5) -> list[LemmaRow]:
    rows = []
    for sa in small_actions(max_order, max_points):
        act = sa.action
        row = LemmaRow(act.name, act.size, check_three_set_condition(act).ok,
                       invariant_i3_free_orientation(act) is not None)
        if act.size >= 4:
            row.four_condition = check_four_set_condition(act).ok
            row.four_oracle = invariant_semifinal(act) is not None
        rows.append(row)
    return rows
