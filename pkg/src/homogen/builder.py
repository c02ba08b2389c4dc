"""Finite stages of a D-structure carrying a faithful Aut(A)-action.

Starting from a nice orbit of A, each step adjoins a new orbit ``N`` of
points realizing a requested one-point type over a finite base ``C0``,
keeping the structure in D and the action by automorphisms. Running every
task over the previous stage gives the extension property up to a size
bound.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable

from .actions import (NiceAction, PartialSemifinal, action_preserves, build_nice_orbit,
                      complete_semifinal, d_structure_on_group, nice_d_structure, orient_nice)
from .catalog import load as load_group
from .classd import canonical_semifinal, is_in_class_d, semifinals_on
from .core import (STAR, LinkType, Structure, automorphism_group, induced_substructure,
                   one_point_extension, qftp, realizes)
from .errors import ConstructionError, InputError, IntegrityError
from .perms import GroupAction, Permutation, PermGroup, is_injective_homomorphism


@dataclass
class NiceGStructure:
    structure: Structure
    action: NiceAction

    def check(self) -> None:
        """Raise IntegrityError unless every invariant holds."""
        M = self.structure
        if M.n != self.action.size:
            raise IntegrityError("structure and action have different point counts")
        verdict = is_in_class_d(M)
        if not verdict:
            raise IntegrityError(f"stage is not in D: {verdict.witness}")
        if not action_preserves(self.action.base, M):
            raise IntegrityError("group does not act by automorphisms")
        if not self.action.base.is_faithful():
            raise IntegrityError("action is not faithful")
        for v in range(M.n):
            if len(self.action.hat_table[v]) < 4:
                raise IntegrityError(f"point {v} is not nice")

    @property
    def group(self) -> PermGroup:
        return self.action.group


@dataclass(frozen=True)
class ExtensionTask:
    c0: tuple[int, ...]
    link: LinkType

    def __post_init__(self):
        object.__setattr__(self, "c0", tuple(sorted(self.c0)))
        if self.link.base != self.c0:
            raise InputError("link type is not over the task's base")

    def as_dict(self) -> dict:
        return {"c0": list(self.c0), "link": self.link.as_dict()}


def link_types(M: Structure, C: Iterable[int]) -> list[LinkType]:
    """Every one-point type over ``C`` whose extension stays in D.

    Edge states per base vertex are none/out/in, filtered by the 3-sets
    through the new point; each 3-subset of ``C`` plus the new point takes
    any of its 12 semifinals.
    """
    C = tuple(sorted(set(C)))
    sub, _ = induced_substructure(M, C)
    nonadjacent = [(C[i], C[j]) for i, j in combinations(range(len(C)), 2) if not sub.adjacent(i, j)]
    triples = list(combinations(C, 3))
    sf_options = [semifinals_on((STAR,) + t) for t in triples]
    out = []
    for states in product(("none", "out", "in"), repeat=len(C)):
        st = dict(zip(C, states))
        if any(st[a] == "none" and st[b] == "none" for a, b in nonadjacent):
            continue
        r_out = frozenset(c for c in C if st[c] == "out")
        r_in = frozenset(c for c in C if st[c] == "in")
        for choice in product(*sf_options):
            s = frozenset().union(*choice) if choice else frozenset()
            out.append(LinkType(C, r_in, r_out, s))
    out.sort(key=LinkType.sort_key)
    return out


def _pair_state(M: Structure, u: int, w: int) -> str:
    if (u, w) in M.R:
        return "out"
    if (w, u) in M.R:
        return "in"
    return "none"


def _union_action(old: GroupAction, new: GroupAction, tag) -> GroupAction:
    shift = old.size
    table = {}
    for g in old.group.elements:
        table[g] = Permutation(old.perm(g).images + tuple(x + shift for x in new.perm(g).images))
    labels = list(old.labels) + [(tag, x) for x in new.labels]
    return GroupAction(old.group, table, labels=labels, name=old.name)


def extend_by_one_type(b0: NiceGStructure, task: ExtensionTask,
                       tag=None) -> tuple[NiceGStructure, int]:
    """Adjoin an orbit N realizing ``task.link`` over ``task.c0``.

    Returns the extended structure and the realizing vertex ``e``; the new
    points are ``b0.structure.n .. n + |N| - 1``.
    """
    M0 = b0.structure
    na0 = b0.action
    G = na0.group
    A = na0.ambient
    n0 = M0.n
    c0 = task.c0
    if not c0:
        raise InputError("extension over the empty base is realized in place, not by a new orbit")
    if any(not 0 <= c < n0 for c in c0):
        raise InputError(f"base {list(c0)} is not inside the current stage")
    E, _ = one_point_extension(M0, task.link)
    verdict = is_in_class_d(E)
    if not verdict:
        raise InputError(f"requested one-point extension is not in D: {verdict.witness}")

    # N: orbit of the ascending enumeration of the union of the hats over C0
    a_prime = frozenset().union(*(na0.hat_table[c] for c in c0))
    orbit_na = build_nice_orbit(A, a_prime, group=G)
    e_local = orbit_na.index_of(tuple(sorted(a_prime)))
    e = n0 + e_local
    stab_e = {g for g in G.elements if orbit_na.base.act(g, e_local) == e_local}
    stab_c0 = {g for g in G.elements if all(na0.base.act(g, c) == c for c in c0)}
    if stab_e != stab_c0:
        raise IntegrityError("stabilizer of the new point differs from the pointwise stabilizer of C0")

    base = _union_action(na0.base, orbit_na.base, tag)
    n = base.size

    # R between N and the old stage: fix the type of e, transport along G
    link = task.link
    state_e = {}
    for v in range(n0):
        if v in link.r_out:
            state_e[v] = "out"
        elif v in link.r_in:
            state_e[v] = "in"
        elif v in c0:
            state_e[v] = "none"
        else:
            state_e[v] = "out"
    cross: dict[tuple[int, int], str] = {}
    for g in G.elements:
        p = base.perm(g).images
        u = p[e]
        for v, s in state_e.items():
            key = (u, p[v])
            known = cross.get(key)
            if known is None:
                cross[key] = s
            elif known != s:
                raise IntegrityError(f"edge transport is ill defined at {key}")
    R = set(M0.R)
    for (u, w), s in cross.items():
        if s == "out":
            R.add((u, w))
        elif s == "in":
            R.add((w, u))
    R |= {(n0 + a, n0 + b) for a, b in orient_nice(orbit_na)}

    # S on 4-sets with one new point: transport the requested semifinals,
    # canonical semifinal on orbits the type says nothing about
    perms = [q.images for q in base.point_perms()]
    s_prime = {tuple(e if x == STAR else x for x in t) for t in link.s_tuples}
    s_prime_by_set: dict[tuple[int, ...], set] = {}
    for t in s_prime:
        s_prime_by_set.setdefault(tuple(sorted(t)), set()).add(t)
    s_tilde: set[tuple[int, ...]] = set()
    mixed: set[tuple[int, ...]] = set()
    for T in combinations(range(n0), 3):
        W = tuple(sorted((e,) + T))
        if W in mixed:
            continue
        orbit = {tuple(sorted(p[x] for x in W)) for p in perms}
        mixed |= orbit
        carriers = [U for U in sorted(orbit) if U in s_prime_by_set]
        if carriers:
            seeds = s_prime_by_set[carriers[0]]
        else:
            seeds = canonical_semifinal(min(orbit))
        for p in perms:
            s_tilde |= {tuple(p[x] for x in t) for t in seeds}
    s_tilde |= s_prime
    support = set(combinations(range(n0), 4)) | mixed
    s_tilde |= set(M0.S)

    hats = list(na0.hat_table) + list(orbit_na.hat_table)
    na = NiceAction(base, A, require_faithful=True, check_group=False, hat_table=hats)
    S = complete_semifinal(na, PartialSemifinal(frozenset(support), frozenset(s_tilde)))
    B = Structure(n, frozenset(R), S, name=M0.name)
    result = NiceGStructure(B, na)
    result.check()
    if not realizes(B, e, link):
        raise IntegrityError(f"new point {e} does not realize the requested type")
    old_R = {a for a in B.R if max(a) < n0}
    old_S = {t for t in B.S if max(t) < n0}
    if old_R != M0.R or old_S != M0.S:
        raise IntegrityError("extension changed the old stage")
    return result, e


class Schedule:
    """FIFO queue of extension tasks with a log of realizing vertices."""

    def __init__(self):
        self.queue: deque[tuple[int, ExtensionTask]] = deque()
        self.realized: list[dict] = []
        self.unrealized: list[dict] = []

    def add_round(self, M: Structure, birth: list[int], upto: int, size_bound: int, round_no: int):
        """Queue every task over a base inside ``0..upto-1`` of size at most ``size_bound``.

        Order: stage of the base (latest birth), base size, base, type.
        """
        tasks = []
        for k in range(0, size_bound + 1):
            for c0 in combinations(range(upto), k):
                stage = max((birth[c] for c in c0), default=0)
                for t in link_types(M, c0):
                    tasks.append(((stage, k, c0, t.sort_key()), ExtensionTask(c0, t)))
        tasks.sort(key=lambda item: item[0])
        for _, task in tasks:
            self.queue.append((round_no, task))

    def __len__(self):
        return len(self.queue)


@dataclass
class BuildReport:
    seed: str
    group_order: int
    rounds: int
    size_bound: int
    stage_sizes: list[int] = field(default_factory=list)
    round_sizes: list[int] = field(default_factory=list)
    realized: list[dict] = field(default_factory=list)
    unrealized: list[dict] = field(default_factory=list)
    complete: bool = True
    verdicts: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "seed": self.seed,
            "group_order": self.group_order,
            "rounds": self.rounds,
            "size_bound": self.size_bound,
            "stage_sizes": self.stage_sizes,
            "round_sizes": self.round_sizes,
            "realized": self.realized,
            "unrealized": self.unrealized,
            "complete": self.complete,
            "verdicts": self.verdicts,
        }


def initial_stage(A: Structure, group: PermGroup | None = None) -> NiceGStructure:
    G = group if group is not None else automorphism_group(A)
    na = build_nice_orbit(A, A.domain, group=G)
    M0 = nice_d_structure(na)
    stage = NiceGStructure(M0, na)
    stage.check()
    return stage


def build_universal_action(A: Structure, rounds: int = 1, size_bound: int = 2,
                           max_points: int | None = None,
                           keep_stages: bool = False) -> tuple[NiceGStructure, BuildReport, list]:
    """Bookkeeping construction over A with G = Aut(A) acting faithfully.

    Round ``j`` realizes every task whose base lies in the structure as it
    stood when the round began. ``max_points`` caps the stage size; tasks
    that would exceed it are reported unrealized and the report is marked
    incomplete. Returns the final stage, the report, and the list of all
    intermediate stages when ``keep_stages`` is set.
    """
    if A.n < 4:
        raise ConstructionError(
            f"A has {A.n} < 4 vertices; use small_group_embedding (embeds Aut(A) via C6)")
    verdict = is_in_class_d(A)
    if not verdict:
        raise InputError(f"seed structure is not in D: {verdict.witness}")
    if rounds < 0 or size_bound < 0:
        raise InputError("rounds and size bound must be non-negative")
    G = automorphism_group(A)
    current = initial_stage(A, G)
    birth = [0] * current.structure.n
    report = BuildReport(seed=A.name, group_order=G.order(), rounds=rounds, size_bound=size_bound)
    report.stage_sizes.append(current.structure.n)
    report.round_sizes.append(current.structure.n)
    stages = [current] if keep_stages else []
    schedule = Schedule()
    stage_no = 0
    for round_no in range(1, rounds + 1):
        upto = current.structure.n
        schedule.add_round(current.structure, birth, upto, size_bound, round_no)
        while schedule.queue:
            rnd, task = schedule.queue.popleft()
            entry = {"round": rnd, **task.as_dict()}
            if not task.c0:
                if current.structure.n == 0:
                    report.unrealized.append({**entry, "reason": "empty structure"})
                    report.complete = False
                    continue
                report.realized.append({**entry, "vertex": 0, "stage": stage_no, "in_place": True})
                continue
            size_after = current.structure.n + G.order() // _stabilizer_order(current, task.c0)
            if max_points is not None and size_after > max_points:
                report.unrealized.append({**entry, "reason": "budget"})
                report.complete = False
                continue
            old_n = current.structure.n
            current, e = extend_by_one_type(current, task, tag=stage_no + 1)
            stage_no += 1
            birth += [stage_no] * (current.structure.n - old_n)
            report.realized.append({**entry, "vertex": e, "stage": stage_no, "in_place": False})
            report.stage_sizes.append(current.structure.n)
            if keep_stages:
                stages.append(current)
        report.round_sizes.append(current.structure.n)

    M = current.structure
    hom = {g: current.action.base.perm(g) for g in G.elements}
    report.verdicts = {
        "in_class_d": bool(is_in_class_d(M)),
        "acts_by_automorphisms": action_preserves(current.action.base, M),
        "faithful": current.action.base.is_faithful(),
        "injective_homomorphism": is_injective_homomorphism(hom, G),
        "nice": all(len(h) >= 4 for h in current.action.hat_table),
        "realized_types_check": all(
            realizes(M, r["vertex"], _link_from_dict(r["link"]))
            for r in report.realized if r["c0"]),
    }
    return current, report, stages


def _stabilizer_order(stage: NiceGStructure, c0) -> int:
    base = stage.action.base
    return sum(1 for g in stage.group.elements if all(base.act(g, c) == c for c in c0))


def _link_from_dict(d: dict) -> LinkType:
    return LinkType(tuple(d["base"]), frozenset(d["r_in"]), frozenset(d["r_out"]),
                    frozenset(tuple(t) for t in d["s_tuples"]))


@dataclass
class ExtensionReport:
    size_bound: int
    checked: int = 0
    realized: int = 0
    unrealized: list[dict] = field(default_factory=list)

    @property
    def satisfied(self) -> bool:
        return not self.unrealized

    def as_dict(self) -> dict:
        return {"size_bound": self.size_bound, "checked": self.checked, "realized": self.realized,
                "satisfied": self.satisfied, "unrealized": self.unrealized}


def verify_extension_property(M: Structure, s: int, within: Iterable[int] | None = None,
                              max_listed: int = 50) -> ExtensionReport:
    """Check that every D-consistent one-point type over every base of size
    at most ``s`` (drawn from ``within``, default all of M) is realized in M."""
    verdict = is_in_class_d(M)
    if not verdict:
        raise InputError(f"structure is not in D: {verdict.witness}")
    pool = sorted(set(within)) if within is not None else list(M.domain)
    report = ExtensionReport(size_bound=s)
    for k in range(0, s + 1):
        for C in combinations(pool, k):
            present = {qftp(M, w, C) for w in M.domain if w not in C}
            for t in link_types(M, C):
                report.checked += 1
                if t in present:
                    report.realized += 1
                elif len(report.unrealized) < max_listed:
                    report.unrealized.append(t.as_dict())
                elif len(report.unrealized) == max_listed:
                    report.unrealized.append({"base": list(C), "truncated": True})
    return report


@dataclass
class SmallGroupEmbedding:
    source: PermGroup
    c6: PermGroup
    structure: Structure
    action: GroupAction
    into_c6: dict
    into_aut: dict


def small_group_embedding(A: Structure) -> SmallGroupEmbedding:
    """Embed Aut(A), for |A| < 4, into C6 and then into a faithful D-structure on C6."""
    if A.n >= 4:
        raise InputError("small_group_embedding is for structures with fewer than 4 vertices")
    verdict = is_in_class_d(A)
    if not verdict:
        raise InputError(f"A is not in D: {verdict.witness}")
    H = automorphism_group(A)
    if H.order() not in (1, 2, 3) or not H.is_cyclic():
        raise IntegrityError(f"automorphism group of a small D-structure has order {H.order()}")
    C6 = load_group("C6")
    built = d_structure_on_group(C6)
    if not built:
        raise IntegrityError("C6 admits no invariant D-structure")
    k = H.order()
    h = next((x for x in H.elements if x.order() == k), H.identity)
    c = next(x for x in C6.elements if x.order() == k)
    into_c6 = {}
    x, y = H.identity, C6.identity
    for _ in range(k):
        into_c6[x] = y
        x, y = h * x, c * y
    into_aut = {g: built.action.perm(img) for g, img in into_c6.items()}
    if not is_injective_homomorphism(into_c6, H) or not is_injective_homomorphism(into_aut, H):
        raise IntegrityError("composite map is not an injective homomorphism")
    return SmallGroupEmbedding(H, C6, built.structure, built.action, into_c6, into_aut)
