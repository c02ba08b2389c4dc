"""Group-extensibility, finite universality, and the two counterexamples.

``remark_structure`` is the six-vertex digraph with loops whose automorphism
group is universal for its age although the age is not group-extensible.
``obstruction_config`` is the four-point D-structure on which no
automorphism of any D-structure containing it can swap two of the points
while fixing a third.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

from .builder import link_types
from .classd import AmalgamProblem, canonical_semifinal, is_in_class_d, strong_amalgam
from .core import (Embedding, Structure, automorphism_group, find_embeddings,
                   induced_substructure, isomorphism, one_point_extension)
from .errors import InputError
from .perms import Permutation, PermGroup, find_group_embedding, is_injective_homomorphism

REMARK_NAMES = ("a", "a'", "b0", "b1", "b2", "b3")


def remark_structure() -> Structure:
    a, a1, b = 0, 1, [2, 3, 4, 5]
    R = {(a, b[0]), (a, b[2]), (a1, b[1]), (a1, b[3]), (a, a), (a1, a1)}
    R |= {(b[i], b[(i + 1) % 4]) for i in range(4)}
    return Structure(6, frozenset(R), name="B", allow_loops=True)


def remark_generator() -> Permutation:
    """a <-> a', b_i -> b_{i+1}."""
    return Permutation((1, 0, 3, 4, 5, 2))


@dataclass
class GroupEmbedding:
    source: PermGroup
    target: PermGroup
    map: dict[Permutation, Permutation]
    image_points: tuple[int, ...] | None = None

    def verify(self) -> bool:
        """Injective homomorphism; if ``image_points`` is set, each image extends its source."""
        if not is_injective_homomorphism(self.map, self.source):
            return False
        if not all(h in self.target for h in self.map.values()):
            return False
        if self.image_points is not None:
            pts = self.image_points
            for g, h in self.map.items():
                if any(h.images[pts[i]] != pts[g.images[i]] for i in range(len(pts))):
                    return False
        return True


@dataclass
class ExtensivityVerdict:
    ok: bool
    embedding: GroupEmbedding | None = None
    trace: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def is_group_extensive(f: Embedding, M: Structure, aut_M: PermGroup | None = None) -> ExtensivityVerdict:
    """Is there an injective homomorphism Aut(f(A)) -> Aut(M) with each image extending its argument?

    Aut(f(A)) acts on the sorted image points (index i stands for the i-th
    smallest). Generator images range over all extensions in Aut(M).
    """
    aut_M = aut_M if aut_M is not None else automorphism_group(M)
    pts = tuple(sorted(f.map))
    sub, _ = induced_substructure(M, pts)
    H = automorphism_group(sub)
    gens = H.small_generators()
    candidates = {}
    for g in gens:
        candidates[g] = [h for h in aut_M.elements
                         if all(h.images[pts[i]] == pts[g.images[i]] for i in range(len(pts)))]
    trace: list = []
    for g in gens:
        trace.append({"generator": str(g), "order": g.order(),
                      "extensions": [{"element": str(h), "order": h.order()} for h in candidates[g]]})
    table = _search_any_order(H, aut_M, candidates, gens, trace)
    if table is None:
        return ExtensivityVerdict(False, None, trace)
    emb = GroupEmbedding(H, aut_M, table, image_points=pts)
    return ExtensivityVerdict(True, emb, [])


def _search_any_order(H, K, candidates, gens, trace):
    """Like find_group_embedding but tries every candidate, recording order clashes."""
    from .perms import _extend_homomorphism

    helper = PermGroup(gens, degree=H.degree, elements=H.elements)
    pools = [candidates[g] for g in gens]
    if not gens:
        return {H.identity: K.identity}

    def rec(i, chosen):
        if i == len(gens):
            table = _extend_homomorphism(helper, chosen, K.degree)
            if table is None:
                trace.append({"images": [str(h) for h in chosen],
                              "reason": "does not respect the relations of the source group"})
                return None
            if sum(1 for v in table.values() if v.is_identity()) > 1:
                trace.append({"images": [str(h) for h in chosen], "reason": "not injective"})
                return None
            return table
        for h in pools[i]:
            found = rec(i + 1, chosen + [h])
            if found is not None:
                return found
        return None

    return rec(0, [])


@dataclass
class AgeClass:
    representative: tuple[int, ...]
    structure: Structure
    members: list[tuple[int, ...]]
    aut_order: int


def age_classes(M: Structure, include_empty: bool = False) -> list[AgeClass]:
    """Induced substructures of M up to isomorphism, by brute force."""
    classes: list[AgeClass] = []
    start = 0 if include_empty else 1
    for k in range(start, M.n + 1):
        mine: list[AgeClass] = []
        for U in combinations(M.domain, k):
            sub, _ = induced_substructure(M, U)
            for cls in mine:
                if isomorphism(sub, cls.structure) is not None:
                    cls.members.append(U)
                    break
            else:
                mine.append(AgeClass(U, sub, [U], automorphism_group(sub).order()))
        classes.extend(mine)
    return classes


@dataclass
class AgeReport:
    extensible: bool
    classes: list[dict]
    failing: list[tuple[int, ...]]

    def __bool__(self):
        return self.extensible


def check_age_group_extensibility(M: Structure, max_size: int = 8) -> AgeReport:
    """For every isomorphism type in the age and every embedding of it into M,
    decide group-extensivity; the age is extensible when every type has at
    least one extensive embedding."""
    if M.n > max_size:
        raise InputError(f"structure has {M.n} vertices, limit is {max_size}")
    aut_M = automorphism_group(M)
    rows = []
    failing = []
    for cls in age_classes(M):
        embeddings = find_embeddings(cls.structure, M)
        verdicts = []
        for f in embeddings:
            v = is_group_extensive(f, M, aut_M)
            verdicts.append({"map": list(f.map), "extensive": v.ok})
        any_ok = any(r["extensive"] for r in verdicts)
        rows.append({"class": list(cls.representative), "size": len(cls.representative),
                     "aut_order": cls.aut_order, "embeddings": verdicts, "extensible": any_ok})
        if not any_ok:
            failing.append(cls.representative)
    return AgeReport(not failing, rows, failing)


@dataclass
class UniversalityReport:
    universal: bool
    classes: list[dict]

    def __bool__(self):
        return self.universal


def universality_of_finite(M: Structure, max_size: int = 8) -> UniversalityReport:
    """Does Aut(A) embed abstractly into Aut(M) for every A in the age of M?"""
    if M.n > max_size:
        raise InputError(f"structure has {M.n} vertices, limit is {max_size}")
    aut_M = automorphism_group(M)
    rows = []
    ok = True
    for cls in age_classes(M):
        H = automorphism_group(cls.structure)
        found = find_group_embedding(H, aut_M)
        rows.append({"class": list(cls.representative), "aut_order": H.order(),
                     "aut_cyclic": H.is_cyclic(), "embeds": found is not None})
        ok = ok and found is not None
    return UniversalityReport(ok, rows)


@dataclass(frozen=True)
class ObstructionConfig:
    structure: Structure
    fa: int = 0
    fb: int = 1
    fc: int = 2
    v: int = 3


def obstruction_config() -> ObstructionConfig:
    """f(a)=0, f(b)=1, f(c)=2, v=3: a->b, a->c, v->b, c->v, no edge a-v."""
    R = {(0, 1), (0, 2), (3, 1), (2, 3)}
    S = canonical_semifinal((0, 1, 2, 3))
    return ObstructionConfig(Structure(4, frozenset(R), frozenset(S), name="obstruction"))


@dataclass
class ObstructionVerdict:
    holds: bool
    copies: int
    steps: list[str]
    counterexample: dict | None = None

    def __bool__(self):
        return self.holds


def verify_obstruction(M: Structure, r_only: bool = False) -> ObstructionVerdict:
    """No automorphism of M swaps f(b), f(c) while fixing f(a), for any copy of the config.

    With ``r_only`` the copies are those of the edge pattern alone, whatever
    semifinal M puts on them; the argument never uses the semifinal.
    """
    verdict = is_in_class_d(M)
    if not verdict:
        raise InputError(f"structure is not in D: {verdict.witness}")
    cfg = obstruction_config()
    if r_only:
        copies = find_embeddings(Structure(4, cfg.structure.R), Structure(M.n, M.R))
    else:
        copies = find_embeddings(cfg.structure, M)
    if not copies:
        raise InputError("structure contains no copy of the obstruction configuration")
    aut_M = automorphism_group(M)
    steps = []
    for f in copies:
        fa, fb, fc, v = f(cfg.fa), f(cfg.fb), f(cfg.fc), f(cfg.v)
        for g in aut_M.elements:
            if g.images[fa] == fa and g.images[fb] == fc and g.images[fc] == fb:
                return ObstructionVerdict(False, len(copies), steps,
                                          {"copy": list(f.map), "automorphism": list(g.images)})
        steps.append(
            f"copy {list(f.map)}: v={v} has edges ({v},{fb}) and ({fc},{v}), so an involution tau "
            f"swapping {fb},{fc} and fixing {fa} moves v; tau would reverse any edge between v and "
            f"tau(v), and {fa} is adjacent to neither, so {{{fa}, v, tau(v)}} would be an anticlique; "
            f"none of the {aut_M.order()} automorphisms restricts to the swap")
    return ObstructionVerdict(True, len(copies), steps)


def grow_around(base: Structure, target_size: int, rng: random.Random) -> Structure:
    """Add points one at a time by strong amalgamation over random induced bases."""
    M = base
    while M.n < target_size:
        k = rng.randint(0, min(M.n, 3))
        T = tuple(sorted(rng.sample(range(M.n), k)))
        A, _ = induced_substructure(M, T)
        t = rng.choice(link_types(M, T))
        C, _ = one_point_extension(M, t)
        problem = AmalgamProblem.over(A, M, C, map_B=T)
        D, e_B, _ = strong_amalgam(problem)
        # renumber so that M keeps its indices
        order = list(e_B.map) + [x for x in D.domain if x not in set(e_B.map)]
        pos = {x: i for i, x in enumerate(order)}
        p = Permutation(tuple(pos[x] for x in D.domain))
        M = D.transport(p).renamed(base.name)
    return M


def random_obstruction_hosts(count: int, seed: int, max_size: int = 7) -> list[Structure]:
    rng = random.Random(seed)
    base = obstruction_config().structure
    return [grow_around(base, rng.randint(base.n, max_size), rng) for _ in range(count)]
