"""Finite relational structures over one binary relation R and one 4-ary relation S.

Domains are always ``0..n-1``. ``S`` is kept closed under the partner map
``(a, b, c, d) -> (c, d, a, b)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .errors import CapacityError, InputError, Verdict
from .perms import Permutation, PermGroup, closure_cap

STAR = -1
"""Placeholder for the new point in a :class:`LinkType`."""

Pair = tuple[int, int]
Quad = tuple[int, int, int, int]


def partner(t: Sequence[int]) -> tuple:
    return (t[2], t[3], t[0], t[1])


def canonical_quad(t: Sequence[int]) -> tuple:
    """Representative of ``{t, partner(t)}`` used for serialization."""
    t = tuple(t)
    return min(t, partner(t))


@dataclass(frozen=True)
class Structure:
    n: int
    R: frozenset = frozenset()
    S: frozenset = frozenset()
    name: str = "M"
    allow_loops: bool = False
    undirected: bool = False

    def __post_init__(self):
        if self.n < 0:
            raise InputError("vertex count must be non-negative")
        R = frozenset((int(u), int(v)) for u, v in self.R)
        for u, v in R:
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InputError(f"R atom ({u}, {v}) out of range for n = {self.n}")
            if u == v and not self.allow_loops:
                raise InputError(f"loop ({u}, {u}) in R but allow_loops is not set")
        if self.undirected:
            R = R | frozenset((v, u) for u, v in R)
        S = set()
        for t in self.S:
            t = tuple(int(x) for x in t)
            if len(t) != 4:
                raise InputError(f"S atom {t} is not a 4-tuple")
            for x in t:
                if not 0 <= x < self.n:
                    raise InputError(f"S atom {t} out of range for n = {self.n}")
            if len(set(t)) != 4:
                raise InputError(f"S atom {t} has repeated entries")
            S.add(t)
            S.add(partner(t))
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "S", frozenset(S))

    @property
    def domain(self) -> range:
        return range(self.n)

    def __len__(self):
        return self.n

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self.R

    def adjacent(self, u: int, v: int) -> bool:
        return (u, v) in self.R or (v, u) in self.R

    def loops(self) -> list[int]:
        return sorted(u for u, v in self.R if u == v)

    def s_on(self, subset: Iterable[int]) -> frozenset:
        """S-tuples whose entries all lie in ``subset``."""
        subset = set(subset)
        return frozenset(t for t in self.S if set(t) <= subset)

    def semifinal_index(self) -> dict[frozenset, frozenset]:
        """Map each 4-set to the S-tuples living on it (cached)."""
        cached = self.__dict__.get("_sf_index")
        if cached is None:
            cached = {}
            for t in self.S:
                cached.setdefault(frozenset(t), set()).add(t)
            cached = {k: frozenset(v) for k, v in cached.items()}
            object.__setattr__(self, "_sf_index", cached)
        return cached

    def degrees(self) -> list[tuple[int, int, bool, int]]:
        """Per-vertex invariant (out-degree, in-degree, loop, S-incidence)."""
        out = [0] * self.n
        inn = [0] * self.n
        loop = [False] * self.n
        s_count = [0] * self.n
        for u, v in self.R:
            if u == v:
                loop[u] = True
            else:
                out[u] += 1
                inn[v] += 1
        for t in self.S:
            for x in t:
                s_count[x] += 1
        return [(out[i], inn[i], loop[i], s_count[i]) for i in range(self.n)]

    def transport(self, p: Permutation) -> Structure:
        """Image of the structure under a permutation of its domain."""
        img = p.images
        return Structure(self.n, frozenset((img[u], img[v]) for u, v in self.R),
                         frozenset(tuple(img[x] for x in t) for t in self.S),
                         name=self.name, allow_loops=self.allow_loops, undirected=self.undirected)

    def same_relations(self, other: Structure) -> bool:
        return self.n == other.n and self.R == other.R and self.S == other.S

    def renamed(self, name: str) -> Structure:
        return Structure(self.n, self.R, self.S, name=name,
                         allow_loops=self.allow_loops, undirected=self.undirected)


def _check_vertices(M: Structure, vertices: Iterable[int]):
    for v in vertices:
        if not (isinstance(v, int) and 0 <= v < M.n):
            raise InputError(f"vertex {v!r} is not in the domain of {M.name} (n = {M.n})")


def induced_substructure(M: Structure, U: Iterable[int]) -> tuple[Structure, tuple[int, ...]]:
    """Substructure on ``U`` renumbered by increasing index.

    Returns the structure and the renumbering map: entry ``i`` is the
    original vertex that became ``i``.
    """
    U = tuple(sorted(set(U)))
    _check_vertices(M, U)
    index = {v: i for i, v in enumerate(U)}
    R = frozenset((index[u], index[v]) for u, v in M.R if u in index and v in index)
    S = frozenset(tuple(index[x] for x in t) for t in M.S if all(x in index for x in t))
    sub = Structure(len(U), R, S, name=f"{M.name}|{len(U)}", allow_loops=M.allow_loops,
                    undirected=M.undirected)
    return sub, U


@dataclass(frozen=True)
class Embedding:
    source: Structure
    target: Structure
    map: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "map", tuple(self.map))
        if not is_embedding(self.source, self.target, self.map):
            raise InputError(f"{list(self.map)} is not an embedding {self.source.name} -> {self.target.name}")

    def __call__(self, v: int) -> int:
        return self.map[v]

    def image(self) -> tuple[int, ...]:
        return tuple(sorted(self.map))


def is_embedding(A: Structure, M: Structure, f: Sequence[int]) -> bool:
    """Injective, and preserves and reflects every R- and S-atom."""
    if len(f) != A.n or len(set(f)) != A.n:
        return False
    if any(not 0 <= x < M.n for x in f):
        return False
    for u in range(A.n):
        for v in range(A.n):
            if ((u, v) in A.R) != ((f[u], f[v]) in M.R):
                return False
    a_index = A.semifinal_index()
    m_index = M.semifinal_index()
    for quad in combinations(range(A.n), 4):
        src = a_index.get(frozenset(quad), frozenset())
        tgt = m_index.get(frozenset(f[x] for x in quad), frozenset())
        if frozenset(tuple(f[x] for x in t) for t in src) != tgt:
            return False
    return True


def find_embeddings(A: Structure, M: Structure) -> list[Embedding]:
    """All embeddings ``A -> M``, in lexicographic order of their image lists."""
    if A.n > M.n:
        return []
    maps = list(_embedding_search(A, M))
    return [Embedding(A, M, f) for f in maps]


def _embedding_search(A: Structure, M: Structure, order: Sequence[int] | None = None,
                      candidates: Sequence[Sequence[int]] | None = None) -> Iterator[tuple[int, ...]]:
    """Backtracking over partial injections with atom-by-atom pruning.

    ``order`` is the sequence in which source vertices get assigned;
    yields complete maps as tuples indexed by source vertex.
    """
    n = A.n
    if order is None:
        order = list(range(n))
    if candidates is None:
        candidates = [range(M.n)] * n
    position = {v: i for i, v in enumerate(order)}
    # S-tuples of A (resp. all 4-subsets) that become fully assigned at each step
    s_checks: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for quad in combinations(range(n), 4):
        last = max(position[x] for x in quad)
        s_checks[last].append(quad)
    f = [-1] * n
    used = [False] * M.n

    def ok(step: int, v: int, w: int) -> bool:
        if ((v, v) in A.R) != ((w, w) in M.R):
            return False
        for j in range(step):
            u = order[j]
            x = f[u]
            if ((u, v) in A.R) != ((x, w) in M.R):
                return False
            if ((v, u) in A.R) != ((w, x) in M.R):
                return False
        return True

    a_index = A.semifinal_index()
    m_index = M.semifinal_index()
    empty: frozenset = frozenset()

    def s_ok(step: int) -> bool:
        for quad in s_checks[step]:
            src = a_index.get(frozenset(quad), empty)
            tgt = m_index.get(frozenset(f[x] for x in quad), empty)
            if len(src) != len(tgt):
                return False
            for t in src:
                if tuple(f[x] for x in t) not in tgt:
                    return False
        return True

    def rec(step: int):
        if step == n:
            yield tuple(f)
            return
        v = order[step]
        for w in candidates[v]:
            if used[w] or not ok(step, v, w):
                continue
            f[v] = w
            used[w] = True
            if s_ok(step):
                yield from rec(step + 1)
            used[w] = False
            f[v] = -1

    yield from rec(0)


def automorphism_group(M: Structure, cap: int | None = None) -> PermGroup:
    """Full automorphism group by backtracking.

    Vertices are assigned in decreasing total R-degree (ties by index) and
    may only go to vertices with the same degree profile.
    """
    cap = cap if cap is not None else closure_cap()
    profile = M.degrees()
    order = sorted(M.domain, key=lambda v: (-(profile[v][0] + profile[v][1]), v))
    candidates = [[w for w in M.domain if profile[w] == profile[v]] for v in M.domain]
    found = []
    for f in _embedding_search(M, M, order=order, candidates=candidates):
        found.append(Permutation(f))
        if len(found) > cap:
            raise CapacityError(f"automorphism group of {M.name} exceeds cap {cap}")
    group = PermGroup([], degree=M.n, elements=found, name=f"Aut({M.name})")
    group.generators = group.small_generators()
    return group


def is_automorphism(M: Structure, p: Permutation) -> bool:
    return p.degree == M.n and M.transport(p).same_relations(M)


def isomorphism(A: Structure, B: Structure) -> tuple[int, ...] | None:
    if A.n != B.n or len(A.R) != len(B.R) or len(A.S) != len(B.S):
        return None
    pa, pb = A.degrees(), B.degrees()
    if sorted(pa) != sorted(pb):
        return None
    candidates = [[w for w in B.domain if pb[w] == pa[v]] for v in A.domain]
    for f in _embedding_search(A, B, candidates=candidates):
        return f
    return None


def is_ultrahomogeneous(M: Structure) -> Verdict:
    """Every isomorphism between induced substructures extends to an automorphism.

    Partial isomorphisms with domain ``U`` are exactly the embeddings of the
    substructure induced on ``U``; each is compared against the restrictions
    of the automorphism group. The witness on failure is the offending
    partial map as a dict.
    """
    aut = automorphism_group(M)
    for k in range(1, M.n + 1):
        for U in combinations(M.domain, k):
            restrictions = {g.apply(U) for g in aut.elements}
            sub, _ = induced_substructure(M, U)
            for f in _embedding_search(sub, M):
                if f not in restrictions:
                    return Verdict(False, dict(zip(U, f)))
    return Verdict(True, None)


@dataclass(frozen=True)
class LinkType:
    """Quantifier-free type of a new point over the base ``C0``.

    ``r_in`` holds base vertices with an edge toward the new point, ``r_out``
    those receiving an edge from it; ``s_tuples`` use :data:`STAR` for the
    new point.
    """

    base: tuple[int, ...]
    r_in: frozenset = frozenset()
    r_out: frozenset = frozenset()
    s_tuples: frozenset = frozenset()

    def __post_init__(self):
        base = tuple(sorted(self.base))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "r_in", frozenset(self.r_in))
        object.__setattr__(self, "r_out", frozenset(self.r_out))
        if self.r_in & self.r_out:
            raise InputError(f"vertices {sorted(self.r_in & self.r_out)} both in r_in and r_out")
        if not (self.r_in | self.r_out) <= set(base):
            raise InputError("edge atoms outside the base")
        s = set()
        for t in self.s_tuples:
            t = tuple(t)
            if STAR not in t or len(set(t)) != 4 or not set(t) - {STAR} <= set(base):
                raise InputError(f"bad S-tuple {t} in link type")
            s.add(t)
            s.add(partner(t))
        object.__setattr__(self, "s_tuples", frozenset(s))

    def sort_key(self):
        return (self.base, tuple(sorted(self.r_in)), tuple(sorted(self.r_out)),
                tuple(sorted(canonical_quad(t) for t in self.s_tuples)))

    def edge_state(self, c: int) -> str:
        if c in self.r_out:
            return "out"
        if c in self.r_in:
            return "in"
        return "none"

    def as_dict(self) -> dict:
        return {
            "base": list(self.base),
            "r_in": sorted(self.r_in),
            "r_out": sorted(self.r_out),
            "s_tuples": sorted(list(canonical_quad(t)) for t in self.s_tuples
                               if t == canonical_quad(t)),
        }


def qftp(M: Structure, v: int, C: Iterable[int]) -> LinkType:
    C = tuple(sorted(set(C)))
    _check_vertices(M, C + (v,))
    if v in C:
        raise InputError(f"vertex {v} lies in the base {list(C)}")
    base = set(C)
    r_in = {c for c in C if (c, v) in M.R}
    r_out = {c for c in C if (v, c) in M.R}
    if r_in & r_out:
        raise InputError(f"vertex {v} and {sorted(r_in & r_out)[0]} are joined both ways; "
                         "link types describe oriented graphs")
    s = set()
    for t in M.S:
        if v in t and all(x == v or x in base for x in t):
            s.add(tuple(STAR if x == v else x for x in t))
    return LinkType(C, frozenset(r_in), frozenset(r_out), frozenset(s))


def realizes(M: Structure, w: int, t: LinkType) -> bool:
    _check_vertices(M, t.base + (w,))
    if w in t.base:
        raise InputError(f"vertex {w} lies in the base {list(t.base)}")
    return qftp(M, w, t.base) == t


def one_point_extension(M: Structure, t: LinkType) -> tuple[Structure, int]:
    """Induced structure on ``t.base`` plus a new last vertex carrying ``t``."""
    sub, U = induced_substructure(M, t.base)
    index = {v: i for i, v in enumerate(U)}
    star = len(U)
    R = set(sub.R)
    R |= {(index[c], star) for c in t.r_in}
    R |= {(star, index[c]) for c in t.r_out}
    S = set(sub.S)
    S |= {tuple(star if x == STAR else index[x] for x in q) for q in t.s_tuples}
    E = Structure(star + 1, frozenset(R), frozenset(S), name=f"{M.name}+1")
    return E, star
