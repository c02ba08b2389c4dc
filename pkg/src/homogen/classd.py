"""Membership in the class D, strong amalgamation, enumeration and sampling.

A structure is in D when its R-reduct is an I3-free oriented graph (no loops,
no 2-cycles, every 3-set carries an edge) and its S-reduct is a semifinal
structure (every 4-set carries exactly one partner pair of S-tuples).
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product
from math import comb
from typing import Iterator, Sequence

from .core import Embedding, Structure, partner
from .errors import CapacityError, InputError, Verdict

ENUMERATION_CAP = 5


def semifinals_on(quad: Sequence[int]) -> list[frozenset]:
    """The 12 semifinals on a 4-set, sorted by their least tuple."""
    found = {}
    for t in permutations(sorted(quad)):
        pair = frozenset((t, partner(t)))
        found[min(pair)] = pair
    return [found[k] for k in sorted(found)]


def canonical_semifinal(quad: Sequence[int]) -> frozenset:
    a, b, c, d = sorted(quad)
    return frozenset(((a, b, c, d), (c, d, a, b)))


def is_i3_free(M: Structure) -> Verdict:
    """I3-free oriented graph check. Witness: an offending pair or 3-set."""
    loops = M.loops()
    if loops:
        raise InputError(f"loop at vertex {loops[0]}: I3-freeness is defined for loop-free structures")
    for u, v in sorted(M.R):
        if (v, u) in M.R:
            return Verdict(False, (min(u, v), max(u, v)))
    for triple in combinations(M.domain, 3):
        a, b, c = triple
        if not (M.adjacent(a, b) or M.adjacent(a, c) or M.adjacent(b, c)):
            return Verdict(False, triple)
    return Verdict(True, None)


def is_semifinal(M: Structure) -> Verdict:
    """Exactly one semifinal on every 4-set. Witness: the first bad 4-set."""
    for t in M.S:
        if len(set(t)) != 4:
            return Verdict(False, tuple(sorted(set(t))))
    index = M.semifinal_index()
    for quad in combinations(M.domain, 4):
        tuples = index.get(frozenset(quad))
        if tuples is None or len(tuples) != 2:
            return Verdict(False, quad)
        t = min(tuples)
        if partner(t) not in tuples:
            return Verdict(False, quad)
    return Verdict(True, None)


def is_in_class_d(M: Structure) -> Verdict:
    if M.loops():
        return Verdict(False, ("loop", M.loops()[0]))
    v = is_i3_free(M)
    if not v:
        return Verdict(False, ("R", v.witness))
    v = is_semifinal(M)
    if not v:
        return Verdict(False, ("S", v.witness))
    return Verdict(True, None)


@dataclass(frozen=True)
class AmalgamProblem:
    A: Structure
    B: Structure
    C: Structure
    i_B: Embedding
    i_C: Embedding

    def __post_init__(self):
        if self.i_B.source is not self.A and self.i_B.source != self.A:
            raise InputError("i_B does not start at A")
        if self.i_C.source is not self.A and self.i_C.source != self.A:
            raise InputError("i_C does not start at A")
        if self.i_B.target != self.B or self.i_C.target != self.C:
            raise InputError("embedding targets do not match B and C")

    @classmethod
    def over(cls, A: Structure, B: Structure, C: Structure,
             map_B: Sequence[int] | None = None, map_C: Sequence[int] | None = None):
        """Build a problem; maps default to the inclusion ``i -> i``."""
        map_B = tuple(range(A.n)) if map_B is None else tuple(map_B)
        map_C = tuple(range(A.n)) if map_C is None else tuple(map_C)
        return cls(A, B, C, Embedding(A, B, map_B), Embedding(A, C, map_C))


def strong_amalgam(p: AmalgamProblem) -> tuple[Structure, Embedding, Embedding]:
    """Free-orientation strong amalgam.

    Domain order: B minus A (in B's order), then A, then C minus A. Every
    vertex of B - A gets an edge to every vertex of C - A; mixed 4-sets get
    the canonical semifinal.
    """
    for label, X in (("B", p.B), ("C", p.C)):
        v = is_in_class_d(X)
        if not v:
            raise InputError(f"{label} = {X.name} is not in D: {v.witness}")
    img_B = set(p.i_B.map)
    img_C = set(p.i_C.map)
    b_only = [b for b in p.B.domain if b not in img_B]
    c_only = [c for c in p.C.domain if c not in img_C]
    nb, na = len(b_only), p.A.n
    from_B = {}
    for i, b in enumerate(b_only):
        from_B[b] = i
    for a in p.A.domain:
        from_B[p.i_B(a)] = nb + a
    from_C = {}
    for a in p.A.domain:
        from_C[p.i_C(a)] = nb + a
    for j, c in enumerate(c_only):
        from_C[c] = nb + na + j
    n = nb + na + len(c_only)

    R = {(from_B[u], from_B[v]) for u, v in p.B.R}
    R |= {(from_C[u], from_C[v]) for u, v in p.C.R}
    R |= {(from_B[b], from_C[c]) for b in b_only for c in c_only}
    S = {tuple(from_B[x] for x in t) for t in p.B.S}
    S |= {tuple(from_C[x] for x in t) for t in p.C.S}
    left = set(from_B.values())
    right = set(from_C.values())
    for quad in combinations(range(n), 4):
        if set(quad) <= left or set(quad) <= right:
            continue
        S |= canonical_semifinal(quad)
    D = Structure(n, frozenset(R), frozenset(S), name=f"{p.B.name}*{p.C.name}")
    e_B = Embedding(p.B, D, tuple(from_B[b] for b in p.B.domain))
    e_C = Embedding(p.C, D, tuple(from_C[c] for c in p.C.domain))
    return D, e_B, e_C


_PAIR_STATES = (0, 1, 2)  # none, i->j, j->i


def _edges_from_states(pairs, states) -> frozenset:
    R = set()
    for (i, j), s in zip(pairs, states):
        if s == 1:
            R.add((i, j))
        elif s == 2:
            R.add((j, i))
    return frozenset(R)


def i3_free_graphs(n: int) -> Iterator[frozenset]:
    """All I3-free oriented graphs on ``0..n-1`` as edge sets.

    Pairs are assigned in lexicographic order with states none / forward /
    backward; a 3-set is checked as soon as its last pair is assigned.
    """
    pairs = list(combinations(range(n), 2))
    pair_index = {p: i for i, p in enumerate(pairs)}
    closing: list[list[tuple[int, int, int]]] = [[] for _ in pairs]
    for a, b, c in combinations(range(n), 3):
        ids = (pair_index[(a, b)], pair_index[(a, c)], pair_index[(b, c)])
        closing[max(ids)].append(ids)
    states = [0] * len(pairs)

    def rec(k):
        if k == len(pairs):
            yield _edges_from_states(pairs, states)
            return
        for s in _PAIR_STATES:
            states[k] = s
            if all(states[x] or states[y] or states[z] for x, y, z in closing[k]):
                yield from rec(k + 1)
        states[k] = 0

    yield from rec(0)


def semifinal_choices(n: int) -> int:
    return 12 ** comb(n, 4)


def count_class_d(n: int) -> int:
    """Number of labeled D-structures on n vertices: graphs times semifinal choices."""
    graphs = sum(1 for _ in i3_free_graphs(n))
    return graphs * semifinal_choices(n)


def enumerate_class_d(n: int, cap: int = ENUMERATION_CAP) -> Iterator[Structure]:
    """Every labeled D-structure on n vertices, deterministically ordered."""
    if n > cap:
        raise CapacityError(f"enumeration of D on {n} vertices exceeds cap {cap}")
    quads = list(combinations(range(n), 4))
    options = [semifinals_on(q) for q in quads]
    for R in i3_free_graphs(n):
        for choice in product(*options):
            S = frozenset().union(*choice) if choice else frozenset()
            yield Structure(n, R, S, name=f"D{n}")


@lru_cache(maxsize=None)
def _graph_list(n: int) -> tuple[frozenset, ...]:
    return tuple(i3_free_graphs(n))


def random_class_d(n: int, seed: int, cap: int = ENUMERATION_CAP) -> Structure:
    """A random D-structure; uniform over labeled structures when n <= cap."""
    rng = random.Random(seed)
    quads = list(combinations(range(n), 4))
    if n <= cap:
        graphs = _graph_list(n)
        total = len(graphs) * semifinal_choices(n)
        index = rng.randrange(total)
        index, g = divmod(index, len(graphs))
        R = graphs[g]
        S = set()
        for q in quads:
            index, k = divmod(index, 12)
            S |= semifinals_on(q)[k]
        return Structure(n, R, frozenset(S), name=f"rand{n}_{seed}")

    # Pair by pair with redraws; an oriented edge never completes an anticlique.
    R = set()
    for i, j in combinations(range(n), 2):
        while True:
            state = rng.choice(_PAIR_STATES)
            if state:
                break
            if all(_adjacent(R, i, k) or _adjacent(R, j, k) for k in range(i)):
                break
        if state == 1:
            R.add((i, j))
        elif state == 2:
            R.add((j, i))
    S = set()
    for q in quads:
        S |= semifinals_on(q)[rng.randrange(12)]
    return Structure(n, frozenset(R), frozenset(S), name=f"rand{n}_{seed}")


def _adjacent(R, u, v):
    return (u, v) in R or (v, u) in R
