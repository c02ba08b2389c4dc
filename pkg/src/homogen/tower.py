"""Finite prefix of the Rado-graph tower with its automorphism extension maps.

Stage k adds, for every subset F of stage k-1, a vertex adjacent to exactly
F; new vertices are pairwise non-adjacent. Every automorphism g of the
previous stage extends by sending the vertex for F to the vertex for g(F).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

from .core import Structure, automorphism_group, is_automorphism
from .errors import CapacityError, InputError, IntegrityError, Verdict
from .perms import Permutation, PermGroup


@dataclass
class TowerStage:
    k: int
    graph: Structure
    new_vertex_table: dict[frozenset, int] = field(default_factory=dict)
    eta: dict[Permutation, Permutation] = field(default_factory=dict)

    @property
    def previous_size(self) -> int:
        return self.graph.n - len(self.new_vertex_table)


def _subsets(n: int):
    for size in range(n + 1):
        yield from combinations(range(n), size)


def add_witness_layer(G: Structure, k: int) -> TowerStage:
    n = G.n
    table = {}
    R = set(G.R)
    for i, F in enumerate(_subsets(n)):
        v = n + i
        table[frozenset(F)] = v
        for f in F:
            R.add((f, v))
            R.add((v, f))
    graph = Structure(n + len(table), frozenset(R), name=f"M{k}", undirected=True)
    return TowerStage(k, graph, table)


def extend_automorphism(stage: TowerStage, g: Permutation) -> Permutation:
    """The unique extension of an automorphism of the previous stage."""
    prev = stage.previous_size
    if g.degree != prev:
        raise InputError(f"permutation of degree {g.degree} does not act on stage {stage.k - 1}")
    images = list(g.images) + [0] * len(stage.new_vertex_table)
    for F, v in stage.new_vertex_table.items():
        images[v] = stage.new_vertex_table[frozenset(g.images[x] for x in F)]
    return Permutation(tuple(images))


def rado_tower(A: Structure, k: int, budget: int = 4096) -> list[TowerStage]:
    """Stages M0 = A, ..., Mk with the extension maps eta_j.

    ``eta`` of stage j is defined on the image of Aut(M0) pushed up to stage
    j-1 and checked to be an injective homomorphism extending each element.
    """
    if k < 1:
        raise InputError("need at least one tower stage")
    if A.S:
        raise InputError("tower seed must be a graph (no S atoms)")
    if A.loops():
        raise InputError("tower seed must be loop-free")
    if any((v, u) not in A.R for u, v in A.R):
        raise InputError("tower seed must be symmetric")
    base = Structure(A.n, A.R, name="M0", undirected=True)
    stages = [TowerStage(0, base)]
    group = automorphism_group(base)
    stages[0].eta = {g: g for g in group.elements}
    current = list(group.elements)
    for j in range(1, k + 1):
        prev = stages[-1].graph
        required = prev.n + 2 ** prev.n
        if required > budget:
            raise CapacityError(f"stage {j} needs {required} vertices, budget is {budget}")
        stage = add_witness_layer(prev, j)
        eta = {g: extend_automorphism(stage, g) for g in current}
        _check_eta(stage, eta)
        stage.eta = eta
        stages.append(stage)
        current = list(eta.values())
    return stages


def _check_eta(stage: TowerStage, eta: dict[Permutation, Permutation]):
    prev = stage.previous_size
    for g, h in eta.items():
        if h.images[:prev] != g.images:
            raise IntegrityError(f"eta({g}) does not extend {g}")
        if not is_automorphism(stage.graph, h):
            raise IntegrityError(f"eta({g}) is not an automorphism of stage {stage.k}")
    if len(set(eta.values())) != len(eta):
        raise IntegrityError("eta is not injective")
    for a, b in product(eta, repeat=2):
        if a * b in eta and eta[a * b] != eta[a] * eta[b]:
            raise IntegrityError("eta is not a homomorphism")


def witness_property(stage: TowerStage) -> Verdict:
    """For disjoint U, V in the previous stage, some vertex is adjacent to
    all of U and none of V. Witness on failure: ``(U, V)``."""
    prev = stage.previous_size
    G = stage.graph
    for labels in product((0, 1, 2), repeat=prev):
        U = [x for x, s in zip(range(prev), labels) if s == 1]
        V = [x for x, s in zip(range(prev), labels) if s == 2]
        found = any(
            w not in U and w not in V
            and all((w, u) in G.R for u in U) and not any((w, v) in G.R for v in V)
            for w in G.domain)
        if not found:
            return Verdict(False, (U, V))
    return Verdict(True, None)


def eta_composite(stages: list[TowerStage]) -> dict[Permutation, Permutation]:
    """Aut(M0) -> Aut(Mk) obtained by composing the stage maps."""
    out = {}
    for g in stages[0].eta:
        h = g
        for stage in stages[1:]:
            h = stage.eta[h]
        out[g] = h
    return out


def aut_group(stage: TowerStage) -> PermGroup:
    return automorphism_group(stage.graph)
