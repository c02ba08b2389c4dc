"""Permutations, explicitly closed permutation groups and finite group actions.

Groups are stored as their full element list; every instance this package
deals with has order in the low thousands at most, so explicit closure keeps
stabilizer filters and exhaustive searches obviously correct.

Composition is right-to-left: ``(g * h)(x) == g(h(x))``, so actions are left
actions, ``act(g * h, v) == act(g, act(h, v))``.
"""
from __future__ import annotations

import os
import threading
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import gcd
from typing import Callable, Hashable, Iterable, Sequence

from .errors import CapacityError, InputError, Verdict

DEFAULT_CLOSURE_CAP = 20160


def closure_cap() -> int:
    value = os.environ.get("HOMOGEN_CLOSURE_CAP")
    if value is None:
        return DEFAULT_CLOSURE_CAP
    try:
        cap = int(value)
    except ValueError:
        raise InputError(f"HOMOGEN_CLOSURE_CAP must be an integer, got {value!r}")
    if cap < 1:
        raise InputError("HOMOGEN_CLOSURE_CAP must be positive")
    return cap


@dataclass(frozen=True, order=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self):
        images = tuple(int(i) for i in self.images)
        if sorted(images) != list(range(len(images))):
            raise InputError(f"not a permutation of 0..{len(images) - 1}: {list(images)}")
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, *cycles: Sequence[int]) -> Permutation:
        images = list(range(n))
        for cycle in cycles:
            for i, x in enumerate(cycle):
                images[x] = cycle[(i + 1) % len(cycle)]
        return cls(tuple(images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: Permutation) -> Permutation:
        if self.degree != other.degree:
            raise InputError("cannot compose permutations of different degree")
        mine = self.images
        return Permutation(tuple(mine[j] for j in other.images))

    def inverse(self) -> Permutation:
        inv = [0] * self.degree
        for i, j in enumerate(self.images):
            inv[j] = i
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return all(i == j for i, j in enumerate(self.images))

    def cycles(self) -> list[tuple[int, ...]]:
        """Nontrivial cycles, each starting at its least point."""
        seen = set()
        out = []
        for start in range(self.degree):
            if start in seen:
                continue
            cycle = [start]
            seen.add(start)
            x = self.images[start]
            while x != start:
                cycle.append(x)
                seen.add(x)
                x = self.images[x]
            if len(cycle) > 1:
                out.append(tuple(cycle))
        return out

    def order(self) -> int:
        result = 1
        for c in self.cycles():
            result = result * len(c) // gcd(result, len(c))
        return result

    def apply(self, items: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.images[x] for x in items)

    def __str__(self):
        cs = self.cycles()
        if not cs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cs)

    def __repr__(self):
        return f"Permutation({list(self.images)})"


def _bfs_closure(generators: Sequence[Permutation], degree: int, cap: int) -> list[Permutation]:
    identity = Permutation.identity(degree)
    seen = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for s in generators:
            y = s * x
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise CapacityError(
                        f"group closure exceeds cap of {cap} elements "
                        "(set HOMOGEN_CLOSURE_CAP to raise it)")
                queue.append(y)
    return sorted(seen)


class PermGroup:
    """A finitely generated permutation group with a lazily computed closure."""

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None,
                 name: str | None = None, elements: Iterable[Permutation] | None = None,
                 cap: int | None = None):
        gens = tuple(generators)
        if degree is None:
            if not gens:
                raise InputError("degree required for a group without generators")
            degree = gens[0].degree
        for g in gens:
            if g.degree != degree:
                raise InputError(f"generator {g!r} has degree {g.degree}, expected {degree}")
        self.degree = degree
        self.generators = gens
        self.name = name
        self._cap = cap
        self._elements: tuple[Permutation, ...] | None = None
        self._lock = threading.Lock()
        if elements is not None:
            self._elements = tuple(sorted(set(elements)))

    @property
    def elements(self) -> tuple[Permutation, ...]:
        if self._elements is None:
            with self._lock:
                if self._elements is None:
                    cap = self._cap if self._cap is not None else closure_cap()
                    self._elements = tuple(_bfs_closure(self.generators, self.degree, cap))
        return self._elements

    @property
    def identity(self) -> Permutation:
        return Permutation.identity(self.degree)

    def order(self) -> int:
        return len(self.elements)

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, g: Permutation) -> bool:
        return g in self._element_set

    @property
    def _element_set(self) -> frozenset[Permutation]:
        cached = getattr(self, "_set_cache", None)
        if cached is None:
            cached = frozenset(self.elements)
            self._set_cache = cached
        return cached

    def index(self, g: Permutation) -> int:
        table = getattr(self, "_index_cache", None)
        if table is None:
            table = {x: i for i, x in enumerate(self.elements)}
            self._index_cache = table
        return table[g]

    def is_abelian(self) -> bool:
        return all(a * b == b * a for a, b in combinations(self.generators, 2))

    def is_cyclic(self) -> bool:
        n = self.order()
        return any(g.order() == n for g in self.elements)

    def small_generators(self) -> tuple[Permutation, ...]:
        """Greedy generating set: scan elements in order, keep those not yet generated."""
        gens: list[Permutation] = []
        generated = {self.identity}
        for g in self.elements:
            if g in generated:
                continue
            gens.append(g)
            generated = set(_bfs_closure(gens, self.degree, len(self.elements)))
        return tuple(gens)

    def __eq__(self, other):
        if not isinstance(other, PermGroup):
            return NotImplemented
        return self.degree == other.degree and self._element_set == other._element_set

    def __hash__(self):
        return hash((self.degree, self._element_set))

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<PermGroup{label} degree={self.degree} gens={len(self.generators)}>"


def closure(generators: Iterable[Permutation], degree: int | None = None,
            name: str | None = None, cap: int | None = None) -> PermGroup:
    """Close ``generators`` under composition, eagerly."""
    group = PermGroup(generators, degree=degree, name=name, cap=cap)
    group.elements
    return group


class GroupAction:
    """An action of a permutation group on the abstract points ``0..m-1``.

    The acting group keeps its own representation; the action is stored as a
    table sending every group element to a permutation of the points.
    ``labels`` names the points (tuples of ambient vertices, group elements,
    whatever the constructor used).
    """

    def __init__(self, group: PermGroup, table: dict[Permutation, Permutation],
                 labels: Sequence[Hashable] | None = None, name: str | None = None):
        self.group = group
        self.name = name
        self._table = table
        some = next(iter(table.values()))
        self.size = some.degree
        self.labels = tuple(labels) if labels is not None else tuple(range(self.size))
        if len(self.labels) != self.size:
            raise InputError("label table does not match the number of points")

    @classmethod
    def from_generator_images(cls, group: PermGroup, points: int,
                              images: Sequence[Permutation], labels=None, name=None) -> GroupAction:
        """Extend an assignment generator -> point permutation to the whole group.

        Fails with ``InputError`` if the assignment is not a homomorphism.
        """
        if len(images) != len(group.generators):
            raise InputError(
                f"action gives {len(images)} generator images, group has {len(group.generators)}")
        for p in images:
            if p.degree != points:
                raise InputError(f"generator image {p!r} does not act on {points} points")
        table = _extend_homomorphism(group, images, points)
        if table is None:
            raise InputError("generator images do not define a group action")
        return cls(group, table, labels=labels, name=name)

    @classmethod
    def from_function(cls, group: PermGroup, labels: Sequence[Hashable],
                      act: Callable[[Permutation, Hashable], Hashable], name=None) -> GroupAction:
        index = {x: i for i, x in enumerate(labels)}
        if len(index) != len(labels):
            raise InputError("duplicate point labels")
        table = {}
        for g in group.elements:
            try:
                table[g] = Permutation(tuple(index[act(g, x)] for x in labels))
            except KeyError as exc:
                raise InputError(f"point set not closed under the action: {exc}") from None
        return cls(group, table, labels=labels, name=name)

    @classmethod
    def natural(cls, group: PermGroup, name=None) -> GroupAction:
        return cls(group, {g: g for g in group.elements}, name=name)

    def perm(self, g: Permutation) -> Permutation:
        return self._table[g]

    def act(self, g: Permutation, v: int) -> int:
        return self._table[g].images[v]

    def act_tuple(self, g: Permutation, items: Iterable[int]) -> tuple[int, ...]:
        images = self._table[g].images
        return tuple(images[x] for x in items)

    @property
    def points(self) -> range:
        return range(self.size)

    def point_perms(self) -> list[Permutation]:
        return [self._table[g] for g in self.group.elements]

    def is_faithful(self) -> bool:
        identity = Permutation.identity(self.size)
        return sum(1 for p in self._table.values() if p == identity) == 1

    def kernel(self) -> list[Permutation]:
        return [g for g in self.group.elements if self._table[g].is_identity()]

    def disjoint_union(self, other: GroupAction, name=None) -> GroupAction:
        if other.group is not self.group and other.group != self.group:
            raise InputError("disjoint union needs actions of the same group")
        shift = self.size
        table = {}
        for g in self.group.elements:
            table[g] = Permutation(self._table[g].images
                                   + tuple(x + shift for x in other._table[g].images))
        labels = [(0, x) for x in self.labels] + [(1, x) for x in other.labels]
        return GroupAction(self.group, table, labels=labels, name=name)

    def __repr__(self):
        return f"<GroupAction {self.name or ''} of {self.group!r} on {self.size} points>"


def _extend_homomorphism(group: PermGroup, images: Sequence[Permutation],
                         degree: int) -> dict[Permutation, Permutation] | None:
    """Breadth-first word closure of generator -> image; None if ill defined."""
    identity = Permutation.identity(group.degree)
    table = {identity: Permutation.identity(degree)}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for s, image in zip(group.generators, images):
            y = s * x
            value = image * table[x]
            known = table.get(y)
            if known is None:
                table[y] = value
                queue.append(y)
            elif known != value:
                return None
    return table


def orbits(action: GroupAction, k: int) -> list[list[tuple[int, ...]]]:
    """Orbits of the induced action on ``k``-subsets (as sorted tuples)."""
    if k > action.size:
        raise InputError(f"k = {k} exceeds the number of points {action.size}")
    perms = action.point_perms()
    seen: set[tuple[int, ...]] = set()
    out = []
    for subset in combinations(action.points, k):
        if subset in seen:
            continue
        orbit = {tuple(sorted(p.images[x] for x in subset)) for p in perms}
        seen |= orbit
        out.append(sorted(orbit))
    return out


def point_orbits(action: GroupAction) -> list[list[int]]:
    return [[s[0] for s in orb] for orb in orbits(action, 1)]


def orbit_of_tuple(action: GroupAction, items: Sequence[int]) -> set[tuple[int, ...]]:
    return {tuple(p.images[x] for x in items) for p in action.point_perms()}


def pointwise_stabilizer(action: GroupAction, subset: Iterable[int]) -> PermGroup:
    subset = tuple(subset)
    els = [g for g in action.group.elements
           if all(action.act(g, u) == u for u in subset)]
    return PermGroup(els, degree=action.group.degree, elements=els)


def setwise_stabilizer(action: GroupAction, subset: Iterable[int]) -> PermGroup:
    subset = frozenset(subset)
    els = [g for g in action.group.elements
           if frozenset(action.act(g, u) for u in subset) == subset]
    return PermGroup(els, degree=action.group.degree, elements=els)


def natural_action_stabilizer(group: PermGroup, subset: Iterable[int]) -> PermGroup:
    """Pointwise stabilizer of ``subset`` under the group's own permutation action."""
    subset = tuple(subset)
    els = [g for g in group.elements if all(g.images[a] == a for a in subset)]
    return PermGroup(els, degree=group.degree, elements=els)


def contains_c4_or_klein(group: PermGroup) -> Verdict:
    """Does the group have a subgroup isomorphic to C4 or C2 x C2?

    On success the witness is the sorted element list of such a subgroup.
    """
    els = group.elements
    identity = group.identity
    for g in els:
        if g.order() == 4:
            return Verdict(True, sorted([identity, g, g * g, g * g * g]))
    involutions = [g for g in els if g.order() == 2]
    for g, h in combinations(involutions, 2):
        if g * h == h * g:
            return Verdict(True, sorted([identity, g, h, g * h]))
    return Verdict(False, None)


def left_regular_action(group: PermGroup) -> GroupAction:
    """The group acting on its own (sorted) element list by left multiplication."""
    return GroupAction.from_function(group, list(group.elements), lambda g, h: g * h,
                                     name=f"regular({group.name or ''})")


def find_group_embedding(source: PermGroup, target: PermGroup,
                         candidates: dict[Permutation, Sequence[Permutation]] | None = None,
                         generators: Sequence[Permutation] | None = None,
                         trace: list | None = None,
                         trace_limit: int = 64) -> dict[Permutation, Permutation] | None:
    """Search for an injective homomorphism ``source -> target``.

    Generator images range over ``candidates[gen]`` (default: every element
    of ``target`` with the same order). Every tuple of generator images is
    tried; the first one that closes to an injective homomorphism wins.
    Failed tuples are appended to ``trace`` (up to ``trace_limit``).
    """
    gens = tuple(generators) if generators is not None else source.small_generators()
    if not gens:
        return {source.identity: target.identity}
    if candidates is None:
        candidates = {g: [h for h in target.elements if h.order() == g.order()] for g in gens}
    pools = [list(candidates[g]) for g in gens]
    helper = PermGroup(gens, degree=source.degree, elements=source.elements)

    def search(i, chosen):
        if i == len(gens):
            table = _extend_homomorphism(helper, chosen, target.degree)
            if table is None:
                _note(trace, trace_limit, chosen, "relations of the source are not respected")
                return None
            kernel = [g for g, img in table.items() if img.is_identity()]
            if len(kernel) > 1:
                _note(trace, trace_limit, chosen, f"kernel has {len(kernel)} elements")
                return None
            return table
        for h in pools[i]:
            if h.order() != gens[i].order():
                # injective homomorphisms preserve element orders
                _note(trace, trace_limit, chosen + [h],
                      f"image of order {h.order()} for a generator of order {gens[i].order()}")
                continue
            found = search(i + 1, chosen + [h])
            if found is not None:
                return found
        return None

    return search(0, [])


def _note(trace, limit, chosen, reason):
    if trace is not None and len(trace) < limit:
        trace.append({"images": [str(h) for h in chosen], "reason": reason})


def is_injective_homomorphism(mapping: dict[Permutation, Permutation], source: PermGroup) -> bool:
    els = source.elements
    if set(mapping) != set(els):
        return False
    if len(set(mapping.values())) != len(els):
        return False
    return all(mapping[a * b] == mapping[a] * mapping[b] for a in els for b in els)
