import hashlib
import random
from itertools import combinations, islice, permutations

import pytest

from homogen.classd import (AmalgamProblem, canonical_semifinal, count_class_d,
                            enumerate_class_d, i3_free_graphs, is_i3_free, is_in_class_d,
                            is_semifinal, random_class_d, semifinals_on, strong_amalgam)
from homogen.core import Embedding, Structure, induced_substructure, partner
from homogen.errors import CapacityError, InputError
from homogen.formats import serialize_structure
from homogen.perms import Permutation


def test_i3_free_examples():
    assert is_i3_free(Structure(0)).ok
    assert is_i3_free(Structure(2, frozenset({(0, 1)}))).ok
    v = is_i3_free(Structure(3))
    assert not v.ok and v.witness == (0, 1, 2)
    v = is_i3_free(Structure(2, frozenset({(0, 1), (1, 0)})))
    assert not v.ok and v.witness == (0, 1)
    with pytest.raises(InputError):
        is_i3_free(Structure(1, frozenset({(0, 0)}), allow_loops=True))


def test_i3_free_count_on_three_labels():
    count = 0
    for a in (0, 1, 2):
        for b in (0, 1, 2):
            for c in (0, 1, 2):
                R = set()
                for (u, v), s in zip(((0, 1), (0, 2), (1, 2)), (a, b, c)):
                    if s == 1:
                        R.add((u, v))
                    elif s == 2:
                        R.add((v, u))
                count += is_i3_free(Structure(3, frozenset(R))).ok
    assert count == 26


def test_semifinal_examples():
    assert is_semifinal(Structure(3)).ok
    assert is_semifinal(Structure(4, S=frozenset({(0, 1, 2, 3)}))).ok
    assert not is_semifinal(Structure(4)).ok
    both = canonical_semifinal((0, 1, 2, 3)) | {(0, 2, 1, 3)}
    assert not is_semifinal(Structure(4, S=frozenset(both))).ok


def test_twelve_semifinals():
    dedup = {frozenset((t, partner(t))) for t in permutations((3, 5, 7, 9))}
    assert len(dedup) == 12
    assert set(semifinals_on((9, 7, 5, 3))) == dedup
    assert semifinals_on((0, 1, 2, 3))[0] == canonical_semifinal((0, 1, 2, 3))


def test_class_d_examples(a4, remark_b):
    v = is_in_class_d(remark_b)
    assert not v.ok and v.witness[0] == "loop"
    assert is_in_class_d(Structure(0)).ok
    assert is_in_class_d(a4).ok


def test_amalgam_trivial(a4):
    D, e_B, e_C = strong_amalgam(AmalgamProblem.over(a4, a4, a4))
    assert D.same_relations(a4)
    assert e_B.map == e_C.map == (0, 1, 2, 3)


def test_amalgam_edge_recipe():
    A = Structure(1, name="A")
    B = Structure(2, frozenset({(0, 1)}), name="B")        # a=0, b=1
    C = Structure(2, frozenset({(1, 0)}), name="C")        # a=0, c=1
    D, e_B, e_C = strong_amalgam(AmalgamProblem.over(A, B, C))
    # domain: b, a, c
    assert e_B.map == (1, 0) and e_C.map == (1, 2)
    assert D.R == {(1, 0), (2, 1), (0, 2)}
    assert not D.S


def test_amalgam_rejects_non_members(remark_b):
    A = Structure(0)
    with pytest.raises(InputError):
        strong_amalgam(AmalgamProblem.over(A, remark_b, Structure(1)))


def _random_problem(rng):
    nB = rng.randint(0, 6)
    B = random_class_d(nB, rng.getrandbits(32))
    k = rng.randint(0, nB)
    T = tuple(sorted(rng.sample(range(nB), k)))
    A, _ = induced_substructure(B, T)
    nC = rng.randint(k, 6)
    while True:
        base = random_class_d(nC, rng.getrandbits(32))
        pos = tuple(rng.sample(range(nC), k))
        inside = set(pos)
        R = {(u, v) for u, v in base.R if not (u in inside and v in inside)}
        R |= {(pos[u], pos[v]) for u, v in A.R}
        S = {t for t in base.S if not set(t) <= inside}
        S |= {tuple(pos[x] for x in t) for t in A.S}
        C = Structure(nC, frozenset(R), frozenset(S))
        if is_in_class_d(C).ok:
            return AmalgamProblem.over(A, B, C, T, pos)


def test_random_amalgams():
    rng = random.Random(500)
    for _ in range(500):
        p = _random_problem(rng)
        D, e_B, e_C = strong_amalgam(p)
        assert is_in_class_d(D).ok
        assert Embedding(p.B, D, e_B.map) and Embedding(p.C, D, e_C.map)
        via_B = [e_B(p.i_B(a)) for a in p.A.domain]
        via_C = [e_C(p.i_C(a)) for a in p.A.domain]
        assert via_B == via_C
        assert set(e_B.map) & set(e_C.map) == set(via_B)
        assert D.n == p.B.n + p.C.n - p.A.n


def test_joint_embedding_small():
    members = [M for n in range(4) for M in enumerate_class_d(n)]
    empty = Structure(0)
    for B in members:
        for C in members:
            D, _, _ = strong_amalgam(AmalgamProblem.over(empty, B, C))
            assert D.n == B.n + C.n
    rng = random.Random(4)
    fours = list(enumerate_class_d(4))
    for _ in range(200):
        B, C = rng.choice(fours), rng.choice(fours + members)
        D, _, _ = strong_amalgam(AmalgamProblem.over(empty, B, C))
        assert is_in_class_d(D).ok


def test_enumeration_counts():
    assert [sum(1 for _ in enumerate_class_d(n)) for n in range(4)] == [1, 1, 3, 26]
    graphs4 = sum(1 for _ in i3_free_graphs(4))
    assert count_class_d(4) == 12 * graphs4 == sum(1 for _ in enumerate_class_d(4))
    with pytest.raises(CapacityError):
        next(enumerate_class_d(6))


def test_enumeration_is_duplicate_free_and_in_d():
    seen = set()
    for M in enumerate_class_d(4):
        key = (M.R, M.S)
        assert key not in seen
        seen.add(key)
    for M in islice(enumerate_class_d(4), 0, None, 97):
        assert is_in_class_d(M).ok


def test_hereditary():
    for M in islice(enumerate_class_d(4), 0, None, 53):
        for k in range(5):
            for U in combinations(range(4), k):
                assert is_in_class_d(induced_substructure(M, U)[0]).ok
    M = random_class_d(7, 3)
    for U in combinations(range(7), 5):
        assert is_in_class_d(induced_substructure(M, U)[0]).ok


def test_random_class_d_examples():
    members = {(M.R, M.S) for M in enumerate_class_d(3)}
    for seed in range(20):
        M = random_class_d(3, seed)
        assert (M.R, M.S) in members
    assert random_class_d(0, 9).n == 0
    M = random_class_d(6, 42)
    assert is_in_class_d(M).ok
    digest = hashlib.sha256(serialize_structure(M).encode()).hexdigest()
    assert digest == "0da98db5a32a14d23adb93a49e238cf06f6c2f1ac05cc16e9b4c980b78b4bd77"
    assert random_class_d(6, 42) == M


def test_random_class_d_large_n_stays_in_d():
    for seed in range(10):
        assert is_in_class_d(random_class_d(8, seed)).ok


def test_random_class_d_is_roughly_uniform_on_three():
    counts = {}
    for seed in range(2600):
        M = random_class_d(3, seed)
        counts[M.R] = counts.get(M.R, 0) + 1
    assert len(counts) == 26
    assert min(counts.values()) > 50 and max(counts.values()) < 160


def test_amalgam_problem_validates(a4):
    with pytest.raises(InputError):
        AmalgamProblem.over(a4, a4, Structure(5), map_C=(0, 1, 2, 3))
    P = Permutation((1, 2, 3, 0))
    with pytest.raises(InputError):
        AmalgamProblem.over(a4, a4, a4, map_B=P.images)
