from itertools import combinations, permutations

import pytest
from hypothesis import given, settings, strategies as st

from homogen.core import (STAR, Embedding, LinkType, Structure, automorphism_group,
                          find_embeddings, induced_substructure, is_automorphism, is_embedding,
                          is_ultrahomogeneous, isomorphism, one_point_extension, partner, qftp,
                          realizes)
from homogen.errors import InputError
from homogen.perms import Permutation
from homogen.witness import obstruction_config


def transported_equal(M, p):
    return ({(p[u], p[v]) for u, v in M.R} == set(M.R)
            and {tuple(p[x] for x in t) for t in M.S} == set(M.S))


@st.composite
def small_structures(draw, max_n=5, loops=False, oriented=False):
    n = draw(st.integers(0, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v or loops]
    R = draw(st.sets(st.sampled_from(pairs), max_size=10)) if pairs else set()
    if oriented:
        R = {(u, v) for u, v in R if u != v and ((v, u) not in R or u < v)}
    S = set()
    quads = list(permutations(range(n), 4))
    if quads:
        for t in draw(st.sets(st.sampled_from(quads), max_size=4)):
            S |= {t, partner(t)}
    return Structure(n, frozenset(R), frozenset(S), allow_loops=loops)


def test_structure_validation():
    with pytest.raises(InputError):
        Structure(2, frozenset({(0, 2)}))
    with pytest.raises(InputError):
        Structure(2, frozenset({(1, 1)}))
    Structure(2, frozenset({(1, 1)}), allow_loops=True)
    M = Structure(4, S=frozenset({(0, 1, 2, 3)}))
    assert (2, 3, 0, 1) in M.S
    with pytest.raises(InputError):
        Structure(4, S=frozenset({(0, 0, 2, 3)}))


def test_undirected_flag_symmetrizes():
    M = Structure(3, frozenset({(0, 1)}), undirected=True)
    assert M.R == {(0, 1), (1, 0)}


def test_induced_substructure_identity(a4):
    sub, U = induced_substructure(a4, a4.domain)
    assert U == (0, 1, 2, 3)
    assert sub.same_relations(a4)


def test_induced_substructure_remark_pair(remark_b):
    sub, U = induced_substructure(remark_b, {1, 0})
    assert U == (0, 1)
    assert sub.R == {(0, 0), (1, 1)}


def test_induced_substructure_a4_path(a4):
    sub, U = induced_substructure(a4, [2, 0, 1])
    assert U == (0, 1, 2)
    assert sub.R == {(0, 1), (1, 2)}
    assert not sub.S


def test_induced_substructure_range_error(a4):
    with pytest.raises(InputError):
        induced_substructure(a4, [0, 7])


def test_qftp_examples(a4):
    assert qftp(a4, 2, []) == LinkType(())
    t = qftp(a4, 0, {1, 2, 3})
    assert t.r_out == {1} and t.r_in == {3}
    assert t.s_tuples == {(STAR, 1, 2, 3), (2, 3, STAR, 1)}
    cfg = obstruction_config()
    t = qftp(cfg.structure, cfg.v, {cfg.fa, cfg.fb, cfg.fc})
    assert t.r_out == {cfg.fb} and t.r_in == {cfg.fc}
    assert t.edge_state(cfg.fa) == "none"
    with pytest.raises(InputError):
        qftp(a4, 1, {1, 2})


def test_qftp_needs_oriented_pairs():
    M = Structure(2, frozenset({(0, 1), (1, 0)}))
    with pytest.raises(InputError):
        qftp(M, 0, {1})


def test_realizes(a4):
    assert realizes(a4, 1, qftp(a4, 1, {0, 2}))
    assert not realizes(a4, 3, qftp(a4, 1, {0, 2}))


def test_link_type_invariants():
    with pytest.raises(InputError):
        LinkType((0, 1), frozenset({0}), frozenset({0}))
    with pytest.raises(InputError):
        LinkType((0,), frozenset({3}))
    t = LinkType((0, 1, 2), s_tuples=frozenset({(STAR, 0, 1, 2)}))
    assert (1, 2, STAR, 0) in t.s_tuples


def test_one_point_extension(a4):
    t = qftp(a4, 0, {1, 2, 3})
    E, star = one_point_extension(a4, t)
    assert star == 3
    assert realizes(E, star, LinkType((0, 1, 2), frozenset({2}), frozenset({0}),
                                      frozenset({(STAR, 0, 1, 2)})))


def test_find_embeddings_examples(remark_b, a4):
    point = Structure(1)
    assert len(find_embeddings(point, Structure(5))) == 5
    pair, _ = induced_substructure(remark_b, [0, 1])
    assert [e.map for e in find_embeddings(pair, remark_b)] == [(0, 1), (1, 0)]
    edge = Structure(2, frozenset({(0, 1)}))
    maps = [e.map for e in find_embeddings(edge, a4)]
    assert maps == sorted(a4.R)


@settings(max_examples=60, deadline=None)
@given(small_structures(max_n=3), small_structures(max_n=6))
def test_find_embeddings_matches_injection_oracle(A, M):
    oracle = []
    for f in permutations(range(M.n), A.n):
        ok = all(((f[u], f[v]) in M.R) == ((u, v) in A.R) for u in A.domain for v in A.domain)
        ok = ok and all((tuple(f[x] for x in t) in M.S) == (t in A.S)
                        for t in permutations(A.domain, 4))
        if ok:
            oracle.append(tuple(f))
    assert [e.map for e in find_embeddings(A, M)] == oracle
    assert all(is_embedding(A, M, f) for f in oracle)


def test_embedding_validates(a4):
    with pytest.raises(InputError):
        Embedding(Structure(2, frozenset({(0, 1)})), a4, (0, 2))


def test_automorphism_examples(remark_b, a4):
    G = automorphism_group(remark_b)
    assert G.order() == 4 and G.is_cyclic()
    assert Permutation((1, 0, 3, 4, 5, 2)) in G
    tt = Structure(3, frozenset({(0, 1), (0, 2), (1, 2)}))
    assert automorphism_group(tt).order() == 1
    assert set(automorphism_group(a4).elements) == {Permutation((0, 1, 2, 3)),
                                                   Permutation((2, 3, 0, 1))}


@settings(max_examples=80, deadline=None)
@given(small_structures(max_n=5, loops=True))
def test_automorphism_group_matches_transport_oracle(M):
    oracle = {Permutation(p) for p in permutations(range(M.n)) if transported_equal(M, p)}
    G = automorphism_group(M)
    assert set(G.elements) == oracle
    assert list(G.elements) == sorted(oracle)
    for p in oracle:
        assert is_automorphism(M, p)


@settings(max_examples=50, deadline=None)
@given(small_structures(max_n=5), st.randoms(use_true_random=False))
def test_isomorphism_finds_relabeling(M, rnd):
    images = list(range(M.n))
    rnd.shuffle(images)
    N = M.transport(Permutation(tuple(images)))
    f = isomorphism(M, N)
    assert f is not None and is_embedding(M, N, f)


def test_isomorphism_rejects():
    path = Structure(3, frozenset({(0, 1), (1, 2)}))
    cyc = Structure(3, frozenset({(0, 1), (1, 2), (2, 0)}))
    assert isomorphism(path, cyc) is None


def test_ultrahomogeneous_examples(remark_b):
    assert is_ultrahomogeneous(remark_b).ok
    assert is_ultrahomogeneous(Structure(4)).ok
    v = is_ultrahomogeneous(Structure(3, frozenset({(0, 1), (1, 2)})))
    assert not v.ok
    assert len(v.witness) == 1


def _uh_oracle(M):
    auts = [p for p in permutations(range(M.n)) if transported_equal(M, p)]
    for k in range(1, M.n + 1):
        for U in combinations(range(M.n), k):
            for f in permutations(range(M.n), k):
                partial = dict(zip(U, f))
                iso = all(((partial[u], partial[v]) in M.R) == ((u, v) in M.R) for u in U for v in U)
                iso = iso and all((tuple(partial[x] for x in t) in M.S) == (t in M.S)
                                  for t in permutations(U, 4))
                if iso and not any(all(p[u] == partial[u] for u in U) for p in auts):
                    return False
    return True


@settings(max_examples=40, deadline=None)
@given(small_structures(max_n=4, loops=True))
def test_ultrahomogeneous_matches_oracle(M):
    assert is_ultrahomogeneous(M).ok == _uh_oracle(M)


@settings(max_examples=60, deadline=None)
@given(small_structures(max_n=6, oriented=True), st.data())
def test_qftp_round_trip(M, data):
    if M.n == 0:
        return
    v = data.draw(st.integers(0, M.n - 1))
    C = data.draw(st.sets(st.sampled_from([x for x in M.domain if x != v] or [None])))
    C = {c for c in C if c is not None}
    assert realizes(M, v, qftp(M, v, C))


def test_degrees_and_sorted_groups_for_induced(a4):
    sub, _ = induced_substructure(a4, [0, 2])
    G = automorphism_group(sub)
    assert all(g.degree == 2 for g in G.elements)
