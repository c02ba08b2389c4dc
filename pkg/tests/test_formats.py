import pytest

from homogen import catalog
from homogen.core import Structure
from homogen.errors import InputError
from homogen.formats import (format_perm, parse_action, parse_group, parse_perm_line,
                             parse_structure, parse_structure_with_names, serialize_action,
                             serialize_group, serialize_structure)
from homogen.perms import GroupAction, Permutation
from homogen.witness import remark_structure

A4_TEXT = """structure A4
n 4
R 0 1
R 1 2
R 2 3
R 3 0
S 0 1 2 3
end
"""


def test_serialize_a4(a4):
    assert serialize_structure(a4) == A4_TEXT
    assert parse_structure(A4_TEXT) == a4


def test_comments_and_blank_lines():
    text = "# header\nstructure X  # name\n\nn 2\nR 0 1 # edge\nend\n"
    M = parse_structure(text)
    assert M.R == {(0, 1)} and M.name == "X"


def test_named_vertices_follow_first_appearance():
    text = "structure B\nn 6\nflags allow_loops\nR a a\nR a' a'\nR b0 b1\nR b1 b2\n" \
           "R b2 b3\nR b3 b0\nR a b0\nR a b2\nR a' b1\nR a' b3\nend\n"
    M, names = parse_structure_with_names(text)
    assert names == ["a", "a'", "b0", "b1", "b2", "b3"]
    assert M.same_relations(remark_structure())


def test_undirected_round_trip():
    M = Structure(3, frozenset({(0, 1), (2, 1)}), undirected=True, name="G")
    text = serialize_structure(M)
    assert "R 1 2" in text and "R 2 1" not in text
    assert parse_structure(text) == M


@pytest.mark.parametrize("text", [
    "",
    "n 3\nend\n",
    "structure X\nend\n",
    "structure X\nn 2\nR 0 1\n",
    "structure X\nn 2\nR 0\nend\n",
    "structure X\nn 2\nR 0 5\nend\n",
    "structure X\nn 2\nR 0 a\nend\n",
    "structure X\nn 2\nflags sparkly\nend\n",
    "structure X\nn 2\nQ 0 1\nend\n",
    "structure X\nn 2\nend\nR 0 1\n",
    "structure X\nn 4\nS 0 1 2\nend\n",
    "structure X\nn 1\nR a b\nend\n",
])
def test_bad_structure_files(text):
    with pytest.raises(InputError):
        parse_structure(text)


def test_perm_lines():
    p = parse_perm_line("perm 4: 1 2 3 0")
    assert p == Permutation((1, 2, 3, 0))
    assert format_perm(p) == "perm 4: 1 2 3 0"
    for bad in ("perm 3: 0 1", "perm x: 0", "perm 2: 0 0", "prm 1: 0"):
        with pytest.raises(InputError):
            parse_perm_line(bad)


@pytest.mark.parametrize("name", catalog.NAMES)
def test_group_and_action_round_trip(name):
    G = catalog.load(name)
    text = serialize_group(G, name)
    H = parse_group(text)
    assert H == G
    act = catalog.natural_action(name)
    again = parse_action(serialize_action(act, "nat", name), G)
    assert all(again.perm(g) == act.perm(g) for g in G.elements)


def test_action_rejects_non_homomorphism():
    G = catalog.load("C3")
    text = "action bad over C3\npoints 2\nmap 0: 1 0\nend\n"
    with pytest.raises(InputError):
        parse_action(text, G)


def test_trivial_group_serializes():
    G = catalog.load("C1")
    assert parse_group(serialize_group(G, "C1")).order() == 1
    act = GroupAction.natural(G)
    assert "points 1" in serialize_action(act, "t", "C1")
