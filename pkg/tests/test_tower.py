from itertools import product

import pytest

from homogen.core import Structure, is_automorphism
from homogen.errors import CapacityError, InputError
from homogen.perms import Permutation
from homogen.tower import (add_witness_layer, aut_group, eta_composite, extend_automorphism,
                           rado_tower, witness_property)

PATH = Structure(3, frozenset({(0, 1), (1, 2)}), undirected=True)


def test_stage_sizes_from_a_point():
    stages = rado_tower(Structure(1), 2)
    assert [s.graph.n for s in stages] == [1, 3, 11]
    assert [s.previous_size for s in stages[1:]] == [1, 3]


def test_new_vertices_are_independent():
    stage = rado_tower(PATH, 1)[1]
    new = set(stage.new_vertex_table.values())
    assert not any(u in new and v in new for u, v in stage.graph.R)
    for F, v in stage.new_vertex_table.items():
        assert {u for u in range(3) if (u, v) in stage.graph.R} == F


def test_witness_property_holds_and_fails():
    stage = rado_tower(PATH, 1)[1]
    assert witness_property(stage).ok
    # drop the vertex for the full subset and the property breaks
    bad = add_witness_layer(PATH, 1)
    full = bad.new_vertex_table.pop(frozenset({0, 1, 2}))
    keep = [v for v in range(bad.graph.n) if v != full]
    from homogen.core import induced_substructure
    bad.graph = induced_substructure(bad.graph, keep)[0]
    v = witness_property(bad)
    assert not v.ok and v.witness == ([0, 1, 2], [])


def test_eta_extends_and_composes():
    stages = rado_tower(PATH, 2)
    eta = eta_composite(stages)
    top = stages[-1].graph
    assert len(eta) == 2
    for g, h in eta.items():
        assert h.images[:3] == g.images and is_automorphism(top, h)
    for g, h in product(eta, repeat=2):
        assert eta[g * h] == eta[g] * eta[h]


def test_eta_image_is_a_subgroup():
    stage = rado_tower(PATH, 1)[1]
    image = set(stage.eta.values())
    assert all(a * b in image for a in image for b in image)
    assert image <= set(aut_group(stage).elements)


def test_extend_automorphism_degree_check():
    stage = rado_tower(PATH, 1)[1]
    with pytest.raises(InputError):
        extend_automorphism(stage, Permutation((1, 0)))


def test_tower_capacity_and_input_errors():
    with pytest.raises(CapacityError):
        rado_tower(PATH, 2, budget=100)
    with pytest.raises(InputError):
        rado_tower(PATH, 0)
    with pytest.raises(InputError):
        rado_tower(Structure(2, frozenset({(0, 1)})), 1)
    with pytest.raises(InputError):
        rado_tower(Structure(4, S=frozenset({(0, 1, 2, 3)})), 1)
    with pytest.raises(InputError):
        rado_tower(Structure(1, frozenset({(0, 0)}), allow_loops=True), 1)
