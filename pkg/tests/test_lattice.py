import json

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings
from pydantic import ValidationError

from jamlab.core import (
    BUILTIN_TYPES,
    ConfigType,
    ModelInvalidError,
    Region,
    UsageError,
    blocks,
    builtin_model,
    conflict_graph,
    enumerate_configs,
    load_model,
    model_family,
    twin_classes,
    with_boundary,
)
from jamlab.core.lattice import shape_for_size, site_index
from tests import DIMER_FILE, EXCLUSION_FILE


def test_config_type_defaults_occupancy_to_footprint():
    dimer = ConfigType(name="dimer", footprint=((1,), (0,), (0,)))

    assert dimer.footprint == ((0,), (1,))
    assert dimer.occupancy == dimer.footprint
    assert dimer.dimension == 1


@pytest.mark.parametrize(
    "footprint, occupancy",
    [
        (((1,), (2,)), None),
        (((0,), (1,)), ((2,),)),
        (((0,), (1, 0)), None),
    ],
)
def test_config_type_rejects_bad_offsets(footprint, occupancy):
    with pytest.raises(ValidationError):
        ConfigType(name="bad", footprint=footprint, occupancy=occupancy)


def test_region_needs_exactly_one_extent():
    with pytest.raises(ValidationError):
        Region(kind="free")
    with pytest.raises(ValidationError):
        Region(kind="free", shape=(3,), sites=((0,),))
    with pytest.raises(ValidationError):
        Region(kind="torus", sites=((0,), (1,)))


def test_site_index_is_lexicographic():
    index = site_index(Region(kind="torus", shape=(3, 4)))

    assert len(index) == 12
    assert index.locate((0, 0)) == 0
    assert index.locate((1, 2)) == 6
    assert index.locate((3, 5)) == 1
    assert index.locate((-1, 0)) == 8


def test_free_region_drops_overhanging_configs():
    torus = builtin_model("dimer-1d", (400,), "torus")
    free = builtin_model("dimer-1d", (400,), "free")

    assert len(enumerate_configs(torus)) == 400
    assert len(enumerate_configs(free)) == 399


def test_instances_are_type_major(model):
    instances = enumerate_configs(model)
    keys = [(c.type_index, c.anchor) for c in instances]

    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)
    if model.region.kind == "torus":
        assert len(instances) == model.k * model.n


def test_conflict_graph_directions_agree(model):
    graph = conflict_graph(model)

    for source, targets in enumerate(graph.blocks):
        assert source not in targets
        for target in targets:
            assert source in graph.blocked_by[target]
            assert blocks(graph.instances[source], graph.instances[target])


def test_conflict_graph_is_complete(model):
    graph = conflict_graph(model)
    instances = graph.instances
    expected = sum(
        1
        for i, b in enumerate(instances)
        for j, c in enumerate(instances)
        if i != j and blocks(b, c)
    )

    assert graph.edge_count() == expected


SYMMETRIC_BUILTINS = ("dimer-1d", "monomer-1d", "mixed-2d")


@st.composite
def torus_models(draw, names=tuple(sorted(BUILTIN_TYPES))):
    name = draw(st.sampled_from(names))
    dimension = BUILTIN_TYPES[name][0].dimension
    side = st.integers(3, 12) if dimension == 1 else st.integers(3, 6)
    shape = tuple(draw(side) for _ in range(dimension))
    return builtin_model(name, shape, "torus")


def by_type_and_anchor(model):
    return {(c.type_index, c.anchor): c for c in enumerate_configs(model)}


@given(torus_models(), st.data())
@settings(max_examples=60, deadline=None)
def test_blocks_is_translation_invariant(model, data):
    vector = data.draw(st.tuples(*[st.integers(-25, 25)] * model.dimension))
    sites = site_index(model.region)
    lookup = by_type_and_anchor(model)

    def shifted(instance):
        coord = sites.coords[instance.anchor]
        anchor = sites.locate(tuple(a + v for a, v in zip(coord, vector)))
        return lookup[(instance.type_index, anchor)]

    for b in lookup.values():
        for c in lookup.values():
            assert blocks(b, c) == blocks(shifted(b), shifted(c))


@given(torus_models(SYMMETRIC_BUILTINS))
@settings(max_examples=30, deadline=None)
def test_blocks_is_symmetric_when_occupancy_is_footprint(model):
    assert all(t.occupancy == t.footprint for t in model.types)

    instances = enumerate_configs(model)
    for b in instances:
        for c in instances:
            assert blocks(b, c) == blocks(c, b)

    graph = conflict_graph(model)
    for source, targets in enumerate(graph.blocks):
        assert set(targets) == set(graph.blocked_by[source])


@given(torus_models(), st.sampled_from(["torus", "free"]))
@settings(max_examples=40, deadline=None)
def test_every_config_blocks_itself(model, boundary):
    model = with_boundary(model, boundary)

    assert all(blocks(c, c) for c in enumerate_configs(model))


def test_blocks_is_directional_for_pair_types():
    lookup = by_type_and_anchor(builtin_model("anni-pair", (6,), "torus"))
    hole_left, hole_right = 0, 1

    assert not blocks(lookup[(hole_left, 0)], lookup[(hole_left, 1)])
    assert not blocks(lookup[(hole_left, 0)], lookup[(hole_right, 1)])
    assert blocks(lookup[(hole_left, 0)], lookup[(hole_right, 0)])
    assert blocks(lookup[(hole_left, 1)], lookup[(hole_left, 0)])
    assert blocks(lookup[(hole_right, 0)], lookup[(hole_left, 1)])


@pytest.mark.parametrize(
    "name, shape, boundary, configs, edges",
    [
        ("dimer-1d", (10,), "torus", 10, 20),
        ("dimer-1d", (10,), "free", 9, 16),
        ("monomer-1d", (5,), "torus", 5, 0),
        ("monomer-excl-1d", (10,), "torus", 10, 20),
        ("monomer-excl-2d", (5, 5), "torus", 25, 100),
        ("anni-pair", (6,), "torus", 12, 36),
    ],
)
def test_conflict_graph_sizes(name, shape, boundary, configs, edges):
    graph = conflict_graph(builtin_model(name, shape, boundary))

    assert len(graph) == configs
    assert graph.edge_count() == edges


def test_twins():
    pair = builtin_model("anni-pair", (6,), "torus")
    graph = conflict_graph(pair)

    assert twin_classes(pair) == [(0, 1)]
    assert pair.multiplicity == 2
    for index, instance in enumerate(graph.instances):
        (twin,) = graph.twins[index]
        assert graph.instances[twin].anchor == instance.anchor
        assert graph.instances[twin].type_index != instance.type_index

    mixed = builtin_model("mixed-2d", (4, 4), "torus")
    assert twin_classes(mixed) == [(0,), (1,)]
    assert mixed.multiplicity == 1
    assert all(not twins for twins in conflict_graph(mixed).twins)


def test_load_model_from_file(tmp_path):
    path = tmp_path / "dimer.json"
    path.write_text(json.dumps(DIMER_FILE))
    model = load_model(path)

    assert model.name == "dimer-from-file"
    assert model.n == 4
    assert model.k == 1
    assert len(conflict_graph(model)) == 3


def test_load_model_from_mapping():
    model = load_model(EXCLUSION_FILE)

    assert model.name == "custom"
    assert model.types[0].occupancy == ((0, 0),)
    assert conflict_graph(model).edge_count() == 16 * 4


def test_load_model_with_explicit_sites():
    model = load_model(
        {
            "dimension": 1,
            "region": {"kind": "free", "sites": [[0], [1], [2], [7]]},
            "types": [{"name": "dimer", "footprint": [[0], [1]]}],
        }
    )

    assert model.n == 4
    assert len(enumerate_configs(model)) == 2


@pytest.mark.parametrize(
    "document",
    [
        {**DIMER_FILE, "colour": "red"},
        {**DIMER_FILE, "types": [{"name": "dimer", "footprint": [[1], [2]]}]},
        {**DIMER_FILE, "dimension": 2},
        {**DIMER_FILE, "types": []},
        {**DIMER_FILE, "region": {"kind": "torus", "shape": [0]}},
    ],
)
def test_load_model_rejects(document):
    with pytest.raises(ModelInvalidError):
        load_model(document)


def test_load_model_rejects_broken_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{ not json")

    with pytest.raises(ModelInvalidError):
        load_model(path)
    with pytest.raises(ModelInvalidError):
        load_model(tmp_path / "missing.json")


def test_model_error_names_field():
    with pytest.raises(ModelInvalidError) as e:
        load_model({**DIMER_FILE, "colour": "red"})

    assert "colour" in e.value.detail


def test_builtins():
    assert set(BUILTIN_TYPES) >= {"dimer-1d", "monomer-excl-1d", "monomer-excl-2d", "anni-pair"}

    with pytest.raises(UsageError):
        builtin_model("trimer-1d", (10,))
    with pytest.raises(UsageError):
        builtin_model("dimer-1d", (10, 10))


def test_model_family_and_shapes():
    family = model_family("monomer-excl-2d")

    assert family(400).region.shape == (20, 20)
    assert shape_for_size("dimer-1d", 50) == (50,)
    with pytest.raises(UsageError):
        shape_for_size("monomer-excl-2d", 50)


def test_with_boundary():
    free = builtin_model("dimer-1d", (10,), "free")
    torus = with_boundary(free, "torus")

    assert torus.region.kind == "torus"
    assert torus.region.shape == (10,)
    assert len(conflict_graph(torus)) == 10
