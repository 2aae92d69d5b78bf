"""Tests for the RUES, acyclic and minimal builders, the registry and LayerSet."""

import functools

import networkx as nx
import numpy as np
import pytest

from slimkit import errors, routing
from slimkit.routing import acyclic, base, minimal, rues
from slimkit.topology import base as topology_base
from slimkit.topology import slimfly


@functools.cache
def _q5() -> topology_base.Topology:
    return slimfly.build_slim_fly(slimfly.derive_sf_params(5))


def _used_links(layer: base.Layer) -> set[tuple[int, int]]:
    return {
        topology_base.normalize_link(*link)
        for route in layer.routes.values()
        for link in route.path.links
    }


# ---------------------------------------------------------------------------
# RUES
# ---------------------------------------------------------------------------


class TestRues:
    def test_full_fraction_repeats_minimal_routing(self) -> None:
        layer_set = rues.generate_layers_rues(_q5(), 3, 1.0, seed=2)
        first = layer_set.layers[0]
        for layer in layer_set.layers[1:]:
            for src, dst in first.routes:
                assert layer.path(src, dst) == first.path(src, dst)

    def test_layer_zero_is_minimal(self) -> None:
        topology = _q5()
        layer_set = rues.generate_layers_rues(topology, 2, 0.6, seed=0)
        for (src, dst), route in layer_set.layers[0].routes.items():
            assert route.path.length == topology.distance(src, dst)
            assert route.origin == base.RouteOrigin.MINIMAL

    def test_layers_keep_sampled_links_only(self) -> None:
        topology = _q5()
        layer_set = rues.generate_layers_rues(topology, 4, 0.6, seed=9)
        layer_set.check_consistency(topology)
        for layer in layer_set.layers[1:]:
            assert len(_used_links(layer)) <= 105

    def test_resample_bound_reports_layer(self) -> None:
        path_graph = topology_base.Topology.from_links([(0, 1), (1, 2)])
        with pytest.raises(errors.LayerGenerationError) as excinfo:
            rues.generate_layers_rues(path_graph, 3, 0.5, seed=0)
        assert excinfo.value.layer == 1

    @pytest.mark.parametrize("fraction", [0.0, -0.1, 1.5])
    def test_fraction_out_of_range(self, fraction: float) -> None:
        with pytest.raises(errors.ConfigError, match="preserve fraction"):
            rues.generate_layers_rues(_q5(), 2, fraction, seed=0)

    def test_sparse_layers_are_longer(self) -> None:
        layer_set = rues.generate_layers_rues(_q5(), 8, 0.4, seed=0)
        assert layer_set.max_length > 3

    def test_configure_sets_fraction(self) -> None:
        builder = rues.RandomEdgeSelection().configure({"rues_fraction": 0.4})
        assert isinstance(builder, rues.RandomEdgeSelection)
        assert builder.preserve_fraction == 0.4

    def test_configure_ignores_other_keys(self) -> None:
        builder = rues.RandomEdgeSelection()
        assert builder.configure({"seed": 3}) is builder


# ---------------------------------------------------------------------------
# Acyclic and minimal
# ---------------------------------------------------------------------------


class TestAcyclic:
    def test_layers_are_forests(self) -> None:
        topology = _q5()
        layer_set = acyclic.RandomAcyclic().build(topology, 4, seed=1)
        layer_set.check_consistency(topology)
        for layer in layer_set.layers[1:]:
            used = nx.Graph(list(_used_links(layer)))
            assert nx.is_forest(used)

    def test_single_layer_is_minimal(self) -> None:
        topology = _q5()
        layer_set = acyclic.RandomAcyclic().build(topology, 1, seed=1)
        for (src, dst), route in layer_set.layers[0].routes.items():
            assert route.path.length == topology.distance(src, dst)

    def test_spanning_tree_size(self) -> None:
        topology = _q5()
        tree = acyclic.random_spanning_tree(
            sorted(topology.links), 50, np.random.default_rng(0)
        )
        assert len(tree) == 49
        assert nx.is_tree(nx.Graph(tree))


class TestMinimal:
    def test_every_layer_identical(self) -> None:
        layer_set = minimal.MinimalOnly().build(_q5(), 3, seed=0)
        assert layer_set.layers[1].routes == layer_set.layers[0].routes
        assert [layer.index for layer in layer_set.layers] == [0, 1, 2]

    def test_zero_layers_raises(self) -> None:
        with pytest.raises(errors.LayerGenerationError, match="at least one layer"):
            minimal.MinimalOnly().build(_q5(), 0, seed=0)

    def test_disconnected_raises(self) -> None:
        topology = topology_base.Topology.from_links([(0, 1), (2, 3)])
        with pytest.raises(errors.LayerGenerationError, match="disconnected"):
            minimal.MinimalOnly().build(topology, 1, seed=0)


# ---------------------------------------------------------------------------
# Registry
# ---------------------------------------------------------------------------


class TestRegistry:
    def test_names_are_unique(self) -> None:
        names = [builder.name for builder in routing.ALL_ALGORITHMS]
        assert sorted(names) == ["acyclic", "lnmp", "minimal", "rues"]

    def test_get_builder(self) -> None:
        assert isinstance(routing.get_builder("rues"), rues.RandomEdgeSelection)

    def test_unknown_name(self) -> None:
        with pytest.raises(errors.ConfigError, match="unknown routing algorithm"):
            routing.get_builder("fatpaths")


# ---------------------------------------------------------------------------
# LayerSet
# ---------------------------------------------------------------------------


class TestLayerSet:
    def test_dict_round_trip(self) -> None:
        layer_set = minimal.MinimalOnly().build(_q5(), 2, seed=4)
        restored = base.LayerSet.from_dict(layer_set.to_dict(), seed=4)
        assert restored == layer_set

    def test_malformed_document(self) -> None:
        with pytest.raises(errors.SchemaError):
            base.LayerSet.from_dict({"layers": [{"id": 0}]})

    def test_inconsistent_layer_detected(self) -> None:
        ring = topology_base.Topology.from_links([(0, 1), (1, 2), (2, 3), (3, 0)])
        layer_set = base.LayerSet.from_paths(
            4, [[(0, 1, 2), (1, 0, 3, 2)]], algorithm="custom"
        )
        with pytest.raises(errors.LayerGenerationError, match="disagrees"):
            layer_set.check_consistency(ring)

    def test_incomplete_layer_detected(self) -> None:
        chain = topology_base.Topology.from_links([(0, 1)])
        layer_set = base.LayerSet.from_paths(2, [[(0, 1)]])
        with pytest.raises(errors.LayerGenerationError, match="1 of 2 pairs"):
            layer_set.check_consistency(chain)
