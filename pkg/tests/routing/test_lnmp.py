"""Tests for layered near-minimal multipath generation."""

import functools

import networkx as nx
import numpy as np

from slimkit.routing import base, lnmp, minimal
from slimkit.topology import base as topology_base
from slimkit.topology import slimfly


@functools.cache
def _q5() -> topology_base.Topology:
    return slimfly.build_slim_fly(slimfly.derive_sf_params(5))


@functools.cache
def _q5_generator(n_layers: int, seed: int) -> lnmp.LayerGenerator:
    generator = lnmp.LayerGenerator(_q5(), seed)
    for _ in range(n_layers):
        generator.next_layer()
    return generator


def _chain(endpoints: int | dict[int, int] = 3) -> topology_base.Topology:
    return topology_base.Topology.from_links([(0, 1), (1, 2), (2, 3)], endpoints)


def _blocked_topology() -> topology_base.Topology:
    # Ring 0..5 plus two detours 1-6-7-3 and 5-8-9-3.
    ring = [(idx, (idx + 1) % 6) for idx in range(6)]
    return topology_base.Topology.from_links(
        [*ring, (1, 6), (6, 7), (7, 3), (5, 8), (8, 9), (9, 3)]
    )


def _recount(
    layer_set: base.LayerSet, topology: topology_base.Topology
) -> dict[tuple[int, int], int]:
    counts: dict[tuple[int, int], int] = {}
    for _, path in layer_set.iter_paths():
        switches = topology.switches
        load = switches[path.src].endpoints * switches[path.dst].endpoints
        for link in path.links:
            counts[link] = counts.get(link, 0) + load
    return {link: value for link, value in counts.items() if value}


# ---------------------------------------------------------------------------
# update_weights
# ---------------------------------------------------------------------------


class TestUpdateWeights:
    def test_three_hop_path_three_endpoints(self) -> None:
        weights = lnmp.update_weights(
            base.Path((0, 1, 2, 3)), base.LinkWeights(), _chain()
        )
        assert [weights[0, 1], weights[1, 2], weights[2, 3]] == [9, 18, 27]

    def test_one_hop_four_endpoints(self) -> None:
        topology = topology_base.Topology.from_links([(0, 1)], endpoints=4)
        weights = lnmp.update_weights(base.Path((0, 1)), base.LinkWeights(), topology)
        assert weights[0, 1] == 16

    def test_switch_without_endpoints_sends_nothing(self) -> None:
        topology = _chain({0: 3, 1: 0, 2: 3, 3: 3})
        weights = lnmp.update_weights(
            base.Path((0, 1, 2, 3)), base.LinkWeights(), topology
        )
        assert [weights[0, 1], weights[1, 2], weights[2, 3]] == [9, 9, 18]

    def test_senders_restrict_accounting(self) -> None:
        weights = lnmp.update_weights(
            base.Path((0, 1, 2, 3)), base.LinkWeights(), _chain(), senders=[1]
        )
        assert [weights[0, 1], weights[1, 2], weights[2, 3]] == [0, 9, 9]

    def test_weights_accumulate(self) -> None:
        weights = base.LinkWeights({(0, 1): 5})
        lnmp.update_weights(base.Path((0, 1)), weights, _chain())
        assert weights[0, 1] == 14


# ---------------------------------------------------------------------------
# find_path
# ---------------------------------------------------------------------------


class TestFindPath:
    def test_single_candidate_ignores_weights(self) -> None:
        weights = base.LinkWeights({(0, 1): 1000, (1, 2): 1000, (2, 3): 1000})
        path = lnmp.find_path(_chain(), weights, (0, 3), {})
        assert path == base.Path((0, 1, 2, 3))

    def test_lightest_candidate_wins(self) -> None:
        ring = topology_base.Topology.from_links(
            [(idx, (idx + 1) % 6) for idx in range(6)]
        )
        weights = base.LinkWeights({(0, 1): 10})
        assert lnmp.find_path(ring, weights, (0, 3), {}) == base.Path((0, 5, 4, 3))

    def test_equal_weights_pick_smallest_hops(self) -> None:
        ring = topology_base.Topology.from_links(
            [(idx, (idx + 1) % 6) for idx in range(6)]
        )
        assert lnmp.find_path(ring, base.LinkWeights(), (0, 3), {}) == base.Path(
            (0, 1, 2, 3)
        )

    def test_conflicting_candidate_rejected(self) -> None:
        # After 0-1-2-3 is inserted, switch 1 forwards toward 3 via 2 only.
        topology = topology_base.Topology.from_links(
            [(0, 1), (1, 2), (2, 3), (4, 1), (1, 5), (5, 3)]
        )
        generator = lnmp.LayerGenerator(topology, seed=0)
        routes: lnmp.Routes = {}
        generator.insert(base.Path((0, 1, 2, 3)), routes)
        assert routes[1, 3].path.hops == (1, 2, 3)
        assert routes[1, 3].origin == base.RouteOrigin.SUBPATH
        weights = base.LinkWeights({(1, 2): 100, (2, 3): 100})
        path = lnmp.find_path(topology, weights, (4, 3), routes)
        assert path == base.Path((4, 1, 2, 3))

    def test_no_valid_candidate(self) -> None:
        topology = _blocked_topology()
        generator = lnmp.LayerGenerator(topology, seed=0)
        routes: lnmp.Routes = {}
        generator.insert(base.Path((1, 6, 7, 3)), routes)
        generator.insert(base.Path((5, 8, 9, 3)), routes)
        assert lnmp.find_path(topology, base.LinkWeights(), (0, 3), routes) is None

    def test_found_paths_have_three_hops(self) -> None:
        topology = _q5()
        far = [dst for dst in range(1, 50) if topology.distance(0, dst) == 2]
        for dst in far[:3]:
            path = lnmp.find_path(topology, base.LinkWeights(), (0, dst), {})
            assert path is not None
            assert path.length == 3
            assert path.is_valid_in(topology)


# ---------------------------------------------------------------------------
# update_priorities
# ---------------------------------------------------------------------------


class TestUpdatePriorities:
    def _topology(self) -> topology_base.Topology:
        return topology_base.Topology.from_links(
            [(0, 1), (1, 2), (2, 3), (0, 4), (4, 3), (1, 3)]
        )

    def test_longer_than_minimal_pairs_counted(self) -> None:
        topology = self._topology()
        priorities = lnmp.update_priorities(
            base.Path((0, 1, 2, 3)), lnmp.PairPriorities(5), topology
        )
        assert priorities.count((0, 3)) == 1
        assert priorities.count((1, 3)) == 1
        assert priorities.count((2, 3)) == 0

    def test_counted_pairs_are_idempotent(self) -> None:
        topology = self._topology()
        priorities = lnmp.PairPriorities(5)
        counted: set[tuple[int, int]] = set()
        path = base.Path((0, 1, 2, 3))
        lnmp.update_priorities(path, priorities, topology, counted=counted)
        before = priorities.as_dict()
        lnmp.update_priorities(path, priorities, topology, counted=counted)
        assert priorities.as_dict() == before

    def test_only_bound_switches_counted(self) -> None:
        priorities = lnmp.update_priorities(
            base.Path((0, 1, 2, 3)), lnmp.PairPriorities(5), self._topology(), bound=[0]
        )
        assert priorities.count((0, 3)) == 1
        assert priorities.count((1, 3)) == 0

    def test_snapshot_orders_by_count(self) -> None:
        priorities = lnmp.PairPriorities(3)
        priorities.increment((0, 1))
        priorities.increment((0, 1))
        priorities.increment((2, 1))
        order = priorities.snapshot(np.random.default_rng(0))
        assert len(order) == 6
        assert order[-1] == (0, 1)
        assert order[-2] == (2, 1)


# ---------------------------------------------------------------------------
# generate_layers
# ---------------------------------------------------------------------------


class TestGenerateLayers:
    def test_single_layer_is_minimal_routing(self) -> None:
        topology = _q5()
        layer_set = lnmp.generate_layers(topology, 1, seed=3)
        assert layer_set.n_layers == 1
        assert layer_set.layers == minimal.MinimalOnly().build(topology, 1, 3).layers
        for (src, dst), route in layer_set.layers[0].routes.items():
            assert route.path.length == topology.distance(src, dst)

    def test_layers_are_consistent(self) -> None:
        layer_set = lnmp.generate_layers(_q5(), 4, seed=1)
        layer_set.check_consistency(_q5())

    def test_path_lengths(self) -> None:
        layer_set = lnmp.generate_layers(_q5(), 8, seed=0)
        assert layer_set.max_length <= 3
        for layer in layer_set.layers[1:]:
            for route in layer.routes.values():
                if route.origin == base.RouteOrigin.FOUND:
                    assert route.path.length == 3

    def test_deterministic(self) -> None:
        first = lnmp.generate_layers(_q5(), 3, seed=7).to_dict()
        second = lnmp.generate_layers(_q5(), 3, seed=7).to_dict()
        assert first == second

    def test_prefix_does_not_depend_on_layer_count(self) -> None:
        short = lnmp.generate_layers(_q5(), 3, seed=11)
        long = lnmp.generate_layers(_q5(), 5, seed=11)
        assert long.layers[:3] == short.layers

    def test_weights_match_recount(self) -> None:
        generator = _q5_generator(3, 5)
        layer_set = base.LayerSet(50, tuple(generator.layers))
        assert generator.weights.as_dict() == _recount(layer_set, _q5())

    def test_priority_bound(self) -> None:
        generator = _q5_generator(3, 5)
        assert max(generator.priorities.as_dict().values()) <= 2

    def test_ring_found_paths_are_simple_three_hop_paths(self) -> None:
        ring = topology_base.Topology.from_links(
            [(idx, (idx + 1) % 6) for idx in range(6)]
        )
        layer_set = lnmp.generate_layers(ring, 2, seed=0)
        layer_set.check_consistency(ring)
        for (src, dst), route in layer_set.layers[1].routes.items():
            if route.origin != base.RouteOrigin.FOUND:
                continue
            brute = {
                tuple(hops)
                for hops in nx.all_simple_paths(ring.graph, src, dst, cutoff=3)
                if len(hops) == 4
            }
            assert route.path.hops in brute
