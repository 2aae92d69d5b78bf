"""Tests for slimkit.topology.slimfly: parameters, construction and sizing."""

import collections
import itertools

import networkx as nx
import pytest

from slimkit import errors
from slimkit.topology import base, slimfly


def _build(q: int) -> base.Topology:
    return slimfly.build_slim_fly(slimfly.derive_sf_params(q, strict=True))


def _bfs_within_two(topology: base.Topology) -> bool:
    for source in range(topology.n_switches):
        seen = {source, *topology.neighbors(source)}
        for neighbor in topology.neighbors(source):
            seen.update(topology.neighbors(neighbor))
        if len(seen) != topology.n_switches:
            return False
    return True


# ---------------------------------------------------------------------------
# derive_sf_params
# ---------------------------------------------------------------------------


class TestDeriveSfParams:
    def test_q5(self) -> None:
        params = slimfly.derive_sf_params(5)
        assert params.delta == 1
        assert params.n_switches == 50
        assert params.net_radix == 7
        assert params.concentration == 4
        assert params.xi == 2
        assert params.gen_set_x == frozenset({1, 4})
        assert params.gen_set_x_prime == frozenset({2, 3})
        assert params.mms_valid

    def test_q16(self) -> None:
        params = slimfly.derive_sf_params(16)
        assert (params.delta, params.n_switches, params.net_radix) == (0, 512, 24)
        assert params.concentration == 12
        assert params.n_endpoints == 6144

    def test_q9(self) -> None:
        params = slimfly.derive_sf_params(9)
        assert (params.delta, params.n_switches, params.net_radix) == (1, 162, 13)
        assert params.concentration == 7

    def test_q3_delta_minus_one(self) -> None:
        params = slimfly.derive_sf_params(3)
        assert params.delta == -1
        assert params.w == 1
        assert params.net_radix == 5

    def test_generator_set_sizes(self) -> None:
        for q in (3, 4, 5, 7, 8, 9, 11, 13):
            params = slimfly.derive_sf_params(q)
            expected = (q - params.delta) // 2 if params.delta else q // 2
            assert len(params.gen_set_x) == len(params.gen_set_x_prime) == expected

    def test_delta_one_sets_partition_nonzero_elements(self) -> None:
        params = slimfly.derive_sf_params(13)
        assert len(params.gen_set_x) + len(params.gen_set_x_prime) == 12
        assert params.gen_set_x | params.gen_set_x_prime == frozenset(range(1, 13))

    def test_non_prime_power_is_flagged(self) -> None:
        params = slimfly.derive_sf_params(12)
        assert not params.mms_valid
        assert params.xi is None
        assert params.gen_set_x == frozenset()
        assert params.n_switches == 288

    def test_q_two_mod_four_strict_raises(self) -> None:
        with pytest.raises(errors.ConstructionError, match="mod 4"):
            slimfly.derive_sf_params(6, strict=True)

    def test_q2_is_not_mms_valid(self) -> None:
        assert not slimfly.derive_sf_params(2).mms_valid

    def test_q_below_two_raises(self) -> None:
        with pytest.raises(errors.ConstructionError):
            slimfly.derive_sf_params(1)


# ---------------------------------------------------------------------------
# build_slim_fly
# ---------------------------------------------------------------------------


class TestBuildSlimFly:
    def test_q5_is_hoffman_singleton_profile(self) -> None:
        topology = _build(5)
        assert topology.n_switches == 50
        assert topology.n_links == 175
        assert {topology.degree(switch) for switch in range(50)} == {7}
        assert topology.diameter == 2
        assert topology.girth() == 5
        assert topology.n_endpoints == 200

    @pytest.mark.parametrize("q", [3, 4, 5, 7, 8, 9])
    def test_regular_with_diameter_two(self, q: int) -> None:
        params = slimfly.derive_sf_params(q)
        topology = slimfly.build_slim_fly(params)
        assert topology.n_switches == 2 * q * q
        assert topology.n_links == params.n_links
        assert {topology.degree(switch) for switch in range(topology.n_switches)} == {
            params.net_radix
        }
        assert _bfs_within_two(topology)

    def test_adjacency_is_symmetric(self) -> None:
        topology = _build(7)
        matrix = nx.to_numpy_array(topology.graph)
        assert (matrix == matrix.T).all()

    def test_non_prime_power_raises(self) -> None:
        with pytest.raises(errors.ConstructionError, match="no MMS graph"):
            slimfly.build_slim_fly(slimfly.derive_sf_params(6))

    def test_labels_round_trip_ids(self) -> None:
        topology = _build(5)
        for switch in topology.switches:
            assert switch.label is not None
            assert slimfly.switch_id(switch.label, 5) == switch.switch_id
            assert switch.rack == switch.label.x_or_m

    def test_rack_pairs_joined_by_two_q_cables(self) -> None:
        topology = _build(5)
        per_pair = collections.Counter(
            tuple(sorted((topology.switches[left].rack, topology.switches[right].rack)))
            for left, right in topology.links
            if topology.switches[left].rack != topology.switches[right].rack
        )
        assert set(per_pair) == set(itertools.combinations(range(5), 2))
        assert set(per_pair.values()) == {10}

    def test_q5_port_layout(self) -> None:
        topology = _build(5)
        for switch in range(topology.n_switches):
            rack = topology.switches[switch].rack
            intra = sorted(
                topology.port_to(switch, nb)
                for nb in topology.neighbors(switch)
                if topology.switches[nb].rack == rack
            )
            inter = sorted(
                topology.port_to(switch, nb)
                for nb in topology.neighbors(switch)
                if topology.switches[nb].rack != rack
            )
            assert intra == [5, 6, 7]
            assert inter == [8, 9, 10, 11]

    def test_same_port_toward_each_foreign_rack(self) -> None:
        topology = _build(5)
        ports_by_racks: dict[tuple[int, int], set[int]] = collections.defaultdict(set)
        for (switch, neighbor), port in topology.link_ports.items():
            own = topology.switches[switch].rack
            foreign = topology.switches[neighbor].rack
            if own != foreign:
                ports_by_racks[own, foreign].add(port)
        assert all(len(ports) == 1 for ports in ports_by_racks.values())

    def test_peer_lookup(self) -> None:
        topology = _build(5)
        assert topology.peer(0, 1) == base.EndpointPort(0, 0)
        neighbor = topology.neighbors(0)[0]
        port = topology.port_to(0, neighbor)
        assert topology.peer(0, port) == base.SwitchPort(
            neighbor, topology.port_to(neighbor, 0)
        )
        assert topology.peer(0, 12) is None


# ---------------------------------------------------------------------------
# find_sf_near
# ---------------------------------------------------------------------------


class TestFindSfNear:
    def test_exact_sizes(self) -> None:
        assert slimfly.find_sf_near(200).q == 5
        assert slimfly.find_sf_near(6144).q == 16

    def test_closest_size(self) -> None:
        params = slimfly.find_sf_near(2048)
        assert params.q == 11
        assert params.n_endpoints == 2178

    def test_small_request_returns_smallest_valid(self) -> None:
        params = slimfly.find_sf_near(9)
        assert params.q == 3
        assert params.mms_valid

    def test_result_is_mms_valid(self) -> None:
        for n_nodes in (50, 500, 5000, 50000):
            assert slimfly.find_sf_near(n_nodes).mms_valid
