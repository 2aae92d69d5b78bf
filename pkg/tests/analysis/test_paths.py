"""Tests for slimkit.analysis.paths: path lengths, link loads and disjoint paths."""

import functools
import itertools

import pytest

from slimkit import errors
from slimkit.analysis import paths
from slimkit.routing import acyclic, base, lnmp, minimal, rues
from slimkit.topology import base as topology_base
from slimkit.topology import slimfly


@functools.cache
def _q5() -> topology_base.Topology:
    return slimfly.build_slim_fly(slimfly.derive_sf_params(5))


@functools.cache
def _lnmp(n_layers: int, seed: int = 0) -> base.LayerSet:
    return lnmp.generate_layers(_q5(), n_layers, seed)


@functools.cache
def _rues(n_layers: int, fraction: float, seed: int = 0) -> base.LayerSet:
    return rues.generate_layers_rues(_q5(), n_layers, fraction, seed)


def _brute_disjoint(candidates: list[base.Path]) -> int:
    link_sets = [
        {topology_base.normalize_link(*link) for link in path.links}
        for path in candidates
    ]
    for size in range(len(link_sets), 0, -1):
        for subset in itertools.combinations(link_sets, size):
            pairs = itertools.combinations(subset, 2)
            if all(left.isdisjoint(right) for left, right in pairs):
                return size
    return 0


# ---------------------------------------------------------------------------
# histogram / path_length_stats
# ---------------------------------------------------------------------------


class TestPathLengthStats:
    def test_histogram_bins(self) -> None:
        bins = paths.histogram([0, 1, 1, 2], 1)
        assert [(bin_.lo, bin_.hi, bin_.count) for bin_ in bins] == [
            (0.0, 1.0, 1),
            (1.0, 2.0, 2),
            (2.0, 3.0, 1),
        ]

    def test_empty_histogram(self) -> None:
        assert paths.histogram([], 0.5) == []

    def test_minimal_routing_within_diameter(self) -> None:
        stats = paths.path_length_stats(minimal.MinimalOnly().build(_q5(), 1, seed=0))
        assert max(stats.maximum.values()) <= 2
        assert len(stats.maximum) == 50 * 49

    def test_multipath_layers_at_most_three_hops(self) -> None:
        stats = paths.path_length_stats(_lnmp(8))
        assert stats.fraction_at_most(3) == 1.0
        for pair, average in stats.average.items():
            assert stats.maximum[pair] >= average >= _q5().distance(*pair)

    def test_sparse_rues_has_long_paths(self) -> None:
        stats = paths.path_length_stats(_rues(8, 0.4))
        assert stats.fraction_at_most(3) < 1.0
        assert stats.maximum_histogram()[-1].lo > 3

    def test_half_hop_average_bins(self) -> None:
        stats = paths.path_length_stats(_lnmp(2))
        widths = {bin_.hi - bin_.lo for bin_ in stats.average_histogram()}
        assert widths == {0.5}


# ---------------------------------------------------------------------------
# link_crossing_counts
# ---------------------------------------------------------------------------


class TestLinkCrossingCounts:
    def test_empty_layers(self) -> None:
        loads = paths.link_crossing_counts(base.LayerSet(50, ()), _q5())
        assert len(loads.counts) == 350
        assert loads.total == 0
        assert loads.coefficient_of_variation() == 0.0

    def test_conservation(self) -> None:
        layers = _lnmp(4)
        loads = paths.link_crossing_counts(layers, _q5())
        assert loads.total == sum(path.length for _, path in layers.iter_paths())

    def test_bin_size(self) -> None:
        bins = paths.link_crossing_counts(_lnmp(2), _q5()).histogram()
        assert all(bin_.hi - bin_.lo == 20 for bin_ in bins)

    def test_multipath_balances_better_than_sparse_rues(self) -> None:
        wins = 0
        for seed in range(3):
            ours = paths.link_crossing_counts(_lnmp(4, seed), _q5())
            sparse = paths.link_crossing_counts(_rues(4, 0.4, seed), _q5())
            wins += ours.coefficient_of_variation() < sparse.coefficient_of_variation()
        assert wins >= 2


# ---------------------------------------------------------------------------
# disjoint_path_counts
# ---------------------------------------------------------------------------


class TestDisjointPathCounts:
    def test_identical_paths_count_once(self) -> None:
        layers = minimal.MinimalOnly().build(_q5(), 3, seed=0)
        counts = paths.disjoint_path_counts(layers)
        assert set(counts.values()) == {1}

    def test_matches_exhaustive_search(self) -> None:
        layers = _rues(4, 0.6)
        counts = paths.disjoint_path_counts(layers)
        for src, dst in list(counts)[::37]:
            assert counts[src, dst] == _brute_disjoint(layers.pair_paths(src, dst))

    @pytest.mark.parametrize("seed", range(5))
    def test_multipath_layers_reach_three(self, seed: int) -> None:
        counts = paths.disjoint_path_counts(_lnmp(8, seed))
        assert paths.fraction_with_at_least(counts, 3) >= 0.85
        for (src, dst), count in counts.items():
            if _q5().has_link(src, dst):
                assert count == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_sparse_rues_reaches_three(self, seed: int) -> None:
        counts = paths.disjoint_path_counts(_rues(8, 0.4, seed))
        assert paths.fraction_with_at_least(counts, 3) >= 0.95

    def test_acyclic_layers_trail_lnmp(self) -> None:
        behind = 0
        for seed in range(5):
            tree_layers = acyclic.RandomAcyclic().build(_q5(), 8, seed)
            tree = paths.disjoint_path_counts(tree_layers)
            multipath = paths.disjoint_path_counts(_lnmp(8, seed))
            if paths.fraction_with_at_least(tree, 3) < paths.fraction_with_at_least(
                multipath, 3
            ):
                behind += 1
        assert behind >= 3

    def test_too_many_layers(self) -> None:
        layers = minimal.MinimalOnly().build(
            topology_base.Topology.from_links([(0, 1)]), 17, seed=0
        )
        with pytest.raises(errors.ConfigError):
            paths.disjoint_path_counts(layers)

    def test_fraction_of_nothing(self) -> None:
        assert paths.fraction_with_at_least({}, 3) == 0.0
