"""Path statistics over routing layers: lengths, link loads and disjointness."""

from __future__ import annotations

import dataclasses
import logging
import math
from typing import TYPE_CHECKING, Final

import networkx as nx
import numpy as np

from slimkit import errors
from slimkit.topology import base as topology_base

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    from slimkit.routing import base as routing_base

logger = logging.getLogger(__name__)

LINK_BIN_SIZE: Final[int] = 20
MAX_DISJOINT_LAYERS: Final[int] = 16

Pair = tuple[int, int]


@dataclasses.dataclass(frozen=True)
class HistogramBin:
    """One histogram bar covering ``[lo, hi)``."""

    lo: float
    hi: float
    count: int


def histogram(values: Iterable[float], width: float) -> list[HistogramBin]:
    """Bin values into ``[k*width, (k+1)*width)`` bars from 0 to the largest value."""
    data = np.asarray(list(values), dtype=float)
    if data.size == 0:
        return []
    n_bins = math.floor(float(data.max()) / width) + 1
    edges = np.arange(n_bins + 1) * width
    counts, _ = np.histogram(data, bins=edges)
    return [
        HistogramBin(float(edges[idx]), float(edges[idx + 1]), int(count))
        for idx, count in enumerate(counts)
    ]


@dataclasses.dataclass(frozen=True)
class PairPathStats:
    """Per ordered switch pair, path lengths across all layers.

    Attributes:
        average: Mean inter-switch length of the pair's per-layer paths.
        maximum: Longest of the pair's per-layer paths.
    """

    average: dict[Pair, float] = dataclasses.field(default_factory=dict, hash=False)
    maximum: dict[Pair, int] = dataclasses.field(default_factory=dict, hash=False)

    def average_histogram(self) -> list[HistogramBin]:
        """Half-hop bins of the per-pair average lengths."""
        return histogram(self.average.values(), 0.5)

    def maximum_histogram(self) -> list[HistogramBin]:
        """Whole-hop bins of the per-pair maximum lengths."""
        return histogram(self.maximum.values(), 1)

    def fraction_at_most(self, length: int) -> float:
        """Fraction of pairs whose longest path has at most length hops."""
        if not self.maximum:
            return 0.0
        hits = sum(value <= length for value in self.maximum.values())
        return hits / len(self.maximum)


def _pairs(layers: routing_base.LayerSet) -> list[Pair]:
    return sorted({pair for layer in layers.layers for pair in layer.routes})


def path_length_stats(layers: routing_base.LayerSet) -> PairPathStats:
    """Return per-pair average and maximum path lengths over every layer."""
    average: dict[Pair, float] = {}
    maximum: dict[Pair, int] = {}
    for src, dst in _pairs(layers):
        lengths = [path.length for path in layers.pair_paths(src, dst)]
        average[src, dst] = float(np.mean(lengths))
        maximum[src, dst] = max(lengths)
    return PairPathStats(average=average, maximum=maximum)


@dataclasses.dataclass(frozen=True)
class LinkLoadHistogram:
    """Paths crossing each directed link, over all layers.

    Attributes:
        counts: ``(from, to) -> paths crossing``; every directed link present.
        bin_size: Histogram bar width.
    """

    counts: dict[tuple[int, int], int] = dataclasses.field(
        default_factory=dict, hash=False
    )
    bin_size: int = LINK_BIN_SIZE

    @property
    def total(self) -> int:
        """Sum of all crossing counts."""
        return sum(self.counts.values())

    def histogram(self) -> list[HistogramBin]:
        """Bars of width bin_size over the per-link counts."""
        return histogram(self.counts.values(), self.bin_size)

    def coefficient_of_variation(self) -> float:
        """Standard deviation over mean of the per-link counts; 0 when unused."""
        data = np.asarray(list(self.counts.values()), dtype=float)
        if data.size == 0 or data.mean() == 0:
            return 0.0
        return float(data.std() / data.mean())


def link_crossing_counts(
    layers: routing_base.LayerSet, topology: topology_base.Topology
) -> LinkLoadHistogram:
    """Count the paths crossing each directed link, summed over all layers."""
    counts = {
        directed: 0
        for left, right in sorted(topology.links)
        for directed in ((left, right), (right, left))
    }
    for _, path in layers.iter_paths():
        for link in path.links:
            counts[link] += 1
    return LinkLoadHistogram(counts=counts)


def _undirected_links(path: routing_base.Path) -> frozenset[tuple[int, int]]:
    return frozenset(topology_base.normalize_link(*link) for link in path.links)


def max_disjoint(paths: Iterable[routing_base.Path]) -> int:
    """Return the largest number of paths sharing no undirected link.

    Raises:
        ConfigError: If more than 16 paths are given.
    """
    link_sets = list({_undirected_links(path) for path in paths})
    if len(link_sets) > MAX_DISJOINT_LAYERS:
        msg = f"disjointness is exact for at most {MAX_DISJOINT_LAYERS} paths"
        raise errors.ConfigError(msg)
    if len(link_sets) <= 1:
        return len(link_sets)
    compatible = nx.Graph()
    compatible.add_nodes_from(range(len(link_sets)))
    compatible.add_edges_from(
        (left, right)
        for left in range(len(link_sets))
        for right in range(left + 1, len(link_sets))
        if link_sets[left].isdisjoint(link_sets[right])
    )
    _, size = nx.max_weight_clique(compatible, weight=None)
    return int(size)


def disjoint_path_counts(layers: routing_base.LayerSet) -> dict[Pair, int]:
    """Return, per ordered switch pair, its largest set of link-disjoint layer paths.

    Raises:
        ConfigError: If the layer set has more than 16 layers.
    """
    if layers.n_layers > MAX_DISJOINT_LAYERS:
        msg = f"disjoint counts support at most {MAX_DISJOINT_LAYERS} layers"
        raise errors.ConfigError(msg)
    counts = {
        (src, dst): max_disjoint(layers.pair_paths(src, dst))
        for src, dst in _pairs(layers)
    }
    logger.info("counted disjoint paths for %d pairs", len(counts))
    return counts


def fraction_with_at_least(counts: Mapping[Pair, int], minimum: int) -> float:
    """Fraction of pairs whose count reaches minimum; 0 for no pairs."""
    if not counts:
        return 0.0
    return sum(count >= minimum for count in counts.values()) / len(counts)
