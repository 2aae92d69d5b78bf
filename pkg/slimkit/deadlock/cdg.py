"""Channel dependency graphs and the deadlock-freedom verdict.

A channel is a directed inter-switch link on one virtual lane. A packet
holding one channel may request the next channel of its path, so every
consecutive pair of channels along a routed path is a dependency. The
routing is deadlock-free exactly when the dependency graph is acyclic.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
from typing import TYPE_CHECKING

import networkx as nx

from slimkit import errors

if TYPE_CHECKING:
    from collections.abc import Iterator

    from slimkit.routing import base as routing_base
    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)

Channel = tuple[int, int, int]
PathKey = tuple[int, int, int]


class AssignmentMode(enum.StrEnum):
    """How VLs were chosen."""

    PER_PATH = "per-path"
    HOP_POSITION = "hop-position"


@dataclasses.dataclass(frozen=True)
class VlAssignment:
    """The VL each hop of each routed path travels on.

    Attributes:
        mode: Per-path placement or hop-position subsets.
        n_vls: Number of data VLs available.
        hop_vls: ``(layer, src, dst) -> VL per inter-switch hop``.
        subsets: The disjoint VL subsets per hop position (hop-position mode).
        sls: Service level per path (hop-position mode).
    """

    mode: AssignmentMode
    n_vls: int
    hop_vls: dict[PathKey, tuple[int, ...]] = dataclasses.field(
        default_factory=dict, hash=False
    )
    subsets: tuple[tuple[int, ...], ...] = ()
    sls: dict[PathKey, int] = dataclasses.field(default_factory=dict, hash=False)

    @property
    def vls_used(self) -> int:
        """Number of distinct VLs some hop travels on."""
        return len({vl for vls in self.hop_vls.values() for vl in vls})

    def path_counts(self) -> dict[int, int]:
        """Return how many paths use each VL on at least one hop."""
        counts = dict.fromkeys(range(self.n_vls), 0)
        for vls in self.hop_vls.values():
            for vl in set(vls):
                counts[vl] = counts.get(vl, 0) + 1
        return counts

    def to_dict(self) -> dict[str, object]:
        """Serialize to the VL-assignment JSON body."""
        return {
            "mode": self.mode.value,
            "n_vls": self.n_vls,
            "subsets": [list(subset) for subset in self.subsets],
            "paths": [
                {
                    "layer": layer,
                    "src": src,
                    "dst": dst,
                    "vls": list(self.hop_vls[layer, src, dst]),
                    "sl": self.sls.get((layer, src, dst)),
                }
                for layer, src, dst in sorted(self.hop_vls)
            ],
        }


class ChannelDependencyGraph:
    """Dependencies between channels, with the paths that induce each one."""

    def __init__(self) -> None:
        """Start with no channels."""
        self.graph: nx.DiGraph = nx.DiGraph()

    def add_path(
        self, key: PathKey, hops: tuple[int, ...], vls: tuple[int, ...]
    ) -> None:
        """Add the dependencies of one path travelling hop i on ``vls[i]``."""
        links = zip(hops, hops[1:], strict=False)
        channels = [
            (left, right, vl) for (left, right), vl in zip(links, vls, strict=True)
        ]
        self.graph.add_nodes_from(channels)
        for held, wanted in zip(channels, channels[1:], strict=False):
            if self.graph.has_edge(held, wanted):
                self.graph.edges[held, wanted]["paths"].append(key)
            else:
                self.graph.add_edge(held, wanted, paths=[key])

    @property
    def n_channels(self) -> int:
        """Number of channels some path uses."""
        return self.graph.number_of_nodes()

    @property
    def n_dependencies(self) -> int:
        """Number of distinct dependency edges."""
        return self.graph.number_of_edges()

    def is_acyclic(self) -> bool:
        """Return True when no dependency cycle exists."""
        return nx.is_directed_acyclic_graph(self.graph)

    def shortest_cycle(self) -> tuple[Channel, ...]:
        """Return a shortest dependency cycle, or an empty tuple if none exists."""
        best: list[Channel] = []
        for component in nx.strongly_connected_components(self.graph):
            if len(component) < 2:  # noqa: PLR2004
                continue
            sub = self.graph.subgraph(component)
            for start in sorted(component):
                reach = nx.single_source_shortest_path(sub, start)
                for pred in sorted(sub.predecessors(start)):
                    if not best or len(reach[pred]) < len(best):
                        best = reach[pred]
        return tuple(best)

    def inducing_paths(self, cycle: tuple[Channel, ...]) -> tuple[PathKey, ...]:
        """Return every path behind some dependency of the cycle."""
        keys: set[PathKey] = set()
        for held, wanted in zip(cycle, (*cycle[1:], *cycle[:1]), strict=True):
            keys.update(self.graph.edges[held, wanted]["paths"])
        return tuple(sorted(keys))


def _iter_keyed_paths(
    layers: routing_base.LayerSet,
) -> Iterator[tuple[PathKey, routing_base.Path]]:
    for layer in layers.layers:
        for src, dst in sorted(layer.routes):
            yield (layer.index, src, dst), layer.routes[src, dst].path


def build_cdg(
    layers: routing_base.LayerSet,
    assignment: VlAssignment,
    topology: topology_base.Topology,
) -> ChannelDependencyGraph:
    """Build the dependency graph of every routed path under an assignment.

    Args:
        layers: The routing layers.
        assignment: VLs for every path.
        topology: The topology the layers route.

    Returns:
        The channel dependency graph.

    Raises:
        DeadlockSchemeError: If a path is not valid in the topology, has no
            VLs assigned, or uses a VL outside ``0..n_vls-1``.
    """
    cdg = ChannelDependencyGraph()
    for key, path in _iter_keyed_paths(layers):
        if path.length == 0:
            continue
        if not path.is_valid_in(topology):
            msg = f"path {key} {path.hops} is not valid in the topology"
            raise errors.DeadlockSchemeError(msg)
        vls = assignment.hop_vls.get(key)
        if vls is None or len(vls) != path.length:
            msg = f"path {key} with {path.length} hops has VLs {vls}"
            raise errors.DeadlockSchemeError(msg)
        if any(not 0 <= vl < assignment.n_vls for vl in vls):
            msg = f"path {key} uses VLs {vls} but only {assignment.n_vls} exist"
            raise errors.DeadlockSchemeError(msg)
        cdg.add_path(key, path.hops, vls)
    logger.debug(
        "CDG: %d channels, %d dependencies", cdg.n_channels, cdg.n_dependencies
    )
    return cdg


@dataclasses.dataclass(frozen=True)
class Verdict:
    """Result of a deadlock-freedom check.

    Attributes:
        is_deadlock_free: True when the dependency graph is acyclic.
        cycle: A shortest dependency cycle when one exists.
        paths: The ``(layer, src, dst)`` paths inducing the cycle.
    """

    is_deadlock_free: bool
    cycle: tuple[Channel, ...] = ()
    paths: tuple[PathKey, ...] = ()

    def to_dict(self) -> dict[str, object]:
        """Serialize for the report artifact."""
        return {
            "deadlock_free": self.is_deadlock_free,
            "cycle": [list(channel) for channel in self.cycle],
            "paths": [list(key) for key in self.paths],
        }


def verify_deadlock_free(
    layers: routing_base.LayerSet,
    assignment: VlAssignment,
    topology: topology_base.Topology,
) -> Verdict:
    """Check whether the routing under an assignment can deadlock.

    Raises:
        DeadlockSchemeError: If the assignment does not cover the layers.
    """
    cdg = build_cdg(layers, assignment, topology)
    if cdg.is_acyclic():
        return Verdict(is_deadlock_free=True)
    cycle = cdg.shortest_cycle()
    logger.warning("dependency cycle of %d channels found", len(cycle))
    return Verdict(is_deadlock_free=False, cycle=cycle, paths=cdg.inducing_paths(cycle))
