"""DFSSSP-style virtual lane placement.

Paths are placed one at a time, in ``(layer, src, dst)`` order, on the
lowest VL whose dependency graph stays acyclic. When VLs are left over,
the busiest VL is split into an empty one until none remain empty.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING

import networkx as nx

from slimkit import errors
from slimkit.deadlock import cdg

if TYPE_CHECKING:
    from slimkit.routing import base as routing_base
    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)

_Link = tuple[int, int]


class _LaneGraph:
    """Link dependencies on one VL."""

    def __init__(self) -> None:
        self.graph: nx.DiGraph = nx.DiGraph()

    def can_take(self, edges: list[tuple[_Link, _Link]]) -> bool:
        """Return True if adding edges keeps the graph acyclic."""
        added: list[tuple[_Link, _Link]] = []
        closes_cycle = False
        for held, wanted in edges:
            if self.graph.has_edge(held, wanted):
                continue
            if self.graph.has_node(wanted) and self.graph.has_node(held):
                closes_cycle = nx.has_path(self.graph, wanted, held)
            if closes_cycle:
                break
            self.graph.add_edge(held, wanted)
            added.append((held, wanted))
        self.graph.remove_edges_from(added)
        return not closes_cycle

    def take(self, edges: list[tuple[_Link, _Link]]) -> None:
        """Add the dependency edges of one path."""
        self.graph.add_edges_from(edges)


def _dependencies(path: routing_base.Path) -> list[tuple[_Link, _Link]]:
    links = path.links
    return list(zip(links, links[1:], strict=False))


def assign_vls_dfsssp(
    layers: routing_base.LayerSet, topology: topology_base.Topology, n_vls: int
) -> cdg.VlAssignment:
    """Place every routed path on one VL so that no VL has a dependency cycle.

    Args:
        layers: The routing layers.
        topology: Supplies endpoint counts for balancing.
        n_vls: Number of VLs available, at least 1.

    Returns:
        A per-path assignment.

    Raises:
        DeadlockSchemeError: If n_vls < 1.
        VlExhaustedError: If some path fits on no VL; the error names it.
    """
    if n_vls < 1:
        msg = f"at least one VL is required, got {n_vls}"
        raise errors.DeadlockSchemeError(msg)
    lanes = [_LaneGraph() for _ in range(n_vls)]
    placed: dict[cdg.PathKey, int] = {}
    lengths: dict[cdg.PathKey, int] = {}
    for layer in layers.layers:
        for src, dst in sorted(layer.routes):
            key = (layer.index, src, dst)
            path = layer.routes[src, dst].path
            edges = _dependencies(path)
            fitting = (idx for idx, lane in enumerate(lanes) if lane.can_take(edges))
            vl = next(fitting, None)
            if vl is None:
                msg = f"no VL of {n_vls} takes path {path.hops} in layer {layer.index}"
                raise errors.VlExhaustedError(msg, key)
            lanes[vl].take(edges)
            placed[key] = vl
            lengths[key] = path.length
    used = max(placed.values(), default=0) + 1
    logger.info("placed %d paths on %d of %d VLs", len(placed), used, n_vls)
    _rebalance(placed, topology, used, n_vls)
    return cdg.VlAssignment(
        mode=cdg.AssignmentMode.PER_PATH,
        n_vls=n_vls,
        hop_vls={
            key: (vl,) * lengths[key] for key, vl in placed.items() if lengths[key]
        },
    )


def _rebalance(
    placed: dict[cdg.PathKey, int],
    topology: topology_base.Topology,
    used: int,
    n_vls: int,
) -> None:
    """Move every second path of the heaviest VL to an empty VL while one exists.

    Both halves of an acyclic VL stay acyclic.
    """

    def load(key: cdg.PathKey) -> int:
        _, src, dst = key
        return topology.switches[src].endpoints * topology.switches[dst].endpoints

    for empty in range(used, n_vls):
        totals = dict.fromkeys(range(empty), 0)
        for key, vl in placed.items():
            totals[vl] += load(key)
        heaviest = max(totals, key=lambda vl: (totals[vl], -vl))
        members = sorted(key for key, vl in placed.items() if vl == heaviest)
        for key in members[1::2]:
            placed[key] = empty
        logger.debug(
            "moved %d paths from VL %d to VL %d", len(members) // 2, heaviest, empty
        )
