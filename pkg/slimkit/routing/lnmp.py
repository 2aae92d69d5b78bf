"""Layered near-minimal multipath routing.

Layer 0 holds weight-balanced minimal paths. Every further layer is filled
pair by pair in priority order: a pair that has received few non-minimal
paths so far goes first and gets the lightest 3-hop path that agrees with
the forwarding decisions already made in the layer. Inserting a path binds
every unbound switch on it to the path's suffix, so the layer stays
destination-based. Pairs left over fall back to a route through a neighbor.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, ClassVar

import numpy as np

from slimkit.routing import base

if TYPE_CHECKING:
    from collections.abc import Collection, Mapping

    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)

Pair = tuple[int, int]
Routes = dict[Pair, base.Route]


class PairPriorities:
    """Per ordered pair, how many layers gave it a longer-than-minimal path."""

    def __init__(self, n_switches: int) -> None:
        """Start every ordered pair at count 0."""
        self._counts: dict[Pair, int] = {
            (src, dst): 0
            for src in range(n_switches)
            for dst in range(n_switches)
            if src != dst
        }

    def count(self, pair: Pair) -> int:
        """Return the pair's count."""
        return self._counts[pair]

    def increment(self, pair: Pair) -> None:
        """Lower the pair's priority by one step."""
        self._counts[pair] += 1

    def as_dict(self) -> dict[Pair, int]:
        """Return a copy of every count."""
        return dict(self._counts)

    def snapshot(self, rng: np.random.Generator) -> list[Pair]:
        """Return all pairs by ascending count, shuffled within each count."""
        levels: dict[int, list[Pair]] = {}
        for pair in sorted(self._counts):
            levels.setdefault(self._counts[pair], []).append(pair)
        order: list[Pair] = []
        for level in sorted(levels):
            members = levels[level]
            order.extend(members[idx] for idx in rng.permutation(len(members)))
        return order


def _agrees(routes: Mapping[Pair, base.Route], switch: int, hop: int, dst: int) -> bool:
    bound = routes.get((switch, dst))
    return bound is None or bound.path.hops[1] == hop


def find_path(
    topology: topology_base.Topology,
    weights: base.LinkWeights,
    pair: Pair,
    routes: Mapping[Pair, base.Route],
) -> base.Path | None:
    """Return the lightest valid 3-hop path for a pair, or None.

    A candidate ``src -> a -> b -> dst`` is valid when each of src, a and b
    is either unbound toward dst in this layer or already forwards to the
    next switch of the candidate.

    Args:
        topology: The switch graph.
        weights: Current link weights.
        pair: ``(src, dst)`` with src != dst.
        routes: Routes already placed in the layer being built.

    Returns:
        The valid candidate with the smallest weight sum, ties broken by the
        smallest hop sequence; None when no candidate is valid.
    """
    src, dst = pair
    candidates: list[tuple[int, ...]] = []
    for first in topology.neighbors(src):
        if first == dst or not _agrees(routes, src, first, dst):
            continue
        for second in topology.neighbors(first):
            if second in {src, dst} or not topology.has_link(second, dst):
                continue
            if not _agrees(routes, first, second, dst):
                continue
            if _agrees(routes, second, dst, dst):
                candidates.append((src, first, second, dst))
    if not candidates:
        return None
    best = min(candidates, key=lambda hops: (weights.path_weight(hops), hops))
    return base.Path(best)


def update_weights(
    path: base.Path,
    weights: base.LinkWeights,
    topology: topology_base.Topology,
    senders: Collection[int] | None = None,
) -> base.LinkWeights:
    """Add the endpoint routes a newly placed path carries to its links.

    The i-th link carries traffic from every sender among the first i
    switches of the path to every endpoint of the last switch.

    Args:
        path: The placed path.
        weights: Weights to update in place.
        topology: Supplies endpoint counts.
        senders: Switches whose route became this path's suffix; all
            switches but the last when omitted.

    Returns:
        The updated weights.
    """
    receivers = topology.switches[path.dst].endpoints
    active = set(path.hops[:-1]) if senders is None else set(senders)
    carried = 0
    for left, right in path.links:
        if left in active:
            carried += topology.switches[left].endpoints
        weights.add((left, right), carried * receivers)
    return weights


def update_priorities(
    path: base.Path,
    priorities: PairPriorities,
    topology: topology_base.Topology,
    bound: Collection[int] | None = None,
    counted: set[Pair] | None = None,
) -> PairPriorities:
    """Lower the priority of pairs that just received a longer-than-minimal path.

    Args:
        path: The newly inserted path.
        priorities: Priorities to update in place.
        topology: Supplies minimal distances.
        bound: Switches newly bound to the path's suffix; all but the last
            when omitted.
        counted: Pairs already counted in this layer; updated in place.

    Returns:
        The updated priorities.
    """
    dst = path.dst
    active = set(path.hops[:-1]) if bound is None else set(bound)
    seen = counted if counted is not None else set()
    for position, switch in enumerate(path.hops[:-1]):
        pair = (switch, dst)
        if switch not in active or pair in seen:
            continue
        if path.length - position > topology.distance(switch, dst):
            priorities.increment(pair)
            seen.add(pair)
    return priorities


class LayerGenerator:
    """Stateful layer construction; exposes weights and priorities between layers."""

    def __init__(self, topology: topology_base.Topology, seed: int) -> None:
        """Prepare an empty generator.

        Args:
            topology: A connected topology.
            seed: Seed for the pair-order shuffles.
        """
        self.topology = topology
        self.rng = np.random.default_rng(seed)
        self.weights = base.LinkWeights()
        self.priorities = PairPriorities(topology.n_switches)
        self.layers: list[base.Layer] = []

    def next_layer(self) -> base.Layer:
        """Build, record and return the next layer."""
        if not self.layers:
            layer = base.balanced_minimal_layer(self.topology, self.weights)
        else:
            layer = self._multipath_layer(len(self.layers))
        self.layers.append(layer)
        return layer

    def insert(self, path: base.Path, routes: Routes) -> list[int]:
        """Bind every unbound switch on path to its suffix; return those switches."""
        dst = path.dst
        newly: list[int] = []
        for position, switch in enumerate(path.hops[:-1]):
            if (switch, dst) in routes:
                continue
            origin = (
                base.RouteOrigin.FOUND if position == 0 else base.RouteOrigin.SUBPATH
            )
            routes[switch, dst] = base.Route(base.Path(path.hops[position:]), origin)
            newly.append(switch)
        return newly

    def _multipath_layer(self, index: int) -> base.Layer:
        topology = self.topology
        routes: Routes = {}
        counted: set[Pair] = set()
        found = 0
        for pair in self.priorities.snapshot(self.rng):
            if pair in routes or topology.distance(*pair) < 2:  # noqa: PLR2004
                continue
            path = find_path(topology, self.weights, pair, routes)
            if path is None:
                continue
            newly = self.insert(path, routes)
            update_weights(path, self.weights, topology, newly)
            update_priorities(path, self.priorities, topology, newly, counted)
            found += 1
        fallbacks = self._fill_fallback(routes)
        logger.info(
            "layer %d: %d found paths, %d fallback routes", index, found, fallbacks
        )
        return base.Layer(index=index, routes=routes)

    def _fill_fallback(self, routes: Routes) -> int:
        """Route every unbound pair through its best already-routed neighbor."""
        topology = self.topology
        filled = 0
        for dst in range(topology.n_switches):
            sources = sorted(
                (
                    src
                    for src in range(topology.n_switches)
                    if src != dst and (src, dst) not in routes
                ),
                key=lambda src: (topology.distance(src, dst), src),
            )
            for src in sources:
                candidates = [
                    (src, dst) if hop == dst else (src, *routes[hop, dst].path.hops)
                    for hop in topology.neighbors(src)
                    if hop == dst or (hop, dst) in routes
                ]
                hops = min(
                    candidates,
                    key=lambda cand: (len(cand), self.weights.path_weight(cand), cand),
                )
                path = base.Path(hops)
                routes[src, dst] = base.Route(path, base.RouteOrigin.FALLBACK)
                update_weights(path, self.weights, topology, (src,))
                filled += 1
        return filled


def generate_layers(
    topology: topology_base.Topology, n_layers: int, seed: int
) -> base.LayerSet:
    """Generate layered near-minimal multipath routing.

    Args:
        topology: A connected topology.
        n_layers: Number of layers, at least 1.
        seed: Seed for every shuffle.

    Returns:
        The layer set.

    Raises:
        LayerGenerationError: If n_layers < 1 or the topology is disconnected.
    """
    base.require_buildable(topology, n_layers)
    generator = LayerGenerator(topology, seed)
    for _ in range(n_layers):
        generator.next_layer()
    return base.LayerSet(
        n_switches=topology.n_switches,
        layers=tuple(generator.layers),
        algorithm=LayeredMultipath.name,
        seed=seed,
    )


class LayeredMultipath(base.LayerBuilder):
    """Priority-driven 3-hop layers on top of balanced minimal routing."""

    name: ClassVar[str] = "lnmp"

    def build(
        self, topology: topology_base.Topology, n_layers: int, seed: int
    ) -> base.LayerSet:
        """Generate the layers with generate_layers."""
        return generate_layers(topology, n_layers, seed)
