"""Base abstractions for routing-layer builders.

A layer maps every ordered switch pair to one path. Within a layer, routing
is destination-based: the path from any switch toward a destination is the
switch's own route to that destination, so each ``(switch, destination)``
implies exactly one next hop.
"""

from __future__ import annotations

import abc
import dataclasses
import enum
import functools
import logging
from typing import TYPE_CHECKING, Any, ClassVar, Final

from slimkit import errors

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Mapping

    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)


class RouteOrigin(enum.StrEnum):
    """How a route entered its layer."""

    MINIMAL = "minimal"
    FOUND = "found"
    SUBPATH = "subpath"
    FALLBACK = "fallback"
    LAYER = "layer"


_FALLBACK_ORIGINS: Final[frozenset[RouteOrigin]] = frozenset(
    {RouteOrigin.SUBPATH, RouteOrigin.FALLBACK}
)


@dataclasses.dataclass(frozen=True)
class Path:
    """A loop-free switch sequence; ``hops[0]`` is the source."""

    hops: tuple[int, ...]

    @property
    def src(self) -> int:
        """First switch."""
        return self.hops[0]

    @property
    def dst(self) -> int:
        """Last switch."""
        return self.hops[-1]

    @property
    def length(self) -> int:
        """Number of inter-switch hops."""
        return len(self.hops) - 1

    @property
    def links(self) -> tuple[tuple[int, int], ...]:
        """Directed links in travel order."""
        return tuple(zip(self.hops, self.hops[1:], strict=False))

    def is_valid_in(self, topology: topology_base.Topology) -> bool:
        """Return True if hops are distinct and consecutive hops are linked."""
        return len(set(self.hops)) == len(self.hops) and all(
            topology.has_link(left, right) for left, right in self.links
        )


@dataclasses.dataclass(frozen=True)
class Route:
    """A layer's path for one ordered pair, tagged with its origin."""

    path: Path
    origin: RouteOrigin

    @property
    def is_fallback(self) -> bool:
        """True if the pair did not receive its own path in this layer."""
        return self.origin in _FALLBACK_ORIGINS


@dataclasses.dataclass(frozen=True)
class Layer:
    """One routing layer.

    Attributes:
        index: Position in the layer set; layer 0 is minimal routing.
        routes: ``(src, dst) -> Route`` for every ordered pair.
    """

    index: int
    routes: dict[tuple[int, int], Route] = dataclasses.field(
        default_factory=dict, hash=False
    )

    def path(self, src: int, dst: int) -> Path:
        """Return the path for an ordered pair; ``(src,)`` when src == dst."""
        if src == dst:
            return Path((src,))
        return self.routes[src, dst].path

    def next_hop(self, switch: int, dst: int) -> int | None:
        """Return the next switch toward dst, or None when already there."""
        if switch == dst:
            return None
        return self.routes[switch, dst].path.hops[1]


@dataclasses.dataclass(frozen=True)
class LayerSet:
    """Ordered routing layers over one topology.

    Attributes:
        n_switches: Switch count of the topology the layers route.
        layers: Layer 0 first.
        algorithm: Registry name of the builder that produced the layers.
        seed: Seed the builder was run with.
    """

    n_switches: int
    layers: tuple[Layer, ...]
    algorithm: str = "custom"
    seed: int = 0

    @property
    def n_layers(self) -> int:
        """Number of layers."""
        return len(self.layers)

    def path(self, layer: int, src: int, dst: int) -> Path:
        """Return the layer's path for an ordered pair."""
        return self.layers[layer].path(src, dst)

    def pair_paths(self, src: int, dst: int) -> list[Path]:
        """Return the pair's path in every layer, layer 0 first."""
        return [layer.path(src, dst) for layer in self.layers]

    def iter_paths(self) -> Iterator[tuple[int, Path]]:
        """Yield ``(layer index, path)`` for every routed ordered pair."""
        for layer in self.layers:
            for pair in sorted(layer.routes):
                yield layer.index, layer.routes[pair].path

    @functools.cached_property
    def max_length(self) -> int:
        """Longest path in any layer."""
        return max((path.length for _, path in self.iter_paths()), default=0)

    def check_consistency(self, topology: topology_base.Topology) -> None:
        """Verify every layer is complete, valid and destination-based.

        Raises:
            LayerGenerationError: On a missing pair, an invalid path, or a
                path whose suffix disagrees with the route of a switch it
                crosses.
        """
        for layer in self.layers:
            _check_layer(layer, topology)

    @classmethod
    def from_paths(
        cls,
        n_switches: int,
        layers: Iterable[Iterable[Iterable[int]]],
        *,
        algorithm: str = "custom",
    ) -> LayerSet:
        """Build a layer set from explicit hop lists, one list of paths per layer.

        Pairs a layer does not mention stay unrouted in it.
        """
        built = []
        for index, paths in enumerate(layers):
            routes = {}
            for hops in paths:
                path = Path(tuple(hops))
                origin = RouteOrigin.MINIMAL if index == 0 else RouteOrigin.LAYER
                routes[path.src, path.dst] = Route(path, origin)
            built.append(Layer(index=index, routes=routes))
        return cls(n_switches=n_switches, layers=tuple(built), algorithm=algorithm)

    def to_dict(self) -> dict[str, object]:
        """Serialize to the layers JSON body."""
        return {
            "n_layers": self.n_layers,
            "n_switches": self.n_switches,
            "algorithm": self.algorithm,
            "layers": [
                {
                    "id": layer.index,
                    "paths": [
                        {
                            "src": src,
                            "dst": dst,
                            "hops": list(layer.routes[src, dst].path.hops),
                            "fallback": layer.routes[src, dst].is_fallback,
                            "origin": layer.routes[src, dst].origin.value,
                        }
                        for src, dst in sorted(layer.routes)
                    ],
                }
                for layer in self.layers
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], seed: int = 0) -> LayerSet:
        """Rebuild a layer set from its JSON body.

        Raises:
            SchemaError: If a field is missing or malformed.
        """
        try:
            layers = tuple(
                Layer(
                    index=int(entry["id"]),
                    routes={
                        (int(item["src"]), int(item["dst"])): Route(
                            Path(tuple(int(hop) for hop in item["hops"])),
                            RouteOrigin(item["origin"]),
                        )
                        for item in entry["paths"]
                    },
                )
                for entry in data["layers"]
            )
        except (KeyError, TypeError, ValueError) as exc:
            msg = f"malformed layers document: {exc}"
            raise errors.SchemaError(msg) from exc
        return cls(
            n_switches=int(data.get("n_switches", 0)),
            layers=layers,
            algorithm=str(data.get("algorithm", "custom")),
            seed=seed,
        )


def _check_layer(layer: Layer, topology: topology_base.Topology) -> None:
    for (src, dst), route in layer.routes.items():
        path = route.path
        if (path.src, path.dst) != (src, dst) or not path.is_valid_in(topology):
            msg = f"layer {layer.index}: invalid path {path.hops} for ({src}, {dst})"
            raise errors.LayerGenerationError(msg, layer.index)
        for position, switch in enumerate(path.hops[1:-1], start=1):
            own = layer.routes.get((switch, dst))
            if own is None or own.path.hops != path.hops[position:]:
                msg = (
                    f"layer {layer.index}: path {path.hops} disagrees with the route "
                    f"of switch {switch} toward {dst}"
                )
                raise errors.LayerGenerationError(msg, layer.index)
    expected = topology.n_switches * (topology.n_switches - 1)
    if len(layer.routes) != expected:
        msg = f"layer {layer.index}: {len(layer.routes)} of {expected} pairs routed"
        raise errors.LayerGenerationError(msg, layer.index)


# ---------------------------------------------------------------------------
# Shared layer constructions
# ---------------------------------------------------------------------------


def tree_layer(
    index: int,
    n_switches: int,
    links: Iterable[tuple[int, int]],
    origin: RouteOrigin = RouteOrigin.LAYER,
) -> Layer:
    """Route every pair along per-destination BFS trees over the given links.

    The next hop toward a destination is the smallest-id neighbor one step
    closer to it, so routing ignores link weights.

    Raises:
        LayerGenerationError: If the links leave some pair disconnected.
    """
    adjacency: list[list[int]] = [[] for _ in range(n_switches)]
    for left, right in links:
        adjacency[left].append(right)
        adjacency[right].append(left)
    for row in adjacency:
        row.sort()
    routes: dict[tuple[int, int], Route] = {}
    for dst in range(n_switches):
        dist = {dst: 0}
        frontier = [dst]
        while frontier:
            following: list[int] = []
            for switch in frontier:
                for neighbor in adjacency[switch]:
                    if neighbor not in dist:
                        dist[neighbor] = dist[switch] + 1
                        following.append(neighbor)
            frontier = following
        if len(dist) != n_switches:
            msg = f"layer {index}: links leave switch {dst} unreachable"
            raise errors.LayerGenerationError(msg, index)
        for src in sorted(dist, key=lambda switch: (dist[switch], switch)):
            if src == dst:
                continue
            hop = next(nb for nb in adjacency[src] if dist[nb] == dist[src] - 1)
            tail = (dst,) if hop == dst else routes[hop, dst].path.hops
            routes[src, dst] = Route(Path((src, *tail)), origin)
    return Layer(index=index, routes=routes)


class LayerBuilder(abc.ABC):
    """Abstract base class for every routing-layer algorithm."""

    name: ClassVar[str]

    @abc.abstractmethod
    def build(
        self, topology: topology_base.Topology, n_layers: int, seed: int
    ) -> LayerSet:
        """Generate ``n_layers`` layers for the topology.

        Args:
            topology: A connected topology.
            n_layers: Number of layers, at least 1.
            seed: Seed for every random choice the algorithm makes.

        Returns:
            The layer set, layer 0 holding minimal paths.
        """

    def configure(
        self, options: Mapping[str, int | float | str | bool]
    ) -> LayerBuilder:
        """Return a builder with the given options applied.

        The default implementation ignores *options* and returns *self*.
        Builders with tunable parameters override this method.

        Args:
            options: Mapping of option names to values.

        Returns:
            A LayerBuilder instance (possibly new) with options applied.
        """
        return self


def require_buildable(topology: topology_base.Topology, n_layers: int) -> None:
    """Reject inputs no builder can route.

    Raises:
        LayerGenerationError: If n_layers < 1 or the topology is disconnected.
    """
    if n_layers < 1:
        msg = f"at least one layer is required, got {n_layers}"
        raise errors.LayerGenerationError(msg)
    if not topology.is_connected():
        msg = "cannot route a disconnected topology"
        raise errors.LayerGenerationError(msg)


class LinkWeights:
    """Endpoint routes carried by each directed link, summed over built layers."""

    def __init__(self, values: Mapping[tuple[int, int], int] | None = None) -> None:
        """Start from the given weights, or all zero."""
        self._values: dict[tuple[int, int], int] = dict(values or {})

    def __getitem__(self, link: tuple[int, int]) -> int:
        """Return the weight of a directed link; unseen links weigh 0."""
        return self._values.get(link, 0)

    def add(self, link: tuple[int, int], amount: int) -> None:
        """Increase the weight of a directed link."""
        self._values[link] = self._values.get(link, 0) + amount

    def path_weight(self, hops: tuple[int, ...]) -> int:
        """Return the summed weight of the links along hops."""
        return sum(self[link] for link in zip(hops, hops[1:], strict=False))

    def as_dict(self) -> dict[tuple[int, int], int]:
        """Return a copy of the nonzero weights."""
        return {link: value for link, value in self._values.items() if value}


def balanced_minimal_layer(
    topology: topology_base.Topology, weights: LinkWeights
) -> Layer:
    """Build layer 0: minimal paths chosen to keep link weights even.

    Destinations are handled in id order and sources by increasing distance.
    Each source extends the route of one neighbor that is a step closer,
    picking the lowest current path weight and then the lexicographically
    smallest hop sequence. Every chosen route adds ``p(src) * p(dst)`` to
    the weight of each of its links.
    """
    routes: dict[tuple[int, int], Route] = {}
    for dst in range(topology.n_switches):
        receivers = topology.switches[dst].endpoints
        sources = sorted(
            (src for src in range(topology.n_switches) if src != dst),
            key=lambda src: (topology.distance(src, dst), src),
        )
        for src in sources:
            gap = topology.distance(src, dst)
            candidates = [
                (src, dst) if hop == dst else (src, *routes[hop, dst].path.hops)
                for hop in topology.neighbors(src)
                if topology.distance(hop, dst) == gap - 1
            ]
            hops = min(candidates, key=lambda cand: (weights.path_weight(cand), cand))
            routes[src, dst] = Route(Path(hops), RouteOrigin.MINIMAL)
            load = topology.switches[src].endpoints * receivers
            for link in zip(hops, hops[1:], strict=False):
                weights.add(link, load)
    logger.debug("layer 0: %d minimal routes", len(routes))
    return Layer(index=0, routes=routes)
