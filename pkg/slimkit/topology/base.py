"""Core topology types shared by every builder.

Port numbering is global: on a switch with ``p`` endpoints, ports ``1..p``
face endpoints and the remaining ports face other switches in the order the
builder chose. Port 0 is the switch itself.
"""

from __future__ import annotations

import dataclasses
import enum
import functools
from typing import TYPE_CHECKING, Any

import networkx as nx

from slimkit import errors

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping


class TopologyKind(enum.StrEnum):
    """Topology families the builders produce."""

    SLIMFLY = "slimfly"
    FATTREE2 = "fattree2"
    FATTREE3 = "fattree3"
    HYPERX2 = "hyperx2"
    CUSTOM = "custom"


@dataclasses.dataclass(frozen=True, order=True)
class SwitchLabel:
    """Slim Fly label ``(subgroup, x or m, y or c)``."""

    subgroup: int
    x_or_m: int
    y_or_c: int


@dataclasses.dataclass(frozen=True)
class Switch:
    """One switch record.

    Attributes:
        switch_id: Dense id in ``0..n_switches-1``.
        endpoints: Number of endpoints attached to ports ``1..endpoints``.
        label: Slim Fly label, absent for other families.
        rack: Rack index, absent when the family has no rack layout.
    """

    switch_id: int
    endpoints: int
    label: SwitchLabel | None = None
    rack: int | None = None


@dataclasses.dataclass(frozen=True)
class SwitchPort:
    """A port on a switch that faces another switch."""

    switch: int
    port: int


@dataclasses.dataclass(frozen=True)
class EndpointPort:
    """A port on a switch that faces an endpoint; ``index`` is local to the switch."""

    switch: int
    index: int


@dataclasses.dataclass(frozen=True)
class TopologyCounts:
    """Endpoint, switch and link totals without a materialized graph."""

    endpoints: int
    switches: int
    links: int


def normalize_link(left: int, right: int) -> tuple[int, int]:
    """Return the undirected link ``(min, max)``."""
    return (left, right) if left < right else (right, left)


@dataclasses.dataclass(frozen=True)
class Topology:
    """An undirected switch graph with endpoint counts and port assignments.

    Attributes:
        kind: Family the topology was built as.
        switches: Switch records indexed by id.
        links: Undirected links as ``(low_id, high_id)`` pairs.
        link_ports: ``(switch, neighbor) -> port`` for every link direction.
        params: Construction parameters echoed into artifacts.
    """

    kind: TopologyKind
    switches: tuple[Switch, ...]
    links: frozenset[tuple[int, int]]
    link_ports: dict[tuple[int, int], int] = dataclasses.field(
        default_factory=dict, hash=False
    )
    params: dict[str, int | str | bool] = dataclasses.field(
        default_factory=dict, hash=False
    )

    def __post_init__(self) -> None:
        """Reject malformed graphs.

        Raises:
            ConstructionError: On self-loops, unknown switch ids, ids that are
                not dense, or link ports that collide with endpoint ports.
        """
        for position, switch in enumerate(self.switches):
            if switch.switch_id != position:
                msg = f"switch ids must be dense: {switch.switch_id} at {position}"
                raise errors.ConstructionError(msg)
        n_switches = len(self.switches)
        for left, right in self.links:
            if left == right:
                msg = f"self-loop on switch {left}"
                raise errors.ConstructionError(msg)
            if not (0 <= left < n_switches and 0 <= right < n_switches):
                msg = f"link ({left}, {right}) references an unknown switch"
                raise errors.ConstructionError(msg)
        if not self.link_ports:
            object.__setattr__(self, "link_ports", default_link_ports(self))
        for (switch, _), port in self.link_ports.items():
            if port <= self.switches[switch].endpoints:
                msg = f"switch {switch} port {port} is reserved for an endpoint"
                raise errors.ConstructionError(msg)

    @classmethod
    def from_links(
        cls,
        links: Iterable[tuple[int, int]],
        endpoints: int | Mapping[int, int] = 1,
        *,
        n_switches: int | None = None,
        kind: TopologyKind = TopologyKind.CUSTOM,
        params: Mapping[str, int | str | bool] | None = None,
    ) -> Topology:
        """Build a topology from an edge list.

        Args:
            links: Undirected links; duplicates in either orientation collapse.
            endpoints: Endpoints per switch, either uniform or per switch id.
            n_switches: Switch count; inferred from the largest id when omitted.
            kind: Family to record.
            params: Construction parameters to echo into artifacts.

        Returns:
            A Topology with default port numbering.
        """
        normalized = frozenset(normalize_link(left, right) for left, right in links)
        if n_switches is None:
            n_switches = 1 + max((max(link) for link in normalized), default=-1)
        switches = tuple(
            Switch(
                switch_id=switch_id,
                endpoints=(
                    endpoints
                    if isinstance(endpoints, int)
                    else endpoints.get(switch_id, 0)
                ),
            )
            for switch_id in range(n_switches)
        )
        return cls(
            kind=kind, switches=switches, links=normalized, params=dict(params or {})
        )

    # ------------------------------------------------------------------
    # Sizes
    # ------------------------------------------------------------------

    @property
    def n_switches(self) -> int:
        """Number of switches N_r."""
        return len(self.switches)

    @property
    def n_links(self) -> int:
        """Number of undirected inter-switch links."""
        return len(self.links)

    @functools.cached_property
    def n_endpoints(self) -> int:
        """Total endpoint count N."""
        return sum(switch.endpoints for switch in self.switches)

    @property
    def counts(self) -> TopologyCounts:
        """Endpoint, switch and link totals."""
        return TopologyCounts(
            endpoints=self.n_endpoints, switches=self.n_switches, links=self.n_links
        )

    # ------------------------------------------------------------------
    # Graph views
    # ------------------------------------------------------------------

    @functools.cached_property
    def graph(self) -> nx.Graph:
        """The switch graph as a networkx Graph; callers must not mutate it."""
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_switches))
        graph.add_edges_from(sorted(self.links))
        return graph

    @functools.cached_property
    def _neighbors(self) -> tuple[tuple[int, ...], ...]:
        adjacency: list[list[int]] = [[] for _ in range(self.n_switches)]
        for left, right in self.links:
            adjacency[left].append(right)
            adjacency[right].append(left)
        return tuple(tuple(sorted(row)) for row in adjacency)

    def neighbors(self, switch: int) -> tuple[int, ...]:
        """Return the neighbors of switch in ascending id order."""
        return self._neighbors[switch]

    def degree(self, switch: int) -> int:
        """Return the number of inter-switch links at switch."""
        return len(self._neighbors[switch])

    def has_link(self, left: int, right: int) -> bool:
        """Return True if left and right are directly linked."""
        return normalize_link(left, right) in self.links

    def is_connected(self) -> bool:
        """Return True if every switch reaches every other switch."""
        return self.n_switches > 0 and nx.is_connected(self.graph)

    @functools.cached_property
    def distances(self) -> tuple[tuple[int, ...], ...]:
        """All-pairs hop distances; unreachable pairs are -1."""
        table = [[-1] * self.n_switches for _ in range(self.n_switches)]
        for source, lengths in nx.all_pairs_shortest_path_length(self.graph):
            row = table[source]
            for target, length in lengths.items():
                row[target] = length
        return tuple(tuple(row) for row in table)

    def distance(self, source: int, target: int) -> int:
        """Return the hop distance between two switches, -1 if unreachable."""
        return self.distances[source][target]

    @functools.cached_property
    def diameter(self) -> int:
        """Largest switch-to-switch distance.

        Raises:
            ConstructionError: If the topology is disconnected.
        """
        if not self.is_connected():
            msg = "diameter is undefined for a disconnected topology"
            raise errors.ConstructionError(msg)
        return max(max(row) for row in self.distances)

    def girth(self) -> int | None:
        """Length of the shortest cycle, or None for a forest."""
        return nx.girth(self.graph) if self.links else None

    # ------------------------------------------------------------------
    # Ports and endpoints
    # ------------------------------------------------------------------

    def port_to(self, switch: int, neighbor: int) -> int:
        """Return the port on switch that faces neighbor.

        Raises:
            ConstructionError: If the two switches are not linked.
        """
        try:
            return self.link_ports[switch, neighbor]
        except KeyError:
            msg = f"switch {switch} has no link to switch {neighbor}"
            raise errors.ConstructionError(msg) from None

    @functools.cached_property
    def _peers(self) -> dict[tuple[int, int], SwitchPort]:
        return {
            (switch, port): SwitchPort(neighbor, self.link_ports[neighbor, switch])
            for (switch, neighbor), port in self.link_ports.items()
        }

    def peer(self, switch: int, port: int) -> SwitchPort | EndpointPort | None:
        """Return what sits behind ``(switch, port)``, or None for an unused port."""
        if 1 <= port <= self.switches[switch].endpoints:
            return EndpointPort(switch, port - 1)
        return self._peers.get((switch, port))

    def is_endpoint_port(self, switch: int, port: int) -> bool:
        """Return True if the port faces an endpoint."""
        return 1 <= port <= self.switches[switch].endpoints

    def max_port(self, switch: int) -> int:
        """Highest port number in use on switch."""
        link_ports = [
            port for (owner, _), port in self.link_ports.items() if owner == switch
        ]
        return max([self.switches[switch].endpoints, *link_ports])

    @functools.cached_property
    def endpoints(self) -> tuple[EndpointPort, ...]:
        """Every endpoint by switch id then local index; position is the global id."""
        return tuple(
            EndpointPort(switch.switch_id, index)
            for switch in self.switches
            for index in range(switch.endpoints)
        )

    @functools.cached_property
    def first_endpoint(self) -> tuple[int, ...]:
        """Global id of the first endpoint on each switch."""
        offsets = []
        running = 0
        for switch in self.switches:
            offsets.append(running)
            running += switch.endpoints
        return tuple(offsets)

    def endpoint_switch(self, endpoint: int) -> int:
        """Return the switch a global endpoint id is attached to."""
        return self.endpoints[endpoint].switch

    def endpoints_of(self, switch: int) -> range:
        """Global ids of the endpoints on switch."""
        start = self.first_endpoint[switch]
        return range(start, start + self.switches[switch].endpoints)

    # ------------------------------------------------------------------
    # Serialization
    # ------------------------------------------------------------------

    def to_dict(self) -> dict[str, object]:
        """Serialize to the topology JSON body."""
        return {
            "family": self.kind.value,
            "params": dict(sorted(self.params.items())),
            "switches": [
                {
                    "id": switch.switch_id,
                    "endpoints": switch.endpoints,
                    "label": None
                    if switch.label is None
                    else dataclasses.astuple(switch.label),
                    "rack": switch.rack,
                }
                for switch in self.switches
            ],
            "links": [
                [
                    left,
                    right,
                    self.link_ports[left, right],
                    self.link_ports[right, left],
                ]
                for left, right in sorted(self.links)
            ],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> Topology:
        """Rebuild a topology from its JSON body.

        Raises:
            SchemaError: If a field is missing or malformed.
            ConstructionError: If the graph itself is invalid.
        """
        try:
            switches = tuple(
                Switch(
                    switch_id=int(entry["id"]),
                    endpoints=int(entry["endpoints"]),
                    label=None
                    if entry.get("label") is None
                    else SwitchLabel(*(int(part) for part in entry["label"])),
                    rack=None if entry.get("rack") is None else int(entry["rack"]),
                )
                for entry in data["switches"]
            )
            link_ports: dict[tuple[int, int], int] = {}
            for left, right, left_port, right_port in data["links"]:
                link_ports[int(left), int(right)] = int(left_port)
                link_ports[int(right), int(left)] = int(right_port)
            kind = TopologyKind(data["family"])
            params = dict(data.get("params", {}))
        except (KeyError, TypeError, ValueError) as exc:
            msg = f"malformed topology document: {exc}"
            raise errors.SchemaError(msg) from exc
        return cls(
            kind=kind,
            switches=switches,
            links=frozenset(normalize_link(*link) for link in link_ports),
            link_ports=link_ports,
            params=params,
        )


def default_link_ports(topology: Topology) -> dict[tuple[int, int], int]:
    """Number link ports after the endpoint ports in ascending neighbor order."""
    adjacency: dict[int, list[int]] = {}
    for left, right in topology.links:
        adjacency.setdefault(left, []).append(right)
        adjacency.setdefault(right, []).append(left)
    ports: dict[tuple[int, int], int] = {}
    for switch, neighbors in adjacency.items():
        first = topology.switches[switch].endpoints + 1
        for offset, neighbor in enumerate(sorted(neighbors)):
            ports[switch, neighbor] = first + offset
    return ports
