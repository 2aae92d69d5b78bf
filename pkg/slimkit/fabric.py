"""InfiniBand-style addressing and forwarding for routing layers.

Every switch gets one LID; every endpoint gets an aligned block of
``2**lmc`` consecutive LIDs. A packet sent to ``base + offset`` follows
routing layer ``offset`` (offsets past the last layer follow layer 0),
so a sender picks its layer by picking the destination LID.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
from typing import TYPE_CHECKING, Final

from slimkit import errors
from slimkit.routing import base as routing_base
from slimkit.topology import base as topology_base
from slimkit.topology import scalability

if TYPE_CHECKING:
    from collections.abc import Iterator

logger = logging.getLogger(__name__)

DEFAULT_HOP_LIMIT: Final[int] = 8
SWITCH_PORT: Final[int] = 0


class LidKind(enum.StrEnum):
    """What a LID addresses."""

    SWITCH = "switch"
    ENDPOINT = "endpoint"


@dataclasses.dataclass(frozen=True)
class LidOwner:
    """The entity behind a LID and the offset into its block."""

    kind: LidKind
    entity: int
    offset: int = 0


@dataclasses.dataclass(frozen=True)
class LidAssignment:
    """LIDs for every switch and endpoint.

    Attributes:
        lmc: LID mask control; each endpoint holds ``2**lmc`` LIDs.
        switch_lids: LID of each switch, indexed by switch id.
        endpoint_bases: Base LID of each endpoint, indexed by global id.
    """

    lmc: int
    switch_lids: tuple[int, ...]
    endpoint_bases: tuple[int, ...]

    @property
    def block(self) -> int:
        """LIDs per endpoint."""
        return 1 << self.lmc

    @property
    def n_assigned(self) -> int:
        """Number of LIDs handed out."""
        return len(self.switch_lids) + len(self.endpoint_bases) * self.block

    @property
    def max_lid(self) -> int:
        """Highest LID in use."""
        if self.endpoint_bases:
            return self.endpoint_bases[-1] + self.block - 1
        return max(self.switch_lids, default=0)

    def lid_of(self, endpoint: int, offset: int = 0) -> int:
        """Return the LID addressing endpoint at the given block offset.

        Raises:
            FabricError: If offset is outside the block.
        """
        if not 0 <= offset < self.block:
            msg = f"offset {offset} outside a block of {self.block} LIDs"
            raise errors.FabricError(msg)
        return self.endpoint_bases[endpoint] + offset

    def owner(self, lid: int) -> LidOwner | None:
        """Return who a LID addresses, or None for an unassigned LID."""
        if 1 <= lid <= len(self.switch_lids):
            return LidOwner(LidKind.SWITCH, lid - 1)
        if not self.endpoint_bases or lid < self.endpoint_bases[0]:
            return None
        endpoint, offset = divmod(lid - self.endpoint_bases[0], self.block)
        if endpoint >= len(self.endpoint_bases):
            return None
        return LidOwner(LidKind.ENDPOINT, endpoint, offset)

    def rows(self) -> list[tuple[int, str, int, int]]:
        """Return ``(entity, kind, base_lid, lmc_block)`` rows, switches first."""
        switch_rows = [
            (switch, LidKind.SWITCH.value, lid, 1)
            for switch, lid in enumerate(self.switch_lids)
        ]
        endpoint_rows = [
            (endpoint, LidKind.ENDPOINT.value, lid, self.block)
            for endpoint, lid in enumerate(self.endpoint_bases)
        ]
        return switch_rows + endpoint_rows

    def to_dict(self) -> dict[str, object]:
        """Serialize to the LID-map JSON body."""
        return {
            "lmc": self.lmc,
            "switch_lids": list(self.switch_lids),
            "endpoint_bases": list(self.endpoint_bases),
        }


def assign_lids(topology: topology_base.Topology, lmc: int) -> LidAssignment:
    """Assign LIDs: switches get 1..N_r, then endpoints get aligned blocks.

    Endpoint blocks follow switch-id then endpoint-index order.

    Args:
        topology: The topology to address.
        lmc: LID mask control, 0 to 7.

    Returns:
        The assignment.

    Raises:
        ConfigError: If lmc is outside 0..7.
        CapacityError: If the LIDs do not fit the unicast range.
    """
    if not 0 <= lmc <= scalability.MAX_LMC:
        msg = f"lmc must be in 0..{scalability.MAX_LMC}, got {lmc}"
        raise errors.ConfigError(msg)
    block = 1 << lmc
    n_switches = topology.n_switches
    first = -(-(n_switches + 1) // block) * block
    top = first + topology.n_endpoints * block - 1
    # UNICAST_LID_LIMIT + 1 is a multiple of every block, so padding never
    # pushes a layout within the N * block + N_r budget out of range.
    if top > scalability.UNICAST_LID_LIMIT:
        needed = topology.n_endpoints * block + n_switches
        msg = (
            f"{needed} LIDs needed at lmc={lmc} but only "
            f"{scalability.UNICAST_LID_LIMIT} exist; short by "
            f"{needed - scalability.UNICAST_LID_LIMIT}"
        )
        raise errors.CapacityError(msg)
    lids = LidAssignment(
        lmc=lmc,
        switch_lids=tuple(range(1, n_switches + 1)),
        endpoint_bases=tuple(
            first + endpoint * block for endpoint in range(topology.n_endpoints)
        ),
    )
    logger.info("assigned %d LIDs up to %d", lids.n_assigned, lids.max_lid)
    return lids


@dataclasses.dataclass(frozen=True)
class ForwardingTables:
    """One linear forwarding table per switch.

    Attributes:
        lids: The LID assignment the tables address.
        n_layers: Routing layers the tables encode.
        lfts: ``DLID -> out-port`` per switch, indexed by switch id.
    """

    lids: LidAssignment
    n_layers: int
    lfts: tuple[dict[int, int], ...] = dataclasses.field(default=(), hash=False)

    def layer_of(self, lid: int) -> int | None:
        """Return the routing layer a destination LID selects."""
        owner = self.lids.owner(lid)
        if owner is None:
            return None
        if owner.kind is LidKind.SWITCH:
            return 0
        return owner.offset if owner.offset < self.n_layers else 0

    def iter_entries(self) -> Iterator[tuple[int, int, int]]:
        """Yield ``(switch, dlid, port)`` in switch then DLID order."""
        for switch, lft in enumerate(self.lfts):
            for dlid in sorted(lft):
                yield switch, dlid, lft[dlid]

    def dump_text(self) -> str:
        """Render the text LFT dump, one entry per line."""
        return "".join(
            f"switch {switch}: {dlid:#06x} -> port {port}\n"
            for switch, dlid, port in self.iter_entries()
        )

    def to_dict(self) -> dict[str, object]:
        """Serialize to the LFT JSON mirror."""
        return {
            "lmc": self.lids.lmc,
            "n_layers": self.n_layers,
            "switches": [
                {
                    "switch": switch,
                    "entries": {f"{dlid:#06x}": lft[dlid] for dlid in sorted(lft)},
                }
                for switch, lft in enumerate(self.lfts)
            ],
        }


def populate_lfts(
    layers: routing_base.LayerSet,
    lids: LidAssignment,
    topology: topology_base.Topology,
) -> ForwardingTables:
    """Fill every switch's LFT from the routing layers.

    Entry ``base(d) + l`` forwards along layer l toward the switch of
    endpoint d, then out of d's endpoint port; offsets past the last layer
    use layer 0. Switch LIDs are routed with layer 0 and terminate on
    port 0 of the addressed switch.

    Args:
        layers: Destination-consistent routing layers.
        lids: The LID assignment.
        topology: The topology the layers route.

    Returns:
        The forwarding tables.

    Raises:
        ConfigError: If there are more layers than LIDs per endpoint.
        FabricError: If some layer is not destination-consistent.
    """
    if layers.n_layers > lids.block:
        needed = (layers.n_layers - 1).bit_length()
        msg = f"{layers.n_layers} layers need lmc >= {needed}, got {lids.lmc}"
        raise errors.ConfigError(msg)
    try:
        layers.check_consistency(topology)
    except errors.LayerGenerationError as exc:
        msg = f"layers cannot be expressed as forwarding tables: {exc}"
        raise errors.FabricError(msg) from exc
    lfts: list[dict[int, int]] = []
    for switch in range(topology.n_switches):
        lft: dict[int, int] = {}
        for target, lid in enumerate(lids.switch_lids):
            lft[lid] = _out_port(layers.layers[0], topology, switch, target)
        for endpoint, endpoint_port in enumerate(topology.endpoints):
            for offset in range(lids.block):
                layer = layers.layers[offset if offset < layers.n_layers else 0]
                if endpoint_port.switch == switch:
                    port = endpoint_port.index + 1
                else:
                    port = _out_port(layer, topology, switch, endpoint_port.switch)
                lft[lids.endpoint_bases[endpoint] + offset] = port
        lfts.append(lft)
    logger.info(
        "populated %d LFTs with %d entries each", len(lfts), len(lfts[0]) if lfts else 0
    )
    return ForwardingTables(lids=lids, n_layers=layers.n_layers, lfts=tuple(lfts))


def _out_port(
    layer: routing_base.Layer,
    topology: topology_base.Topology,
    switch: int,
    target: int,
) -> int:
    hop = layer.next_hop(switch, target)
    return SWITCH_PORT if hop is None else topology.port_to(switch, hop)


@dataclasses.dataclass(frozen=True)
class Walk:
    """A packet's trip through the forwarding tables.

    Attributes:
        switches: Switches visited, the source's switch first.
        layer: Routing layer the DLID selected.
        destination: The LID's owner.
    """

    switches: tuple[int, ...]
    layer: int
    destination: LidOwner

    @property
    def path(self) -> routing_base.Path:
        """The switch path walked."""
        return routing_base.Path(self.switches)


def walk_route(
    src_endpoint: int,
    dlid: int,
    tables: ForwardingTables,
    topology: topology_base.Topology,
    hop_limit: int = DEFAULT_HOP_LIMIT,
) -> Walk:
    """Follow the LFTs from an endpoint until the DLID's owner is reached.

    Args:
        src_endpoint: Global id of the sending endpoint.
        dlid: Destination LID.
        tables: The forwarding tables.
        topology: Supplies port peers.
        hop_limit: Inter-switch hops allowed before a loop is declared.

    Returns:
        The walk.

    Raises:
        FabricError: If the DLID is unassigned.
        DeadEndError: If a switch has no entry for the DLID or forwards it
            to an unused port or the wrong endpoint.
        ForwardingLoopError: If the walk exceeds hop_limit.
    """
    owner = tables.lids.owner(dlid)
    layer = tables.layer_of(dlid)
    if owner is None or layer is None:
        msg = f"LID {dlid:#06x} is not assigned"
        raise errors.FabricError(msg)
    switch = topology.endpoint_switch(src_endpoint)
    visited = [switch]
    while True:
        port = tables.lfts[switch].get(dlid)
        if port is None:
            msg = f"switch {switch} has no entry for LID {dlid:#06x}"
            raise errors.DeadEndError(msg)
        if _is_delivered(owner, switch, port, topology):
            return Walk(switches=tuple(visited), layer=layer, destination=owner)
        peer = topology.peer(switch, port) if port != SWITCH_PORT else None
        if not isinstance(peer, topology_base.SwitchPort):
            msg = f"switch {switch} sends LID {dlid:#06x} to port {port}, a dead end"
            raise errors.DeadEndError(msg)
        switch = peer.switch
        visited.append(switch)
        if len(visited) - 1 > hop_limit:
            msg = f"LID {dlid:#06x} loops: {visited}"
            raise errors.ForwardingLoopError(msg)


def _is_delivered(
    owner: LidOwner, switch: int, port: int, topology: topology_base.Topology
) -> bool:
    if owner.kind is LidKind.SWITCH:
        return port == SWITCH_PORT and switch == owner.entity
    peer = topology.peer(switch, port)
    if not isinstance(peer, topology_base.EndpointPort):
        return False
    return topology.first_endpoint[switch] + peer.index == owner.entity


def verify_tables(
    layers: routing_base.LayerSet,
    tables: ForwardingTables,
    topology: topology_base.Topology,
) -> int:
    """Walk every (source, destination, layer) and compare with the layers.

    Returns:
        The number of walks checked.

    Raises:
        FabricError: If a walk strays from its layer path; walk errors
            propagate unchanged.
    """
    checked = 0
    for src in range(topology.n_endpoints):
        src_switch = topology.endpoint_switch(src)
        for dst in range(topology.n_endpoints):
            dst_switch = topology.endpoint_switch(dst)
            for layer in range(tables.n_layers):
                walk = walk_route(src, tables.lids.lid_of(dst, layer), tables, topology)
                expected = layers.path(layer, src_switch, dst_switch)
                if walk.path != expected:
                    msg = (
                        f"endpoint {src} -> {dst} layer {layer}: walked "
                        f"{walk.switches}, layer path is {expected.hops}"
                    )
                    raise errors.FabricError(msg)
                checked += 1
    logger.info("verified %d route walks", checked)
    return checked


def layer_port_rows(
    layers: routing_base.LayerSet, topology: topology_base.Topology
) -> list[tuple[int, int, int, int]]:
    """Return ``(layer, switch, dest, out_port)`` for every routed pair."""
    rows: list[tuple[int, int, int, int]] = []
    for layer in layers.layers:
        for src, dst in sorted(layer.routes):
            hop = layer.routes[src, dst].path.hops[1]
            rows.append((layer.index, src, dst, topology.port_to(src, hop)))
    return rows
