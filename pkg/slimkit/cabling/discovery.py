"""Fabric discovery dumps: parsing, canonical rendering and GUID bindings.

A dump is line oriented::

    # comment
    Switch 0xf452140300000001 ports 11
      [5] -> 0xf452140300000002[6]
      [8] -> 0xf45214030000001b[9] DOWN

Each ``Switch`` header opens a record; indented port entries name the peer
switch GUID and port. ``DOWN`` marks an inactive link. Every link must be
listed from both ends.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import logging
import re
from typing import TYPE_CHECKING, Final

from slimkit import errors

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    from slimkit.cabling import plan as cabling_plan

logger = logging.getLogger(__name__)

GUID_BASE: Final[int] = 0xF452140300000000

_HEADER: Final = re.compile(r"Switch\s+(0x[0-9a-fA-F]+)\s+ports\s+(\d+)\s*$")
_ENTRY: Final = re.compile(
    r"\s+\[(\d+)\]\s*->\s*(0x[0-9a-fA-F]+)\[(\d+)\](\s+DOWN)?\s*$"
)

PortRef = tuple[str, int]


@dataclasses.dataclass(frozen=True)
class PortPeer:
    """What one switch port reports at its far end."""

    guid: str
    port: int
    is_down: bool = False


@dataclasses.dataclass(frozen=True)
class SwitchRecord:
    """One discovered switch and its connected ports."""

    guid: str
    n_ports: int
    ports: dict[int, PortPeer] = dataclasses.field(default_factory=dict, hash=False)


@dataclasses.dataclass(frozen=True, order=True)
class DumpLink:
    """A discovered link, ``a < b``; down if either end reports it down."""

    a: PortRef
    b: PortRef
    is_down: bool = False


@dataclasses.dataclass(frozen=True)
class DiscoveryDump:
    """A parsed fabric keyed by switch GUID."""

    switches: dict[str, SwitchRecord] = dataclasses.field(
        default_factory=dict, hash=False
    )

    @property
    def links(self) -> tuple[DumpLink, ...]:
        """Every link once, sorted."""
        found: dict[tuple[PortRef, PortRef], bool] = {}
        for record in self.switches.values():
            for port, peer in record.ports.items():
                near, far = (record.guid, port), (peer.guid, peer.port)
                key = (near, far) if near < far else (far, near)
                found[key] = found.get(key, False) or peer.is_down
        return tuple(
            DumpLink(a, b, is_down) for (a, b), is_down in sorted(found.items())
        )

    def to_text(self) -> str:
        """Render the canonical dump: GUIDs and ports ascending."""
        lines = []
        for guid in sorted(self.switches):
            record = self.switches[guid]
            lines.append(f"Switch {guid} ports {record.n_ports}")
            for port in sorted(record.ports):
                peer = record.ports[port]
                suffix = " DOWN" if peer.is_down else ""
                lines.append(f"  [{port}] -> {peer.guid}[{peer.port}]{suffix}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_links(
        cls, n_ports: Mapping[str, int], links: Iterable[DumpLink]
    ) -> DiscoveryDump:
        """Build a dump with one record per GUID and both ends of every link."""
        ports: dict[str, dict[int, PortPeer]] = {guid: {} for guid in n_ports}
        for link in links:
            (guid_a, port_a), (guid_b, port_b) = link.a, link.b
            ports[guid_a][port_a] = PortPeer(guid_b, port_b, link.is_down)
            ports[guid_b][port_b] = PortPeer(guid_a, port_a, link.is_down)
        return cls(
            switches={
                guid: SwitchRecord(guid, n_ports[guid], ports[guid])
                for guid in sorted(n_ports)
            }
        )


@dataclasses.dataclass
class _Pending:
    guid: str
    n_ports: int
    line: int
    ports: dict[int, PortPeer] = dataclasses.field(default_factory=dict)
    port_lines: dict[int, int] = dataclasses.field(default_factory=dict)


def _read_records(text: str) -> dict[str, _Pending]:
    records: dict[str, _Pending] = {}
    current: _Pending | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if header := _HEADER.match(raw):
            guid = header.group(1).lower()
            if guid in records:
                msg = f"duplicate switch {guid}"
                raise errors.DumpSemanticError(msg, (records[guid].line, number))
            current = _Pending(guid, int(header.group(2)), number)
            records[guid] = current
            continue
        entry = _ENTRY.match(raw)
        if entry is None:
            column = len(raw) - len(raw.lstrip()) + 1
            msg = f"expected a Switch header or a port entry, got {stripped!r}"
            raise errors.DumpSyntaxError(msg, number, column)
        if current is None:
            msg = "port entry before any Switch header"
            raise errors.DumpSyntaxError(msg, number, raw.index("[") + 1)
        port = int(entry.group(1))
        if not 1 <= port <= current.n_ports:
            msg = f"port {port} outside 1..{current.n_ports}"
            raise errors.DumpSyntaxError(msg, number, entry.start(1) + 1)
        if port in current.ports:
            msg = f"switch {current.guid} port {port} listed twice"
            raise errors.DumpSemanticError(msg, (current.port_lines[port], number))
        current.ports[port] = PortPeer(
            entry.group(2).lower(), int(entry.group(3)), entry.group(4) is not None
        )
        current.port_lines[port] = number
    return records


def _check_symmetry(records: Mapping[str, _Pending]) -> None:
    for record in records.values():
        for port, peer in record.ports.items():
            line = record.port_lines[port]
            far = records.get(peer.guid)
            if far is None:
                msg = f"switch {record.guid} port {port} points at unknown {peer.guid}"
                raise errors.DumpSemanticError(msg, (line,))
            back = far.ports.get(peer.port)
            if back is None or (back.guid, back.port) != (record.guid, port):
                msg = (
                    f"{record.guid}[{port}] -> {peer.guid}[{peer.port}] "
                    "is not confirmed by the peer"
                )
                far_line = far.port_lines.get(peer.port, far.line)
                raise errors.DumpSemanticError(msg, tuple(sorted((line, far_line))))


def parse_discovery_dump(text: str) -> DiscoveryDump:
    """Parse a discovery dump.

    Args:
        text: Dump text in the line grammar above.

    Returns:
        The fabric, GUIDs lower-cased.

    Raises:
        DumpSyntaxError: On a line outside the grammar or a port out of range.
        DumpSemanticError: On duplicate switches or ports, peers that are not
            in the dump, or links only one end confirms.
    """
    records = _read_records(text)
    _check_symmetry(records)
    logger.debug("parsed discovery dump with %d switches", len(records))
    return DiscoveryDump(
        switches={
            guid: SwitchRecord(guid, pending.n_ports, dict(pending.ports))
            for guid, pending in sorted(records.items())
        }
    )


# ---------------------------------------------------------------------------
# GUID bindings
# ---------------------------------------------------------------------------


@dataclasses.dataclass(frozen=True)
class GuidBinding:
    """Map from switch GUID to plan switch id."""

    switches: dict[str, int] = dataclasses.field(default_factory=dict, hash=False)

    def guid_of(self, switch: int) -> str | None:
        """Return the GUID bound to a switch, if any."""
        for guid, bound in self.switches.items():
            if bound == switch:
                return guid
        return None

    def to_csv(self, plan: cabling_plan.CablingPlan) -> str:
        """Render as ``guid,label`` CSV."""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(("guid", "label"))
        for guid, switch in sorted(self.switches.items(), key=lambda item: item[1]):
            writer.writerow((guid, plan.label_of(switch)))
        return buffer.getvalue()


def default_binding(plan: cabling_plan.CablingPlan) -> GuidBinding:
    """Bind synthetic GUIDs ``GUID_BASE + switch id`` to every switch."""
    return GuidBinding(
        switches={
            f"0x{GUID_BASE + switch:016x}": switch for switch in range(plan.n_switches)
        }
    )


def parse_binding(text: str, plan: cabling_plan.CablingPlan) -> GuidBinding:
    """Read a ``guid,label`` CSV binding.

    Raises:
        ConfigError: On a missing column, an unknown label, or a label or
            GUID bound twice.
    """
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"guid", "label"} <= set(reader.fieldnames):
        msg = "binding needs guid and label columns"
        raise errors.ConfigError(msg)
    switches: dict[str, int] = {}
    for row in reader:
        guid = row["guid"].strip().lower()
        switch = plan.switch_of(row["label"].strip())
        if guid in switches or switch in switches.values():
            msg = f"binding row {guid},{row['label']} repeats a GUID or label"
            raise errors.ConfigError(msg)
        switches[guid] = switch
    return GuidBinding(switches=switches)


def render_dump(
    plan: cabling_plan.CablingPlan, binding: GuidBinding | None = None
) -> DiscoveryDump:
    """Build the dump a correctly wired fabric would report.

    Args:
        plan: The cabling plan.
        binding: GUIDs to use; synthetic ones when omitted.

    Returns:
        A dump with every planned cable up.

    Raises:
        ConfigError: If the binding leaves a switch unbound.
    """
    binding = binding or default_binding(plan)
    guids = {switch: guid for guid, switch in binding.switches.items()}
    missing = sorted(set(range(plan.n_switches)) - set(guids))
    if missing:
        msg = f"binding leaves {len(missing)} switches unbound, first {missing[0]}"
        raise errors.ConfigError(msg)
    links = sorted(
        DumpLink(*sorted((guids[switch], port) for switch, port in cable.ends))
        for cable in plan.cables
    )
    n_ports = {guids[switch]: plan.port_count(switch) for switch in guids}
    return DiscoveryDump.from_links(n_ports, links)
