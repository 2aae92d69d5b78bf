"""Deadlock freedom from a proper switch coloring.

Every path has at most three inter-switch hops. A packet's SL is the color
of the second switch on its path. A switch then tells the hop position from
local information alone: a packet arriving from an endpoint is on its first
hop, a packet whose SL equals the switch's own color is on its second, and
any other packet is on its third. Each hop position travels on its own VL
subset, so dependencies only ever point from a lower position to a higher
one and the dependency graph is acyclic.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
from typing import TYPE_CHECKING, Final

import networkx as nx

from slimkit import errors
from slimkit.deadlock import cdg

if TYPE_CHECKING:
    from slimkit.routing import base as routing_base
    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)

MAX_SLS: Final[int] = 16
MIN_VLS: Final[int] = 3
MAX_HOPS: Final[int] = 3


class PortClass(enum.StrEnum):
    """What a switch port is attached to."""

    ENDPOINT = "endpoint"
    SWITCH = "switch"


@dataclasses.dataclass(frozen=True)
class SwitchColoring:
    """A switch-to-SL map.

    Attributes:
        colors: ``switch -> color``.
        n_sls: SLs available.
    """

    colors: dict[int, int] = dataclasses.field(default_factory=dict, hash=False)
    n_sls: int = MAX_SLS

    @property
    def n_colors(self) -> int:
        """Number of distinct colors used."""
        return len(set(self.colors.values()))

    def is_proper(self, topology: topology_base.Topology) -> bool:
        """Return True if no link joins two switches of the same color."""
        colors = self.colors
        return all(colors[left] != colors[right] for left, right in topology.links)


def color_switches(topology: topology_base.Topology, n_sls: int) -> SwitchColoring:
    """Color switches greedily, largest degree first.

    Args:
        topology: The switch graph.
        n_sls: SLs available, 1 to 16.

    Returns:
        A proper coloring using colors ``0..n_colors-1``.

    Raises:
        ConfigError: If n_sls is outside 1..16.
        ColoringError: If the greedy coloring needs more than n_sls colors.
    """
    if not 1 <= n_sls <= MAX_SLS:
        msg = f"SL count must be in 1..{MAX_SLS}, got {n_sls}"
        raise errors.ConfigError(msg)
    colors = nx.greedy_color(topology.graph, strategy="largest_first")
    needed = max(colors.values(), default=0) + 1
    if needed > n_sls:
        msg = f"proper coloring needs {needed} colors but only {n_sls} SLs exist"
        raise errors.ColoringError(msg)
    logger.info("colored %d switches with %d colors", topology.n_switches, needed)
    return SwitchColoring(colors=dict(sorted(colors.items())), n_sls=n_sls)


def split_vls(n_vls: int) -> tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...]]:
    """Split VLs into three disjoint subsets, one per hop position.

    Subset sizes differ by at most one; a remainder goes to the second
    position first, then to the third.

    Raises:
        DeadlockSchemeError: If fewer than three VLs are available.
    """
    if n_vls < MIN_VLS:
        msg = f"the coloring scheme needs at least {MIN_VLS} VLs, got {n_vls}"
        raise errors.DeadlockSchemeError(msg)
    size, extra = divmod(n_vls, MIN_VLS)
    sizes = (size, size + (extra >= 1), size + (extra >= 2))  # noqa: PLR2004
    first = tuple(range(sizes[0]))
    second = tuple(range(sizes[0], sizes[0] + sizes[1]))
    third = tuple(range(sizes[0] + sizes[1], n_vls))
    return first, second, third


def path_sl(path: routing_base.Path, coloring: SwitchColoring) -> int:
    """Return the SL of a path: the color of its second switch, 0 for no hops."""
    return coloring.colors[path.hops[1]] if path.length else 0


def hop_position(in_class: PortClass, sl: int, own_color: int) -> int:
    """Return the 1-based hop position a switch infers for a packet."""
    if in_class == PortClass.ENDPOINT:
        return 1
    return 2 if sl == own_color else 3


@dataclasses.dataclass(frozen=True)
class Sl2VlTables:
    """Per-switch SL-to-VL tables.

    Attributes:
        subsets: VL subset per hop position.
        sl_to_vl: Per hop position, ``SL -> VL`` within that position's subset.
        colors: Switch colors the tables were built for.
    """

    subsets: tuple[tuple[int, ...], ...]
    sl_to_vl: tuple[dict[int, int], ...]
    colors: dict[int, int] = dataclasses.field(default_factory=dict, hash=False)

    def lookup(self, switch: int, in_class: PortClass, sl: int) -> int:
        """Return the VL a switch puts a packet on."""
        position = hop_position(in_class, sl, self.colors[switch])
        return self.sl_to_vl[position - 1][sl]

    def rows(self) -> list[tuple[int, str, str, int, int]]:
        """Return ``(switch, in_port_class, out_port_class, sl, vl)`` rows."""
        sls = sorted(set(self.colors.values()))
        return [
            (
                switch,
                in_class.value,
                out_class.value,
                sl,
                self.lookup(switch, in_class, sl),
            )
            for switch in sorted(self.colors)
            for in_class in PortClass
            for out_class in PortClass
            for sl in sls
        ]


def _spread(loads: dict[int, int], subset: tuple[int, ...]) -> dict[int, int]:
    """Map SLs onto a VL subset, heaviest SL first onto the lightest VL."""
    totals = dict.fromkeys(subset, 0)
    mapping: dict[int, int] = {}
    for sl in sorted(loads, key=lambda sl: (-loads[sl], sl)):
        vl = min(subset, key=lambda vl: (totals[vl], vl))
        mapping[sl] = vl
        totals[vl] += loads[sl]
    return mapping


def build_sl2vl_coloring(
    topology: topology_base.Topology,
    coloring: SwitchColoring,
    n_vls: int,
    layers: routing_base.LayerSet | None = None,
) -> Sl2VlTables:
    """Build SL-to-VL tables for the coloring scheme.

    Args:
        topology: The switch graph; supplies endpoint counts.
        coloring: A proper switch coloring.
        n_vls: VLs available, at least 3.
        layers: Routed paths used to balance endpoint routes across the VLs
            of each subset; without them SLs are spread evenly.

    Returns:
        The tables.

    Raises:
        DeadlockSchemeError: If n_vls < 3, the coloring is not proper, or a
            path has more than three hops.
    """
    subsets = split_vls(n_vls)
    if not coloring.is_proper(topology):
        msg = "the switch coloring is not proper"
        raise errors.DeadlockSchemeError(msg)
    sls = sorted(set(coloring.colors.values()))
    loads: list[dict[int, int]] = [dict.fromkeys(sls, 0) for _ in subsets]
    paths = layers.iter_paths() if layers is not None else iter(())
    for _, path in paths:
        _require_short(path)
        sl = path_sl(path, coloring)
        switches = topology.switches
        weight = switches[path.src].endpoints * switches[path.dst].endpoints
        for position in range(path.length):
            loads[position][sl] += max(weight, 1)
    return Sl2VlTables(
        subsets=subsets,
        sl_to_vl=tuple(
            _spread(load, subset) for load, subset in zip(loads, subsets, strict=True)
        ),
        colors=dict(coloring.colors),
    )


def _require_short(path: routing_base.Path) -> None:
    if path.length > MAX_HOPS:
        msg = (
            f"path {path.hops} has {path.length} hops; the coloring scheme "
            f"needs paths of at most {MAX_HOPS}"
        )
        raise errors.DeadlockSchemeError(msg)


def assign_vls_coloring(
    layers: routing_base.LayerSet,
    topology: topology_base.Topology,
    coloring: SwitchColoring,
    n_vls: int,
) -> tuple[cdg.VlAssignment, Sl2VlTables]:
    """Assign VLs by replaying every path through the SL-to-VL tables.

    Returns:
        The hop-position assignment and the tables it was read from.

    Raises:
        DeadlockSchemeError: If the scheme does not apply, or a replayed hop
            lands outside the subset of its true position.
    """
    tables = build_sl2vl_coloring(topology, coloring, n_vls, layers)
    hop_vls: dict[cdg.PathKey, tuple[int, ...]] = {}
    sls: dict[cdg.PathKey, int] = {}
    for layer in layers.layers:
        for (src, dst), route in sorted(layer.routes.items()):
            path = route.path
            sl = path_sl(path, coloring)
            vls: list[int] = []
            for position, switch in enumerate(path.hops[:-1]):
                in_class = PortClass.ENDPOINT if position == 0 else PortClass.SWITCH
                vl = tables.lookup(switch, in_class, sl)
                if vl not in tables.subsets[position]:
                    msg = f"hop {position + 1} of path {path.hops} lands on VL {vl}"
                    raise errors.DeadlockSchemeError(msg)
                vls.append(vl)
            hop_vls[layer.index, src, dst] = tuple(vls)
            sls[layer.index, src, dst] = sl
    return (
        cdg.VlAssignment(
            mode=cdg.AssignmentMode.HOP_POSITION,
            n_vls=n_vls,
            hop_vls=hop_vls,
            subsets=tables.subsets,
            sls=sls,
        ),
        tables,
    )
