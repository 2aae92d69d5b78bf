"""Rack layout and three-step wiring plans for Slim Fly installations.

Rack ``r`` holds the q switches of group ``(0, r, *)`` on top and the q
switches of group ``(1, r, *)`` below. Cables are laid in three steps:
inside each subgroup, across the two subgroups of a rack, and between racks.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
import logging
from typing import TYPE_CHECKING, Any

from slimkit import errors
from slimkit.topology import base as topology_base
from slimkit.topology import slimfly

if TYPE_CHECKING:
    from collections.abc import Mapping

logger = logging.getLogger(__name__)

CSV_HEADER = (
    "step",
    "rack_a",
    "label_a",
    "port_a",
    "rack_b",
    "label_b",
    "port_b",
    "class",
)


class CableStep(enum.IntEnum):
    """Wiring step a cable belongs to."""

    INTRA_SUBGROUP = 1
    INTER_SUBGROUP = 2
    INTER_RACK = 3


class CableClass(enum.StrEnum):
    """Physical medium of a cable."""

    COPPER = "copper"
    OPTICAL = "optical"


def label_text(label: topology_base.SwitchLabel) -> str:
    """Render a switch label as ``S-R-I``."""
    return f"{label.subgroup}-{label.x_or_m}-{label.y_or_c}"


@dataclasses.dataclass(frozen=True, order=True)
class Cable:
    """One switch-to-switch cable, ``switch_a < switch_b``."""

    switch_a: int
    port_a: int
    switch_b: int
    port_b: int
    step: CableStep
    cable_class: CableClass

    @property
    def ends(self) -> tuple[tuple[int, int], tuple[int, int]]:
        """Both ``(switch, port)`` ends."""
        return (self.switch_a, self.port_a), (self.switch_b, self.port_b)


@dataclasses.dataclass(frozen=True)
class Rack:
    """Switches in one rack, top subgroup first."""

    index: int
    top: tuple[int, ...]
    bottom: tuple[int, ...]

    @property
    def switches(self) -> tuple[int, ...]:
        """All switches of the rack."""
        return self.top + self.bottom


@dataclasses.dataclass(frozen=True)
class CablingPlan:
    """Racks, switch labels and the cables to lay, in step order.

    Attributes:
        q: Field size of the Slim Fly.
        concentration: Endpoint ports per switch, numbered ``1..concentration``.
        racks: Rack ``r`` at position ``r``.
        labels: ``(S, R, I)`` label of each switch id.
        cables: Cables sorted by step then switch ids.
    """

    q: int
    concentration: int
    racks: tuple[Rack, ...]
    labels: tuple[topology_base.SwitchLabel, ...]
    cables: tuple[Cable, ...]

    @property
    def n_switches(self) -> int:
        """Switch count."""
        return len(self.labels)

    def rack_of(self, switch: int) -> int:
        """Rack index of a switch."""
        return self.labels[switch].x_or_m

    def label_of(self, switch: int) -> str:
        """Text label of a switch."""
        return label_text(self.labels[switch])

    def switch_of(self, text: str) -> int:
        """Return the switch id with label text ``S-R-I``.

        Raises:
            ConfigError: If the text is not a label of this plan.
        """
        try:
            subgroup, rack, index = (int(part) for part in text.split("-"))
        except ValueError:
            msg = f"malformed switch label {text!r}"
            raise errors.ConfigError(msg) from None
        label = topology_base.SwitchLabel(subgroup, rack, index)
        in_range = 0 <= rack < self.q and 0 <= index < self.q
        if subgroup not in (0, 1) or not in_range:
            msg = f"label {text!r} is outside a q={self.q} plan"
            raise errors.ConfigError(msg)
        return slimfly.switch_id(label, self.q)

    def step_counts(self) -> dict[int, int]:
        """Cable count per wiring step."""
        counts = dict.fromkeys((int(step) for step in CableStep), 0)
        for cable in self.cables:
            counts[int(cable.step)] += 1
        return counts

    def cables_in_step(self, step: CableStep) -> tuple[Cable, ...]:
        """Cables laid in one step."""
        return tuple(cable for cable in self.cables if cable.step == step)

    def rack_pair_cables(self, rack_a: int, rack_b: int) -> tuple[Cable, ...]:
        """Inter-rack cables joining two racks, for a wiring diagram."""
        wanted = {rack_a, rack_b}
        return tuple(
            cable
            for cable in self.cables
            if cable.step == CableStep.INTER_RACK
            and {self.rack_of(cable.switch_a), self.rack_of(cable.switch_b)} == wanted
        )

    def foreign_rack_ports(self) -> dict[tuple[int, int], frozenset[int]]:
        """Ports each rack uses toward each other rack, over all its switches."""
        ports: dict[tuple[int, int], set[int]] = {}
        for cable in self.cables_in_step(CableStep.INTER_RACK):
            for (near, port), (far, _) in (cable.ends, cable.ends[::-1]):
                key = (self.rack_of(near), self.rack_of(far))
                ports.setdefault(key, set()).add(port)
        return {key: frozenset(value) for key, value in sorted(ports.items())}

    def expected_peers(self) -> dict[tuple[int, int], tuple[int, int]]:
        """``(switch, port) -> (switch, port)`` in both directions for every cable."""
        peers: dict[tuple[int, int], tuple[int, int]] = {}
        for cable in self.cables:
            near, far = cable.ends
            peers[near] = far
            peers[far] = near
        return peers

    def port_count(self, switch: int) -> int:
        """Highest port the plan uses on a switch."""
        used = [
            port
            for cable in self.cables
            for owner, port in cable.ends
            if owner == switch
        ]
        return max([self.concentration, *used])

    def rows(self) -> list[tuple[int, int, str, int, int, str, int, str]]:
        """CSV rows matching CSV_HEADER."""
        return [
            (
                int(cable.step),
                self.rack_of(cable.switch_a),
                self.label_of(cable.switch_a),
                cable.port_a,
                self.rack_of(cable.switch_b),
                self.label_of(cable.switch_b),
                cable.port_b,
                cable.cable_class.value,
            )
            for cable in self.cables
        ]

    def to_dict(self) -> dict[str, object]:
        """Serialize to the cabling-plan JSON body."""
        return {
            "q": self.q,
            "concentration": self.concentration,
            "racks": [
                {
                    "index": rack.index,
                    "top": [self.label_of(switch) for switch in rack.top],
                    "bottom": [self.label_of(switch) for switch in rack.bottom],
                }
                for rack in self.racks
            ],
            "step_counts": {
                str(key): value for key, value in self.step_counts().items()
            },
            "cables": [dict(zip(CSV_HEADER, row, strict=True)) for row in self.rows()],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> CablingPlan:
        """Rebuild a plan from its JSON body.

        Raises:
            SchemaError: If the body is malformed.
        """
        try:
            q = int(data["q"])
            concentration = int(data["concentration"])
            entries = list(data["cables"])
        except (KeyError, TypeError, ValueError) as exc:
            msg = f"malformed cabling plan: {exc}"
            raise errors.SchemaError(msg) from exc
        labels = tuple(
            slimfly.switch_label(switch, q) for switch in range(2 * q * q)
        )
        shell = cls(q, concentration, _racks(q), labels, ())
        try:
            cables = tuple(
                _make_cable(
                    shell.switch_of(entry["label_a"]),
                    int(entry["port_a"]),
                    shell.switch_of(entry["label_b"]),
                    int(entry["port_b"]),
                    CableStep(int(entry["step"])),
                    CableClass(entry["class"]),
                )
                for entry in entries
            )
        except (KeyError, TypeError, ValueError, errors.ConfigError) as exc:
            msg = f"malformed cable entry: {exc}"
            raise errors.SchemaError(msg) from exc
        ordered = tuple(sorted(cables, key=_cable_order))
        return dataclasses.replace(shell, cables=ordered)


def _racks(q: int) -> tuple[Rack, ...]:
    return tuple(
        Rack(
            index=rack,
            top=tuple(rack * q + index for index in range(q)),
            bottom=tuple(q * q + rack * q + index for index in range(q)),
        )
        for rack in range(q)
    )


def _make_cable(
    switch_a: int,
    port_a: int,
    switch_b: int,
    port_b: int,
    step: CableStep,
    cable_class: CableClass,
) -> Cable:
    if switch_a > switch_b:
        switch_a, port_a, switch_b, port_b = switch_b, port_b, switch_a, port_a
    return Cable(switch_a, port_a, switch_b, port_b, step, cable_class)


def _cable_order(cable: Cable) -> tuple[int, int, int]:
    return (cable.step, cable.switch_a, cable.switch_b)


def _step_of(
    left: topology_base.SwitchLabel, right: topology_base.SwitchLabel
) -> CableStep:
    if left.x_or_m != right.x_or_m:
        return CableStep.INTER_RACK
    if left.subgroup != right.subgroup:
        return CableStep.INTER_SUBGROUP
    return CableStep.INTRA_SUBGROUP


def generate_plan(params: slimfly.SfParams) -> CablingPlan:
    """Lay out racks and list every cable of a Slim Fly by wiring step.

    Ports follow the topology's rack-aware numbering: endpoints first, then
    intra-rack neighbours in label order, then one port per foreign rack.
    Intra-rack cables are copper and inter-rack cables optical.

    Args:
        params: Parameters from derive_sf_params.

    Returns:
        The plan.

    Raises:
        ConstructionError: If params are not MMS-valid.
    """
    topology = slimfly.build_slim_fly(params)
    labels = tuple(
        slimfly.switch_label(switch, params.q) for switch in range(params.n_switches)
    )
    cables = []
    for left, right in topology.links:
        step = _step_of(labels[left], labels[right])
        cables.append(
            _make_cable(
                left,
                topology.port_to(left, right),
                right,
                topology.port_to(right, left),
                step,
                CableClass.OPTICAL
                if step == CableStep.INTER_RACK
                else CableClass.COPPER,
            )
        )
    cables.sort(key=_cable_order)
    plan = CablingPlan(
        q=params.q,
        concentration=params.concentration,
        racks=_racks(params.q),
        labels=labels,
        cables=tuple(cables),
    )
    logger.info("cabling plan for q=%d: steps %s", params.q, plan.step_counts())
    return plan


def rack_pairs(plan: CablingPlan) -> list[tuple[int, int]]:
    """Every unordered pair of racks, in order."""
    return list(itertools.combinations(range(len(plan.racks)), 2))
