"""Compare a discovered fabric with its cabling plan."""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from slimkit.cabling import discovery
    from slimkit.cabling import plan as cabling_plan

logger = logging.getLogger(__name__)

SwitchPort = tuple[int, int]


@dataclasses.dataclass(frozen=True)
class Miswire:
    """A planned cable whose ends lead somewhere else.

    Attributes:
        expected: The planned cable.
        actual_a: What ``(switch_a, port_a)`` reaches instead; None if unplugged.
        actual_b: What ``(switch_b, port_b)`` reaches instead; None if unplugged.
    """

    expected: cabling_plan.Cable
    actual_a: SwitchPort | None
    actual_b: SwitchPort | None


@dataclasses.dataclass(frozen=True)
class VerificationReport:
    """Every discrepancy between plan and fabric.

    Attributes:
        missing: Planned cables with neither end plugged.
        unexpected: Discovered links touching a port no planned cable uses.
        miswired: Planned cables with at least one end plugged elsewhere.
        broken: Planned cables present but reported down.
        unbound: Discovered GUIDs the binding does not know.
    """

    missing: tuple[cabling_plan.Cable, ...] = ()
    unexpected: tuple[tuple[SwitchPort, SwitchPort], ...] = ()
    miswired: tuple[Miswire, ...] = ()
    broken: tuple[cabling_plan.Cable, ...] = ()
    unbound: tuple[str, ...] = ()

    def is_clean(self) -> bool:
        """Return True if the fabric matches the plan exactly."""
        return not (
            self.missing
            or self.unexpected
            or self.miswired
            or self.broken
            or self.unbound
        )

    def instructions(self, plan: cabling_plan.CablingPlan) -> list[str]:
        """One fix instruction per discrepancy, in report order."""

        def at(end: SwitchPort | None) -> str:
            if end is None:
                return "nothing"
            return f"{plan.label_of(end[0])} port {end[1]}"

        lines = []
        for cable in self.missing:
            near, far = cable.ends
            lines.append(
                f"connect {at(near)} to {at(far)} "
                f"(step {int(cable.step)}, {cable.cable_class.value})"
            )
        for near, far in self.unexpected:
            lines.append(f"remove the cable between {at(near)} and {at(far)}")
        for miswire in self.miswired:
            near, far = miswire.expected.ends
            lines.append(
                f"{at(near)} reaches {at(miswire.actual_a)} and {at(far)} reaches "
                f"{at(miswire.actual_b)}: reconnect {at(near)} to {at(far)}"
            )
        for cable in self.broken:
            near, far = cable.ends
            lines.append(
                f"reseat or replace the cable between {at(near)} and {at(far)}"
            )
        for guid in self.unbound:
            lines.append(f"bind switch {guid} to a plan label")
        return lines

    def to_dict(self, plan: cabling_plan.CablingPlan) -> dict[str, object]:
        """Serialize to the report JSON body."""

        def end(ref: SwitchPort | None) -> list[object] | None:
            return None if ref is None else [plan.label_of(ref[0]), ref[1]]

        def cable_ends(cable: cabling_plan.Cable) -> list[list[object] | None]:
            return [end(near) for near in cable.ends]

        return {
            "clean": self.is_clean(),
            "missing": [cable_ends(cable) for cable in self.missing],
            "unexpected": [[end(near), end(far)] for near, far in self.unexpected],
            "miswired": [
                {
                    "expected": cable_ends(miswire.expected),
                    "actual": [end(miswire.actual_a), end(miswire.actual_b)],
                }
                for miswire in self.miswired
            ],
            "broken": [cable_ends(cable) for cable in self.broken],
            "unbound": list(self.unbound),
            "instructions": self.instructions(plan),
        }


def _discovered(
    dump: discovery.DiscoveryDump, binding: discovery.GuidBinding
) -> tuple[dict[SwitchPort, SwitchPort], set[SwitchPort], list[str]]:
    peers: dict[SwitchPort, SwitchPort] = {}
    down: set[SwitchPort] = set()
    unbound = sorted(guid for guid in dump.switches if guid not in binding.switches)
    for link in dump.links:
        (guid_a, port_a), (guid_b, port_b) = link.a, link.b
        if guid_a not in binding.switches or guid_b not in binding.switches:
            continue
        near = (binding.switches[guid_a], port_a)
        far = (binding.switches[guid_b], port_b)
        peers[near] = far
        peers[far] = near
        if link.is_down:
            down.update((near, far))
    return peers, down, unbound


def verify_cabling(
    plan: cabling_plan.CablingPlan,
    dump: discovery.DiscoveryDump,
    binding: discovery.GuidBinding,
    *,
    partial: bool = False,
) -> VerificationReport:
    """Classify every difference between the planned and the discovered wiring.

    Links with an unbound end are skipped and their GUIDs reported.

    Args:
        plan: The cabling plan.
        dump: The parsed discovery dump.
        binding: GUID to switch binding.
        partial: Check only cables already plugged; planned cables with both
            ends free are not reported missing.

    Returns:
        The report; clean exactly when the fabric matches the plan.
    """
    actual, down, unbound = _discovered(dump, binding)
    expected = plan.expected_peers()
    missing = []
    miswired = []
    broken = []
    for cable in plan.cables:
        near, far = cable.ends
        seen_near, seen_far = actual.get(near), actual.get(far)
        if seen_near == far:
            if near in down:
                broken.append(cable)
        elif seen_near is None and seen_far is None:
            if not partial:
                missing.append(cable)
        else:
            miswired.append(Miswire(cable, seen_near, seen_far))
    unexpected = sorted(
        (near, far)
        for near, far in actual.items()
        if near < far and (near not in expected or far not in expected)
    )
    report = VerificationReport(
        missing=tuple(missing),
        unexpected=tuple(unexpected),
        miswired=tuple(miswired),
        broken=tuple(broken),
        unbound=tuple(unbound),
    )
    logger.info(
        "verification: %d missing, %d unexpected, %d miswired, %d broken",
        len(report.missing),
        len(report.unexpected),
        len(report.miswired),
        len(report.broken),
    )
    return report
