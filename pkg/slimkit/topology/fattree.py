"""Two- and three-level fat trees."""

from __future__ import annotations

import enum
import logging

from slimkit import errors
from slimkit.topology import base

logger = logging.getLogger(__name__)


class Oversubscription(enum.StrEnum):
    """Down-to-up port ratio on the leaf switches of a two-level tree."""

    NONBLOCKING = "1:1"
    THREE_TO_ONE = "3:1"


def _check_radix(
    radix: int, oversub: Oversubscription = Oversubscription.NONBLOCKING
) -> None:
    if radix < 2 or radix % 2:  # noqa: PLR2004
        msg = f"fat trees need an even radix >= 2, got {radix}"
        raise errors.ConstructionError(msg)
    if oversub is Oversubscription.THREE_TO_ONE and radix % 4:
        msg = f"a 3:1 fat tree needs a radix divisible by 4, got {radix}"
        raise errors.ConstructionError(msg)


def _leaf_split(radix: int, oversub: Oversubscription) -> tuple[int, int]:
    """Return ``(down, up)`` port counts on a leaf."""
    if oversub is Oversubscription.THREE_TO_ONE:
        return 3 * radix // 4, radix // 4
    return radix // 2, radix // 2


def fat_tree2_counts(
    radix: int, oversub: Oversubscription = Oversubscription.NONBLOCKING
) -> base.TopologyCounts:
    """Return the size of a two-level fat tree without building it.

    Raises:
        ConstructionError: If the radix does not fit the requested ratio.
    """
    _check_radix(radix, oversub)
    down, up = _leaf_split(radix, oversub)
    return base.TopologyCounts(
        endpoints=radix * down, switches=radix + up, links=radix * up
    )


def build_fat_tree2(
    radix: int, oversub: Oversubscription = Oversubscription.NONBLOCKING
) -> base.Topology:
    """Build a two-level fat tree with ``radix`` leaves.

    Every leaf links to every spine. Leaves are ids ``0..radix-1``; spines
    follow.

    Args:
        radix: Switch port count.
        oversub: Leaf down-to-up ratio.

    Returns:
        The fat tree topology.

    Raises:
        ConstructionError: If radix is odd, or not divisible by 4 for 3:1.
    """
    _check_radix(radix, oversub)
    down, up = _leaf_split(radix, oversub)
    links = [(leaf, radix + spine) for leaf in range(radix) for spine in range(up)]
    endpoints = {leaf: down for leaf in range(radix)}
    logger.info("built %s fat tree with radix %d", oversub.value, radix)
    return base.Topology.from_links(
        links,
        endpoints,
        n_switches=radix + up,
        kind=base.TopologyKind.FATTREE2,
        params={"radix": radix, "oversubscription": oversub.value},
    )


def fat_tree3_counts(radix: int) -> base.TopologyCounts:
    """Return the size of a three-level k-ary fat tree without building it.

    Raises:
        ConstructionError: If radix is odd.
    """
    _check_radix(radix)
    return base.TopologyCounts(
        endpoints=radix**3 // 4, switches=5 * radix * radix // 4, links=radix**3 // 2
    )


def build_fat_tree3(radix: int) -> base.Topology:
    """Build a three-level k-ary fat tree.

    Pod ``pod`` owns ids ``pod*k .. pod*k + k - 1``: edge switches first,
    then aggregation switches. Core switches follow all pods.

    Args:
        radix: Switch port count k.

    Returns:
        The fat tree topology.

    Raises:
        ConstructionError: If radix is odd.
    """
    _check_radix(radix)
    half = radix // 2
    core_first = radix * radix
    links: list[tuple[int, int]] = []
    for pod in range(radix):
        edges = [pod * radix + idx for idx in range(half)]
        aggs = [pod * radix + half + idx for idx in range(half)]
        links.extend((edge, agg) for edge in edges for agg in aggs)
        for group, agg in enumerate(aggs):
            links.extend((agg, core_first + group * half + col) for col in range(half))
    endpoints = {
        pod * radix + idx: half for pod in range(radix) for idx in range(half)
    }
    logger.info("built three-level fat tree with radix %d", radix)
    return base.Topology.from_links(
        links,
        endpoints,
        n_switches=core_first + half * half,
        kind=base.TopologyKind.FATTREE3,
        params={"radix": radix},
    )
