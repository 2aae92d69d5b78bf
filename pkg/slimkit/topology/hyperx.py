"""Two-dimensional HyperX: a d x d lattice with every row and column a clique."""

from __future__ import annotations

import dataclasses
import logging
from typing import Final

from slimkit import errors
from slimkit.topology import base

logger = logging.getLogger(__name__)

_MIN_RADIX: Final[int] = 4


@dataclasses.dataclass(frozen=True)
class HyperXShape:
    """Side length and per-switch concentration of a 2-D HyperX."""

    side: int
    concentration: int


def hyperx2_shape(radix: int) -> HyperXShape:
    """Return the largest full-bandwidth shape for a radix.

    The side d is the largest value with ``3 * (d - 1) <= radix``; every port
    not used by the ``2 * (d - 1)`` lattice links carries an endpoint.

    Raises:
        ConstructionError: If radix is below 4.
    """
    if radix < _MIN_RADIX:
        msg = f"HyperX needs a radix of at least {_MIN_RADIX}, got {radix}"
        raise errors.ConstructionError(msg)
    side = radix // 3 + 1
    return HyperXShape(side=side, concentration=radix - 2 * (side - 1))


def hyperx2_counts(shape: HyperXShape) -> base.TopologyCounts:
    """Return the size of a 2-D HyperX without building it."""
    side = shape.side
    return base.TopologyCounts(
        endpoints=side * side * shape.concentration,
        switches=side * side,
        links=side * side * (side - 1),
    )


def build_hyperx2(radix: int, shape: HyperXShape | None = None) -> base.Topology:
    """Build a 2-D HyperX; switch ``(row, col)`` has id ``row * d + col``.

    Args:
        radix: Switch port count; picks the shape when none is given.
        shape: Explicit side and concentration.

    Returns:
        The HyperX topology.

    Raises:
        ConstructionError: If radix is below 4 or the shape does not fit it.
    """
    shape = shape or hyperx2_shape(radix)
    side = shape.side
    if 2 * (side - 1) + shape.concentration > radix:
        msg = (
            f"a {side}x{side} HyperX with {shape.concentration} endpoints "
            f"exceeds radix {radix}"
        )
        raise errors.ConstructionError(msg)
    links: list[tuple[int, int]] = []
    for row in range(side):
        for col in range(side):
            here = row * side + col
            links.extend((here, row * side + other) for other in range(col + 1, side))
            links.extend((here, other * side + col) for other in range(row + 1, side))
    logger.info("built %dx%d HyperX", side, side)
    return base.Topology.from_links(
        links,
        shape.concentration,
        n_switches=side * side,
        kind=base.TopologyKind.HYPERX2,
        params={"radix": radix, "side": side, "concentration": shape.concentration},
    )
