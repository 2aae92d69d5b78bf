"""All routing-layer builders."""

from typing import Final

from slimkit import errors
from slimkit.routing import acyclic, base, lnmp, minimal, rues

ALL_ALGORITHMS: Final[tuple[base.LayerBuilder, ...]] = (
    lnmp.LayeredMultipath(),
    rues.RandomEdgeSelection(),
    acyclic.RandomAcyclic(),
    minimal.MinimalOnly(),
)


def get_builder(name: str) -> base.LayerBuilder:
    """Return the registered builder called name.

    Raises:
        ConfigError: If no builder has that name.
    """
    for builder in ALL_ALGORITHMS:
        if builder.name == name:
            return builder
    known = ", ".join(builder.name for builder in ALL_ALGORITHMS)
    msg = f"unknown routing algorithm {name!r}; expected one of: {known}"
    raise errors.ConfigError(msg)


__all__ = ["ALL_ALGORITHMS", "get_builder"]
