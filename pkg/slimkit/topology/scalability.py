"""Largest Slim Fly per switch port count and LMC value."""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING, Final

from slimkit.topology import slimfly

if TYPE_CHECKING:
    from collections.abc import Iterable

logger = logging.getLogger(__name__)

# Unicast LIDs run from 1 to 0xBFFF.
UNICAST_LID_LIMIT: Final[int] = 0xBFFF
MAX_LMC: Final[int] = 7


@dataclasses.dataclass(frozen=True)
class ScalabilityRow:
    """Largest Slim Fly that fits a port count and LID budget."""

    ports: int
    lmc: int
    q: int
    n_switches: int
    n_endpoints: int
    net_radix: int
    concentration: int

    @property
    def addresses(self) -> int:
        """LIDs per endpoint, ``2 ** lmc``."""
        return 1 << self.lmc

    @property
    def lids_used(self) -> int:
        """Endpoint blocks plus one LID per switch."""
        return self.n_endpoints * self.addresses + self.n_switches


def lids_needed(params: slimfly.SfParams, lmc: int) -> int:
    """Return the unicast LIDs consumed by a Slim Fly at a given LMC."""
    return params.n_endpoints * (1 << lmc) + params.n_switches


def is_within_limits(params: slimfly.SfParams, ports: int, lmc: int) -> bool:
    """Return True if the Slim Fly fits both the switch radix and the LID space."""
    return params.radix <= ports and lids_needed(params, lmc) <= UNICAST_LID_LIMIT


def largest_sf(
    ports: int, lmc: int, *, prime_power_only: bool = False
) -> slimfly.SfParams | None:
    """Return the largest q that fits, or None when even q = 2 does not.

    Args:
        ports: Switch port count.
        lmc: LID mask control value.
        prime_power_only: Restrict q to values with an MMS graph.

    Returns:
        Parameters of the largest fitting Slim Fly.
    """
    best: slimfly.SfParams | None = None
    for q in range(2, ports + 1):
        params = slimfly.derive_sf_params(q)
        if prime_power_only and not params.mms_valid:
            continue
        if is_within_limits(params, ports, lmc):
            best = params
    return best


def scalability_table(
    port_counts: Iterable[int],
    lmc_range: Iterable[int] = range(MAX_LMC + 1),
    *,
    prime_power_only: bool = False,
) -> list[ScalabilityRow]:
    """Tabulate the largest Slim Fly for every port count and LMC value.

    Combinations where nothing fits are left out.

    Args:
        port_counts: Switch port counts to evaluate.
        lmc_range: LMC values to evaluate.
        prime_power_only: Restrict q to values with an MMS graph.

    Returns:
        One row per fitting combination, ordered by ports then LMC.
    """
    lmc_values = list(lmc_range)
    rows: list[ScalabilityRow] = []
    for ports in port_counts:
        for lmc in lmc_values:
            params = largest_sf(ports, lmc, prime_power_only=prime_power_only)
            if params is None:
                logger.debug("no Slim Fly fits %d ports at LMC %d", ports, lmc)
                continue
            rows.append(
                ScalabilityRow(
                    ports=ports,
                    lmc=lmc,
                    q=params.q,
                    n_switches=params.n_switches,
                    n_endpoints=params.n_endpoints,
                    net_radix=params.net_radix,
                    concentration=params.concentration,
                )
            )
    return rows
