"""Deployment cost tallies and the cross-topology comparison table."""

from __future__ import annotations

import dataclasses
import logging
from typing import TYPE_CHECKING, Final

from slimkit import errors
from slimkit.topology import base, fattree, hyperx, slimfly

if TYPE_CHECKING:
    from slimkit.cabling import plan as cabling_plan

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class PriceTable:
    """Unit prices in dollars."""

    switch: float
    optical_cable: float
    copper_cable: float
    endpoint_cable: float


PRICE_KEYS: Final[tuple[str, ...]] = tuple(
    price_field.name for price_field in dataclasses.fields(PriceTable)
)

# Calibrated so the 36-port comparison rows land within 5% of list prices.
DEFAULT_PRICES: Final[PriceTable] = PriceTable(
    switch=22800.0, optical_cable=250.0, copper_cable=80.0, endpoint_cable=100.0
)


@dataclasses.dataclass(frozen=True)
class CostSummary:
    """Counts and costs of one deployment.

    Attributes:
        endpoints: Endpoint count; each needs one endpoint cable.
        switches: Switch count.
        links: Inter-switch links, ``copper_links + optical_links``.
        copper_links: Links priced as intra-rack copper.
        optical_links: Links priced as inter-rack optical.
        total_cost: Sum over switches and every cable.
    """

    endpoints: int
    switches: int
    links: int
    copper_links: int
    optical_links: int
    total_cost: float

    @property
    def cost_per_endpoint(self) -> float:
        """Total cost divided by endpoint count; 0 for an endpoint-less fabric."""
        return self.total_cost / self.endpoints if self.endpoints else 0.0


def tally_costs(
    topology: base.Topology | base.TopologyCounts,
    prices: PriceTable = DEFAULT_PRICES,
    layout: cabling_plan.CablingPlan | None = None,
) -> CostSummary:
    """Price a topology.

    Without a layout every inter-switch link is priced optical; with one, the
    plan's copper/optical split is used.

    Args:
        topology: A built topology or its counts.
        prices: Unit prices.
        layout: Cabling plan giving each link's cable class.

    Returns:
        The cost summary.

    Raises:
        SchemaError: If the layout was planned for another switch or link count.
    """
    counts = topology.counts if isinstance(topology, base.Topology) else topology
    copper = 0
    if layout is not None:
        if (layout.n_switches, len(layout.cables)) != (counts.switches, counts.links):
            msg = (
                f"cabling plan covers {layout.n_switches} switches and "
                f"{len(layout.cables)} cables, topology has {counts.switches} "
                f"switches and {counts.links} links"
            )
            raise errors.SchemaError(msg)
        copper = sum(cable.cable_class == "copper" for cable in layout.cables)
    optical = counts.links - copper
    total = (
        counts.switches * prices.switch
        + copper * prices.copper_cable
        + optical * prices.optical_cable
        + counts.endpoints * prices.endpoint_cable
    )
    return CostSummary(
        endpoints=counts.endpoints,
        switches=counts.switches,
        links=counts.links,
        copper_links=copper,
        optical_links=optical,
        total_cost=total,
    )


@dataclasses.dataclass(frozen=True)
class ComparisonRow:
    """One topology column of the comparison table."""

    topology: str
    radix: int
    cost: CostSummary


def _sf_counts(params: slimfly.SfParams) -> base.TopologyCounts:
    return base.TopologyCounts(
        endpoints=params.n_endpoints, switches=params.n_switches, links=params.n_links
    )


def largest_sf_for_radix(radix: int) -> slimfly.SfParams | None:
    """Return the largest q, prime power or not, whose radix fits."""
    fitting = [
        params
        for params in (slimfly.derive_sf_params(q) for q in range(2, radix + 1))
        if params.radix <= radix
    ]
    return fitting[-1] if fitting else None


def comparison_table(
    radix: int, prices: PriceTable = DEFAULT_PRICES
) -> list[ComparisonRow]:
    """Compare the largest FT2, FT2-B, FT3, HX2 and SF a radix supports.

    Counts come from arithmetic so Slim Fly sizes without an MMS graph are
    still reported.

    Args:
        radix: Switch port count.
        prices: Unit prices.

    Returns:
        One row per topology that fits the radix.
    """
    candidates: list[tuple[str, base.TopologyCounts]] = [
        ("FT2", fattree.fat_tree2_counts(radix)),
    ]
    if radix % 4 == 0:
        three_to_one = fattree.Oversubscription.THREE_TO_ONE
        candidates.append(("FT2-B", fattree.fat_tree2_counts(radix, three_to_one)))
    candidates.append(("FT3", fattree.fat_tree3_counts(radix)))
    candidates.append(("HX2", hyperx.hyperx2_counts(hyperx.hyperx2_shape(radix))))
    sf_params = largest_sf_for_radix(radix)
    if sf_params is not None:
        candidates.append(("SF", _sf_counts(sf_params)))
    return [
        ComparisonRow(topology=name, radix=radix, cost=tally_costs(counts, prices))
        for name, counts in candidates
    ]


def fixed_size_table(
    n_endpoints: int, prices: PriceTable = DEFAULT_PRICES
) -> list[ComparisonRow]:
    """Compare the smallest FT2, HX2 and the closest SF for a target endpoint count.

    FT2 uses the smallest even radix with ``radix**2 / 2 >= n_endpoints``;
    HX2 uses the smallest side d with ``d**3 >= n_endpoints`` and d
    endpoints per switch; SF uses find_sf_near.

    Args:
        n_endpoints: Target cluster size.
        prices: Unit prices.

    Returns:
        Rows for FT2, HX2 and SF.
    """
    ft_radix = 2
    while ft_radix * ft_radix // 2 < n_endpoints:
        ft_radix += 2
    side = 1
    while side**3 < n_endpoints:
        side += 1
    hx_shape = hyperx.HyperXShape(side=side, concentration=side)
    sf_params = slimfly.find_sf_near(n_endpoints)
    logger.debug(
        "fixed size %d: FT2 radix %d, HX2 side %d, SF q=%d",
        n_endpoints,
        ft_radix,
        side,
        sf_params.q,
    )
    return [
        ComparisonRow(
            "FT2", ft_radix, tally_costs(fattree.fat_tree2_counts(ft_radix), prices)
        ),
        ComparisonRow(
            "HX2",
            2 * (side - 1) + side,
            tally_costs(hyperx.hyperx2_counts(hx_shape), prices),
        ),
        ComparisonRow(
            "SF", sf_params.radix, tally_costs(_sf_counts(sf_params), prices)
        ),
    ]
