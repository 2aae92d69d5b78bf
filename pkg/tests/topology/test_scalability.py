"""Tests for slimkit.topology.scalability and slimkit.topology.costs."""

import pytest

from slimkit import errors
from slimkit.cabling import plan
from slimkit.topology import base, costs, scalability, slimfly

# Largest q per LMC for 36-port switches when q may be any integer.
_ANY_Q_36: dict[int, int] = {0: 16, 1: 16, 2: 16, 3: 15, 4: 12, 5: 9, 6: 7, 7: 6}
# Same table restricted to q with an MMS graph.
_MMS_Q_36: dict[int, int] = {0: 16, 1: 16, 2: 16, 3: 13, 4: 11, 5: 9, 6: 7, 7: 5}


def _rows_by_lmc(rows: list[scalability.ScalabilityRow]) -> dict[int, int]:
    return {row.lmc: row.q for row in rows}


# ---------------------------------------------------------------------------
# scalability_table
# ---------------------------------------------------------------------------


class TestScalabilityTable:
    def test_36_ports_any_integer(self) -> None:
        rows = scalability.scalability_table([36])
        assert _rows_by_lmc(rows) == _ANY_Q_36

    def test_36_ports_prime_power_only(self) -> None:
        rows = scalability.scalability_table([36], prime_power_only=True)
        assert _rows_by_lmc(rows) == _MMS_Q_36

    def test_published_rows(self) -> None:
        rows = {row.lmc: row for row in scalability.scalability_table([36])}
        assert (rows[0].n_switches, rows[0].n_endpoints) == (512, 6144)
        assert (rows[0].net_radix, rows[0].concentration) == (24, 12)
        assert (rows[5].n_switches, rows[5].n_endpoints) == (162, 1134)
        assert (rows[5].net_radix, rows[5].concentration) == (13, 7)
        assert (rows[7].n_switches, rows[7].n_endpoints) == (72, 360)
        assert (rows[7].net_radix, rows[7].concentration) == (9, 5)

    def test_64_ports(self) -> None:
        rows = _rows_by_lmc(scalability.scalability_table([64], range(2)))
        assert rows == {0: 28, 1: 25}

    def test_every_row_respects_limits(self) -> None:
        for row in scalability.scalability_table([36, 48, 64]):
            assert row.lids_used <= scalability.UNICAST_LID_LIMIT
            assert row.net_radix + row.concentration <= row.ports

    def test_lmc4_boundary(self) -> None:
        params_13 = slimfly.derive_sf_params(13)
        params_12 = slimfly.derive_sf_params(12)
        assert not scalability.is_within_limits(params_13, 36, 4)
        assert scalability.is_within_limits(params_12, 36, 4)

    def test_addresses(self) -> None:
        row = scalability.scalability_table([36], [3])[0]
        assert row.addresses == 8


# ---------------------------------------------------------------------------
# tally_costs
# ---------------------------------------------------------------------------


class TestTallyCosts:
    def test_slim_fly_q16(self) -> None:
        summary = costs.tally_costs(base.TopologyCounts(6144, 512, 6144))
        assert summary.total_cost == pytest.approx(13.8e6, rel=0.05)
        assert summary.cost_per_endpoint == pytest.approx(2.2e3, rel=0.05)

    def test_zero_prices(self) -> None:
        free = costs.PriceTable(0.0, 0.0, 0.0, 0.0)
        summary = costs.tally_costs(base.TopologyCounts(648, 54, 648), free)
        assert summary.total_cost == 0

    def test_counts_do_not_depend_on_prices(self) -> None:
        free = costs.PriceTable(0.0, 0.0, 0.0, 0.0)
        summary = costs.tally_costs(base.TopologyCounts(648, 54, 648), free)
        assert (summary.endpoints, summary.switches, summary.links) == (648, 54, 648)

    def test_without_layout_all_links_optical(self) -> None:
        summary = costs.tally_costs(base.Topology.from_links([(0, 1), (1, 2)]))
        assert summary.optical_links == 2
        assert summary.copper_links == 0

    def test_empty_fabric_cost_per_endpoint(self) -> None:
        summary = costs.tally_costs(base.TopologyCounts(0, 0, 0))
        assert summary.cost_per_endpoint == 0.0

    def test_layout_splits_cable_classes(self) -> None:
        params = slimfly.derive_sf_params(5)
        summary = costs.tally_costs(
            slimfly.build_slim_fly(params), layout=plan.generate_plan(params)
        )
        assert (summary.copper_links, summary.optical_links) == (75, 100)

    def test_layout_for_another_topology(self) -> None:
        layout = plan.generate_plan(slimfly.derive_sf_params(5))
        q7 = slimfly.build_slim_fly(slimfly.derive_sf_params(7))
        with pytest.raises(errors.SchemaError, match="covers 50 switches"):
            costs.tally_costs(q7, layout=layout)


# ---------------------------------------------------------------------------
# comparison tables
# ---------------------------------------------------------------------------


class TestComparisonTable:
    def test_36_port_counts(self) -> None:
        rows = {row.topology: row.cost for row in costs.comparison_table(36)}
        assert (rows["FT2"].endpoints, rows["FT2"].switches, rows["FT2"].links) == (
            648,
            54,
            648,
        )
        assert (rows["FT2-B"].endpoints, rows["FT2-B"].links) == (972, 324)
        assert (rows["FT3"].endpoints, rows["FT3"].switches) == (11664, 1620)
        assert (rows["HX2"].endpoints, rows["HX2"].switches) == (2028, 169)
        assert (rows["SF"].endpoints, rows["SF"].switches, rows["SF"].links) == (
            6144,
            512,
            6144,
        )

    def test_36_port_costs(self) -> None:
        rows = {row.topology: row.cost for row in costs.comparison_table(36)}
        assert rows["FT2"].total_cost == pytest.approx(1.458e6, rel=0.05)
        assert rows["FT3"].total_cost == pytest.approx(43.94e6, rel=0.05)
        assert rows["HX2"].total_cost == pytest.approx(4.563e6, rel=0.05)

    def test_slim_fly_beyond_prime_powers(self) -> None:
        rows = {row.topology: row.cost for row in costs.comparison_table(64)}
        assert (rows["SF"].endpoints, rows["SF"].switches, rows["SF"].links) == (
            32928,
            1568,
            32928,
        )
        rows_40 = {row.topology: row.cost for row in costs.comparison_table(40)}
        assert (rows_40["SF"].endpoints, rows_40["SF"].switches) == (7514, 578)
        assert rows_40["SF"].links == 7225

    def test_fixed_size_2048(self) -> None:
        rows = {row.topology: row.cost for row in costs.fixed_size_table(2048)}
        assert (rows["SF"].endpoints, rows["SF"].switches, rows["SF"].links) == (
            2178,
            242,
            2057,
        )
        assert (rows["HX2"].endpoints, rows["HX2"].switches, rows["HX2"].links) == (
            2197,
            169,
            2028,
        )
        assert (rows["FT2"].endpoints, rows["FT2"].switches, rows["FT2"].links) == (
            2048,
            96,
            2048,
        )
