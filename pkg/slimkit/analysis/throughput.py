"""Adversarial traffic and maximum achievable throughput (MAT).

MAT is the largest theta such that theta times every demand can be routed
at once over the layers' paths without exceeding any link capacity. It is
the optimum of a path-formulation linear program solved with HiGHS.
"""

from __future__ import annotations

import dataclasses
import enum
import logging
from typing import TYPE_CHECKING, Final

import numpy as np
from scipy import optimize, sparse

from slimkit import errors

if TYPE_CHECKING:
    from collections.abc import Mapping

    from slimkit.routing import base as routing_base
    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)

ELEPHANT_WEIGHT: Final[float] = 10.0
MOUSE_WEIGHT: Final[float] = 1.0
DEFAULT_CAPACITY: Final[float] = 1.0
BINDING_TOLERANCE: Final[float] = 1e-9
ELEPHANT_MIN_DISTANCE: Final[int] = 2

Link = tuple[int, int]


class FlowClass(enum.StrEnum):
    """Demand class of a flow."""

    ELEPHANT = "elephant"
    MOUSE = "mouse"


@dataclasses.dataclass(frozen=True)
class Flow:
    """One endpoint-to-endpoint demand."""

    src: int
    dst: int
    weight: float
    flow_class: FlowClass


@dataclasses.dataclass(frozen=True)
class TrafficDemand:
    """A set of flows between distinct ordered endpoint pairs."""

    flows: tuple[Flow, ...]
    seed: int = 0

    def class_weights(self) -> dict[str, float]:
        """Return the summed weight per flow class."""
        totals = dict.fromkeys((member.value for member in FlowClass), 0.0)
        for flow in self.flows:
            totals[flow.flow_class.value] += flow.weight
        return totals


def adversarial_traffic(
    topology: topology_base.Topology,
    load_fraction: float,
    seed: int,
    *,
    elephant_weight: float = ELEPHANT_WEIGHT,
    mouse_weight: float = MOUSE_WEIGHT,
) -> TrafficDemand:
    """Pick a fraction of ordered endpoint pairs and weight the far ones heavily.

    Pairs whose switches are at least two hops apart carry elephant flows;
    every other selected pair carries a mouse flow.

    Args:
        topology: The topology.
        load_fraction: Fraction of ordered endpoint pairs that communicate.
        seed: Seed for the pair sample.
        elephant_weight: Demand of an elephant flow.
        mouse_weight: Demand of a mouse flow.

    Returns:
        The demand, flows in (src, dst) order.

    Raises:
        ConfigError: If load_fraction is outside (0, 1] or a weight is not
            positive.
    """
    if not 0.0 < load_fraction <= 1.0:
        msg = f"load fraction must be in (0, 1], got {load_fraction}"
        raise errors.ConfigError(msg)
    if elephant_weight <= 0 or mouse_weight <= 0:
        msg = "flow weights must be positive"
        raise errors.ConfigError(msg)
    n_endpoints = topology.n_endpoints
    n_pairs = n_endpoints * (n_endpoints - 1)
    n_chosen = round(load_fraction * n_pairs)
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(n_pairs, size=n_chosen, replace=False))
    flows: list[Flow] = []
    for index in chosen.tolist():
        src, rest = divmod(index, n_endpoints - 1)
        dst = rest if rest < src else rest + 1
        switches = (topology.endpoint_switch(src), topology.endpoint_switch(dst))
        gap = topology.distance(*switches)
        if gap >= ELEPHANT_MIN_DISTANCE:
            flows.append(Flow(src, dst, elephant_weight, FlowClass.ELEPHANT))
        else:
            flows.append(Flow(src, dst, mouse_weight, FlowClass.MOUSE))
    logger.info("selected %d of %d endpoint pairs", n_chosen, n_pairs)
    return TrafficDemand(flows=tuple(flows), seed=seed)


@dataclasses.dataclass(frozen=True)
class MatResult:
    """Optimum of the throughput program.

    Attributes:
        theta: Fraction of every demand routed simultaneously.
        flows: Per switch pair, ``(hops, flow)`` for each usable path.
        binding_links: Directed links loaded to capacity.
        per_class_totals: ``theta * summed demand`` per flow class.
    """

    theta: float
    flows: dict[tuple[int, int], tuple[tuple[tuple[int, ...], float], ...]] = (
        dataclasses.field(default_factory=dict, hash=False)
    )
    binding_links: tuple[Link, ...] = ()
    per_class_totals: dict[str, float] = dataclasses.field(
        default_factory=dict, hash=False
    )

    def to_dict(self) -> dict[str, object]:
        """Serialize to the MAT JSON body."""
        return {
            "theta": self.theta,
            "binding_links": [list(link) for link in self.binding_links],
            "per_class_totals": dict(self.per_class_totals),
        }


def _switch_demands(
    demand: TrafficDemand, topology: topology_base.Topology
) -> dict[tuple[int, int], float]:
    totals: dict[tuple[int, int], float] = {}
    for flow in demand.flows:
        pair = (topology.endpoint_switch(flow.src), topology.endpoint_switch(flow.dst))
        if pair[0] != pair[1]:
            totals[pair] = totals.get(pair, 0.0) + flow.weight
    return totals


def max_achievable_throughput(
    layers: routing_base.LayerSet,
    demand: TrafficDemand,
    topology: topology_base.Topology,
    capacities: Mapping[Link, float] | None = None,
) -> MatResult:
    """Solve for the largest theta every demand can be scaled to at once.

    Endpoint demands are summed per switch pair; flows between endpoints
    on one switch never touch a link and do not constrain theta. Each
    switch pair may split its demand over the distinct paths its layers
    give it.

    Args:
        layers: The routing layers.
        demand: The traffic demand.
        topology: The topology the layers route.
        capacities: Directed link capacities; 1.0 for links not listed.

    Returns:
        The optimum.

    Raises:
        DemandError: If no demand crosses a link, a demanded switch pair has
            no path, or the solver fails.
    """
    pair_demand = _switch_demands(demand, topology)
    if not pair_demand:
        msg = "no demand crosses an inter-switch link"
        raise errors.DemandError(msg)
    pairs = sorted(pair_demand)
    columns: list[tuple[tuple[int, int], tuple[int, ...]]] = []
    for src, dst in pairs:
        if not layers.layers or (src, dst) not in layers.layers[0].routes:
            msg = f"switch pair ({src}, {dst}) has no path in the layers"
            raise errors.DemandError(msg)
        unique = sorted({path.hops for path in layers.pair_paths(src, dst)})
        columns.extend(((src, dst), hops) for hops in unique)
    links = sorted(
        directed
        for left, right in topology.links
        for directed in ((left, right), (right, left))
    )
    link_index = {link: row for row, link in enumerate(links)}
    pair_index = {pair: row for row, pair in enumerate(pairs)}
    theta_column = len(columns)

    eq_rows: list[int] = []
    eq_cols: list[int] = []
    eq_vals: list[float] = []
    ub_rows: list[int] = []
    ub_cols: list[int] = []
    for column, (pair, hops) in enumerate(columns):
        eq_rows.append(pair_index[pair])
        eq_cols.append(column)
        eq_vals.append(1.0)
        for link in zip(hops, hops[1:], strict=False):
            ub_rows.append(link_index[link])
            ub_cols.append(column)
    for pair, row in pair_index.items():
        eq_rows.append(row)
        eq_cols.append(theta_column)
        eq_vals.append(-pair_demand[pair])
    n_vars = theta_column + 1
    a_eq = sparse.csr_array(
        (eq_vals, (eq_rows, eq_cols)), shape=(len(pairs), n_vars)
    )
    a_ub = sparse.csr_array(
        (np.ones(len(ub_rows)), (ub_rows, ub_cols)), shape=(len(links), n_vars)
    )
    caps = capacities or {}
    b_ub = np.array([caps.get(link, DEFAULT_CAPACITY) for link in links])
    objective = np.zeros(n_vars)
    objective[theta_column] = -1.0
    solution = optimize.linprog(
        objective,
        A_ub=a_ub,
        b_ub=b_ub,
        A_eq=a_eq,
        b_eq=np.zeros(len(pairs)),
        bounds=(0, None),
        method="highs",
    )
    if not solution.success:
        msg = f"throughput program failed: {solution.message}"
        raise errors.DemandError(msg)
    values = solution.x
    theta = float(values[theta_column])
    loads = a_ub @ values
    binding = tuple(
        link
        for link, load, cap in zip(links, loads, b_ub, strict=True)
        if cap > 0 and load >= cap * (1 - BINDING_TOLERANCE)
    )
    flows: dict[tuple[int, int], list[tuple[tuple[int, ...], float]]] = {}
    for column, (pair, hops) in enumerate(columns):
        flows.setdefault(pair, []).append((hops, max(float(values[column]), 0.0)))
    logger.info("MAT theta=%.6f over %d switch pairs", theta, len(pairs))
    return MatResult(
        theta=theta,
        flows={pair: tuple(entries) for pair, entries in flows.items()},
        binding_links=binding,
        per_class_totals={
            name: theta * total for name, total in demand.class_weights().items()
        },
    )
