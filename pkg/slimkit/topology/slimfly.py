"""Slim Fly topologies built from MMS graphs.

Switch ``(0, x, y)`` has id ``x*q + y`` and switch ``(1, m, c)`` has id
``q*q + m*q + c``. Rack ``r`` holds the groups ``(0, r, *)`` and ``(1, r, *)``.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math

from slimkit import errors
from slimkit import field as slimkit_field
from slimkit.topology import base

logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class SfParams:
    """Parameters of a Slim Fly with field size q.

    Attributes:
        q: Field size; a prime power when ``mms_valid``.
        delta: ``q mod 4`` mapped into ``{-1, 0, 1}``.
        w: ``(q - delta) // 4``.
        n_switches: ``2 * q * q``.
        net_radix: Inter-switch ports per switch, ``(3q - delta) / 2``.
        concentration: Endpoints per switch, ``ceil(net_radix / 2)``.
        mms_valid: True if an MMS graph exists for q.
        xi: Smallest primitive element of GF(q), when valid.
        gen_set_x: Generator set for subgroup 0, when valid.
        gen_set_x_prime: Generator set for subgroup 1, when valid.
    """

    q: int
    delta: int
    w: int
    n_switches: int
    net_radix: int
    concentration: int
    mms_valid: bool
    xi: int | None = None
    gen_set_x: frozenset[int] = frozenset()
    gen_set_x_prime: frozenset[int] = frozenset()

    @property
    def radix(self) -> int:
        """Total ports per switch, ``net_radix + concentration``."""
        return self.net_radix + self.concentration

    @property
    def n_endpoints(self) -> int:
        """Total endpoints N."""
        return self.n_switches * self.concentration

    @property
    def n_links(self) -> int:
        """Undirected inter-switch links."""
        return self.n_switches * self.net_radix // 2

    @property
    def intra_rack_ports(self) -> int:
        """Ports per switch that stay inside its rack."""
        return len(self.gen_set_x) + 1


def delta_of(q: int) -> int:
    """Map q to delta: 0 for even q, 1 for ``q % 4 == 1``, -1 for ``q % 4 == 3``."""
    if q % 2 == 0:
        return 0
    return 1 if q % 4 == 1 else -1


def _generator_sets(
    gf: slimkit_field.GaloisField, delta: int, w: int
) -> tuple[frozenset[int], frozenset[int]]:
    xi = gf.primitive_element
    q = gf.order
    if delta == 1:
        x_exponents = range(0, q - 2, 2)
        x_prime_exponents = range(1, q - 1, 2)
    elif delta == -1:
        x_exponents = [*range(0, 2 * w - 1, 2), *range(2 * w - 1, 4 * w - 2, 2)]
        x_prime_exponents = [*range(1, 2 * w, 2), *range(2 * w, 4 * w - 1, 2)]
    else:
        x_exponents = range(0, q - 1, 2)
        x_prime_exponents = range(1, q, 2)
    return (
        frozenset(gf.power(xi, exponent) for exponent in x_exponents),
        frozenset(gf.power(xi, exponent) for exponent in x_prime_exponents),
    )


@functools.cache
def derive_sf_params(q: int, *, strict: bool = False) -> SfParams:
    """Derive Slim Fly parameters for q.

    Any integer q >= 2 yields counts. Only prime powers with ``q % 4 != 2``
    are MMS-valid and carry xi and the generator sets.

    Args:
        q: The field size.
        strict: Raise instead of returning parameters flagged invalid.

    Returns:
        The derived parameters.

    Raises:
        ConstructionError: If q < 2, or if strict and q is not MMS-valid.
    """
    if q < 2:  # noqa: PLR2004
        msg = f"q must be at least 2, got {q}"
        raise errors.ConstructionError(msg)
    delta = delta_of(q)
    net_radix = (3 * q - delta) // 2
    mms_valid = q % 4 != 2 and slimkit_field.is_prime_power(q)  # noqa: PLR2004
    if strict and not mms_valid:
        reason = "q is not a prime power"
        if q % 4 == 2:  # noqa: PLR2004
            reason = "q = 2 (mod 4)"
        msg = f"no MMS graph exists for q={q}: {reason}"
        raise errors.ConstructionError(msg)
    w = (q - delta) // 4
    params = SfParams(
        q=q,
        delta=delta,
        w=w,
        n_switches=2 * q * q,
        net_radix=net_radix,
        concentration=math.ceil(net_radix / 2),
        mms_valid=mms_valid,
    )
    if not mms_valid:
        return params
    gf = slimkit_field.GaloisField(q)
    gen_x, gen_x_prime = _generator_sets(gf, delta, w)
    return dataclasses.replace(
        params, xi=gf.primitive_element, gen_set_x=gen_x, gen_set_x_prime=gen_x_prime
    )


def switch_id(label: base.SwitchLabel, q: int) -> int:
    """Return the dense id of a labelled switch."""
    return label.subgroup * q * q + label.x_or_m * q + label.y_or_c


def switch_label(switch: int, q: int) -> base.SwitchLabel:
    """Return the label of a dense switch id."""
    subgroup, rest = divmod(switch, q * q)
    x_or_m, y_or_c = divmod(rest, q)
    return base.SwitchLabel(subgroup, x_or_m, y_or_c)


def _mms_links(params: SfParams, gf: slimkit_field.GaloisField) -> set[tuple[int, int]]:
    q = params.q
    links: set[tuple[int, int]] = set()
    for group in range(q):
        for left in range(q):
            for right in range(left + 1, q):
                diff = gf.sub(left, right)
                if diff in params.gen_set_x:
                    links.add((group * q + left, group * q + right))
                if diff in params.gen_set_x_prime:
                    links.add((q * q + group * q + left, q * q + group * q + right))
    for x_val in range(q):
        for m_val in range(q):
            for c_val in range(q):
                y_val = gf.add(gf.mul(m_val, x_val), c_val)
                links.add((x_val * q + y_val, q * q + m_val * q + c_val))
    return links


def _rack_ports(
    params: SfParams, links: set[tuple[int, int]]
) -> dict[tuple[int, int], int]:
    """Assign ports: endpoints, then intra-rack by label, then one per foreign rack."""
    q = params.q
    adjacency: dict[int, list[int]] = {
        switch: [] for switch in range(params.n_switches)
    }
    for left, right in links:
        adjacency[left].append(right)
        adjacency[right].append(left)
    intra_first = params.concentration + 1
    inter_first = intra_first + params.intra_rack_ports
    ports: dict[tuple[int, int], int] = {}
    for switch, neighbors in adjacency.items():
        rack = switch_label(switch, q).x_or_m
        local = sorted(
            (nb for nb in neighbors if switch_label(nb, q).x_or_m == rack),
            key=lambda nb: switch_label(nb, q),
        )
        for offset, neighbor in enumerate(local):
            ports[switch, neighbor] = intra_first + offset
        for neighbor in neighbors:
            foreign = switch_label(neighbor, q).x_or_m
            if foreign == rack:
                continue
            ports[switch, neighbor] = inter_first + foreign - (foreign > rack)
    return ports


def build_slim_fly(params: SfParams) -> base.Topology:
    """Build the Slim Fly switch graph with rack-aware port numbering.

    Args:
        params: Parameters from derive_sf_params.

    Returns:
        A k'-regular topology on 2q^2 switches.

    Raises:
        ConstructionError: If params are not MMS-valid.
    """
    if not params.mms_valid:
        msg = f"cannot build a Slim Fly for q={params.q}: no MMS graph exists"
        raise errors.ConstructionError(msg)
    gf = slimkit_field.GaloisField(params.q)
    links = _mms_links(params, gf)
    switches = tuple(
        base.Switch(
            switch_id=switch,
            endpoints=params.concentration,
            label=switch_label(switch, params.q),
            rack=switch_label(switch, params.q).x_or_m,
        )
        for switch in range(params.n_switches)
    )
    logger.info(
        "built Slim Fly q=%d: %d switches, %d links",
        params.q,
        params.n_switches,
        len(links),
    )
    return base.Topology(
        kind=base.TopologyKind.SLIMFLY,
        switches=switches,
        links=frozenset(links),
        link_ports=_rack_ports(params, links),
        params={
            "q": params.q,
            "delta": params.delta,
            "xi": params.xi or 0,
            "net_radix": params.net_radix,
            "concentration": params.concentration,
        },
    )


def find_sf_near(n_nodes: int) -> SfParams:
    """Return the MMS-valid configuration whose endpoint count is closest to n_nodes.

    Candidates are prime powers between 3 and ``2 * cbrt(n_nodes) + 3``;
    the window doubles until it holds one. Ties go to the smaller q.

    Args:
        n_nodes: Desired number of endpoints.

    Returns:
        Parameters of the closest Slim Fly.

    Raises:
        ConstructionError: If n_nodes is below 1.
    """
    if n_nodes < 1:
        msg = f"node count must be positive, got {n_nodes}"
        raise errors.ConstructionError(msg)
    upper = int(2 * round(n_nodes ** (1 / 3), 9)) + 3
    while True:
        candidates = [
            derive_sf_params(q)
            for q in range(3, upper + 1)
            if q % 4 != 2 and slimkit_field.is_prime_power(q)  # noqa: PLR2004
        ]
        if candidates:
            break
        upper *= 2
    best = min(
        candidates, key=lambda params: (abs(params.n_endpoints - n_nodes), params.q)
    )
    logger.debug("closest Slim Fly to %d nodes: q=%d", n_nodes, best.q)
    return best
