"""Random Uniform Edge Selection (RUES) layers.

Every layer after the first keeps a uniformly sampled fraction of the links
and routes along per-destination BFS trees of that subgraph.
"""

from __future__ import annotations

import logging
import math
from typing import TYPE_CHECKING, ClassVar, Final

import networkx as nx
import numpy as np

from slimkit import errors
from slimkit.routing import base

if TYPE_CHECKING:
    from collections.abc import Mapping

    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)

DEFAULT_PRESERVE_FRACTION: Final[float] = 0.6
MAX_RESAMPLES: Final[int] = 100


def _is_spanning(n_switches: int, links: list[tuple[int, int]]) -> bool:
    graph = nx.Graph()
    graph.add_nodes_from(range(n_switches))
    graph.add_edges_from(links)
    return nx.is_connected(graph)


def generate_layers_rues(
    topology: topology_base.Topology,
    n_layers: int,
    preserve_fraction: float,
    seed: int,
) -> base.LayerSet:
    """Generate RUES layers.

    Layer 0 routes over every link. Each further layer samples
    ``ceil(preserve_fraction * |E|)`` links without replacement and
    resamples while the sample leaves the switches disconnected.

    Args:
        topology: A connected topology.
        n_layers: Number of layers, at least 1.
        preserve_fraction: Fraction of links kept per layer, in (0, 1].
        seed: Seed for the link samples.

    Returns:
        The layer set.

    Raises:
        ConfigError: If preserve_fraction is outside (0, 1].
        LayerGenerationError: If no connected sample turns up within the
            retry bound; the error carries the layer index.
    """
    if not 0.0 < preserve_fraction <= 1.0:
        msg = f"preserve fraction must be in (0, 1], got {preserve_fraction}"
        raise errors.ConfigError(msg)
    base.require_buildable(topology, n_layers)
    rng = np.random.default_rng(seed)
    links = sorted(topology.links)
    keep = math.ceil(preserve_fraction * len(links))
    n_switches = topology.n_switches
    layers = [base.tree_layer(0, n_switches, links, base.RouteOrigin.MINIMAL)]
    for index in range(1, n_layers):
        for attempt in range(MAX_RESAMPLES):
            chosen = rng.choice(len(links), size=keep, replace=False)
            sample = [links[idx] for idx in sorted(chosen)]
            if _is_spanning(n_switches, sample):
                logger.debug("layer %d: connected after %d tries", index, attempt + 1)
                break
        else:
            msg = (
                f"layer {index}: no connected sample of {keep} links "
                f"in {MAX_RESAMPLES} tries"
            )
            raise errors.LayerGenerationError(msg, index)
        layers.append(base.tree_layer(index, n_switches, sample))
    logger.info(
        "generated %d RUES layers keeping %d of %d links", n_layers, keep, len(links)
    )
    return base.LayerSet(
        n_switches=n_switches,
        layers=tuple(layers),
        algorithm=RandomEdgeSelection.name,
        seed=seed,
    )


class RandomEdgeSelection(base.LayerBuilder):
    """Layers over uniformly sampled link subsets."""

    name: ClassVar[str] = "rues"

    def __init__(self, preserve_fraction: float = DEFAULT_PRESERVE_FRACTION) -> None:
        """Set the fraction of links each layer keeps."""
        self.preserve_fraction = preserve_fraction

    def build(
        self, topology: topology_base.Topology, n_layers: int, seed: int
    ) -> base.LayerSet:
        """Generate the layers with generate_layers_rues."""
        return generate_layers_rues(topology, n_layers, self.preserve_fraction, seed)

    def configure(
        self, options: Mapping[str, int | float | str | bool]
    ) -> RandomEdgeSelection:
        """Return a builder using ``options["rues_fraction"]`` when present."""
        fraction = options.get("rues_fraction")
        if isinstance(fraction, int | float) and not isinstance(fraction, bool):
            return RandomEdgeSelection(float(fraction))
        return self
