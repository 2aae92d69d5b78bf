"""Random acyclic layers: a cheap stand-in for optimized acyclic layer sets.

Each layer after the first routes along a uniformly shuffled spanning tree,
so no layer contains a cycle. This does not reproduce any particular
layer-optimization scheme.
"""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, ClassVar

import numpy as np
from networkx.utils import UnionFind

from slimkit.routing import base

if TYPE_CHECKING:
    from slimkit.topology import base as topology_base

logger = logging.getLogger(__name__)


def random_spanning_tree(
    links: list[tuple[int, int]], n_switches: int, rng: np.random.Generator
) -> list[tuple[int, int]]:
    """Return the spanning tree Kruskal picks from a random link order."""
    forest = UnionFind(range(n_switches))
    tree: list[tuple[int, int]] = []
    for idx in rng.permutation(len(links)):
        left, right = links[idx]
        if forest[left] != forest[right]:
            forest.union(left, right)
            tree.append((left, right))
    return sorted(tree)


class RandomAcyclic(base.LayerBuilder):
    """Minimal layer 0 followed by random spanning-tree layers."""

    name: ClassVar[str] = "acyclic"

    def build(
        self, topology: topology_base.Topology, n_layers: int, seed: int
    ) -> base.LayerSet:
        """Generate one random spanning-tree layer per layer after the first.

        Raises:
            LayerGenerationError: If n_layers < 1 or the topology is disconnected.
        """
        base.require_buildable(topology, n_layers)
        rng = np.random.default_rng(seed)
        links = sorted(topology.links)
        n_switches = topology.n_switches
        layers = [base.tree_layer(0, n_switches, links, base.RouteOrigin.MINIMAL)]
        layers.extend(
            base.tree_layer(
                index, n_switches, random_spanning_tree(links, n_switches, rng)
            )
            for index in range(1, n_layers)
        )
        logger.info("generated %d random acyclic layers", n_layers)
        return base.LayerSet(
            n_switches=n_switches, layers=tuple(layers), algorithm=self.name, seed=seed
        )
