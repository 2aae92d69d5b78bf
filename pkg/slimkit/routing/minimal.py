"""Minimal routing repeated in every layer."""

from __future__ import annotations

from typing import TYPE_CHECKING, ClassVar

from slimkit.routing import base

if TYPE_CHECKING:
    from slimkit.topology import base as topology_base


class MinimalOnly(base.LayerBuilder):
    """Every layer is a copy of the weight-balanced minimal layer."""

    name: ClassVar[str] = "minimal"

    def build(
        self, topology: topology_base.Topology, n_layers: int, seed: int
    ) -> base.LayerSet:
        """Replicate layer 0 ``n_layers`` times.

        Raises:
            LayerGenerationError: If n_layers < 1 or the topology is disconnected.
        """
        base.require_buildable(topology, n_layers)
        first = base.balanced_minimal_layer(topology, base.LinkWeights())
        layers = tuple(
            base.Layer(index=index, routes=dict(first.routes))
            for index in range(n_layers)
        )
        return base.LayerSet(
            n_switches=topology.n_switches,
            layers=layers,
            algorithm=self.name,
            seed=seed,
        )
