"""graphlim: numerics for dense graph limits.

Homomorphism densities, cut norms and cut distances of weighted graphs,
step graphons, weak regularity partitions, W-random graphs, and
convergence / parameter-testing diagnostics.
"""

__version__ = "0.1.0"

from .core import WeightedGraph, NodePartition  # noqa: E402
from .errors import GraphLimError, InputError, CapacityError  # noqa: E402

__all__ = ["WeightedGraph", "NodePartition", "GraphLimError", "InputError", "CapacityError",
           "__version__"]
