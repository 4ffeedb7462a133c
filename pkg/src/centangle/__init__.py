"""Concentratable entanglement: purities, SWAP-test statistics, LP bounds,
stabilizer states and the product-structure hierarchy."""

from .statevec import (
    DensityMatrix,
    PureState,
    concentratable_entanglement,
    purity,
    purity_vector,
)

__all__ = ["DensityMatrix", "PureState", "concentratable_entanglement", "purity", "purity_vector"]
__version__ = "0.1.0"
