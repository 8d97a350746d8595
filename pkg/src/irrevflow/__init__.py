"""irrevflow: Lyapounov operators and irreversible semigroup representations.

The library builds, on finite energy and line grids, the operator Lyapounov
variable M_F for a semibounded Hamiltonian, its square root Lambda_F, the
contraction semigroup Z(t) obtained by the similarity transformation
Lambda_F U(t) Lambda_F^{-1}, the partial isometry onto the Hardy space of the
upper half plane, and the spectral time observable whose decay law matches
the Lyapounov expectation. Every identity the construction relies on is
checked numerically in the test suite at documented tolerances.
"""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    GridMismatchError,
    InvalidArgumentError,
    NotPositiveSemidefiniteError,
    NotProjectorLikeError,
)

__all__ = [
    "__version__",
    "ConfigError",
    "GridMismatchError",
    "InvalidArgumentError",
    "NotPositiveSemidefiniteError",
    "NotProjectorLikeError",
]
