"""Exact ensemble averages of quantum relative entropy, with Monte Carlo checks.

The library computes closed-form averages of the relative entropy
D(rho||sigma) when rho and sigma are drawn independently from the
Hilbert-Schmidt or Bures-Hall random-state ensembles, the corresponding
large-dimension limits, and everything needed to verify those formulas by
direct simulation: samplers for the matrix models, spectral entropy
functionals, and the symmetric-function identities behind the derivation.
"""

__version__ = "0.1.0"

from .errors import (
    ConsistencyError,
    DomainError,
    SingularityError,
    UnsupportedLimitError,
    ValidationError,
)

__all__ = [
    "ConsistencyError",
    "DomainError",
    "SingularityError",
    "UnsupportedLimitError",
    "ValidationError",
    "__version__",
]
