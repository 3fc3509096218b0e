"""Complex Hermitian utilities and the entropy functionals on spectra.

All operations accept a single matrix of shape ``(m, m)`` or a stack of
matrices ``(..., m, m)`` and return scalars or correspondingly shaped
arrays.  The stacked form is what makes large Monte Carlo batches cheap;
the single-matrix form is the documented contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularityError, ValidationError

#: Hermiticity tolerance, relative to the largest entry magnitude.
HERMITIAN_RTOL = 1e-12
#: Unit-trace tolerance for density matrices.
TRACE_ATOL = 1e-10
#: Density-matrix spectra may dip this far below zero before rejection.
EIGENVALUE_FLOOR = -1e-10
#: Spectra touching this level make logarithms diverge.
SINGULAR_EIGENVALUE = 1e-14


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in ascending order, plus optional orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None


def validate_hermitian(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a complex array after checking H = H-dagger.

    The deviation is measured entrywise against ``HERMITIAN_RTOL`` times
    the largest entry magnitude.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValidationError(f"{name} must be square, got shape {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    deviation = float(np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2)))))
    if deviation > HERMITIAN_RTOL * scale:
        raise ValidationError(
            f"{name} is not Hermitian: max deviation {deviation:.3e} "
            f"exceeds {HERMITIAN_RTOL:.0e} * max|entry| = {HERMITIAN_RTOL * scale:.3e}"
        )
    return a


def eigh(h, want_vectors: bool = True) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix (or stack of them).

    Eigenvalues come back real and ascending; eigenvectors, when
    requested, are orthonormal columns such that ``H = V diag(w) V†``.
    """
    h = validate_hermitian(h)
    if want_vectors:
        w, v = np.linalg.eigh(h)
        return Spectrum(eigenvalues=w, eigenvectors=v)
    return Spectrum(eigenvalues=np.linalg.eigvalsh(h))


def _check_density_spectrum(rho, eigenvalues, name):
    trace = np.trace(rho, axis1=-2, axis2=-1)
    worst = float(np.max(np.abs(trace - 1.0)))
    if worst > TRACE_ATOL:
        raise ValidationError(
            f"{name} trace deviates from 1 by {worst:.3e} (> {TRACE_ATOL:.0e})"
        )
    lowest = float(np.min(eigenvalues))
    if lowest < EIGENVALUE_FLOOR:
        raise ValidationError(
            f"{name} has eigenvalue {lowest:.3e} below floor {EIGENVALUE_FLOOR:.0e}"
        )


def validate_density_matrix(rho, name: str = "rho") -> np.ndarray:
    """Check Hermiticity, unit trace, and near-positivity; return eigenvalues.

    Returns the (stacked) ascending eigenvalue arrays so callers that
    need spectra anyway do not pay for a second decomposition.
    """
    rho = validate_hermitian(rho, name)
    eigenvalues = np.linalg.eigvalsh(rho)
    _check_density_spectrum(rho, eigenvalues, name)
    return eigenvalues


def _plogp(lam: np.ndarray) -> np.ndarray:
    """Entrywise lambda*ln(lambda) with 0 ln 0 = 0 (input already >= 0)."""
    out = np.zeros_like(lam)
    positive = lam > 0.0
    out[positive] = lam[positive] * np.log(lam[positive])
    return out


def von_neumann_entropy(rho):
    """-tr(rho ln rho) in nats; spectrum-only, lies in [0, ln m].

    Eigenvalues in ``[EIGENVALUE_FLOOR, 0)`` are clamped to zero under
    the 0 ln 0 = 0 convention.
    """
    lam = validate_density_matrix(rho)
    lam = np.maximum(lam, 0.0)
    result = -_plogp(lam).sum(axis=-1)
    return float(result) if result.ndim == 0 else result


def log_det(rho):
    """ln det(rho) = sum of ln(eigenvalues) for a strictly positive spectrum."""
    lam = validate_density_matrix(rho)
    smallest = float(np.min(lam))
    if smallest <= SINGULAR_EIGENVALUE:
        raise SingularityError(
            f"log_det needs eigenvalues > {SINGULAR_EIGENVALUE:.0e}, "
            f"found {smallest:.3e}"
        )
    result = np.log(lam).sum(axis=-1)
    return float(result) if result.ndim == 0 else result


def _eigenpairs_for_pair(rho, sigma):
    """Shared validation + decomposition for the two-state functionals."""
    rho = validate_hermitian(rho, "rho")
    sigma = validate_hermitian(sigma, "sigma")
    if rho.shape != sigma.shape:
        raise ValidationError(
            f"dimension mismatch: rho {rho.shape} vs sigma {sigma.shape}"
        )
    lam, v = np.linalg.eigh(rho)
    mu, w = np.linalg.eigh(sigma)
    _check_density_spectrum(rho, lam, "rho")
    _check_density_spectrum(sigma, mu, "sigma")
    smallest = float(np.min(mu))
    if smallest <= SINGULAR_EIGENVALUE:
        raise SingularityError(
            f"sigma has eigenvalue {smallest:.3e} <= {SINGULAR_EIGENVALUE:.0e}; "
            "relative entropy diverges"
        )
    return np.maximum(lam, 0.0), v, mu, w


def _cross_term(lam, v, mu, w):
    # tr(rho ln sigma) = sum_ij lam_i |v_i† w_j|^2 ln(mu_j)
    overlap = np.abs(np.swapaxes(np.conj(v), -1, -2) @ w) ** 2
    return np.einsum("...i,...ij,...j->...", lam, overlap, np.log(mu))


def cross_log_trace(rho, sigma):
    """tr(rho ln sigma), the eigenvector-coupled cross term."""
    lam, v, mu, w = _eigenpairs_for_pair(rho, sigma)
    result = _cross_term(lam, v, mu, w)
    return float(result) if result.ndim == 0 else result


def relative_entropy(rho, sigma):
    """D(rho||sigma) = tr(rho ln rho) - tr(rho ln sigma), in nats.

    Requires sigma strictly positive definite; rho may be singular (its
    zero directions contribute nothing by the 0 ln 0 convention).
    """
    lam, v, mu, w = _eigenpairs_for_pair(rho, sigma)
    result = _plogp(lam).sum(axis=-1) - _cross_term(lam, v, mu, w)
    return float(result) if result.ndim == 0 else result
