"""Partitions, Schur/zonal polynomials, and unitary-integral checks.

The polynomials here back the group-integral identities used to reduce
ensemble averages of relative entropy to spectral averages:

* ``E_U[C_kappa(X U Y U*)] = C_kappa(X) C_kappa(Y) / C_kappa(I_m)`` over
  Haar U, where ``C_kappa = chi_dim(kappa) * schur(kappa)``;
* the second-moment fact ``E[u_ij u*_kl] = delta_ik delta_jl / m``;
* the consequence that ``E_U[tr(L_rho U ln L_sigma U*)]`` factorizes into
  ``(1/m) sum ln sigma_j``, which decouples the two density matrices.

Each identity gets a Monte Carlo estimator returning an `Estimate` so the
closed forms and the sampling stack validate each other.

Schur values are computed from the dual Jacobi-Trudi determinant in
elementary symmetric polynomials, which stays finite and stable for
repeated eigenvalues; the bialternant ratio is provided only as a test
oracle because its Vandermonde denominator vanishes for coinciding
eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .ensembles import RngStream, _as_generator, sample_haar_unitary
from .errors import ConsistencyError, DomainError, SingularityError, ValidationError
from .harness import Estimate
from .matrixcore import validate_hermitian

Partition = tuple[int, ...]

_MAX_WEIGHT = 8
_SLAB = 2048


def _as_partition(kappa) -> Partition:
    parts = tuple(int(p) for p in kappa)
    if any(p != q for p, q in zip(parts, kappa)):
        raise DomainError(f"partition parts must be integers, got {kappa!r}")
    if any(p < 0 for p in parts):
        raise DomainError(f"partition parts must be nonnegative, got {kappa!r}")
    if any(a < b for a, b in zip(parts, parts[1:])):
        raise DomainError(f"partition parts must weakly decrease, got {kappa!r}")
    while parts and parts[-1] == 0:
        parts = parts[:-1]
    return parts


def weight(kappa) -> int:
    return sum(_as_partition(kappa))


def partitions_of(l: int, max_parts: int) -> list[Partition]:
    """All partitions of `l` into at most `max_parts` parts, lexicographically
    descending.  Weights above 8 are rejected: nothing in the identities
    under test needs them and the count grows combinatorially."""
    if l < 0:
        raise DomainError(f"weight must be >= 0, got {l}")
    if l > _MAX_WEIGHT:
        raise DomainError(f"partition weight capped at {_MAX_WEIGHT}, got {l}")
    if max_parts < 1:
        raise DomainError(f"max_parts must be >= 1, got {max_parts}")
    out: list[Partition] = []

    def rec(remaining: int, cap: int, prefix: list[int]) -> None:
        if remaining == 0:
            out.append(tuple(prefix))
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(remaining, cap), 0, -1):
            prefix.append(part)
            rec(remaining - part, part, prefix)
            prefix.pop()

    rec(l, l, [])
    return out


def conjugate(kappa) -> Partition:
    """Transpose of the Young diagram."""
    parts = _as_partition(kappa)
    if not parts:
        return ()
    return tuple(sum(1 for p in parts if p >= i) for i in range(1, parts[0] + 1))


def _elementary_table(x: np.ndarray, k_max: int) -> list[np.ndarray | float]:
    """e_0 .. e_k_max of the values in x, by the stable product recurrence;
    entries beyond len(x) are exactly zero."""
    m = len(x)
    table = [1.0] + [0.0] * k_max
    top = 0
    for xi in x:
        top = min(top + 1, k_max)
        for k in range(top, 0, -1):
            table[k] = table[k] + xi * table[k - 1]
    for k in range(m + 1, k_max + 1):
        table[k] = 0.0
    return table


def elementary_symmetric(k: int, x) -> float:
    """e_k of the eigenvalues x; 0 outside 0 <= k <= len(x), e_0 = 1."""
    values = np.asarray(x, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise DomainError("eigenvalues must form a non-empty 1-D sequence")
    k = int(k)
    if k < 0 or k > values.size:
        return 0.0
    return float(_elementary_table(values, k)[k])


def schur(kappa, x) -> float:
    """Schur polynomial s_kappa(x) via the dual Jacobi-Trudi determinant
    det(e_{kappa'_i - i + j}); exactly 0 when kappa has more parts than x."""
    parts = _as_partition(kappa)
    values = np.asarray(x, dtype=float)
    if values.ndim != 1 or values.size < 1:
        raise DomainError("eigenvalues must form a non-empty 1-D sequence")
    if not parts:
        return 1.0
    conj = conjugate(parts)
    p = len(conj)
    table = _elementary_table(values, sum(parts))
    a = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            k = conj[i] - i + j
            if 0 <= k < len(table):
                a[i, j] = table[k]
    return float(np.linalg.det(a))


def schur_bialternant(kappa, x) -> float:
    """Ratio-of-alternants form of the Schur polynomial.

    Test oracle only: the denominator is a Vandermonde determinant, so
    the ratio degrades for nearly-equal eigenvalues where the dual
    Jacobi-Trudi form stays exact.
    """
    parts = _as_partition(kappa)
    values = np.asarray(x, dtype=float)
    m = values.size
    if len(parts) > m:
        return 0.0
    padded = parts + (0,) * (m - len(parts))
    rows = values[:, None]
    top = rows ** np.array([padded[j] + m - 1 - j for j in range(m)])
    bottom = rows ** np.arange(m - 1, -1, -1)
    denom = np.linalg.det(bottom)
    if denom == 0.0:
        raise SingularityError("bialternant form needs distinct eigenvalues")
    return float(np.linalg.det(top) / denom)


def chi_dim(kappa, m: int) -> int:
    """Dimension of the symmetric-group representation labelled by kappa,
    evaluated from the kappa padded to m parts.  Exact integer arithmetic;
    a non-integer or non-positive outcome means the inputs were corrupted.
    """
    parts = _as_partition(kappa)
    l = sum(parts)
    if l < 1:
        raise DomainError("chi_dim needs a partition of weight >= 1")
    if m < len(parts):
        raise DomainError(
            f"padding length m={m} is below the partition length {len(parts)}"
        )
    padded = parts + (0,) * (m - len(parts))
    numerator = math.factorial(l)
    for i in range(m):
        for j in range(i + 1, m):
            numerator *= padded[i] - padded[j] - i + j
    denominator = 1
    for j in range(m):
        denominator *= math.factorial(padded[j] + m - 1 - j)
    value, remainder = divmod(numerator, denominator)
    if remainder != 0 or value <= 0:
        raise ConsistencyError(
            f"representation dimension of {parts} came out as "
            f"{numerator}/{denominator}; expected a positive integer"
        )
    return value


def zonal_C(kappa, x) -> float:
    """C_kappa(X) = chi_dim(kappa) * s_kappa(x), the normalization for
    which sum over kappa of weight l recovers (tr X)^l."""
    parts = _as_partition(kappa)
    values = np.asarray(x, dtype=float)
    if not parts:
        return 1.0
    if len(parts) > values.size:
        return 0.0
    return chi_dim(parts, values.size) * schur(parts, values)


def _seed_of(rng) -> int:
    return rng.seed if isinstance(rng, RngStream) else -1


def _iid_estimate(values: np.ndarray, seed: int) -> Estimate:
    return Estimate(
        mean=float(values.mean()),
        stderr=float(np.std(values, ddof=1) / math.sqrt(values.size)),
        n_samples=int(values.size),
        seed=seed,
        method="iid",
        min_value=float(values.min()),
    )


def unitary_integral_exact(x_mat: np.ndarray, y_mat: np.ndarray, kappa) -> float:
    """Closed form C_kappa(X) C_kappa(Y) / C_kappa(I_m) of the Haar average."""
    x_eig = np.linalg.eigvalsh(x_mat)
    y_eig = np.linalg.eigvalsh(y_mat)
    ones = np.ones(x_eig.size)
    return zonal_C(kappa, x_eig) * zonal_C(kappa, y_eig) / zonal_C(kappa, ones)


def mc_unitary_integral(x_mat, y_mat, kappa, n_samples: int, rng) -> Estimate:
    """Monte Carlo mean of C_kappa(X U Y U*) over Haar-distributed U.

    Per sample the polynomial is evaluated from power traces of
    M = X U Y U*: tr(M^j) is provably real for Hermitian X, Y (M is
    similar to a product of Hermitian conjugations), Newton's identities
    convert power sums to elementary symmetric values, and the dual
    Jacobi-Trudi determinant finishes the job — no eigendecomposition of
    the non-normal M is ever needed.
    """
    x_arr = np.asarray(x_mat, dtype=complex)
    y_arr = np.asarray(y_mat, dtype=complex)
    if x_arr.ndim != 2 or y_arr.ndim != 2:
        raise ValidationError("X and Y must be single 2-D matrices")
    validate_hermitian(x_arr, name="X")
    validate_hermitian(y_arr, name="Y")
    if x_arr.shape != y_arr.shape:
        raise ValidationError(f"X and Y shapes differ: {x_arr.shape} vs {y_arr.shape}")
    parts = _as_partition(kappa)
    l = sum(parts)
    if l < 1:
        raise DomainError("the integrand needs a partition of weight >= 1")
    m = x_arr.shape[-1]
    if len(parts) > m:
        raise ValidationError(
            f"partition {parts} has more parts than the matrix dimension {m}"
        )
    if n_samples < 1000:
        raise ValidationError(f"need at least 1000 samples, got {n_samples}")

    chi = chi_dim(parts, m)
    conj = conjugate(parts)
    p = len(conj)
    gen = _as_generator(rng)
    values = np.empty(n_samples)
    pos = 0
    while pos < n_samples:
        take = min(_SLAB, n_samples - pos)
        u = sample_haar_unitary(m, gen, count=take)
        u_dag = np.conj(np.swapaxes(u, -1, -2))
        matrix = x_arr @ u @ y_arr @ u_dag
        power = matrix
        ps = [np.trace(power, axis1=-2, axis2=-1).real]
        for _ in range(l - 1):
            power = power @ matrix
            ps.append(np.trace(power, axis1=-2, axis2=-1).real)
        es: list[np.ndarray] = [np.ones(take)]
        for k in range(1, l + 1):
            acc = np.zeros(take)
            for i in range(1, k + 1):
                term = es[k - i] * ps[i - 1]
                acc += term if i % 2 == 1 else -term
            es.append(acc / k)
        for k in range(m + 1, l + 1):
            es[k] = np.zeros(take)
        jt = np.zeros((take, p, p))
        for i in range(p):
            for j in range(p):
                k = conj[i] - i + j
                if k == 0:
                    jt[:, i, j] = 1.0
                elif 0 < k <= l:
                    jt[:, i, j] = es[k]
        values[pos : pos + take] = chi * np.linalg.det(jt)
        pos += take
    return _iid_estimate(values, _seed_of(rng))


def cross_term_exact(lam_sigma) -> float:
    """The factorized value (1/m) sum_j ln sigma_j."""
    sigma = np.asarray(lam_sigma, dtype=float)
    if np.min(sigma) <= 0.0:
        raise SingularityError("sigma spectrum must be strictly positive")
    return float(np.mean(np.log(sigma)))


def factorized_cross_term_check(lam_rho, lam_sigma, n_samples: int, rng) -> Estimate:
    """MC mean of tr(L_rho U ln(L_sigma) U*) over Haar U.

    The Haar average mixes every sigma log-eigenvalue with equal weight
    1/m regardless of L_rho, which is exactly what lets the relative
    entropy average split into separate rho and sigma averages.
    """
    rho = np.asarray(lam_rho, dtype=float)
    sigma = np.asarray(lam_sigma, dtype=float)
    if rho.ndim != 1 or sigma.ndim != 1 or rho.size != sigma.size:
        raise ValidationError("spectra must be 1-D and of equal length")
    if np.min(sigma) <= 0.0:
        raise SingularityError("sigma spectrum must be strictly positive")
    if abs(float(rho.sum()) - 1.0) > 1e-9 or abs(float(sigma.sum()) - 1.0) > 1e-9:
        raise ValidationError("spectra must each sum to 1")
    if np.min(rho) < 0.0:
        raise ValidationError("rho spectrum must be nonnegative")
    if n_samples < 2:
        raise ValidationError("need at least 2 samples")
    m = rho.size
    log_sigma = np.log(sigma)
    gen = _as_generator(rng)
    values = np.empty(n_samples)
    pos = 0
    while pos < n_samples:
        take = min(_SLAB, n_samples - pos)
        u = sample_haar_unitary(m, gen, count=take)
        mix = np.abs(u) ** 2
        values[pos : pos + take] = np.einsum("i,sij,j->s", rho, mix, log_sigma)
        pos += take
    return _iid_estimate(values, _seed_of(rng))


@dataclass(frozen=True)
class WeingartenCheck:
    """MC second moments of Haar matrix entries against delta_ik delta_jl/m.

    `max_z` uses per-entry standard errors for the real and imaginary
    parts separately; an entry with zero spread must match exactly.
    """

    m: int
    n_samples: int
    mean: np.ndarray
    stderr_real: np.ndarray
    stderr_imag: np.ndarray
    exact: np.ndarray
    max_z: float
    seed: int


def _z_tensor(dev: np.ndarray, stderr: np.ndarray) -> np.ndarray:
    z = np.zeros_like(dev)
    spread = stderr > 0.0
    z[spread] = np.abs(dev[spread]) / stderr[spread]
    z[~spread & (dev != 0.0)] = np.inf
    return z


def mc_weingarten_moment(m: int, n_samples: int, rng) -> WeingartenCheck:
    """Estimate E[u_ij conj(u_kl)] over Haar U(m) for all index tuples."""
    if m < 1:
        raise DomainError(f"need m >= 1, got {m}")
    if n_samples < 2:
        raise ValidationError("need at least 2 samples")
    gen = _as_generator(rng)
    shape = (m, m, m, m)
    sum_re = np.zeros(shape)
    sum_im = np.zeros(shape)
    sumsq_re = np.zeros(shape)
    sumsq_im = np.zeros(shape)
    done = 0
    while done < n_samples:
        take = min(_SLAB, n_samples - done)
        u = sample_haar_unitary(m, gen, count=take)
        outer = np.einsum("sij,skl->sijkl", u, np.conj(u))
        sum_re += outer.real.sum(axis=0)
        sum_im += outer.imag.sum(axis=0)
        sumsq_re += (outer.real**2).sum(axis=0)
        sumsq_im += (outer.imag**2).sum(axis=0)
        done += take
    n = float(n_samples)
    mean_re = sum_re / n
    mean_im = sum_im / n
    var_re = np.maximum(sumsq_re / n - mean_re**2, 0.0) * n / (n - 1.0)
    var_im = np.maximum(sumsq_im / n - mean_im**2, 0.0) * n / (n - 1.0)
    stderr_re = np.sqrt(var_re / n)
    stderr_im = np.sqrt(var_im / n)
    eye = np.eye(m)
    exact = np.einsum("ik,jl->ijkl", eye, eye) / m
    max_z = float(
        max(
            _z_tensor(mean_re - exact, stderr_re).max(),
            _z_tensor(mean_im, stderr_im).max(),
        )
    )
    return WeingartenCheck(
        m=m,
        n_samples=n_samples,
        mean=mean_re + 1j * mean_im,
        stderr_real=stderr_re,
        stderr_imag=stderr_im,
        exact=exact,
        max_z=max_z,
        seed=_seed_of(rng),
    )
