"""Random-matrix samplers: Ginibre, Haar unitaries, and the two state models.

The Hilbert-Schmidt states are normalized Gram matrices of complex Ginibre
rectangles.  The Bures-Hall states insert a unitary factor ``(I + U)``
whose distribution carries the weight ``|det(I + U)|^(2*alpha)``; that
weight is uniform (Haar) at ``alpha = 0`` and is otherwise produced by a
Metropolis chain on U(m).

Samplers take either an :class:`RngStream` (a reproducible seed/stream
label) or a live ``numpy.random.Generator``.  Passing a stream always
restarts its deterministic sequence; passing a generator continues it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DomainError, SingularityError

_SQRT_HALF = 1.0 / math.sqrt(2.0)

#: Proposal determinants below this magnitude are rejected outright.
_DET_FLOOR = 1e-300


class Kind(str, Enum):
    """The two random-state ensembles."""

    HILBERT_SCHMIDT = "hs"
    BURES_HALL = "bh"


@dataclass(frozen=True)
class RngStream:
    """A (seed, stream_id) label for a reproducible random sequence.

    Identical labels reproduce identical sequences; distinct stream_ids
    under one seed give statistically independent streams (counter-based
    Philox keyed by the pair).  Parallel workers get stream_id = worker
    index.
    """

    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if self.seed < 0 or self.stream_id < 0:
            raise DomainError("seed and stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream_id,)
        )
        return np.random.Generator(np.random.Philox(sequence))


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise DomainError(f"rng must be RngStream or numpy Generator, got {type(rng)!r}")


@dataclass(frozen=True)
class EnsembleSpec:
    """Which ensemble, and the dimensions (m, n) with n >= m >= 1."""

    kind: Kind
    m: int
    n: int

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"m must be >= 1, got {self.m}")
        if self.n < self.m:
            raise DomainError(
                f"n must be >= m (dimension difference alpha = n - m >= 0), "
                f"got m={self.m}, n={self.n}"
            )

    @property
    def alpha(self) -> int:
        return self.n - self.m


def sample_ginibre(m: int, n: int, rng, count: int | None = None) -> np.ndarray:
    """i.i.d. standard complex Gaussian entries (unit complex variance).

    Real and imaginary parts are independent with variance 1/2 each.
    Returns ``(m, n)``, or ``(count, m, n)`` when count is given.
    """
    if m < 1 or n < 1:
        raise DomainError(f"need m, n >= 1, got ({m}, {n})")
    gen = _as_generator(rng)
    shape = (m, n) if count is None else (count, m, n)
    real = gen.standard_normal(shape)
    imag = gen.standard_normal(shape)
    return (real + 1j * imag) * _SQRT_HALF


def sample_haar_unitary(m: int, rng, count: int | None = None) -> np.ndarray:
    """Haar-distributed U(m) draws via phase-corrected QR.

    QR of a Ginibre draw alone is not Haar: the LAPACK factor leaves the
    diagonal phases of R unspecified.  Rescaling column j of Q by
    r_jj/|r_jj| yields the unique factorization with positive-diagonal R,
    whose Q factor is exactly Haar.
    """
    a = sample_ginibre(m, m, rng, count=count)
    q, r = np.linalg.qr(a)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    phases = d / np.abs(d)
    return q * phases[..., None, :]


def _gram_normalized(factor: np.ndarray) -> np.ndarray:
    """F F† normalized to unit trace; F of shape (..., m, k).

    Real and imaginary parts are divided separately: numpy's vectorized
    complex/complex loop is not correctly rounded (x/x can miss 1.0 by
    one ulp), and the 1x1 case must normalize to exactly 1.
    """
    w = factor @ np.conj(np.swapaxes(factor, -1, -2))
    trace = np.trace(w, axis1=-2, axis2=-1).real
    if float(np.min(trace)) <= 1e-30:
        raise SingularityError("degenerate sample: Gram matrix has ~zero trace")
    denom = trace[..., None, None]
    return (w.real / denom) + 1j * (w.imag / denom)


def sample_hs(spec: EnsembleSpec, rng, count: int | None = None) -> np.ndarray:
    """Hilbert-Schmidt density matrices Y Y†/tr(Y Y†), Y Ginibre m x n."""
    if spec.kind is not Kind.HILBERT_SCHMIDT:
        raise DomainError(f"sample_hs needs a Hilbert-Schmidt spec, got {spec.kind}")
    y = sample_ginibre(spec.m, spec.n, rng, count=count)
    return _gram_normalized(y)


def bh_from_unitary(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Assemble (I+U) Y Y† (I+U†)/tr(...) from unitary and Ginibre factors."""
    eye = np.eye(u.shape[-1])
    return _gram_normalized((eye + u) @ y)


def sample_bh(
    spec: EnsembleSpec,
    rng,
    mcmc: "McmcConfig | None" = None,
    count: int | None = None,
) -> np.ndarray:
    """Bures-Hall density matrices (I+U) Y Y† (I+U†) / tr(...).

    U is Haar when alpha = n - m = 0; for alpha > 0 it comes from a
    Metropolis chain targeting |det(I+U)|^(2 alpha), with burn-in and
    thinning taken from ``mcmc``.  A single chain serves the whole batch
    when ``count`` is given, so the burn-in cost is paid once.
    """
    if spec.kind is not Kind.BURES_HALL:
        raise DomainError(f"sample_bh needs a Bures-Hall spec, got {spec.kind}")
    gen = _as_generator(rng)
    if spec.alpha == 0:
        u = sample_haar_unitary(spec.m, gen, count=count)
    else:
        chain = UnitaryChain(spec.m, spec.alpha, gen, mcmc)
        u = chain.draw(count=count)
    y = sample_ginibre(spec.m, spec.n, gen, count=count)
    return bh_from_unitary(u, y)


@dataclass(frozen=True)
class McmcConfig:
    """Metropolis chain controls; None fields resolve to m-dependent defaults.

    Defaults: burn_in 2000 steps, thinning max(10, m^2) steps per
    returned unitary, initial step scale 0.5/sqrt(m), step adapted by
    x1.1 / /1.1 every 100 burn-in steps toward 30% acceptance and frozen
    afterward.
    """

    step_scale: float | None = None
    burn_in: int = 2000
    thinning: int | None = None
    chain_length: int = 1

    def __post_init__(self):
        if self.step_scale is not None and not self.step_scale > 0:
            raise DomainError("step_scale must be positive")
        if self.burn_in < 0:
            raise DomainError("burn_in must be >= 0")
        if self.thinning is not None and self.thinning < 1:
            raise DomainError("thinning must be >= 1")
        if self.chain_length < 1:
            raise DomainError("chain_length must be >= 1")


@dataclass(frozen=True)
class ChainDiagnostics:
    acceptance_rate: float
    step_size: float
    steps: int
    accepted: int
    warnings: tuple[str, ...] = field(default_factory=tuple)


_ADAPT_INTERVAL = 100
_ADAPT_FACTOR = 1.1
_TARGET_ACCEPTANCE = 0.3


class UnitaryChain:
    """Metropolis-Hastings sampler for U(m) weighted by |det(I+U)|^(2a).

    Proposals are U' = U exp(i eps H) with H a GUE-normalized Hermitian
    draw; the proposal law is symmetric under H -> -H, so the acceptance
    ratio is the weight ratio alone.  The constructor runs the burn-in
    (with step-size adaptation); afterwards the step size stays frozen so
    detailed balance holds for every returned sample.
    """

    def __init__(self, m: int, alpha: float, rng, config: McmcConfig | None = None):
        if m < 1:
            raise DomainError(f"m must be >= 1, got {m}")
        if alpha < 0:
            raise DomainError(f"alpha must be >= 0, got {alpha}")
        config = config or McmcConfig()
        self.m = m
        self.alpha = float(alpha)
        self.config = config
        self.step_size = (
            config.step_scale if config.step_scale is not None else 0.5 / math.sqrt(m)
        )
        self.thinning = (
            config.thinning if config.thinning is not None else max(10, m * m)
        )
        self._gen = _as_generator(rng)
        self._eye = np.eye(m)
        self._u = sample_haar_unitary(m, self._gen)
        self._log_weight = self._weight_of(self._u)
        self._steps = 0
        self._accepted = 0
        self._burn_in()

    def _weight_of(self, u: np.ndarray) -> float:
        if self.alpha == 0.0:
            return 0.0
        _, logabs = np.linalg.slogdet(self._eye + u)
        if not np.isfinite(logabs) or logabs < math.log(_DET_FLOOR):
            return -math.inf
        return 2.0 * self.alpha * float(logabs)

    def _step(self) -> bool:
        a = sample_ginibre(self.m, self.m, self._gen)
        h = (a + a.conj().T) * _SQRT_HALF
        w, q = np.linalg.eigh(h)
        rotation = (q * np.exp(1j * self.step_size * w)) @ q.conj().T
        proposal = self._u @ rotation
        log_weight = self._weight_of(proposal)
        # Always consume the acceptance uniform so trajectories stay
        # aligned across alpha values with the same stream.
        threshold = math.log(self._gen.random())
        if threshold < log_weight - self._log_weight:
            self._u = proposal
            self._log_weight = log_weight
            return True
        return False

    def _burn_in(self):
        accepted_in_window = 0
        for step in range(1, self.config.burn_in + 1):
            if self._step():
                accepted_in_window += 1
            if step % _ADAPT_INTERVAL == 0:
                rate = accepted_in_window / _ADAPT_INTERVAL
                if rate > _TARGET_ACCEPTANCE:
                    self.step_size *= _ADAPT_FACTOR
                else:
                    self.step_size /= _ADAPT_FACTOR
                self.step_size = min(max(self.step_size, 1e-6), 2.0 * math.pi)
                accepted_in_window = 0

    def draw(self, count: int | None = None) -> np.ndarray:
        """Advance `thinning` steps per returned unitary."""
        how_many = 1 if count is None else count
        out = np.empty((how_many, self.m, self.m), dtype=np.complex128)
        for i in range(how_many):
            for _ in range(self.thinning):
                self._steps += 1
                if self._step():
                    self._accepted += 1
            out[i] = self._u
        return out[0] if count is None else out

    @property
    def acceptance_rate(self) -> float:
        return self._accepted / self._steps if self._steps else math.nan

    def diagnostics(self) -> ChainDiagnostics:
        warnings = []
        rate = self.acceptance_rate
        if self._steps >= _ADAPT_INTERVAL and not 0.05 <= rate <= 0.95:
            warnings.append(
                f"chain acceptance rate {rate:.3f} outside [0.05, 0.95] "
                f"(m={self.m}, alpha={self.alpha}, step={self.step_size:.4f})"
            )
        return ChainDiagnostics(
            acceptance_rate=rate,
            step_size=self.step_size,
            steps=self._steps,
            accepted=self._accepted,
            warnings=tuple(warnings),
        )


def mcmc_unitary_chain(
    m: int, alpha: float, rng, config: McmcConfig | None = None
) -> tuple[np.ndarray, ChainDiagnostics]:
    """Materialize ``config.chain_length`` unitaries from one chain.

    Convenience wrapper over :class:`UnitaryChain` for callers that want
    a fixed-length sequence plus its acceptance diagnostics.
    """
    config = config or McmcConfig()
    chain = UnitaryChain(m, alpha, rng, config)
    unitaries = chain.draw(count=config.chain_length)
    return unitaries, chain.diagnostics()
