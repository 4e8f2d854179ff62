"""Classical and coined quantum random walks on the integer line.

Both walks are computed exactly (no sampling).  In the coined walk the coin
state |0> moves the walker one site left and |1> one site right, after the
coin unitary has been applied.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.stats import binom

from .errors import ValidationError

__all__ = [
    "WalkDistribution",
    "CoinSpec",
    "HADAMARD",
    "classical_walk",
    "quantum_walk",
    "sample_classical_walk",
    "SpreadingFit",
    "fit_spreading_exponent",
]

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
MAX_STEPS = 10**6
EXACT_BINOMIAL_MAX = 10_000


@dataclass(frozen=True, eq=False)
class WalkDistribution:
    """Position distribution after ``steps`` steps, on positions -steps..steps."""

    steps: int
    probabilities: np.ndarray

    @property
    def positions(self):
        return np.arange(-self.steps, self.steps + 1)

    def as_dict(self):
        return {int(x): float(p) for x, p in zip(self.positions, self.probabilities)
                if (x + self.steps) % 2 == 0}

    def mean(self):
        return float(self.positions @ self.probabilities)

    def std(self):
        x = self.positions
        mu = x @ self.probabilities
        return float(math.sqrt(max(((x - mu) ** 2) @ self.probabilities, 0.0)))


@dataclass(frozen=True, eq=False)
class CoinSpec:
    """Coin unitary and initial coin state (|0> = left, |1> = right)."""

    unitary: np.ndarray = HADAMARD
    state: np.ndarray = np.array([1.0, 0.0])

    def __post_init__(self):
        U = np.asarray(self.unitary, dtype=complex)
        s = np.asarray(self.state, dtype=complex)
        if U.shape != (2, 2) or np.max(np.abs(U.conj().T @ U - np.eye(2))) > 1e-12:
            raise ValidationError("coin must be a 2x2 unitary")
        if s.shape != (2,) or abs(np.linalg.norm(s) - 1.0) > 1e-12:
            raise ValidationError("coin state must be a normalized 2-vector")
        object.__setattr__(self, "unitary", U)
        object.__setattr__(self, "state", s)

    @classmethod
    def hadamard(cls, state="0"):
        """Hadamard coin with initial state ``"0"``, ``"1"`` or ``"symmetric"``
        ((|0> + i|1>)/sqrt 2, which gives a left-right symmetric walk)."""
        states = {
            "0": [1.0, 0.0],
            "1": [0.0, 1.0],
            "symmetric": np.array([1.0, 1.0j]) / np.sqrt(2.0),
        }
        if state not in states:
            raise ValidationError(f"unknown coin state {state!r}; choose from {sorted(states)}")
        return cls(HADAMARD, np.asarray(states[state]))


def _check_steps(M):
    if not isinstance(M, (int, np.integer)) or M < 0:
        raise ValidationError(f"step count must be a nonnegative integer, got {M!r}")
    if M > MAX_STEPS:
        raise ValidationError(f"step count {M} exceeds the supported maximum {MAX_STEPS}")


def classical_walk(M):
    """Exact binomial distribution: P(2k - M) = C(M, k) / 2^M."""
    _check_steps(M)
    p = np.zeros(2 * M + 1)
    if M <= EXACT_BINOMIAL_MAX:
        # int / int true division is correctly rounded
        denom = 2**M
        c = 1
        row = []
        for k in range(M + 1):
            row.append(c / denom)
            c = c * (M - k) // (k + 1)
        p[::2] = row
    else:
        p[::2] = binom.pmf(np.arange(M + 1), M, 0.5)
    return WalkDistribution(M, p)


def quantum_walk(M, coin=None):
    """Measurement statistics of the coined walk after ``M`` steps, walker starting at 0."""
    _check_steps(M)
    coin = CoinSpec.hadamard() if coin is None else coin
    n = 2 * M + 1
    amp = np.zeros((2, n), dtype=complex)
    amp[:, M] = coin.state
    for _ in range(M):
        amp = coin.unitary @ amp
        left = np.zeros(n, dtype=complex)
        right = np.zeros(n, dtype=complex)
        left[:-1] = amp[0, 1:]
        right[1:] = amp[1, :-1]
        amp[0], amp[1] = left, right
    p = np.sum(np.abs(amp) ** 2, axis=0)
    return WalkDistribution(M, p)


def sample_classical_walk(M, n_walkers, seed=0):
    """Monte Carlo cross-check of :func:`classical_walk`: final positions of ``n_walkers``."""
    _check_steps(M)
    rng = np.random.default_rng(seed)
    return 2 * rng.binomial(M, 0.5, size=n_walkers) - M


class SpreadingFit(NamedTuple):
    alpha: float
    prefactor: float
    residual: float
    alpha_stderr: float


def fit_spreading_exponent(samples):
    """Least-squares fit of log(sigma) = log(c) + alpha * log(tau).

    Parameters
    ----------
    samples : sequence of (tau, sigma)
        At least three points, all strictly positive.

    Returns
    -------
    SpreadingFit
        ``residual`` is the RMS of the log-space residuals and
        ``alpha_stderr`` the standard error of the slope.
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] < 3:
        raise ValidationError("need at least three (tau, sigma) samples")
    if not np.all(np.isfinite(data)) or np.any(data <= 0):
        raise ValidationError("all samples must be finite and strictly positive")
    x, y = np.log(data[:, 0]), np.log(data[:, 1])
    if np.ptp(x) == 0:
        raise ValidationError("samples need at least two distinct tau values")
    A = np.column_stack([x, np.ones_like(x)])
    (alpha, logc), *_ = np.linalg.lstsq(A, y, rcond=None)
    res = y - A @ np.array([alpha, logc])
    n = len(x)
    dof = max(n - 2, 1)
    stderr = math.sqrt((res @ res) / dof / np.sum((x - x.mean()) ** 2))
    return SpreadingFit(float(alpha), float(math.exp(logc)),
                        float(math.sqrt(np.mean(res**2))), stderr)
