"""Log-domain probabilities, finite distributions and binomial primitives.

Every probability handled by the package is stored as a base-2 logarithm.
Zero mass is represented by ``LOG_ZERO`` (negative infinity), never dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

#: Log-domain value of zero mass.
LOG_ZERO = -math.inf

#: Normalisation tolerance for :class:`FiniteDistribution`.
SUM_TOL = 1e-12

_LN2 = math.log(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# Series coefficients of the Stirling remainder ln(k!) - ln(sqrt(2 pi k) (k/e)^k)
_S0 = 1.0 / 12.0
_S1 = 1.0 / 360.0
_S2 = 1.0 / 1260.0
_S3 = 1.0 / 1680.0
_S4 = 1.0 / 1188.0


def log_sum_exp2(terms) -> float:
    """Return ``log2(sum(2**t for t in terms))``.

    Empty input and all-``LOG_ZERO`` input both give ``LOG_ZERO``.
    """
    a = np.asarray(terms, dtype=float).ravel()
    if a.size == 0:
        return LOG_ZERO
    if np.isnan(a).any():
        raise ValueError("log_sum_exp2: NaN term")
    top = a.max()
    if top == LOG_ZERO:
        return LOG_ZERO
    if top == math.inf:
        return math.inf
    return float(top + np.log2(np.sum(np.exp2(a - top))))


def _stirlerr(k: np.ndarray) -> np.ndarray:
    """Stirling-formula remainder in nats for nonnegative integers ``k``."""
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    small = k <= 15.0
    ks = k[small]
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = gammaln(ks + 1.0) - (ks + 0.5) * np.log(ks) + ks - _LOG_SQRT_2PI
    out[small] = np.where(ks == 0.0, 0.0, direct)
    kl = k[~small]
    kk = kl * kl
    out[~small] = (_S0 - (_S1 - (_S2 - (_S3 - _S4 / kk) / kk) / kk) / kk) / kl
    return out


def _bd0(x: np.ndarray, mean: np.ndarray) -> np.ndarray:
    """Deviance term ``x log(x/mean) + mean - x`` evaluated without cancellation."""
    x = np.asarray(x, dtype=float)
    mean = np.broadcast_to(np.asarray(mean, dtype=float), x.shape)
    out = np.empty_like(x)
    near = np.abs(x - mean) < 0.1 * (x + mean)
    xn, mn = x[near], mean[near]
    v = (xn - mn) / (xn + mn)
    s = (xn - mn) * v
    ej = 2.0 * xn * v
    v2 = v * v
    # |v| < 0.1, so each term shrinks by at least 100x
    for j in range(1, 12):
        ej = ej * v2
        s = s + ej / (2 * j + 1)
    out[near] = s
    xf, mf = x[~near], mean[~near]
    out[~near] = xf * np.log(xf / mf) + mf - xf
    return out


def _log_binomial_pmf_nat(n: int, k: np.ndarray, p: float) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    out = np.full(k.shape, -np.inf)
    if p == 0.0:
        out[k == 0] = 0.0
        return out
    if p == 1.0:
        out[k == n] = 0.0
        return out
    q = 1.0 - p
    out[k == 0] = n * math.log1p(-p)
    out[k == n] = n * math.log(p)
    inner = (k > 0) & (k < n)
    ki = k[inner]
    lc = (
        _stirlerr(np.array([n], dtype=float))[0]
        - _stirlerr(ki)
        - _stirlerr(n - ki)
        - _bd0(ki, n * p)
        - _bd0(n - ki, n * q)
    )
    lf = math.log(2.0 * math.pi) + np.log(ki) + np.log1p(-ki / n)
    out[inner] = lc - 0.5 * lf
    return out


def _check_binomial_args(n: int, p: float) -> None:
    if n < 0 or int(n) != n:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p!r}")


def log_binomial_pmf(n: int, k: int, p: float) -> float:
    """Base-2 log of ``C(n, k) p**k (1-p)**(n-k)``.

    Uses the saddle-point decomposition (Stirling remainders plus a
    cancellation-free deviance term), which keeps about 14 significant
    digits for ``n`` up to 10**6 and beyond.
    """
    _check_binomial_args(n, p)
    if not 0 <= k <= n or int(k) != k:
        raise ValueError(f"k must be an integer in [0, {n}], got {k!r}")
    return float(_log_binomial_pmf_nat(n, np.array([k]), p)[0] / _LN2)


def log_binomial_pmf_all(n: int, p: float) -> np.ndarray:
    """Vector of :func:`log_binomial_pmf` for ``k = 0..n``."""
    _check_binomial_args(n, p)
    return _log_binomial_pmf_nat(n, np.arange(n + 1), p) / _LN2


def log_binomial_coefficient(n: int, k) -> np.ndarray:
    """Base-2 log of ``C(n, k)`` (vectorised over ``k``)."""
    return _log_binomial_pmf_nat(n, np.atleast_1d(k), 0.5) / _LN2 + n


@dataclass(frozen=True, eq=False)
class FiniteDistribution:
    """Probability vector over ``{0, ..., alphabet_size-1}`` stored in log2.

    Construct with :func:`normalize` or :meth:`from_probs`; the raw
    constructor expects log-domain masses that already sum to one.
    """

    masses: np.ndarray

    def __post_init__(self):
        m = np.array(self.masses, dtype=float).ravel()
        if m.size < 1:
            raise ValueError("distribution needs at least one symbol")
        if np.isnan(m).any() or (m > SUM_TOL).any():
            raise ValueError("masses must be log2-probabilities (<= 0, no NaN)")
        total = log_sum_exp2(m)
        if not abs(total) <= SUM_TOL:
            raise ValueError(f"masses sum to 2**{total!r}, expected 1")
        m.setflags(write=False)
        object.__setattr__(self, "masses", m)

    @classmethod
    def from_probs(cls, probs, tol: float = 1e-9) -> "FiniteDistribution":
        """Build from linear probabilities summing to one within ``tol``."""
        w = np.asarray(probs, dtype=float).ravel()
        if w.size and abs(w.sum() - 1.0) > tol:
            raise ValueError(f"probabilities sum to {w.sum()!r}, expected 1")
        return normalize(w)

    @property
    def alphabet_size(self) -> int:
        return int(self.masses.size)

    @property
    def probs(self) -> np.ndarray:
        return np.exp2(self.masses)

    @property
    def support(self) -> np.ndarray:
        return self.masses > LOG_ZERO

    def __len__(self):
        return self.alphabet_size

    def __repr__(self):
        return f"FiniteDistribution(probs={np.round(self.probs, 6).tolist()})"


def normalize(weights: Sequence[float]) -> FiniteDistribution:
    """Distribution proportional to nonnegative ``weights``."""
    w = np.asarray(weights, dtype=float).ravel()
    if w.size == 0:
        raise ValueError("normalize: empty weight vector")
    if np.isnan(w).any() or (w < 0).any() or not np.isfinite(w).all():
        raise ValueError("normalize: weights must be finite and nonnegative")
    total = math.fsum(w)
    if total <= 0.0:
        raise ValueError("normalize: at least one weight must be positive")
    with np.errstate(divide="ignore"):
        masses = np.log2(w) - math.log2(total)
    masses[w == 0.0] = LOG_ZERO
    # one correction pass removes the rounding left by the division
    masses[w > 0.0] -= log_sum_exp2(masses)
    return FiniteDistribution(masses)


def uniform(k: int) -> FiniteDistribution:
    return normalize(np.ones(k))
