"""Channel models and their joint-versus-product ratio spectra."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from .distributions import LOG_ZERO, SUM_TOL, FiniteDistribution, log_binomial_pmf_all
from .divergence import RatioSpectrum, apply_kernel, spectrum_from_atoms

#: Row-sum tolerance for channel matrices read from text files.
FILE_ROW_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class DenseChannel:
    """Discrete memoryless channel given by its full transition matrix.

    ``transition[x, y]`` holds ``log2 W(y|x)``.
    """

    transition: np.ndarray

    def __post_init__(self):
        t = np.array(self.transition, dtype=float)
        if t.ndim != 2 or 0 in t.shape:
            raise ValueError(f"transition matrix must be 2-D and nonempty, got {t.shape}")
        if np.isnan(t).any() or (t > SUM_TOL).any():
            raise ValueError("transition entries must be log2-probabilities")
        sums = np.log2(np.exp2(t).sum(axis=1))
        bad = np.flatnonzero(np.abs(sums) > SUM_TOL)
        if bad.size:
            raise ValueError(f"row {int(bad[0])} of the transition matrix does not sum to one")
        t.setflags(write=False)
        object.__setattr__(self, "transition", t)

    @classmethod
    def from_matrix(cls, probs, tol: float = SUM_TOL) -> "DenseChannel":
        """Channel from a linear row-stochastic matrix.

        Rows within ``tol`` of one are renormalised exactly.
        """
        w = np.asarray(probs, dtype=float)
        if w.ndim != 2:
            raise ValueError("channel matrix must be 2-D")
        if np.isnan(w).any() or (w < 0).any():
            raise ValueError("channel entries must be nonnegative")
        sums = w.sum(axis=1)
        bad = np.flatnonzero(np.abs(sums - 1.0) > tol)
        if bad.size:
            raise ValueError(f"row {int(bad[0])} sums to {sums[bad[0]]!r}, expected 1")
        with np.errstate(divide="ignore"):
            t = np.log2(w) - np.log2(sums)[:, None]
        return cls(t)

    @property
    def input_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]

    @property
    def probs(self) -> np.ndarray:
        return np.exp2(self.transition)

    def __repr__(self):
        return f"DenseChannel({self.input_size}x{self.output_size})"


@dataclass(frozen=True)
class BscChannel:
    """``n`` uses of a binary symmetric channel with crossover ``p``."""

    n: int
    p: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"blocklength must be a positive integer, got {self.n!r}")
        if not 0.0 < self.p < 0.5:
            raise ValueError(f"crossover must lie in (0, 0.5), got {self.p!r}")


def identity_channel(k: int) -> DenseChannel:
    return DenseChannel.from_matrix(np.eye(k))


def useless_channel(k: int, row) -> DenseChannel:
    """Every input produces the same output distribution ``row``."""
    return DenseChannel.from_matrix(np.tile(np.asarray(row, dtype=float), (k, 1)))


def bsc_dense(p: float) -> DenseChannel:
    """Single use of the BSC as a 2x2 matrix."""
    return DenseChannel.from_matrix([[1.0 - p, p], [p, 1.0 - p]])


def memoryless_extension(channel: DenseChannel, n: int) -> DenseChannel:
    """Explicit n-use product channel (Kronecker power); size grows as k**n."""
    w = np.ones((1, 1))
    base = channel.probs
    for _ in range(n):
        w = np.kron(w, base)
    return DenseChannel.from_matrix(w, tol=1e-9)


def joint_spectrum(channel: DenseChannel, input: FiniteDistribution) -> RatioSpectrum:
    """Spectrum of ``P_XY`` against ``P_X x P_Y`` for the given input law.

    The atom ratios are information densities ``log2 W(y|x) / P_Y(y)``.
    """
    if input.alphabet_size != channel.input_size:
        raise ValueError(
            f"input has {input.alphabet_size} symbols, channel expects {channel.input_size}"
        )
    out = apply_kernel(channel.probs, input)
    lx = input.masses[:, None]
    ly = out.masses[None, :]
    joint = lx + channel.transition
    product = lx + ly
    with np.errstate(invalid="ignore"):
        density = np.where(ly == LOG_ZERO, math.inf, channel.transition - ly)
    return spectrum_from_atoms(density, joint, np.broadcast_to(product, joint.shape))


def information_density(channel: DenseChannel, input: FiniteDistribution) -> np.ndarray:
    """Matrix of ``log2 W(y|x) / P_Y(y)``; ``-inf`` where ``W(y|x) = 0``."""
    out = apply_kernel(channel.probs, input)
    with np.errstate(invalid="ignore"):
        dens = channel.transition - out.masses[None, :]
    return np.where(channel.transition == LOG_ZERO, LOG_ZERO, dens)


def bsc_spectrum(channel: BscChannel) -> RatioSpectrum:
    """Spectrum of n BSC uses with uniform input, one atom per Hamming distance.

    Never materialises the 2**n x 2**n channel.
    """
    n, p = channel.n, channel.p
    d = np.arange(n + 1)
    ratio = n + d * math.log2(p) + (n - d) * math.log2(1.0 - p)
    return RatioSpectrum(ratio, log_binomial_pmf_all(n, p), log_binomial_pmf_all(n, 0.5))


def parse_channel(text: str) -> DenseChannel:
    """Parse ``rows cols`` followed by row-major probabilities."""
    tokens = text.split()
    if len(tokens) < 2:
        raise ValueError("channel file must start with 'rows cols'")
    try:
        rows, cols = int(tokens[0]), int(tokens[1])
    except ValueError:
        raise ValueError("channel header must be two integers 'rows cols'") from None
    if rows < 1 or cols < 1:
        raise ValueError("channel dimensions must be positive")
    body = tokens[2:]
    if len(body) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, found {len(body)}")
    try:
        w = np.array([float(t) for t in body]).reshape(rows, cols)
    except ValueError as exc:
        raise ValueError(f"bad channel entry: {exc}") from None
    return DenseChannel.from_matrix(w, tol=FILE_ROW_TOL)


def load_channel(path: str | os.PathLike) -> DenseChannel:
    with open(path) as fh:
        return parse_channel(fh.read())
