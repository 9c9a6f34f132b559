"""Smooth 0-divergence on finite alphabets.

A pair of distributions (P, Q) is reduced to its *ratio spectrum*: the
atoms of the likelihood ratio dP/dQ on supp(P), merged by equal ratio and
sorted with the largest ratio first.  The smooth 0-divergence

    D0^delta(P||Q) = sup { -log2 sum(phi * Q) : 0 <= phi <= 1, sum(phi * P) >= 1 - delta }

is a fractional knapsack on that spectrum.  Filling atoms in decreasing
ratio order, with a fraction on the last atom, is optimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import LOG_ZERO, SUM_TOL, FiniteDistribution, log_sum_exp2, normalize

#: Tolerance (log2 units) under which ratios from a single construction count as equal.
RATIO_TOL = 1e-12

#: Default merge tolerance for products of spectra.
CONVOLVE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RatioSpectrum:
    """Atoms ``(log_ratio, log_p, log_q)`` with ``log_ratio`` strictly decreasing.

    Only atoms with positive P-mass are stored.  An atom with zero Q-mass
    carries ``log_ratio = +inf``.
    """

    log_ratio: np.ndarray
    log_p: np.ndarray
    log_q: np.ndarray

    def __post_init__(self):
        arrays = []
        for name in ("log_ratio", "log_p", "log_q"):
            a = np.array(getattr(self, name), dtype=float).ravel()
            a.setflags(write=False)
            object.__setattr__(self, name, a)
            arrays.append(a)
        r, lp, lq = arrays
        if not (r.size == lp.size == lq.size) or r.size == 0:
            raise ValueError("spectrum arrays must be nonempty and of equal length")
        if (lp == LOG_ZERO).any():
            raise ValueError("spectrum atoms must carry positive P-mass")
        with np.errstate(invalid="ignore"):
            if r.size > 1 and not (np.diff(r) < 0).all():
                raise ValueError("log ratios must be strictly decreasing")
        if abs(log_sum_exp2(lp)) > SUM_TOL:
            raise ValueError("P-masses of a spectrum must sum to one")
        if log_sum_exp2(lq) > SUM_TOL:
            raise ValueError("Q-masses of a spectrum must sum to at most one")

    @property
    def size(self) -> int:
        return int(self.log_ratio.size)

    @property
    def p_probs(self) -> np.ndarray:
        return np.exp2(self.log_p)

    @property
    def q_probs(self) -> np.ndarray:
        return np.exp2(self.log_q)

    def __len__(self):
        return self.size

    def __repr__(self):
        return f"RatioSpectrum(atoms={self.size})"


@dataclass(frozen=True)
class ThresholdTest:
    """Randomised likelihood-ratio test.

    Accepts with probability one above ``boundary_log_ratio``, with
    probability ``gamma`` on it and never below.  ``boundary_log_ratio =
    +inf`` with ``gamma = 0`` is the test that rejects everything.
    """

    boundary_log_ratio: float
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma!r}")
        if math.isnan(self.boundary_log_ratio):
            raise ValueError("boundary ratio is NaN")

    def phi(self, log_ratios, tol: float = RATIO_TOL) -> np.ndarray:
        """Acceptance probability at each log-ratio value."""
        r = np.asarray(log_ratios, dtype=float)
        b = self.boundary_log_ratio
        if b == math.inf:
            on_boundary = r == math.inf
            above = np.zeros(r.shape, dtype=bool)
        else:
            on_boundary = np.abs(r - b) <= tol
            above = (r > b) & ~on_boundary
        return np.where(above, 1.0, np.where(on_boundary, self.gamma, 0.0))


REJECT_ALL = ThresholdTest(math.inf, 0.0)


@dataclass(frozen=True)
class D0Result:
    """Optimum of the smooth 0-divergence program.

    ``value`` is in bits and equals ``-q_captured``; ``p_captured`` is the
    linear P-mass accepted by ``test``.
    """

    value: float
    test: ThresholdTest
    p_captured: float
    q_captured: float


def _group_log_sum(values: np.ndarray, starts: np.ndarray) -> np.ndarray:
    """log2-sum-exp2 over the contiguous groups beginning at ``starts``."""
    top = np.maximum.reduceat(values, starts)
    counts = np.diff(np.append(starts, values.size))
    shift = np.repeat(np.where(np.isfinite(top), top, 0.0), counts)
    with np.errstate(divide="ignore"):
        sums = np.log2(np.add.reduceat(np.exp2(values - shift), starts))
    return np.where(np.isfinite(top), top + sums, top)


def spectrum_from_atoms(log_ratio, log_p, log_q, merge_tol: float = RATIO_TOL) -> RatioSpectrum:
    """Sort, drop zero-P atoms and merge ratios closer than ``merge_tol``.

    The ratio of a merged group is recomputed from its merged masses.
    """
    r = np.asarray(log_ratio, dtype=float).ravel()
    lp = np.asarray(log_p, dtype=float).ravel()
    lq = np.asarray(log_q, dtype=float).ravel()
    keep = lp > LOG_ZERO
    r, lp, lq = r[keep], lp[keep], lq[keep]
    order = np.argsort(-r, kind="stable")
    r, lp, lq = r[order], lp[order], lq[order]
    with np.errstate(invalid="ignore"):
        gap = r[:-1] - r[1:]
        split = (gap > merge_tol) | (np.isinf(r[:-1]) != np.isinf(r[1:]))
    starts = np.flatnonzero(np.concatenate(([True], split)))
    if starts.size == r.size:
        mp, mq = lp, lq
    else:
        mp = _group_log_sum(lp, starts)
        mq = _group_log_sum(lq, starts)
    with np.errstate(invalid="ignore"):
        ratio = np.where(mq == LOG_ZERO, math.inf, mp - mq)
    return RatioSpectrum(ratio, mp, mq)


def _check_same_alphabet(p: FiniteDistribution, q: FiniteDistribution) -> None:
    if p.alphabet_size != q.alphabet_size:
        raise ValueError(
            f"alphabet mismatch: {p.alphabet_size} vs {q.alphabet_size} symbols"
        )


def build_spectrum(p: FiniteDistribution, q: FiniteDistribution) -> RatioSpectrum:
    """Ratio spectrum of ``p`` against ``q``."""
    _check_same_alphabet(p, q)
    with np.errstate(invalid="ignore"):
        r = np.where(q.masses == LOG_ZERO, math.inf, p.masses - q.masses)
    return spectrum_from_atoms(r, p.masses, q.masses)


def d0(spectrum: RatioSpectrum) -> float:
    """Renyi divergence of order zero, ``-log2 Q(supp P)``."""
    return -log_sum_exp2(spectrum.log_q)


def _log_tails(spectrum: RatioSpectrum) -> np.ndarray:
    """``tails[i]`` = log2 of the P-mass of atoms ``i, i+1, ...``; length size+1."""
    rev = np.logaddexp2.accumulate(spectrum.log_p[::-1])[::-1]
    return np.append(rev, LOG_ZERO)


def d0_smooth(spectrum: RatioSpectrum, delta: float) -> D0Result:
    """Smooth 0-divergence ``D0^delta`` and the optimal threshold test."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta!r}")
    if delta == 1.0:
        return D0Result(math.inf, REJECT_ALL, 0.0, LOG_ZERO)
    log_delta = math.log2(delta) if delta > 0.0 else LOG_ZERO
    tails = _log_tails(spectrum)
    # boundary: first atom whose strict successors hold at most delta of P
    b = int(np.argmax(tails[1:] <= log_delta))
    lp_b = float(spectrum.log_p[b])
    probs = spectrum.p_probs
    # P-mass still needed from the boundary atom.  Either side of the
    # boundary gives it; summing the lighter side keeps the error at the
    # rounding level of that side, not of the total.
    head, tail = probs[:b], probs[b:]
    if delta == 0.0:
        taken = math.inf
    elif math.fsum(head) <= math.fsum(tail):
        taken = math.fsum([1.0, -delta, *(-head)])
    else:
        taken = math.fsum([*tail, -delta])
    gamma = min(1.0, max(0.0, taken / 2.0**lp_b))
    if gamma == 0.0:
        # rounding put the whole requirement strictly above the boundary atom
        if b == 0:
            return D0Result(math.inf, REJECT_ALL, 0.0, LOG_ZERO)
        b, gamma = b - 1, 1.0
        lp_b = float(spectrum.log_p[b])
    log_gamma = math.log2(gamma)
    q_terms = np.append(spectrum.log_q[:b], spectrum.log_q[b] + log_gamma)
    q_captured = log_sum_exp2(q_terms)
    p_captured = math.fsum(spectrum.p_probs[:b]) + gamma * 2.0**lp_b
    test = ThresholdTest(float(spectrum.log_ratio[b]), gamma)
    return D0Result(-q_captured, test, p_captured, q_captured)


def kl_divergence(p: FiniteDistribution, q: FiniteDistribution) -> float:
    """Relative entropy ``D(P||Q)`` in bits."""
    _check_same_alphabet(p, q)
    s = p.support
    if (q.masses[s] == LOG_ZERO).any():
        return math.inf
    return math.fsum(p.probs[s] * (p.masses[s] - q.masses[s]))


def _check_kernel(w: np.ndarray, rows: int) -> np.ndarray:
    w = np.asarray(w, dtype=float)
    if w.ndim != 2 or w.shape[0] != rows:
        raise ValueError(f"kernel must have {rows} rows, got shape {w.shape}")
    if np.isnan(w).any() or (w < 0).any():
        raise ValueError("kernel entries must be nonnegative")
    bad = np.flatnonzero(np.abs(w.sum(axis=1) - 1.0) > SUM_TOL)
    if bad.size:
        raise ValueError(f"kernel row {int(bad[0])} does not sum to one")
    return w


def apply_kernel(w, d: FiniteDistribution) -> FiniteDistribution:
    """Output distribution of the row-stochastic kernel ``w`` fed with ``d``."""
    w = _check_kernel(w, d.alphabet_size)
    return normalize(d.probs @ w)


def pull_back_test(w, phi_out) -> np.ndarray:
    """Input-side test ``phi(x) = sum_y w[x, y] phi_out[y]``.

    Accepts exactly the same P- and Q-mass before the kernel as
    ``phi_out`` does after it; this is why processing can only lower D0^delta.
    """
    w = np.asarray(w, dtype=float)
    return w @ np.asarray(phi_out, dtype=float)


def symbol_phi(p: FiniteDistribution, q: FiniteDistribution, test: ThresholdTest) -> np.ndarray:
    """Evaluate ``test`` symbol by symbol on the alphabet of ``(p, q)``.

    Symbols outside supp(P) get zero.  Ratios are re-derived exactly as
    :func:`build_spectrum` does.
    """
    _check_same_alphabet(p, q)
    with np.errstate(invalid="ignore"):
        r = np.where(q.masses == LOG_ZERO, math.inf, p.masses - q.masses)
    return np.where(p.support, test.phi(r), 0.0)


IDENTITY_SPECTRUM = RatioSpectrum([0.0], [0.0], [0.0])


def convolve_spectra(
    s1: RatioSpectrum, s2: RatioSpectrum, merge_tol: float = CONVOLVE_TOL
) -> RatioSpectrum:
    """Spectrum of the product pair ``(P1 x P2, Q1 x Q2)``."""
    if merge_tol < 0:
        raise ValueError("merge_tol must be nonnegative")
    r = np.add.outer(s1.log_ratio, s2.log_ratio)
    lp = np.add.outer(s1.log_p, s2.log_p)
    lq = np.add.outer(s1.log_q, s2.log_q)
    # Per-atom rounding grows with |log mass| and would let the totals drift
    # linearly in the block length under repeated squaring; pin them to the
    # exact product totals instead.
    shift_p = -log_sum_exp2(lp.ravel())
    shift_q = log_sum_exp2(s1.log_q) + log_sum_exp2(s2.log_q) - log_sum_exp2(lq.ravel())
    if math.isfinite(shift_q):
        lq = lq + shift_q
    else:
        shift_q = 0.0
    return spectrum_from_atoms(r + shift_p - shift_q, lp + shift_p, lq, merge_tol)


def self_convolve(s: RatioSpectrum, n: int, merge_tol: float = CONVOLVE_TOL) -> RatioSpectrum:
    """n-fold product spectrum by repeated squaring."""
    if n < 1:
        raise ValueError("n must be positive")
    result = None
    base = s
    while n:
        if n & 1:
            result = base if result is None else convolve_spectra(result, base, merge_tol)
        n >>= 1
        if n:
            base = convolve_spectra(base, base, merge_tol)
    return result
