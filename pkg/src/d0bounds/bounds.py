"""Converse and achievability bounds on log2 of the code size, plus BSC baselines.

Every function returns a :class:`BoundPoint`; ``log2_m`` is in bits and the
rate is ``log2_m / n``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .channels import BscChannel, DenseChannel, joint_spectrum
from .distributions import log_binomial_pmf_all, normalize
from .divergence import RatioSpectrum, _log_tails, d0_smooth

CONVERSE = "converse-d0"
ACHIEVABILITY = "achievability-d0"
GALLAGER = "gallager"
RCU = "rcu"
DT = "dt"
NP_CONVERSE = "np-converse"

METHODS = (CONVERSE, ACHIEVABILITY, GALLAGER, RCU, DT, NP_CONVERSE)
MODES = ("paper", "exact")

META_CONVERSE_LABEL = "meta-converse (fixed input/output measure)"

GOLDEN_TOL = 1e-9
GOLDEN_MAXITER = 200

#: Largest ``input_size * output_size`` accepted by :func:`converse_sup_search`.
SUP_SEARCH_CAP = 64
#: Largest number of simplex grid points visited by :func:`converse_sup_search`.
SUP_GRID_CAP = 200_000


@dataclass(frozen=True)
class BoundPoint:
    n: int
    method: str
    epsilon: float
    log2_m: float
    aux: Optional[str] = None

    @property
    def rate(self) -> float:
        return self.log2_m / self.n


def _check_epsilon(epsilon: float, allow_zero: bool = False) -> None:
    lo_ok = epsilon >= 0.0 if allow_zero else epsilon > 0.0
    if not (lo_ok and epsilon < 1.0):
        interval = "[0, 1)" if allow_zero else "(0, 1)"
        raise ValueError(f"epsilon must lie in {interval}, got {epsilon!r}")


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = GOLDEN_TOL,
    maxiter: int = GOLDEN_MAXITER,
) -> tuple[float, float]:
    """Maximise a unimodal ``f`` on ``[lo, hi]``; returns ``(x, f(x))``.

    Both endpoints are compared against the interior optimum at the end.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if b - a <= xtol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    candidates = [(c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))]
    return max(candidates, key=lambda t: t[1])


# --------------------------------------------------------------------------
# bounds expressed through the smooth 0-divergence
# --------------------------------------------------------------------------


def converse_bound(spectrum: RatioSpectrum, epsilon: float, n: int = 1) -> BoundPoint:
    """Upper bound on log2 m of any code whose induced joint law is ``spectrum``.

    ``epsilon = 0`` is accepted and gives the order-0 divergence.
    """
    _check_epsilon(epsilon, allow_zero=True)
    res = d0_smooth(spectrum, epsilon)
    return BoundPoint(n, CONVERSE, epsilon, res.value, META_CONVERSE_LABEL)


def _simplex_grid(k: int, steps: int):
    for cut in itertools.combinations(range(steps + k - 1), k - 1):
        prev = -1
        parts = []
        for c in cut:
            parts.append(c - prev - 1)
            prev = c
        parts.append(steps + k - 2 - prev)
        yield np.array(parts, dtype=float) / steps


def converse_sup_search(channel: DenseChannel, epsilon: float, grid: int = 20) -> BoundPoint:
    """Estimate ``sup_{P_X} D0^eps(P_XY || P_X x P_Y)`` for a small channel.

    Visits every input law on the simplex grid with spacing ``1/grid``, then
    refines the best point by moving mass between pairs of inputs with a
    shrinking step.  The result is attained by an explicit input, so it is a
    certified lower estimate of the supremum; the input is reported in ``aux``.
    """
    _check_epsilon(epsilon, allow_zero=True)
    if channel.input_size * channel.output_size > SUP_SEARCH_CAP:
        raise ValueError(
            f"converse_sup_search refuses channels with input_size*output_size > {SUP_SEARCH_CAP}"
        )
    if grid < 2:
        raise ValueError("grid must be at least 2")
    k = channel.input_size
    if math.comb(grid + k - 1, k - 1) > SUP_GRID_CAP:
        raise ValueError(
            f"simplex grid would exceed {SUP_GRID_CAP} points; lower the grid resolution"
        )

    def value(px: np.ndarray) -> float:
        return d0_smooth(joint_spectrum(channel, normalize(px)), epsilon).value

    best_x, best_v = None, -math.inf
    for px in _simplex_grid(k, grid):
        v = value(px)
        if v > best_v:
            best_x, best_v = px, v

    step = 1.0 / grid
    while step > 1e-7 and k > 1:
        improved = False
        for i, j in itertools.permutations(range(k), 2):
            move = min(step, best_x[j])
            if move <= 0.0:
                continue
            cand = best_x.copy()
            cand[i] += move
            cand[j] -= move
            v = value(cand)
            if v > best_v + 1e-15:
                best_x, best_v, improved = cand, v, True
        if not improved:
            step /= 2.0
    aux = "input=" + "[" + ",".join(f"{x:.6g}" for x in best_x) + "]"
    return BoundPoint(1, CONVERSE, epsilon, best_v, aux)


def _achievability_breakpoints(spectrum: RatioSpectrum):
    """Rejected mass and log2 Q-mass for tests accepting atoms ``0..b`` fully.

    Returns ``(eps_prime, log_beta)`` arrays indexed by ``b``.
    """
    tails = _log_tails(spectrum)
    eps_prime = np.exp2(tails[1:])
    log_beta = np.logaddexp2.accumulate(spectrum.log_q)
    return eps_prime, log_beta


def achievability_objective(spectrum: RatioSpectrum, epsilon: float, eps_prime: float) -> float:
    """``D0^{eps'} - log2(1/(eps - eps'))`` for a fixed ``eps'``."""
    if not 0.0 <= eps_prime < epsilon:
        raise ValueError("eps_prime must lie in [0, epsilon)")
    return d0_smooth(spectrum, eps_prime).value + math.log2(epsilon - eps_prime)


def _exact_log2_m(raw_bits: float) -> float:
    """log2 of the largest integer m with ``m - 1 <= 2**raw_bits``."""
    if raw_bits == math.inf:
        return math.inf
    if raw_bits > 60.0:
        # floor(1 + x) equals x to double precision here
        return raw_bits + math.log2(1.0 + 2.0**-raw_bits)
    return math.log2(math.floor(1.0 + 2.0**raw_bits))


def achievability_bound(
    spectrum: RatioSpectrum,
    epsilon: float,
    mode: str = "exact",
    n: int = 1,
    eps_prime: Optional[float] = None,
) -> BoundPoint:
    """Random-coding lower bound on log2 m at average error ``epsilon``.

    The codebook-averaged error of the randomised threshold decoder is at
    most ``(m-1) 2**(-D0^{eps'}) + eps'``.  ``paper`` mode reports
    ``max_{eps'} D0^{eps'} - log2(1/(eps-eps'))``; ``exact`` mode reports
    ``log2 floor(1 + (eps-eps') 2**D0^{eps'})``, which is never smaller.

    The objective is monotone between consecutive atom boundaries of the
    spectrum (its derivative has constant sign there), so the maximum over
    ``eps'`` is found exactly by scanning those boundaries.  Pass
    ``eps_prime`` to pin it instead.
    """
    _check_epsilon(epsilon)
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if eps_prime is not None:
        best_ep = float(eps_prime)
        best = achievability_objective(spectrum, epsilon, best_ep)
    else:
        ep, log_beta = _achievability_breakpoints(spectrum)
        ok = ep < epsilon
        with np.errstate(divide="ignore"):
            obj = np.where(ok, np.log2(np.where(ok, epsilon - ep, 1.0)) - log_beta, -np.inf)
        i = int(np.argmax(obj))
        best_ep, best = float(ep[i]), float(obj[i])
    log2_m = best if mode == "paper" else _exact_log2_m(best)
    return BoundPoint(n, ACHIEVABILITY, epsilon, log2_m, f"eps_prime={best_ep!r};mode={mode}")


def achievability_error(spectrum: RatioSpectrum, m: int) -> tuple[float, float]:
    """Smallest ``(m-1) 2**(-D0^{eps'}) + eps'`` over ``eps'``; returns ``(bound, eps')``.

    This is the best average error the random-coding argument certifies for
    ``m`` messages.  The expression is convex and piecewise linear in
    ``eps'``, so its minimum sits on an atom boundary.
    """
    if m < 1:
        raise ValueError("m must be positive")
    ep, log_beta = _achievability_breakpoints(spectrum)
    vals = (m - 1) * np.exp2(log_beta) + ep
    vals = np.append(vals, 1.0)
    eps_all = np.append(ep, 1.0)
    i = int(np.argmin(vals))
    return float(min(vals[i], 1.0)), float(eps_all[i])


# --------------------------------------------------------------------------
# BSC baselines
# --------------------------------------------------------------------------


def _check_bsc_args(n: int, p: float, epsilon: float) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < p < 0.5:
        raise ValueError(f"p must lie in (0, 0.5), got {p!r}")
    _check_epsilon(epsilon)


def gallager_e0(rho: float, p: float) -> float:
    """Gallager's E0 in bits for the BSC with uniform input."""
    s = 1.0 / (1.0 + rho)
    return rho - (1.0 + rho) * math.log2(p**s + (1.0 - p) ** s)


def gallager_bsc(n: int, p: float, epsilon: float) -> BoundPoint:
    """Largest ``n R`` with ``2**(-n (E0(rho) - rho R)) <= epsilon`` for some rho.

    ``n R(rho) = (n E0(rho) + log2 eps) / rho`` is quasi-concave in rho, so
    golden-section search on ``(0, 1]`` finds its maximum.  A negative
    optimum is reported as 0 (a single message is always decodable).
    """
    _check_bsc_args(n, p, epsilon)
    le = math.log2(epsilon)

    def total(rho: float) -> float:
        return (n * gallager_e0(rho, p) + le) / rho

    rho, val = golden_section_max(total, 1e-12, 1.0, xtol=1e-12)
    return BoundPoint(n, GALLAGER, epsilon, max(val, 0.0), f"rho={rho!r}")


def _largest_feasible_m(error_at: Callable[[float], float], epsilon: float, n: int) -> int:
    """Largest integer M with ``error_at(log2(M-1)) <= epsilon`` (M=1 always feasible)."""
    lo, hi = 1, 2**n + 1
    while error_at(math.log2(hi - 1)) <= epsilon:
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if error_at(math.log2(mid - 1)) <= epsilon:
            lo = mid
        else:
            hi = mid
    return lo


def _rcu_exponent(n: int, p: float) -> np.ndarray:
    # log2 of 2**-n * sum_{s<=t} C(n, s)
    return np.logaddexp2.accumulate(log_binomial_pmf_all(n, 0.5))


def _dt_exponent(n: int, p: float) -> np.ndarray:
    t = np.arange(n + 1)
    return -1.0 - (n + t * math.log2(p) + (n - t) * math.log2(1.0 - p))


def _shell_error(log_b: np.ndarray, exponent: np.ndarray, log2_m_minus_1: float) -> float:
    return float(np.exp2(log_b + np.minimum(0.0, log2_m_minus_1 + exponent)).sum())


def rcu_error(n: int, p: float, m: int) -> float:
    """Random-coding union bound for ``m`` codewords on n BSC uses."""
    if m <= 1:
        return 0.0
    return _shell_error(log_binomial_pmf_all(n, p), _rcu_exponent(n, p), math.log2(m - 1))


def dt_error(n: int, p: float, m: int) -> float:
    """Dependence-testing bound for ``m`` codewords on n BSC uses."""
    if m <= 1:
        return 0.0
    return _shell_error(log_binomial_pmf_all(n, p), _dt_exponent(n, p), math.log2(m - 1))


def _bsc_search(n, p, epsilon, method, exponent_fn) -> BoundPoint:
    _check_bsc_args(n, p, epsilon)
    log_b = log_binomial_pmf_all(n, p)
    exponent = exponent_fn(n, p)
    m = _largest_feasible_m(lambda lm: _shell_error(log_b, exponent, lm), epsilon, n)
    return BoundPoint(n, method, epsilon, math.log2(m))


def rcu_bsc(n: int, p: float, epsilon: float) -> BoundPoint:
    """Largest M whose random-coding union bound is at most ``epsilon``.

    Error of M codewords: ``sum_t b(t) min{1, (M-1) 2**-n sum_{s<=t} C(n,s)}``.
    """
    return _bsc_search(n, p, epsilon, RCU, _rcu_exponent)


def dt_bsc(n: int, p: float, epsilon: float) -> BoundPoint:
    """Largest M whose dependence-testing bound is at most ``epsilon``.

    Error of M codewords: ``sum_t b(t) min{1, (M-1)/2 * 2**(-i_t)}`` with
    information density ``i_t = n + t log2 p + (n-t) log2(1-p)``.
    """
    return _bsc_search(n, p, epsilon, DT, _dt_exponent)


def np_converse_bsc(channel: BscChannel, epsilon: float) -> BoundPoint:
    """``-log2 beta_{1-eps}(P_XY, P_X x P_Y)`` for n BSC uses with uniform input.

    Written directly from the hypothesis-testing definition and kept
    independent of :func:`d0_smooth`: shell probabilities come from the
    ratio recurrence of binomial terms in extended precision, and the
    randomised Neyman-Pearson test is filled from distance 0 upward until
    its power reaches ``1 - eps``.
    """
    _check_epsilon(epsilon)
    n, p = channel.n, channel.p
    ld = np.longdouble
    d = np.arange(n, dtype=ld)
    step = np.log((n - d) / (d + 1))
    ln_shell = np.concatenate(([ld(0)], np.cumsum(step)))  # ln C(n, d)
    dd = np.arange(n + 1, dtype=ld)
    ln_p = ln_shell + dd * np.log(ld(p)) + (n - dd) * np.log1p(-ld(p))
    ln_q = ln_shell - n * np.log(ld(2))
    pm = np.exp(ln_p)
    qm = np.exp(ln_q)
    power = ld(1) - ld(epsilon)
    cum = np.cumsum(pm)
    tail = np.cumsum(pm[::-1])[::-1]  # mass at distance >= d
    hits = np.flatnonzero(cum >= power)
    k = int(hits[0]) if hits.size else n
    before = cum[k - 1] if k > 0 else ld(0)
    # power still missing at the boundary shell, from the lighter side
    missing = power - before if before <= tail[k] else tail[k] - ld(epsilon)
    lam = min(ld(1), max(ld(0), missing / pm[k]))
    beta = (np.sum(qm[:k]) if k > 0 else ld(0)) + lam * qm[k]
    value = float(-np.log2(beta)) if beta > 0 else math.inf
    return BoundPoint(n, NP_CONVERSE, epsilon, value, f"boundary_d={k};lambda={float(lam)!r}")
