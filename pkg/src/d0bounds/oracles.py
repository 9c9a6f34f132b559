"""Independent checks: LP-vertex oracle, decoder simulation, tiny-code search.

Nothing here is used to compute a bound; these routines exist to verify
the bounds and the divergence properties by separate means.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .channels import DenseChannel, information_density
from .distributions import FiniteDistribution, normalize
from .divergence import (
    CONVOLVE_TOL,
    RatioSpectrum,
    ThresholdTest,
    apply_kernel,
    build_spectrum,
    d0_smooth,
    self_convolve,
)

#: Atom-count limit for :func:`lp_oracle_d0_smooth`.
LP_ORACLE_CAP = 20
#: Encoder-count limit for :func:`brute_force_best_code`.
ENCODER_CAP = 10**6
#: Trials per independently seeded simulation block.
SIM_BLOCK = 10_000


def lp_oracle_d0_smooth(spectrum: RatioSpectrum, delta: float) -> float:
    """Solve the D0^delta program by enumerating candidate LP vertices.

    A vertex of ``{0 <= phi <= 1, sum(phi p) >= 1 - delta}`` has at most one
    fractional coordinate.  For every atom taken as that coordinate, all
    atoms of strictly larger ratio are accepted and the fraction is set to
    meet the constraint; the cheapest feasible candidate wins.  Sums are
    done in exact rational arithmetic on the stored float masses, so the
    only rounding is in the final logarithm.
    """
    if spectrum.size > LP_ORACLE_CAP:
        raise ValueError(f"LP oracle refuses spectra with more than {LP_ORACLE_CAP} atoms")
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    need = 1 - Fraction(delta)
    if need == 0:
        return math.inf
    p = [Fraction(v) for v in spectrum.p_probs.tolist()]
    q = [Fraction(v) for v in spectrum.q_probs.tolist()]
    r = spectrum.log_ratio.tolist()
    best = None
    for j in range(len(p)):
        above = [i for i in range(len(p)) if r[i] > r[j]]
        p_above = sum((p[i] for i in above), Fraction(0))
        gamma = min(Fraction(1), max(Fraction(0), (need - p_above) / p[j]))
        # stored masses may sum to 1 - O(ulp); allow that much shortfall
        if p_above + gamma * p[j] < need - Fraction(1, 10**12):
            continue
        cost = sum((q[i] for i in above), Fraction(0)) + gamma * q[j]
        best = cost if best is None else min(best, cost)
    if best is None:
        raise RuntimeError("no feasible vertex; spectrum P-mass below 1 - delta")
    if best == 0:
        return math.inf
    shift = best.numerator.bit_length() - best.denominator.bit_length()
    mantissa = float(best / Fraction(2) ** shift)
    return -(shift + math.log2(mantissa))


@dataclass(frozen=True)
class SimReport:
    trials: int
    errors_observed: int
    error_estimate: float
    bound_rhs: float
    std_err: float
    seed: int

    @classmethod
    def from_counts(cls, trials: int, errors: int, bound_rhs: float, seed: int) -> "SimReport":
        e = errors / trials
        return cls(trials, errors, e, bound_rhs, math.sqrt(e * (1.0 - e) / trials), seed)

    @property
    def within_bound(self) -> bool:
        """Observed error at most the bound plus three standard errors."""
        return self.error_estimate <= self.bound_rhs + 3.0 * self.std_err


def phi_matrix(channel: DenseChannel, input: FiniteDistribution, test: ThresholdTest) -> np.ndarray:
    """Decoder acceptance probability ``Phi(x, y)`` for every input/output pair."""
    dens = information_density(channel, input)
    phi = test.phi(dens)
    phi[~input.support, :] = 0.0
    phi[channel.transition == -math.inf] = 0.0
    return phi


def _simulate_block(px, cum_rows, phi, m, count, seed_seq) -> int:
    rng = np.random.default_rng(seed_seq)
    k, l = phi.shape
    codebooks = rng.choice(k, size=(count, m), p=px)
    sent = rng.integers(m, size=count)
    x = codebooks[np.arange(count), sent]
    u = rng.random(count)
    flat = np.searchsorted(cum_rows, x + u, side="right")
    y = np.minimum(flat - x * l, l - 1)
    accept = phi[codebooks, y[:, None]]
    selected = rng.random((count, m)) < accept
    ok = selected[np.arange(count), sent] & (selected.sum(axis=1) == 1)
    return int(count - ok.sum())


def simulate_phi_decoder(
    channel: DenseChannel,
    input: FiniteDistribution,
    test: ThresholdTest,
    m: int,
    trials: int,
    seed: int,
    workers: int = 1,
) -> SimReport:
    """Monte Carlo of random coding with the randomised threshold decoder.

    Each trial draws ``m`` i.i.d. codewords from ``input``, a uniform
    message, and a channel output.  Every message ``j`` is then selected
    independently with probability ``Phi(f(j), y)``; the trial succeeds
    only if exactly the sent message is selected.  ``bound_rhs`` is
    ``(m-1) Q[Phi] + (1 - P[Phi])`` with P and Q the joint and product laws.

    Trials run in fixed blocks with seeds spawned from ``seed``, so the
    result does not depend on ``workers``.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    if trials < 1:
        raise ValueError("trials must be positive")
    if input.alphabet_size != channel.input_size:
        raise ValueError("input distribution does not match the channel")
    phi = phi_matrix(channel, input, test)
    px = input.probs
    w = channel.probs
    py = px @ w
    p_cap = float(np.sum(px[:, None] * w * phi))
    q_cap = float(np.sum(px[:, None] * py[None, :] * phi))
    bound_rhs = (m - 1) * q_cap + (1.0 - p_cap)

    cum = np.cumsum(w, axis=1)
    cum = np.minimum(cum, 1.0)
    cum[:, -1] = 1.0
    cum_rows = (cum + np.arange(channel.input_size)[:, None]).ravel()

    blocks = [SIM_BLOCK] * (trials // SIM_BLOCK)
    if trials % SIM_BLOCK:
        blocks.append(trials % SIM_BLOCK)
    seeds = np.random.SeedSequence(seed).spawn(len(blocks))
    jobs = [(px, cum_rows, phi, m, c, s) for c, s in zip(blocks, seeds)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(lambda a: _simulate_block(*a), jobs))
    else:
        counts = [_simulate_block(*a) for a in jobs]
    return SimReport.from_counts(trials, sum(counts), bound_rhs, seed)


@dataclass(frozen=True)
class TinyCodeResult:
    m: int
    best_error: float
    best_encoder: tuple


def code_error(channel: DenseChannel, encoder) -> float:
    """Average error of ``encoder`` under maximum-likelihood decoding."""
    rows = channel.probs[np.asarray(encoder)]
    return 1.0 - float(rows.max(axis=0).sum()) / len(encoder)


def brute_force_best_code(channel: DenseChannel, m: int) -> TinyCodeResult:
    """Smallest average error over all encoders ``{0..m-1} -> inputs``.

    Each encoder is decoded by maximum likelihood (ties to the lowest
    message index), which is optimal for a uniform message.
    """
    if m < 1:
        raise ValueError("m must be positive")
    k = channel.input_size
    if k**m > ENCODER_CAP:
        raise ValueError(f"{k}**{m} encoders exceeds the enumeration cap {ENCODER_CAP}")
    w = channel.probs
    best_err, best_enc = math.inf, None
    encoders = itertools.product(range(k), repeat=m)
    while True:
        chunk = list(itertools.islice(encoders, 65536))
        if not chunk:
            break
        enc = np.array(chunk)
        success = w[enc].max(axis=1).sum(axis=1) / m
        i = int(np.argmax(success))
        err = 1.0 - float(success[i])
        if err < best_err:
            best_err, best_enc = err, tuple(int(v) for v in enc[i])
    return TinyCodeResult(m, max(best_err, 0.0), best_enc)


def message_joint(channel: DenseChannel, encoder) -> np.ndarray:
    """Joint law of (sent, decoded) messages under ML decoding, uniform messages."""
    rows = channel.probs[np.asarray(encoder)]
    m = rows.shape[0]
    decoded = rows.argmax(axis=0)
    joint = np.zeros((m, m))
    for y, j in enumerate(decoded):
        joint[:, j] += rows[:, y] / m
    return joint


def lemma2_convergence(
    p: FiniteDistribution,
    q: FiniteDistribution,
    delta: float,
    n_list: Iterable[int],
    merge_tol: float = CONVOLVE_TOL,
) -> list[tuple[int, float]]:
    """Normalised ``D0^delta(P^n || Q^n) / n`` for each n in ``n_list``."""
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    base = build_spectrum(p, q)
    out = []
    for n in n_list:
        spectrum = self_convolve(base, int(n), merge_tol)
        out.append((int(n), d0_smooth(spectrum, delta).value / n))
    return out


def random_distribution(rng: np.random.Generator, k: int, zero_prob: float = 0.2) -> FiniteDistribution:
    """Normalised uniform weights, each zeroed with probability ``zero_prob``.

    At least one weight stays positive.
    """
    w = rng.random(k)
    w[rng.random(k) < zero_prob] = 0.0
    if not (w > 0).any():
        w[rng.integers(k)] = 1.0
    return normalize(w)


def random_kernel(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    w = rng.random((rows, cols))
    return w / w.sum(axis=1, keepdims=True)


def dpi_property_run(
    trials: int,
    max_alphabet: int,
    seed: int,
    tol: float = 1e-9,
    kernel: Optional[str] = None,
) -> int:
    """Count data-processing violations over random ``(P, Q, W, delta)``.

    Alphabets have between 1 and ``max_alphabet`` symbols; ``delta`` is
    uniform on [0, 0.9].  ``kernel`` may be ``"identity"`` or ``"constant"``
    to force those special kernels.
    """
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(trials):
        k = int(rng.integers(1, max_alphabet + 1))
        l = int(rng.integers(1, max_alphabet + 1))
        p = random_distribution(rng, k)
        q = random_distribution(rng, k)
        if kernel == "identity":
            w = np.eye(k)
        elif kernel == "constant":
            w = np.tile(normalize(rng.random(l)).probs, (k, 1))
        else:
            w = random_kernel(rng, k, l)
        delta = float(rng.uniform(0.0, 0.9))
        before = d0_smooth(build_spectrum(p, q), delta).value
        after = d0_smooth(build_spectrum(apply_kernel(w, p), apply_kernel(w, q)), delta).value
        if after > before + tol:
            violations += 1
    return violations
