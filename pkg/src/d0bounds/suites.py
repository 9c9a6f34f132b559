"""Property suites driven by ``d0bounds verify`` and the acceptance tests.

Each suite returns a list of :class:`Check` records; a suite passes when
every check does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bounds import achievability_error, converse_sup_search
from .channels import DenseChannel, bsc_dense, joint_spectrum, memoryless_extension
from .distributions import normalize, uniform
from .divergence import build_spectrum, d0, d0_smooth, kl_divergence
from .oracles import (
    brute_force_best_code,
    dpi_property_run,
    lemma2_convergence,
    lp_oracle_d0_smooth,
    random_distribution,
    simulate_phi_decoder,
)

SUITES = ("dpi", "greedy-vs-lp", "decoder-sim", "tiny-codes", "lemma2")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _abs_gap(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b)


def dpi_suite(seed: int = 42, trials: int = 10_000, max_alphabet: int = 8) -> list[Check]:
    bad = dpi_property_run(trials, max_alphabet, seed)
    return [Check("dpi", bad == 0, f"{bad}/{trials} violations")]


def greedy_vs_lp_suite(seed: int = 42, trials: int = 1000, max_alphabet: int = 20) -> list[Check]:
    """Greedy optimum against the vertex oracle, plus monotonicity and the delta=0 case."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    mono_bad = 0
    zero_bad = 0
    for _ in range(trials):
        k = int(rng.integers(1, max_alphabet + 1))
        spectrum = build_spectrum(random_distribution(rng, k), random_distribution(rng, k))
        d1, d2 = np.sort(rng.uniform(0.0, 1.0, size=2))
        delta = float(rng.uniform(0.0, 1.0))
        worst = max(worst, _abs_gap(d0_smooth(spectrum, delta).value, lp_oracle_d0_smooth(spectrum, delta)))
        if d0_smooth(spectrum, float(d1)).value > d0_smooth(spectrum, float(d2)).value + 1e-12:
            mono_bad += 1
        if d0_smooth(spectrum, 0.0).value != d0(spectrum):
            zero_bad += 1
    return [
        Check("greedy-vs-lp", worst <= 1e-12, f"max |delta| = {worst:.3e} over {trials} instances"),
        Check("monotone-in-delta", mono_bad == 0, f"{mono_bad}/{trials} violations"),
        Check("delta-zero-reduction", zero_bad == 0, f"{zero_bad}/{trials} mismatches"),
    ]


@lru_cache(maxsize=None)
def _bsc_block(n: int, p: float) -> DenseChannel:
    return memoryless_extension(bsc_dense(p), n)


DECODER_CONFIGS = tuple((n, m) for n in (4, 7, 10) for m in (2, 4, 8))


def decoder_sim_suite(
    seed: int = 42, trials: int = 100_000, p: float = 0.11, workers: int = 1
) -> list[Check]:
    """Random-coding error of the threshold decoder stays under its bound.

    For each (n, m) the decoder uses the optimal test at the ``eps'`` that
    minimises ``(m-1) 2**(-D0^{eps'}) + eps'``.
    """
    checks = []
    for i, (n, m) in enumerate(DECODER_CONFIGS):
        ch = _bsc_block(n, p)
        px = uniform(ch.input_size)
        spectrum = joint_spectrum(ch, px)
        _, eps_prime = achievability_error(spectrum, m)
        test = d0_smooth(spectrum, eps_prime).test
        rep = simulate_phi_decoder(ch, px, test, m, trials, seed + i, workers=workers)
        checks.append(
            Check(
                f"decoder-sim n={n} m={m}",
                rep.within_bound,
                f"observed {rep.error_estimate:.5f} <= bound {rep.bound_rhs:.5f} + 3*{rep.std_err:.5f}",
            )
        )
    return checks


def _grid_channels(step: float = 0.1):
    vals = np.round(np.arange(0.0, 1.0 + step / 2, step), 10)
    for a in vals:
        for b in vals:
            yield (float(a), float(b)), DenseChannel.from_matrix([[a, 1 - a], [b, 1 - b]])


def tiny_codes_suite(step: float = 0.1, ms=(2, 3), grid: int = 60) -> list[Check]:
    """Best codes on every binary channel of a grid, against the converse and achievability bounds."""
    conv_bad, ach_bad, total = [], [], 0
    inputs = [normalize([i, grid - i]) for i in range(grid + 1)]
    for params, ch in _grid_channels(step):
        specs = [joint_spectrum(ch, px) for px in inputs]
        for m in ms:
            total += 1
            best = brute_force_best_code(ch, m)
            conv = converse_sup_search(ch, best.best_error, grid=grid).log2_m
            if math.log2(m) > conv + 1e-3:
                conv_bad.append((params, m))
            certified = min(achievability_error(s, m)[0] for s in specs)
            if best.best_error > certified + 1e-12:
                ach_bad.append((params, m))
    return [
        Check("tiny-codes converse", not conv_bad, f"{len(conv_bad)}/{total} violations {conv_bad[:3]}"),
        Check("tiny-codes achievability", not ach_bad, f"{len(ach_bad)}/{total} violations {ach_bad[:3]}"),
    ]


def lemma2_suite(delta: float = 0.01, n_small: int = 125, n_large: int = 2000) -> list[Check]:
    p, q = normalize([0.89, 0.11]), normalize([0.5, 0.5])
    kl = kl_divergence(p, q)
    (_, v_small), (_, v_large) = lemma2_convergence(p, q, delta, [n_small, n_large])
    dev_small, dev_large = abs(v_small - kl), abs(v_large - kl)
    return [
        Check(
            "lemma2",
            dev_large <= 0.05 and dev_large < dev_small,
            f"|D0/n - D| = {dev_small:.5f} at n={n_small}, {dev_large:.5f} at n={n_large}",
        )
    ]


def run_suite(name: str, seed: int = 42, trials: int | None = None, workers: int = 1) -> list[Check]:
    if name == "dpi":
        return dpi_suite(seed, trials or 10_000)
    if name == "greedy-vs-lp":
        return greedy_vs_lp_suite(seed, trials or 1000)
    if name == "decoder-sim":
        return decoder_sim_suite(seed, trials or 100_000, workers=workers)
    if name == "tiny-codes":
        return tiny_codes_suite()
    if name == "lemma2":
        return lemma2_suite()
    if name == "all":
        out = []
        for s in SUITES:
            out.extend(run_suite(s, seed, trials, workers))
        return out
    raise ValueError(f"unknown suite {name!r}")
