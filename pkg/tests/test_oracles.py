import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d0bounds.bounds import achievability_error
from d0bounds.channels import (
    DenseChannel,
    bsc_dense,
    identity_channel,
    joint_spectrum,
    memoryless_extension,
    useless_channel,
)
from d0bounds.distributions import FiniteDistribution, normalize, uniform
from d0bounds.divergence import REJECT_ALL, ThresholdTest, build_spectrum, d0_smooth, kl_divergence
from d0bounds.oracles import (
    ENCODER_CAP,
    LP_ORACLE_CAP,
    SimReport,
    brute_force_best_code,
    code_error,
    dpi_property_run,
    lemma2_convergence,
    lp_oracle_d0_smooth,
    message_joint,
    random_distribution,
    simulate_phi_decoder,
)

ACCEPT_ALL = ThresholdTest(-math.inf, 1.0)


def product_spectrum(joint):
    """Spectrum of a joint law against the product of its marginals."""
    joint = np.asarray(joint)
    px, py = joint.sum(axis=1), joint.sum(axis=0)
    return build_spectrum(normalize(joint.ravel()), normalize(np.outer(px, py).ravel()))


class TestLPOracle:
    def test_delta_zero_is_d0(self):
        s = build_spectrum(normalize([0.5, 0.5, 0]), normalize([0.25, 0.25, 0.5]))
        assert lp_oracle_d0_smooth(s, 0.0) == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("delta", [0.0, 0.1, 0.5, 0.99])
    def test_self_divergence(self, delta):
        d = normalize([0.1, 0.2, 0.7])
        assert lp_oracle_d0_smooth(build_spectrum(d, d), delta) == pytest.approx(-math.log2(1 - delta), abs=1e-15)

    def test_delta_one(self):
        d = normalize([1, 1])
        assert lp_oracle_d0_smooth(build_spectrum(d, d), 1.0) == math.inf

    def test_cap(self):
        d = uniform(LP_ORACLE_CAP + 1)
        s = build_spectrum(normalize(np.arange(1, LP_ORACLE_CAP + 2)), d)
        with pytest.raises(ValueError, match=str(LP_ORACLE_CAP)):
            lp_oracle_d0_smooth(s, 0.1)


class TestSimulation:
    def test_identity_channel_collision(self):
        k, m = 4, 2
        match = ThresholdTest(math.log2(k), 1.0)
        rep = simulate_phi_decoder(identity_channel(k), uniform(k), match, m, 40_000, seed=7)
        collision = 1 - (1 - 1 / k) ** (m - 1)
        assert rep.bound_rhs == pytest.approx(collision, abs=1e-15)
        assert abs(rep.error_estimate - collision) <= 4 * rep.std_err
        assert rep.within_bound

    @pytest.mark.parametrize("m", [2, 5])
    def test_accept_all_always_errs(self, m):
        rep = simulate_phi_decoder(bsc_dense(0.11), uniform(2), ACCEPT_ALL, m, 5000, seed=1)
        assert rep.error_estimate == 1.0
        assert rep.within_bound

    def test_reject_all_always_errs_and_bound_is_tight(self):
        rep = simulate_phi_decoder(bsc_dense(0.11), uniform(2), REJECT_ALL, 3, 5000, seed=1)
        assert rep.error_estimate == 1.0
        assert rep.bound_rhs == 1.0
        assert rep.std_err == 0.0

    def test_bound_uses_optimal_test(self):
        ch = memoryless_extension(bsc_dense(0.11), 4)
        spectrum = joint_spectrum(ch, uniform(16))
        certified, eps_prime = achievability_error(spectrum, 4)
        res = d0_smooth(spectrum, eps_prime)
        rep = simulate_phi_decoder(ch, uniform(16), res.test, 4, 20_000, seed=3)
        assert rep.bound_rhs == pytest.approx(certified, abs=1e-12)
        assert rep.within_bound

    def test_fractional_boundary_is_randomised(self):
        # half acceptance on the matching pair of a noiseless channel
        rep = simulate_phi_decoder(identity_channel(2), uniform(2), ThresholdTest(1.0, 0.5), 2, 40_000, seed=5)
        # success needs the sent message selected and the other not (or a distinct codeword)
        want = 1 - (0.5 * 0.5 + 0.5 * 0.5 * 0.5)
        assert abs(rep.error_estimate - want) <= 4 * rep.std_err

    def test_deterministic_across_workers(self):
        args = (bsc_dense(0.2), uniform(2), ThresholdTest(math.log2(1.6), 0.3), 3, 35_000, 11)
        a = simulate_phi_decoder(*args, workers=1)
        b = simulate_phi_decoder(*args, workers=4)
        assert a == b
        assert simulate_phi_decoder(*args) == a

    def test_seed_changes_outcome(self):
        args = (bsc_dense(0.2), uniform(2), ThresholdTest(math.log2(1.6), 0.3), 3, 20_000)
        assert simulate_phi_decoder(*args, 1).errors_observed != simulate_phi_decoder(*args, 2).errors_observed

    @pytest.mark.parametrize("bad", [dict(m=1), dict(trials=0)])
    def test_argument_errors(self, bad):
        kw = dict(m=2, trials=10)
        kw.update(bad)
        with pytest.raises(ValueError):
            simulate_phi_decoder(bsc_dense(0.1), uniform(2), ACCEPT_ALL, kw["m"], kw["trials"], 0)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            simulate_phi_decoder(bsc_dense(0.1), uniform(3), ACCEPT_ALL, 2, 10, 0)

    def test_report_invariants(self):
        rep = SimReport.from_counts(400, 100, 0.3, 9)
        assert rep.error_estimate == 0.25
        assert rep.std_err == pytest.approx(math.sqrt(0.25 * 0.75 / 400), abs=1e-15)


class TestBruteForce:
    def test_identity(self):
        res = brute_force_best_code(identity_channel(2), 2)
        assert res.best_error == 0.0
        assert sorted(res.best_encoder) == [0, 1]

    def test_useless(self):
        assert brute_force_best_code(useless_channel(3, [0.2, 0.8]), 2).best_error == pytest.approx(0.5, abs=1e-15)

    def test_hand_channel(self):
        res = brute_force_best_code(DenseChannel.from_matrix([[0.9, 0.1], [0.2, 0.8]]), 2)
        assert res.best_error == pytest.approx(0.15, abs=1e-15)
        assert res.best_encoder == (0, 1)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_matches_exhaustive_python_loop(self, k, l, m, seed):
        rng = np.random.default_rng(seed)
        ch = DenseChannel.from_matrix(rng.dirichlet(np.ones(l), size=k))
        res = brute_force_best_code(ch, m)
        best = min(code_error(ch, enc) for enc in itertools.product(range(k), repeat=m))
        assert res.best_error == pytest.approx(best, abs=1e-15)
        assert code_error(ch, res.best_encoder) == pytest.approx(res.best_error, abs=1e-15)
        assert 0.0 <= res.best_error <= 1 - 1 / m + 1e-15

    def test_cap(self):
        with pytest.raises(ValueError, match=str(ENCODER_CAP)):
            brute_force_best_code(identity_channel(10), 7)


class TestMessageLevelConverse:
    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32 - 1))
    def test_ml_decoder(self, k, l, m, seed):
        rng = np.random.default_rng(seed)
        ch = DenseChannel.from_matrix(rng.dirichlet(np.ones(l), size=k))
        enc = rng.integers(k, size=m)
        joint = message_joint(ch, enc)
        err = 1.0 - float(np.trace(joint))
        assert err == pytest.approx(code_error(ch, enc), abs=1e-12)
        assert math.log2(m) <= d0_smooth(product_spectrum(joint), max(0.0, min(1.0, err))).value + 1e-9

    @settings(max_examples=200, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**32 - 1))
    def test_any_stochastic_decoder(self, m, seed):
        rng = np.random.default_rng(seed)
        joint = rng.dirichlet(np.ones(m), size=m) / m
        err = 1.0 - float(np.trace(joint))
        assert math.log2(m) <= d0_smooth(product_spectrum(joint), min(1.0, err)).value + 1e-9

    @settings(max_examples=100, deadline=None)
    @given(st.integers(2, 4), st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
    def test_message_pair_is_processed_channel_pair(self, k, l, m, seed):
        rng = np.random.default_rng(seed)
        ch = DenseChannel.from_matrix(rng.dirichlet(np.ones(l), size=k))
        enc = rng.integers(k, size=m)
        joint = message_joint(ch, enc)
        err = min(1.0, max(0.0, 1.0 - float(np.trace(joint))))
        px = normalize(np.bincount(enc, minlength=k))
        msg = d0_smooth(product_spectrum(joint), err).value
        chan = d0_smooth(joint_spectrum(ch, px), err).value
        assert msg <= chan + 1e-9


class TestProductConvergence:
    def test_identical_pair(self):
        d = normalize([0.3, 0.7])
        for n, v in lemma2_convergence(d, d, 0.01, [1, 10, 100]):
            assert v == pytest.approx(-math.log2(0.99) / n, abs=1e-12)
        assert kl_divergence(d, d) == 0.0

    def test_bernoulli_pair(self):
        p, q = normalize([0.89, 0.11]), normalize([0.5, 0.5])
        kl = kl_divergence(p, q)
        (_, small), (_, large) = lemma2_convergence(p, q, 0.01, [125, 2000])
        assert abs(large - kl) <= 0.05
        assert abs(large - kl) < abs(small - kl)

    def test_merge_tolerance_insensitive(self):
        p, q = normalize([0.89, 0.11]), normalize([0.5, 0.5])
        a = lemma2_convergence(p, q, 0.01, [500], merge_tol=1e-9)[0][1]
        b = lemma2_convergence(p, q, 0.01, [500], merge_tol=1e-12)[0][1]
        assert a == pytest.approx(b, abs=1e-12)

    @pytest.mark.parametrize("delta", [0.0, 1.0])
    def test_delta_range(self, delta):
        d = normalize([1, 1])
        with pytest.raises(ValueError):
            lemma2_convergence(d, d, delta, [1])


class TestDPIRun:
    def test_identity_kernel_never_violates(self):
        assert dpi_property_run(300, 6, seed=3, kernel="identity") == 0

    def test_constant_kernel_hits_floor(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            k = int(rng.integers(1, 6))
            p, q = random_distribution(rng, k), random_distribution(rng, k)
            row = normalize(rng.random(3)).probs
            w = np.tile(row, (k, 1))
            delta = float(rng.uniform(0, 0.9))
            before = d0_smooth(build_spectrum(p, q), delta).value
            out_p = normalize(p.probs @ w)
            out_q = normalize(q.probs @ w)
            after = d0_smooth(build_spectrum(out_p, out_q), delta).value
            assert after == pytest.approx(-math.log2(1 - delta), abs=1e-12)
            assert after <= before + 1e-9
        assert dpi_property_run(300, 6, seed=4, kernel="constant") == 0

    def test_random_run_is_reproducible(self):
        assert dpi_property_run(500, 8, seed=42) == 0
        assert dpi_property_run(500, 8, seed=42) == dpi_property_run(500, 8, seed=42)

    def test_random_distribution_keeps_support(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            d = random_distribution(rng, 3, zero_prob=0.9)
            assert isinstance(d, FiniteDistribution)
            assert d.support.any()
