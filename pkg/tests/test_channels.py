import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from d0bounds.channels import (
    BscChannel,
    DenseChannel,
    bsc_dense,
    bsc_spectrum,
    identity_channel,
    information_density,
    joint_spectrum,
    load_channel,
    memoryless_extension,
    parse_channel,
    useless_channel,
)
from d0bounds.distributions import log_sum_exp2, normalize, uniform


class TestDenseChannel:
    def test_from_matrix_round_trip(self):
        w = [[0.9, 0.1, 0.0], [0.2, 0.3, 0.5]]
        ch = DenseChannel.from_matrix(w)
        np.testing.assert_allclose(ch.probs, w, atol=1e-15)
        assert (ch.input_size, ch.output_size) == (2, 3)

    @pytest.mark.parametrize("w", [[[0.5, 0.4]], [[-0.1, 1.1]], [[math.nan, 1.0]], [0.5, 0.5]])
    def test_rejects_bad_matrix(self, w):
        with pytest.raises(ValueError):
            DenseChannel.from_matrix(w)

    def test_memoryless_extension_is_kronecker(self):
        base = [[0.7, 0.3], [0.4, 0.6]]
        ext = memoryless_extension(DenseChannel.from_matrix(base), 2)
        np.testing.assert_allclose(ext.probs, np.kron(base, base), atol=1e-15)


class TestJointSpectrum:
    @pytest.mark.parametrize("k", [2, 3, 8])
    def test_identity(self, k):
        s = joint_spectrum(identity_channel(k), uniform(k))
        assert s.size == 1
        assert s.log_ratio[0] == pytest.approx(math.log2(k), abs=1e-12)
        assert s.p_probs[0] == pytest.approx(1.0, abs=1e-15)
        assert s.q_probs[0] == pytest.approx(1.0 / k, abs=1e-15)

    def test_useless(self):
        s = joint_spectrum(useless_channel(3, [0.2, 0.5, 0.3]), normalize([1, 2, 3]))
        assert s.size == 1
        assert s.log_ratio[0] == pytest.approx(0.0, abs=1e-12)
        assert s.q_probs[0] == pytest.approx(1.0, abs=1e-12)

    def test_bsc_dense(self):
        s = joint_spectrum(bsc_dense(0.11), uniform(2))
        np.testing.assert_allclose(s.log_ratio, [1 + math.log2(0.89), 1 + math.log2(0.11)], atol=1e-14)
        np.testing.assert_allclose(s.p_probs, [0.89, 0.11], atol=1e-15)
        np.testing.assert_allclose(s.q_probs, [0.5, 0.5], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            joint_spectrum(bsc_dense(0.11), uniform(3))

    def test_unused_output_and_input(self):
        ch = DenseChannel.from_matrix([[1.0, 0.0, 0.0], [0.0, 0.5, 0.5]])
        s = joint_spectrum(ch, normalize([1.0, 0.0]))
        assert s.size == 1
        assert s.log_ratio[0] == pytest.approx(0.0, abs=1e-15)

    def test_information_density(self):
        dens = information_density(bsc_dense(0.11), uniform(2))
        np.testing.assert_allclose(np.diag(dens), 1 + math.log2(0.89), atol=1e-14)
        assert dens[0, 1] == pytest.approx(1 + math.log2(0.11), abs=1e-14)

    @settings(max_examples=100, deadline=None)
    @given(
        st.integers(1, 4),
        st.integers(1, 4),
        st.integers(0, 2**32 - 1),
    )
    def test_random_channel_masses(self, k, l, seed):
        rng = np.random.default_rng(seed)
        ch = DenseChannel.from_matrix(rng.dirichlet(np.ones(l), size=k))
        s = joint_spectrum(ch, normalize(rng.random(k) + 0.01))
        assert abs(log_sum_exp2(s.log_p)) <= 1e-12
        assert abs(log_sum_exp2(s.log_q)) <= 1e-12


class TestBscSpectrum:
    def test_single_use(self):
        s = bsc_spectrum(BscChannel(1, 0.11))
        dense = joint_spectrum(bsc_dense(0.11), uniform(2))
        np.testing.assert_allclose(s.log_ratio, dense.log_ratio, atol=1e-14)
        np.testing.assert_allclose(s.log_p, dense.log_p, atol=1e-14)
        np.testing.assert_allclose(s.log_q, dense.log_q, atol=1e-14)

    def test_two_uses(self):
        s = bsc_spectrum(BscChannel(2, 0.11))
        np.testing.assert_allclose(s.p_probs, [0.7921, 0.1958, 0.0121], atol=1e-15)
        np.testing.assert_allclose(s.q_probs, [0.25, 0.5, 0.25], atol=1e-15)

    @pytest.mark.parametrize("n", range(1, 11))
    def test_matches_dense_product(self, n):
        p = 0.11
        s = bsc_spectrum(BscChannel(n, p))
        dense = joint_spectrum(memoryless_extension(bsc_dense(p), n), uniform(2**n))
        assert s.size == dense.size == n + 1
        np.testing.assert_allclose(s.log_ratio, dense.log_ratio, atol=1e-10)
        np.testing.assert_allclose(s.log_p, dense.log_p, atol=1e-10)
        np.testing.assert_allclose(s.log_q, dense.log_q, atol=1e-10)

    @pytest.mark.parametrize("n", [1, 7, 100, 2000, 20000])
    @pytest.mark.parametrize("p", [0.01, 0.11, 0.49])
    def test_complete_and_decreasing(self, n, p):
        s = bsc_spectrum(BscChannel(n, p))
        assert abs(log_sum_exp2(s.log_p)) <= 1e-10
        assert abs(log_sum_exp2(s.log_q)) <= 1e-10
        assert (np.diff(s.log_ratio) < 0).all()

    @pytest.mark.parametrize("args", [(0, 0.11), (3, 0.0), (3, 0.5), (3, 0.7), (2.5, 0.1)])
    def test_rejects_degenerate(self, args):
        with pytest.raises(ValueError):
            BscChannel(*args)


class TestChannelFile:
    def test_parse(self):
        ch = parse_channel("2 2\n0.9 0.1\n0.2 0.8\n")
        np.testing.assert_allclose(ch.probs, [[0.9, 0.1], [0.2, 0.8]], atol=1e-15)

    def test_row_tolerance_renormalises(self):
        ch = parse_channel("1 2\n0.3333333333 0.6666666666")
        assert ch.probs.sum() == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize(
        "text",
        ["", "2", "a b", "0 2", "2 2\n0.5 0.5\n0.5", "2 2\n0.5 0.5\n0.5 x", "1 2\n0.5 0.4"],
    )
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            parse_channel(text)

    def test_load(self, tmp_path):
        path = tmp_path / "ch.txt"
        path.write_text("2 3\n1 0 0\n0 0.5 0.5\n")
        assert load_channel(path).output_size == 3
