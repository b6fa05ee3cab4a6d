import numpy as np
import pytest

from lcpa import (
    ChannelRealization,
    DegenerateChannelError,
    GainMatrix,
    LearningTask,
    SystemConfig,
    draw_channels,
    gains_from_channels,
    rate,
    rates,
    sample_count,
)

from conftest import draw_gains


def _config(**kw):
    base = dict(
        bandwidth_hz=180e3,
        time_budget_s=5.0,
        noise_power_w=2e-12,
        total_power_w=0.02,
        num_users=2,
        num_antennas=4,
        path_loss_linear=1e-10,
    )
    base.update(kw)
    return SystemConfig(**base)


class TestSystemConfig:
    def test_scalar_path_loss_broadcasts(self):
        cfg = _config(num_users=3)
        assert cfg.path_loss_linear.shape == (3,)
        assert np.all(cfg.path_loss_linear == 1e-10)

    @pytest.mark.parametrize("field,value", [
        ("bandwidth_hz", 0.0),
        ("time_budget_s", -1.0),
        ("noise_power_w", 0.0),
        ("total_power_w", -0.5),
        ("num_users", 0),
        ("num_antennas", 0),
    ])
    def test_rejects_nonpositive(self, field, value):
        with pytest.raises(ValueError):
            _config(**{field: value})

    def test_rejects_wrong_path_loss_length(self):
        with pytest.raises(ValueError):
            _config(path_loss_linear=[1e-10, 1e-10, 1e-10])


class TestDrawChannels:
    def test_deterministic_given_seed(self):
        cfg = _config()
        h1 = draw_channels(cfg, 17).vectors
        h2 = draw_channels(cfg, 17).vectors
        assert np.array_equal(h1, h2)
        h3 = draw_channels(cfg, 18).vectors
        assert not np.array_equal(h1, h3)

    def test_zero_variance_gives_zero_vector(self):
        cfg = _config(path_loss_linear=[0.0, 1e-10])
        h = draw_channels(cfg, 5).vectors
        assert np.all(h[0] == 0.0)
        assert np.any(h[1] != 0.0)

    def test_shape(self):
        cfg = _config(num_users=3, num_antennas=7, path_loss_linear=1e-10)
        assert draw_channels(cfg, 0).vectors.shape == (3, 7)

    def test_mean_square_matches_variance(self):
        # law of large numbers on the generator itself: with N = 1e4 entries of
        # variance 1e-10, the per-entry mean square sits within 3 standard
        # errors (3e-12) of the variance
        cfg = _config(num_users=1, num_antennas=10_000, path_loss_linear=1e-10)
        h = draw_channels(cfg, 1).vectors
        mean_sq = float(np.mean(np.abs(h) ** 2))
        assert abs(mean_sq - 1e-10) < 3e-12


class TestGains:
    def test_matches_naive_reimplementation(self):
        cfg = _config(num_users=3, num_antennas=4, path_loss_linear=1e-10)
        ch = draw_channels(cfg, 23)
        g = gains_from_channels(ch).gains
        # plain-Python recomputation with explicit loops
        h = ch.vectors
        for k in range(3):
            norm_sq = sum(abs(x) ** 2 for x in h[k])
            for l in range(3):
                if k == l:
                    expected = norm_sq
                else:
                    dot = sum(h[k][i].conjugate() * h[l][i] for i in range(4))
                    expected = abs(dot) ** 2 / norm_sq
                assert g[k, l] == pytest.approx(expected, rel=1e-12)

    def test_orthogonal_channels_have_zero_cross_gain(self):
        h = np.array([[1.0 + 0j, 0.0], [0.0, 2.0 + 0j]])
        g = gains_from_channels(ChannelRealization(vectors=h)).gains
        assert g[0, 1] == 0.0 and g[1, 0] == 0.0
        assert g[0, 0] == 1.0 and g[1, 1] == 4.0

    def test_colinear_channels_cross_gain_equals_norm(self):
        v = np.array([1.0 + 2.0j, -0.5 + 0.25j, 3.0 - 1.0j])
        g = gains_from_channels(ChannelRealization(vectors=np.stack([v, v]))).gains
        norm_sq = float(np.sum(np.abs(v) ** 2))
        assert g[0, 1] == pytest.approx(norm_sq, rel=1e-12)
        assert g[1, 0] == pytest.approx(norm_sq, rel=1e-12)
        assert g[0, 0] == pytest.approx(norm_sq, rel=1e-12)

    def test_degenerate_channel_raises(self):
        h = np.array([[0.0 + 0j, 0.0], [1.0 + 0j, 0.0]])
        with pytest.raises(DegenerateChannelError):
            gains_from_channels(ChannelRealization(vectors=h))

    def test_symmetry_relation_and_cauchy_schwarz(self):
        # G[k,l] * G[k,k] = G[l,k] * G[l,l] = |h_k^H h_l|^2, and the
        # Cauchy-Schwarz bound G[k,l] <= G[l,l]
        cfg = _config(num_users=4, num_antennas=6, path_loss_linear=1e-10)
        for seed in range(10):
            g = draw_gains(cfg, seed).gains
            for k in range(4):
                for l in range(4):
                    if k == l:
                        continue
                    lhs = g[k, l] * g[k, k]
                    rhs = g[l, k] * g[l, l]
                    assert lhs == pytest.approx(rhs, rel=1e-9)
                    assert g[k, l] <= g[l, l] * (1.0 + 1e-12)

    def test_asymptotic_orthogonality(self):
        # normalized cross gain G[0,1]/G[0,0] shrinks as the array grows
        means = {}
        for n in (4, 64):
            cfg = _config(num_antennas=n)
            ratios = [
                (lambda g: g[0, 1] / g[0, 0])(draw_gains(cfg, s).gains)
                for s in range(200)
            ]
            means[n] = float(np.mean(ratios))
        assert means[64] < means[4]


class TestRate:
    def test_zero_power_zero_rate(self):
        g = GainMatrix(gains=np.array([[1.0, 0.1], [0.2, 2.0]]))
        assert rate(g, np.array([0.0, 0.01]), 1e-3, 0) == 0.0

    def test_unit_snr(self):
        g = GainMatrix(gains=np.array([[1.0]]))
        sigma2 = 3.7e-12
        assert rate(g, np.array([sigma2]), sigma2, 0) == pytest.approx(1.0, rel=1e-14)

    def test_two_user_hand_evaluation(self):
        # direct gain x power = 3 sigma^2 and cross gain x power = 2 sigma^2
        # gives log2(1 + 3/(2 + 1)) = 1 exactly
        sigma2 = 2.0
        g = GainMatrix(gains=np.array([[3.0 * sigma2, 2.0 * sigma2], [1.0, 1.0]]))
        assert rate(g, np.array([1.0, 1.0]), sigma2, 0) == pytest.approx(1.0, rel=1e-14)

    def test_monotone_in_own_power_antitone_in_others(self):
        cfg = _config()
        for seed in range(5):
            g = draw_gains(cfg, seed)
            rng = np.random.Generator(np.random.PCG64(seed))
            p = cfg.total_power_w * rng.dirichlet((1.0, 1.0))
            base = rates(g, p, cfg.noise_power_w)
            eps = 1e-4 * cfg.total_power_w
            for k in range(2):
                bump = p.copy()
                bump[k] += eps
                perturbed = rates(g, bump, cfg.noise_power_w)
                assert perturbed[k] > base[k]
                other = 1 - k
                assert perturbed[other] <= base[other]

    def test_negative_power_rejected(self):
        g = GainMatrix(gains=np.eye(2))
        with pytest.raises(ValueError):
            rates(g, np.array([-1.0, 1.0]), 1.0)


class TestSampleCount:
    def test_zero_rate_returns_initial_samples(self):
        cfg = _config()
        task = LearningTask(a=7.3, b=0.69, bits_per_sample=6276, initial_samples=300.0)
        assert sample_count(cfg, 0.0, task) == 300.0
        assert sample_count(cfg, 0.0, task, continuous=False) == 300.0

    def test_direct_arithmetic(self):
        # B*T/D = 900000/6276 = 143.403441683...
        cfg = _config()
        task = LearningTask(a=7.3, b=0.69, bits_per_sample=6276, initial_samples=300.0)
        cont = sample_count(cfg, 1.0, task, continuous=True)
        assert cont == pytest.approx(443.403441682601, rel=1e-12)
        assert sample_count(cfg, 1.0, task, continuous=False) == 443.0

    def test_mnist_bits_per_sample(self):
        # 28x28 grayscale pixels at 8 bits plus 4 label bits
        assert 8 * 28 * 28 + 4 == 6276

    def test_negative_rate_rejected(self):
        cfg = _config()
        task = LearningTask(a=1.0, b=0.5, bits_per_sample=10, initial_samples=0.0)
        with pytest.raises(ValueError):
            sample_count(cfg, -0.1, task)
