import numpy as np
import pytest

from uav_isac.channels import TAG_ECHO, stream
from uav_isac.sinr import (
    PrecoderSolution,
    backhaul_sinr,
    backhaul_threshold,
    check_feasibility,
    db_to_linear,
    dbm_to_watts,
    generate_symbols,
    linear_to_db,
    sensing_sinr,
    simulate_backhaul_link,
    simulate_echo,
    simulate_ue_link,
    ue_sinr,
    ue_sinrs,
)

from conftest import random_instance, random_precoders


def test_unit_conversions():
    assert dbm_to_watts(30) == pytest.approx(1.0)
    assert dbm_to_watts(40) == pytest.approx(10.0)
    assert db_to_linear(0) == 1.0
    assert linear_to_db(100.0) == pytest.approx(20.0)


def test_backhaul_threshold_examples():
    assert backhaul_threshold(1.0, 20) == 2 ** 20 - 1
    assert backhaul_threshold(0.0, 20) == 0.0
    assert backhaul_threshold(0.37, 1) == pytest.approx(0.37)
    with pytest.raises(ValueError):
        backhaul_threshold(-1.0, 2)


def test_symbols_nested_and_seeded():
    a = generate_symbols(3, 4, 16)
    b = generate_symbols(3, 8, 16)
    assert a.shape == (5, 15)
    assert np.array_equal(a[:4], b[:4]) and np.array_equal(a[-1], b[-1])
    assert np.array_equal(a, generate_symbols(3, 4, 16))
    with pytest.raises(ValueError):
        generate_symbols(0, 2, 1)


def test_ue_sinr_single_ue_is_snr():
    ch, _, rng = random_instance(1, n_ue=1)
    W = random_precoders(rng, (3, 16, 2))
    W[:, :, 1] = 0
    g = ue_sinr(0, ch.access, PrecoderSolution(W), ch.noise_ue)
    h = ch.access[0].reshape(-1)
    assert g == pytest.approx(abs(h @ W[:, :, 0].reshape(-1)) ** 2 / ch.noise_ue, rel=1e-12)


def test_ue_sinr_zero_precoder():
    ch, _, rng = random_instance(1)
    W = random_precoders(rng, (3, 16, 5))
    W[:, :, 2] = 0
    assert ue_sinrs(ch.access, W, ch.noise_ue)[2] == 0.0


def test_ue_sinr_matches_simulation():
    ch, _, rng = random_instance(2)
    W = random_precoders(rng, (3, 16, 5), 0.01)
    closed = ue_sinrs(ch.access, W, ch.noise_ue)
    for j in range(4):
        est = simulate_ue_link(np.random.default_rng(j), ch.access, W, ch.noise_ue, j)
        assert est == pytest.approx(closed[j], rel=0.02)


def test_ue_sinr_vector_matches_scalar():
    ch, _, rng = random_instance(3)
    sol = PrecoderSolution(random_precoders(rng, (3, 16, 5)))
    vec = ue_sinrs(ch.access, sol.W, ch.noise_ue)
    assert np.allclose(vec, [ue_sinr(j, ch.access, sol, ch.noise_ue) for j in range(4)], rtol=1e-12)


def test_ue_sinr_phase_invariance():
    ch, _, rng = random_instance(4)
    W = random_precoders(rng, (3, 16, 5))
    a = ue_sinrs(ch.access, W, ch.noise_ue)
    b = ue_sinrs(ch.access * np.exp(1j * 0.8), W, ch.noise_ue)
    np.testing.assert_allclose(a, b, rtol=1e-9)


def _backhaul_instance(seed):
    ch, _, rng = random_instance(seed)
    Wb = random_precoders(rng, (3, 16), 1.0)
    u = rng.standard_normal(16) + 1j * rng.standard_normal(16)
    return ch, Wb, u


def test_backhaul_sinr_single_link_and_scaling():
    ch, Wb, u = _backhaul_instance(5)
    H = ch.backhaul[0].matrix
    alone = backhaul_sinr(0, H, Wb[:1], u, ch.noise_backhaul)
    assert alone == pytest.approx(abs(u.conj() @ H @ Wb[0]) ** 2 / (ch.noise_backhaul * np.vdot(u, u).real))
    g = backhaul_sinr(1, H, Wb, u, ch.noise_backhaul)
    assert backhaul_sinr(1, H, Wb, (2 - 3j) * u, ch.noise_backhaul) == pytest.approx(g, rel=1e-12)
    assert backhaul_sinr(1, H * np.exp(0.3j), Wb, u, ch.noise_backhaul) == pytest.approx(g, rel=1e-9)
    with pytest.raises(ValueError):
        backhaul_sinr(0, H, Wb, np.zeros(16), ch.noise_backhaul)


def test_backhaul_sinr_matches_simulation():
    ch, Wb, u = _backhaul_instance(6)
    H = ch.backhaul[2].matrix
    # scale so that interference and noise are comparable
    Wb = Wb * np.sqrt(ch.noise_backhaul / np.linalg.norm(H) ** 2 * 50)
    closed = backhaul_sinr(2, H, Wb, u, ch.noise_backhaul)
    est = simulate_backhaul_link(np.random.default_rng(0), H, Wb, u, ch.noise_backhaul, 2)
    assert est == pytest.approx(closed, rel=0.02)


def test_sensing_sinr_zero_and_distance_scaling():
    ch, S, rng = random_instance(7)
    assert sensing_sinr(ch.sensing, np.zeros((3, 16, 5)), S, ch.noise_rx) == 0.0
    W = random_precoders(rng, (3, 16, 5))
    g = sensing_sinr(ch.sensing, W, S, ch.noise_rx)
    geom = ch.sensing
    geom.d_rt *= 2
    assert sensing_sinr(geom, W, S, ch.noise_rx) == pytest.approx(g / 4, rel=1e-12)


def test_sensing_sinr_column_phase_invariance():
    ch, S, rng = random_instance(8)
    W = random_precoders(rng, (3, 16, 5))
    g = sensing_sinr(ch.sensing, W, S, ch.noise_rx)
    # a common phase on every column of W_k multiplies a_k^T W_k s by that phase
    W2 = W * np.exp(1j * rng.uniform(0, 2 * np.pi, 3))[:, None, None]
    assert sensing_sinr(ch.sensing, W2, S, ch.noise_rx) == pytest.approx(g, rel=1e-9)


def test_sensing_sinr_monotone_in_sensing_scale():
    # with mutually orthogonal symbol streams the sensing column adds c^2 times its own power
    ch, _, rng = random_instance(9)
    S = np.exp(2j * np.pi * np.outer(np.arange(5), np.arange(15)) / 15)
    W = random_precoders(rng, (3, 16, 5))
    vals = []
    for c in (1.0, 1.01, 1.5, 2.0, 10.0):
        Wc = W.copy()
        Wc[:, :, -1] *= c
        vals.append(sensing_sinr(ch.sensing, Wc, S, ch.noise_rx))
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_echo_matches_closed_form_small_instance():
    ch, S, rng = random_instance(10, n_tx=2, n_ue=2, upa=(2, 2), n_symbols=8)
    W = random_precoders(rng, (2, 4, 3))
    closed = sensing_sinr(ch.sensing, W, S, ch.noise_rx)
    est = simulate_echo(stream(10, TAG_ECHO), ch.sensing, W, S, ch.noise_rx, trials=100_000)
    assert est.gamma == pytest.approx(closed, rel=0.03)


def test_echo_zero_power():
    ch, S, _ = random_instance(10, n_tx=2, n_ue=2, upa=(2, 2), n_symbols=8)
    est = simulate_echo(np.random.default_rng(0), ch.sensing, np.zeros((2, 4, 3)), S, ch.noise_rx, trials=100)
    assert est.gamma == 0.0 and est.noise_power > 0


def test_echo_estimator_consistency():
    ch, S, rng = random_instance(12, n_tx=2, n_ue=2, upa=(2, 2), n_symbols=8)
    W = random_precoders(rng, (2, 4, 3))
    r = np.random.default_rng(1)
    small = [simulate_echo(r, ch.sensing, W, S, ch.noise_rx, trials=200).gamma for _ in range(20)]
    large = [simulate_echo(r, ch.sensing, W, S, ch.noise_rx, trials=3200).gamma for _ in range(20)]
    ratio = np.std(small) / np.std(large)
    assert 2.0 < ratio < 8.0  # 1/sqrt(trials) predicts 4


def test_echo_rejects_no_trials():
    ch, S, rng = random_instance(10, n_tx=2, n_ue=2, upa=(2, 2), n_symbols=8)
    with pytest.raises(ValueError):
        simulate_echo(rng, ch.sensing, np.zeros((2, 4, 3)), S, ch.noise_rx, trials=0)


def test_check_feasibility_flags():
    ch, S, rng = random_instance(13)
    zero = PrecoderSolution(np.zeros((3, 16, 5)))
    rep = check_feasibility(ch, zero, 1.0, p_uav=1.0)
    assert not rep.feasible_ue and rep.feasible_power
    W = random_precoders(rng, (3, 16, 5), 3.0)
    W *= np.sqrt(1.0 / np.sum(np.abs(W) ** 2, axis=(1, 2)))[:, None, None]
    ok = check_feasibility(ch, PrecoderSolution(W), 0.0, p_uav=1.0, symbols=S)
    assert ok.feasible and ok.sensing_sinr == pytest.approx(sensing_sinr(ch.sensing, W, S, ch.noise_rx))
    over = check_feasibility(ch, PrecoderSolution(W * np.sqrt(1 + 1e-3)), 0.0, p_uav=1.0)
    assert not over.feasible_power
    pooled = check_feasibility(ch, PrecoderSolution(W), 0.0, pooled_power=3.0)
    assert pooled.feasible_power
    assert not check_feasibility(ch, PrecoderSolution(W), 0.0, pooled_power=2.9).feasible_power


def test_precoder_solution_validation():
    with pytest.raises(ValueError):
        PrecoderSolution(np.zeros((3, 16)))
    with pytest.raises(ValueError):
        PrecoderSolution(np.full((1, 2, 2), np.nan))
    sol = PrecoderSolution(np.ones((2, 3, 4)), backhaul=np.ones((2, 5)))
    assert sol.n_tx == 2 and sol.n_ue == 3
    assert sol.stacked().shape == (6, 4)
    assert sol.total_power() == pytest.approx(24 + 10)
