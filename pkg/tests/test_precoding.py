import numpy as np
import pytest

from irsbeam.channel import ChannelSet, SystemDims, sample_channel_set
from irsbeam.oracles import (precoder_objective, precoder_reference,
                             random_precoder_search)
from irsbeam.precoding import alpha_opt, effective_channel, mmse_precoder


def cplx(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def toy_channel(rng, n, m, k):
    return ChannelSet(cplx(rng, k, n), cplx(rng, n, m), cplx(rng, k, m),
                      d_irs=500.0, d_users=np.full(m, 500.0),
                      d_irs_users=np.full(m, 30.0))


def test_effective_channel_silent_irs():
    rng = np.random.default_rng(0)
    ch = toy_channel(rng, 4, 2, 6)
    h = effective_channel(ch, np.zeros(6, dtype=complex))
    assert np.allclose(h, ch.H_bu)


def test_effective_channel_scalar_chain():
    ch = ChannelSet(np.array([[1.0 + 0j]]), np.array([[1.0 + 0j]]),
                    np.array([[1.0 + 0j]]))
    h = effective_channel(ch, np.array([1.0 + 0j]))
    assert np.allclose(h, [[2.0]])


def test_effective_channel_matches_per_user_rows():
    rng = np.random.default_rng(1)
    ch = toy_channel(rng, 5, 3, 7)
    ups = np.exp(2j * np.pi * rng.random(7))
    h = effective_channel(ch, ups)
    for m in range(3):
        row = ch.H_su[:, m].conj() @ (ups[:, None] * ch.H_bs) + ch.H_bu[:, m].conj()
        assert np.allclose(h.conj().T[m], row, atol=1e-13)


def test_effective_channel_shape_check():
    rng = np.random.default_rng(2)
    ch = toy_channel(rng, 4, 2, 6)
    with pytest.raises(ValueError):
        effective_channel(ch, np.ones(5, dtype=complex))


def test_alpha_scalar_hand_case():
    assert alpha_opt(np.array([[1.0 + 0j]]), 1.0, 1.0) == pytest.approx(0.5)


def test_alpha_noiseless_limit():
    assert alpha_opt(np.array([[1.0 + 0j]]), 1.0, 0.0) == pytest.approx(1.0)


def test_alpha_scale_law():
    # H -> cH with noise power c^2 sigma^2 rescales alpha by 1/c and leaves
    # the achieved sum-MSE unchanged
    rng = np.random.default_rng(3)
    h = cplx(rng, 4, 2)
    c = 3.7
    a1 = alpha_opt(h, 2.0, 0.02)
    a2 = alpha_opt(c * h, 2.0, c**2 * 0.02)
    assert a2 * c == pytest.approx(a1, rel=1e-12)
    s1 = mmse_precoder(h, 2.0, 0.02)
    s2 = mmse_precoder(c * h, 2.0, c**2 * 0.02)
    e1 = np.linalg.norm(s1.alpha * h.conj().T @ s1.F - np.eye(2)) ** 2 + 2 * s1.alpha**2 * 0.02
    e2 = (np.linalg.norm(s2.alpha * (c * h).conj().T @ s2.F - np.eye(2)) ** 2
          + 2 * s2.alpha**2 * c**2 * 0.02)
    assert e1 == pytest.approx(e2, rel=1e-12)


def test_precoder_scalar_hand_case():
    sol = mmse_precoder(np.array([[1.0 + 0j]]), 1.0, 1.0)
    assert np.allclose(sol.F, [[1.0]])
    assert sol.alpha == pytest.approx(0.5)


def test_precoder_power_constraint_exact():
    rng = np.random.default_rng(4)
    for _ in range(25):
        n = int(rng.integers(2, 7))
        m = int(rng.integers(1, n))
        power = float(rng.uniform(0.1, 10))
        sol = mmse_precoder(cplx(rng, n, m), power, float(rng.uniform(1e-4, 1.0)))
        assert abs(np.linalg.norm(sol.F) ** 2 - power) < 1e-10 * power


def test_precoder_matches_literal_reference():
    rng = np.random.default_rng(5)
    for _ in range(10):
        h = cplx(rng, 4, 2)
        sol = mmse_precoder(h, 1.5, 0.03)
        alpha_ref, f_ref = precoder_reference(h, 1.5, 0.03)
        assert abs(sol.alpha - alpha_ref) < 1e-10
        assert np.abs(sol.F - f_ref).max() < 1e-10


def test_precoder_never_beaten_by_random_search_small():
    rng = np.random.default_rng(6)
    h = cplx(rng, 3, 2)
    sol = mmse_precoder(h, 1.0, 0.05)
    closed = precoder_objective(h, sol.F, 0.05)
    best = random_precoder_search(h, 1.0, 0.05, 20_000, np.random.default_rng(7))
    assert best >= closed - 1e-6


def test_precoder_zero_noise_pseudoinverse_path():
    rng = np.random.default_rng(8)
    h = cplx(rng, 4, 2)
    sol = mmse_precoder(h, 1.0, 0.0)
    assert abs(np.linalg.norm(sol.F) ** 2 - 1.0) < 1e-10
    # zero-forcing limit: alpha H^H F approaches identity
    assert np.abs(sol.alpha * h.conj().T @ sol.F - np.eye(2)).max() < 1e-8


def test_precoder_rejects_zero_channel():
    with pytest.raises(ValueError):
        mmse_precoder(np.zeros((3, 2), dtype=complex), 1.0, 0.1)
    with pytest.raises(ValueError):
        alpha_opt(np.zeros((3, 2), dtype=complex), 1.0, 0.1)


def test_precoder_on_synthesized_channel_scale():
    # physical magnitudes (path losses ~1e-10) must not break conditioning
    dims = SystemDims(8, 2, 16)
    ch = sample_channel_set(np.random.default_rng(9), dims)
    ups = np.exp(2j * np.pi * np.random.default_rng(10).random(16))
    sol = mmse_precoder(effective_channel(ch, ups), 1.0, 1e-13)
    assert abs(np.linalg.norm(sol.F) ** 2 - 1.0) < 1e-10
    assert np.isfinite(sol.alpha) and sol.alpha > 0
