import functools

import numpy as np
import pytest

from qincoh.channels import (
    expm_unitary,
    make_synthetic_profile,
    rf_incoherent_channel,
    RFProfile,
)
from qincoh.errors import DegenerateSpectrumError, PairingError
from qincoh.liouville import unitary_superoperator
from qincoh.spectral import (
    EigenPairing,
    PairedEigenvalue,
    build_samples,
    detect_offset,
    eigenbasis,
    four_qubit_fixture,
    pair_eigenvalues,
    predict_eigenvalues,
    profile_metrics,
    three_qubit_fixture,
)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)

SKEWED_PROFILE = make_synthetic_profile("skewed", width=0.05, skew=0.5, n_points=41)


@functools.lru_cache(maxsize=1)
def fixture_channel():
    h0t, k = three_qubit_fixture()
    s = rf_incoherent_channel(h0t, k, SKEWED_PROFILE)
    return h0t, k, s


def test_eigenbasis_sorted_and_reconstructs():
    h0t, _ = three_qubit_fixture()
    basis = eigenbasis(h0t)
    assert np.all(np.diff(basis.phis) > 0)
    rebuilt = (basis.vectors * basis.phis) @ basis.vectors.conj().T
    assert np.abs(rebuilt - h0t).max() < 1e-10


def test_eigenbasis_rejects_degenerate_spectrum():
    with pytest.raises(DegenerateSpectrumError):
        eigenbasis(np.diag([1.0, 1.0, 2.0]))


def test_predict_without_perturbation_is_unperturbed():
    h0 = 0.8 * SZ
    profile = make_synthetic_profile("uniform", width=0.1, n_points=11)
    lam = predict_eigenvalues(h0, np.zeros((2, 2)), profile)
    assert np.abs(np.abs(lam) - 1.0).max() < 1e-12
    basis = eigenbasis(h0)
    expected = np.exp(-1j * (basis.phis[:, None] - basis.phis[None, :]))
    assert np.abs(lam - expected).max() < 1e-12


def test_predict_matches_direct_sum_oracle():
    h0 = np.pi / 2 * SX / 2
    profile = make_synthetic_profile("uniform", width=0.1, n_points=41)
    lam = predict_eigenvalues(h0, h0, profile)
    # (j, m) = (1, 0): phase gap pi/2, K_10 = pi/2
    oracle = 0.0j
    for dw, w in zip(profile.delta_omega, profile.weight):
        oracle += w * np.exp(-1j * np.pi / 2 * dw)
    oracle *= np.exp(-1j * np.pi / 2)
    assert abs(lam[1, 0] - oracle) < 1e-12
    assert abs(lam[1, 0]) < 1.0


def test_predict_exact_in_commuting_case():
    h0 = 0.8 * SZ + 0.15 * np.eye(2)
    k = 0.3 * h0
    profile = make_synthetic_profile("gaussian", width=0.03, n_points=21)
    s = rf_incoherent_channel(h0, k, profile)
    pairing = pair_eigenvalues(s, h0, k)
    lam = predict_eigenvalues(h0, k, profile)
    for e in pairing.entries:
        assert abs(lam[e.j, e.m] - e.lambda_measured) < 1e-10


def test_pairing_of_unperturbed_channel_is_exact():
    h0t, k, _ = fixture_channel()
    s0 = unitary_superoperator(expm_unitary(h0t))
    pairing = pair_eigenvalues(s0, h0t, k)
    assert len(pairing.warnings) == 0
    for e in pairing.entries:
        assert e.distance < 1e-10
        assert abs(e.lambda_measured - e.lambda_unperturbed) < 1e-9


def test_pairing_on_fixture_channel():
    h0t, k, s = fixture_channel()
    pairing = pair_eigenvalues(s, h0t, k)
    assert len(pairing.entries) == 64
    assert sum(e.degenerate for e in pairing.entries) == 8
    assert len(pairing.warnings) == 0
    # injective: every measured eigenvalue used once
    measured = sorted((e.lambda_measured.real, e.lambda_measured.imag) for e in pairing.entries)
    assert len(set(measured)) == 64
    # k coordinate is the diagonal contrast of the model perturbation
    basis = eigenbasis(h0t)
    kd = np.einsum("ij,ij->j", basis.vectors.conj(), k @ basis.vectors).real
    for e in pairing.entries[:10]:
        assert abs(e.k_jm - (kd[e.j] - kd[e.m])) < 1e-12


def test_pairing_fails_loudly_when_spectrum_is_unrelated():
    h0 = 0.7 * SX
    s_far = np.diag([1.0, 1.0, -1.0, -1.0]).astype(complex)
    with pytest.raises(PairingError):
        pair_eigenvalues(s_far, h0, 0.3 * h0)


def test_build_samples_on_fixture():
    h0t, k, s = fixture_channel()
    samples = build_samples(pair_eigenvalues(s, h0t, k))
    assert len(samples) == 57
    assert samples.conjugate_symmetry_residual() < 1e-9
    assert np.all(np.diff(samples.k) > 0)
    dc = np.flatnonzero(samples.k == 0.0)
    assert dc.size == 1
    assert samples.f[dc[0]] == 1.0 + 0.0j


def test_build_samples_flat_spectrum_for_unperturbed_channel():
    h0t, k, _ = fixture_channel()
    s0 = unitary_superoperator(expm_unitary(h0t))
    samples = build_samples(pair_eigenvalues(s0, h0t, k))
    assert np.abs(samples.f - 1.0).max() < 1e-9


def test_build_samples_is_order_invariant():
    h0t, k, s = fixture_channel()
    pairing = pair_eigenvalues(s, h0t, k)
    samples = build_samples(pairing)
    rng = np.random.default_rng(41)
    shuffled = list(pairing.entries)
    rng.shuffle(shuffled)
    samples2 = build_samples(EigenPairing(tuple(shuffled), pairing.warnings))
    assert np.array_equal(samples.k, samples2.k)
    assert np.array_equal(samples.f, samples2.f)


def test_four_qubit_fixture_sample_count():
    h0t, k = four_qubit_fixture()
    profile = make_synthetic_profile("skewed", width=0.05, skew=0.5, n_points=21)
    s = rf_incoherent_channel(h0t, k, profile)
    pairing = pair_eigenvalues(s, h0t, k)
    assert len(pairing.entries) == 256
    assert sum(e.degenerate for e in pairing.entries) == 16
    samples = build_samples(pairing)
    assert len(samples) == 241


def _entry(j, m, lam, lam0, kjm):
    return PairedEigenvalue(j, m, lam, lam0, kjm, 0.0, j == m)


def test_build_samples_merges_duplicate_coordinates():
    entries = (
        _entry(0, 0, 1.0, 1.0, 0.0),
        _entry(0, 1, 0.9 + 0.1j, 1.0, 2.0),
        _entry(1, 0, 0.9 - 0.1j, 1.0, -2.0),
        _entry(0, 2, 0.88 + 0.1j, 1.0, 2.0),
        _entry(2, 0, 0.88 - 0.1j, 1.0, -2.0),
    )
    samples = build_samples(EigenPairing(entries, ()))
    assert len(samples) == 3
    merged = samples.f[samples.k == 2.0]
    assert abs(merged[0] - (0.89 + 0.1j)) < 1e-12


def test_build_samples_warns_on_model_disagreement():
    entries = (
        _entry(0, 1, 1.0, 1.0, 2.0),
        _entry(0, 2, 0.5, 1.0, 2.0),
        _entry(1, 0, 1.0, 1.0, -2.0),
        _entry(2, 0, 0.5, 1.0, -2.0),
    )
    with pytest.warns(UserWarning, match="disagree"):
        build_samples(EigenPairing(entries, ()))


def test_build_samples_rejects_contrastless_model():
    h0 = 0.8 * SZ
    k = 0.5 * SX  # zero diagonal in the h0 eigenbasis
    profile = make_synthetic_profile("gaussian", width=0.02, n_points=11)
    s = rf_incoherent_channel(h0, k, profile)
    pairing = pair_eigenvalues(s, h0, k)
    with pytest.raises(PairingError, match="contrast"):
        build_samples(pairing)


def test_profile_metrics_gaussian_and_delta():
    g = make_synthetic_profile("gaussian", center=0.02, width=0.05, n_points=61)
    m = profile_metrics(g)
    assert abs(m.mean - 0.02) < 1e-12
    assert abs(m.skewness) < 1e-10
    delta = RFProfile(np.array([0.07]), np.array([1.0]))
    dm = profile_metrics(delta)
    assert dm.mean == 0.07 and dm.std == 0.0 and dm.skewness == 0.0


def test_detect_offset_is_recovered_mean():
    delta = RFProfile(np.array([0.05]), np.array([1.0]))
    assert abs(detect_offset(delta) - 0.05) < 1e-15


def test_offset_leaves_recovered_skewness_unchanged():
    # third moments are sensitive to far-field ripple mass, which the
    # ridge-regularized method suppresses; the Riemann variant only keeps
    # ripples balanced when the grid is symmetric about the peak
    from qincoh.nudft import RecoveryGrid, inverse_nudft

    h0t, k, _ = fixture_channel()
    grid = RecoveryGrid(-0.35, 0.35, 141)
    base = make_synthetic_profile("gaussian", width=0.04, n_points=41)

    def recovered_metrics(offset):
        from qincoh.channels import shifted_profile

        profile = shifted_profile(base, offset) if offset else base
        s = rf_incoherent_channel(h0t, k, profile)
        res = inverse_nudft(
            build_samples(pair_eigenvalues(s, h0t, k)), grid, method="least_squares"
        )
        return profile_metrics(res.profile)

    plain = recovered_metrics(0.0)
    shifted = recovered_metrics(0.1)
    assert abs(shifted.mean - 0.1) < 2 * grid.bin_width
    assert abs(shifted.skewness - plain.skewness) < 0.1
