from math import pi, sqrt

import numpy as np
import pytest

from spdctilt.analysis import (
    IDLER,
    MINUS,
    PLUS,
    SIGNAL,
    SchmidtResult,
    diagonal_means,
    heralded_purity,
    marginal_spectrum,
    pearson_correlation,
    rms_bandwidth_diag,
    schmidt_decompose,
)
from spdctilt.biphoton import (
    FrequencyGrid,
    JointSpectrumGrid,
    auto_grid,
    gaussian_spectrum_grid,
    joint_spectrum_grid,
)
from spdctilt.errors import EmptySpectrumError
from spdctilt.gaussmodel import GaussianSpectrumModel
from tests.conftest import panel_sources


def gaussian_grid(bw_plus, bw_minus, n=256):
    span = 4.0 * sqrt(bw_plus**2 + bw_minus**2)
    model = GaussianSpectrumModel(bw_plus, bw_minus)
    return gaussian_spectrum_grid(model, FrequencyGrid(span, span, n, n))


def mehler_coefficients(ratio, count):
    """Analytic Schmidt spectrum of a real two-mode Gaussian amplitude.

    For an amplitude exp(-lam_plus^2/(4 a^2)) exp(-lam_minus^2/(4 b^2)) the
    Mehler expansion gives geometric coefficients (1 - mu) mu^n with
    mu = ((r - 1)/(r + 1))^2 and r = a/b, hence K = (r + 1/r)/2.
    """
    mu = ((ratio - 1.0) / (ratio + 1.0)) ** 2
    return (1.0 - mu) * mu ** np.arange(count)


class TestSchmidt:
    def test_separable_gaussian_is_pure(self):
        result = schmidt_decompose(gaussian_grid(3e-9, 3e-9))
        assert result.schmidt_number == pytest.approx(1.0, abs=1e-3)
        assert result.purity >= 0.999

    @pytest.mark.parametrize("ratio,expected", [(2.0, 1.25), (4.0, 2.125)])
    def test_matches_analytic_schmidt_number(self, ratio, expected):
        result = schmidt_decompose(gaussian_grid(ratio * 2e-9, 2e-9))
        assert expected == (ratio + 1.0 / ratio) / 2.0
        assert result.schmidt_number == pytest.approx(expected, rel=1e-2)

    def test_matches_analytic_spectrum(self):
        result = schmidt_decompose(gaussian_grid(4e-9, 2e-9))
        expected = mehler_coefficients(2.0, 10)
        assert np.allclose(result.coefficients[:10], expected, atol=1e-3)

    def test_result_invariants(self, nine_panels):
        for jsgrid in nine_panels.values():
            result = schmidt_decompose(jsgrid)
            assert float(np.sum(result.coefficients)) == pytest.approx(1.0, abs=1e-9)
            assert np.all(np.diff(result.coefficients) <= 0.0)
            assert result.schmidt_number * result.purity == pytest.approx(1.0, rel=1e-12)
            assert heralded_purity(result) == result.purity
            assert result.n_modes_kept == len(result.coefficients)

    def test_invariant_under_global_phase_and_transpose(self, default_source):
        jsg = joint_spectrum_grid(default_source, auto_grid(default_source, 128))
        k_ref = schmidt_decompose(jsg).schmidt_number
        rotated = JointSpectrumGrid(
            jsg.grid, jsg.amplitude * np.exp(0.7j), jsg.intensity, jsg.norm
        )
        assert schmidt_decompose(rotated).schmidt_number == pytest.approx(k_ref, rel=1e-12)
        transposed = JointSpectrumGrid(
            jsg.grid, jsg.amplitude.T.copy(), jsg.intensity.T.copy(), jsg.norm
        )
        assert schmidt_decompose(transposed).schmidt_number == pytest.approx(
            k_ref, rel=1e-12
        )

    def test_phase_never_purifies(self, nine_panels):
        for jsgrid in nine_panels.values():
            k_full = schmidt_decompose(jsgrid).schmidt_number
            k_stripped = schmidt_decompose(jsgrid, strip_phase=True).schmidt_number
            assert k_full >= k_stripped - 1e-6

    def test_zero_amplitude_rejected(self):
        grid = FrequencyGrid(1e-9, 1e-9, 16, 16)
        zeros = np.zeros((16, 16), dtype=complex)
        degenerate = JointSpectrumGrid(grid, zeros, np.zeros((16, 16)), 1.0)
        with pytest.raises(EmptySpectrumError):
            schmidt_decompose(degenerate)


class TestHeraldedPurity:
    @pytest.mark.parametrize(
        "coefficients,expected",
        [([1.0], 1.0), ([0.5, 0.5], 0.5), ([0.25] * 4, 0.25)],
    )
    def test_known_spectra(self, coefficients, expected):
        coeffs = np.asarray(coefficients)
        result = SchmidtResult(coeffs, 1.0 / expected, expected, len(coeffs))
        assert heralded_purity(result) == pytest.approx(expected, rel=1e-15)


class TestMoments:
    def test_gaussian_rms_recovered(self):
        jsg = gaussian_grid(3e-9, 3e-9)
        assert rms_bandwidth_diag(jsg, PLUS) == pytest.approx(3e-9, rel=5e-3)

    def test_symmetric_grid_means(self, default_source):
        # E[lam_minus] = 0 is protected by arm-exchange symmetry; E[lam_plus]
        # is not a symmetry of the full model (the phase-matched ridge is
        # curved), so it only vanishes for the even closed-form density.
        jsg = joint_spectrum_grid(default_source, auto_grid(default_source, 128))
        mean_plus, mean_minus = diagonal_means(jsg)
        span = jsg.grid.signal_half_span
        assert abs(mean_minus) <= 1e-9 * span
        assert abs(mean_plus) <= 0.2 * rms_bandwidth_diag(jsg, PLUS)

        even = gaussian_grid(3e-9, 7e-9, n=128)
        g_plus, g_minus = diagonal_means(even)
        assert abs(g_plus) <= 1e-9 * even.grid.signal_half_span
        assert abs(g_minus) <= 1e-9 * even.grid.signal_half_span

    def test_direction_validation(self, default_source):
        jsg = joint_spectrum_grid(default_source, auto_grid(default_source, 64))
        with pytest.raises(ValueError):
            rms_bandwidth_diag(jsg, "diagonal")

    def test_rms_convergence_default_config(self, default_source):
        coarse = joint_spectrum_grid(default_source, auto_grid(default_source, 256))
        fine = joint_spectrum_grid(default_source, auto_grid(default_source, 512))
        for direction in (PLUS, MINUS):
            a = rms_bandwidth_diag(coarse, direction)
            b = rms_bandwidth_diag(fine, direction)
            assert abs(b - a) / b <= 2e-3


class TestPearson:
    def test_isotropic_gaussian_uncorrelated(self):
        assert abs(pearson_correlation(gaussian_grid(3e-9, 3e-9))) <= 1e-6

    def test_ridge_limits(self):
        assert pearson_correlation(gaussian_grid(0.05e-9, 5e-9)) <= -0.999
        assert pearson_correlation(gaussian_grid(5e-9, 0.05e-9)) >= 0.999

    def test_sign_agrees_with_classification(self, default_source):
        from spdctilt.gaussmodel import classify_correlation, model_for

        for source in panel_sources(default_source).values():
            jsg = joint_spectrum_grid(source, auto_grid(source, 128))
            r = pearson_correlation(jsg)
            label = classify_correlation(model_for(source))
            if label == "anticorrelated":
                assert r < 0.0
            elif label == "correlated":
                assert r > 0.0
            else:
                assert abs(r) <= 0.05

    def test_zero_variance_rejected(self):
        grid = FrequencyGrid(1e-9, 1e-9, 17, 17)
        amplitude = np.zeros((17, 17), dtype=complex)
        amplitude[8, 8] = 1.0
        point = JointSpectrumGrid(grid, amplitude, np.abs(amplitude) ** 2, 1.0)
        with pytest.raises(ValueError, match="zero variance"):
            pearson_correlation(point)


class TestMarginals:
    def test_separable_marginal_is_gaussian_factor(self):
        sigma = 3e-9
        jsg = gaussian_grid(sigma, sigma, n=256)
        axis = jsg.grid.signal_detunings()
        expected = np.exp(-(axis**2) / (2.0 * sigma**2)) / sqrt(2.0 * pi * sigma**2)
        marginal = marginal_spectrum(jsg, SIGNAL)
        assert np.allclose(marginal, expected, rtol=0, atol=1e-4 * expected.max())

    def test_marginals_integrate_to_one(self, default_source):
        jsg = joint_spectrum_grid(default_source, auto_grid(default_source, 128))
        for arm in (SIGNAL, IDLER):
            marginal = marginal_spectrum(jsg, arm)
            integral = marginal.sum() * jsg.grid.signal_spacing
            assert integral == pytest.approx(1.0, abs=1e-9)

    def test_symmetric_grid_gives_identical_marginals(self, default_source):
        # the intensity matrix is exactly symmetric; the two marginals only
        # differ by floating-point reduction order
        jsg = joint_spectrum_grid(default_source, auto_grid(default_source, 96))
        assert np.array_equal(jsg.intensity, jsg.intensity.T)
        signal = marginal_spectrum(jsg, SIGNAL)
        idler = marginal_spectrum(jsg, IDLER)
        assert np.allclose(signal, idler, rtol=1e-12, atol=0.0)

    def test_uncorrelated_marginal_rms_matches_bandwidths(self):
        sigma = 3e-9
        jsg = gaussian_grid(sigma, sigma)
        axis = jsg.grid.signal_detunings()
        marginal = marginal_spectrum(jsg, SIGNAL) * jsg.grid.signal_spacing
        rms = sqrt(float((marginal * axis**2).sum()) / float(marginal.sum()))
        assert rms == pytest.approx(sigma, rel=5e-3)

    def test_arm_validation(self, default_source):
        jsg = joint_spectrum_grid(default_source, auto_grid(default_source, 64))
        with pytest.raises(ValueError):
            marginal_spectrum(jsg, "pump")
