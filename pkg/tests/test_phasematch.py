from dataclasses import replace
from math import atan, cos, pi, radians, tan

import numpy as np
import pytest

from spdctilt.dispersion import (
    C_LIGHT,
    EXTRAORDINARY,
    ORDINARY,
    CrystalProperties,
    SellmeierFit,
    inverse_group_velocity,
    wavenumber,
)
from spdctilt.errors import NoWalkoffError, PhaseMatchingError
from spdctilt.phasematch import (
    Geometry,
    SourceConfig,
    TiltSpec,
    delta_k,
    effective_pump_N,
    optimal_tilt,
    phase_matched_source,
    phase_matching_angle,
    pump_walkoff,
    tilt_from_grating,
)

# Frozen from the independent 50-digit oracle (committed BBO fit).
THETA_PM_400NM_2DEG = 0.51817776361390423
GRATING_EPSILON = -1277013.3269710945  # m = -1, d = 1/1200 mm, beta0 = 20 deg, 400 nm
GRATING_XI = 0.47225446023104375
N_EFF_XI30 = 5.9406492243649901e-9  # default config, xi = +30 deg
XI0_DEFAULT = -0.70083286134225426
DELTA_K_UNTILTED = 0.0077317635338263231  # (+0.1, -0.1) nm detunings, xi = 0

B_P_DEFAULT = 2.0 * pi * C_LIGHT * 4e-9 / (400e-9) ** 2


def birefringent_dispersionless() -> CrystalProperties:
    fit_o = SellmeierFit(1, (4.0, 0.0, 1e6, 0.0))          # n_o = 2
    fit_e = SellmeierFit(1, (2.89, 0.0, 1e6, 0.0))         # n_e = 1.7
    return CrystalProperties("flat", fit_o, fit_e, 0.0, (0.2e-6, 2.0e-6))


@pytest.fixture(scope="module")
def untilted(bbo):
    return phase_matched_source(
        bbo, Geometry(0.1e-3, radians(2.0)), 400e-9, B_P_DEFAULT, 45e-6,
        TiltSpec.from_angle(0.0, 400e-9),
    )


class TestGeometryAndTilt:
    def test_geometry_validation(self):
        with pytest.raises(ValueError):
            Geometry(0.0, 0.1)
        with pytest.raises(ValueError):
            Geometry(1e-3, pi / 2)

    def test_tilt_consistency_enforced(self):
        with pytest.raises(ValueError, match="inconsistent"):
            TiltSpec(0.3, 1e6, 400e-9)
        with pytest.raises(ValueError, match="xi"):
            TiltSpec.from_angle(pi / 2, 400e-9)

    def test_round_trip_over_wide_range(self):
        for xi in np.linspace(radians(-80.0), radians(80.0), 41):
            spec = TiltSpec.from_angle(float(xi), 400e-9)
            assert atan(-400e-9 * spec.epsilon) == pytest.approx(xi, abs=1e-12)

    def test_grating_zeroth_order(self):
        spec = tilt_from_grating(0, 1e-6, radians(20.0), 400e-9)
        assert spec.epsilon == 0.0
        assert spec.xi == 0.0

    def test_grating_golden(self):
        spec = tilt_from_grating(-1, 1e-3 / 1200.0, radians(20.0), 400e-9)
        assert spec.epsilon == pytest.approx(GRATING_EPSILON, rel=1e-12)
        assert spec.xi == pytest.approx(GRATING_XI, rel=1e-12)
        assert spec.grating == (-1, 1e-3 / 1200.0, radians(20.0))

    def test_grating_epsilon_matches_grating_equation_derivative(self):
        # sin(beta(lam)) = sin(beta_in) + m lam / d; the angular dispersion
        # d beta/d lam at beta = beta_0 must equal m/(d cos beta_0).
        m, d, beta_0, lam = -1, 1e-3 / 1200.0, radians(20.0), 400e-9
        offset = np.sin(beta_0) - m * lam / d

        def beta(wavelength):
            return np.arcsin(offset + m * wavelength / d)

        h = 1e-13
        numeric = (beta(lam + h) - beta(lam - h)) / (2.0 * h)
        spec = tilt_from_grating(m, d, beta_0, lam)
        assert spec.epsilon == pytest.approx(numeric, rel=1e-6)

    def test_grating_order_sign_flips_tilt(self):
        plus = tilt_from_grating(1, 1e-3 / 1200.0, radians(20.0), 400e-9)
        minus = tilt_from_grating(-1, 1e-3 / 1200.0, radians(20.0), 400e-9)
        assert plus.xi == -minus.xi

    def test_grating_validation(self):
        with pytest.raises(ValueError):
            tilt_from_grating(1, 0.0, 0.1, 400e-9)
        with pytest.raises(ValueError):
            tilt_from_grating(1, 1e-6, pi / 2, 400e-9)


class TestSourceConfig:
    def test_degenerate_center_is_exact(self, untilted):
        assert untilted.signal_wavelength == 2.0 * untilted.pump_wavelength

    def test_bandwidth_conversion_round_trip(self, untilted):
        assert untilted.pump_bandwidth_wavelength == pytest.approx(4e-9, rel=1e-15)

    def test_validation(self, bbo, untilted):
        with pytest.raises(ValueError):
            replace(untilted, pump_bandwidth=0.0)
        with pytest.raises(ValueError):
            replace(untilted, pump_waist=-1e-6)


class TestPhaseMatchingAngle:
    def test_golden(self, bbo):
        theta = phase_matching_angle(bbo, 400e-9, radians(2.0))
        assert theta == pytest.approx(THETA_PM_400NM_2DEG, abs=1e-11)

    def test_solver_contract(self, untilted):
        center = untilted.signal_wavelength
        assert abs(delta_k(untilted, center, center)) <= 1e-6

    @pytest.mark.parametrize("phi_deg", [0.5, 2.0, 5.0])
    def test_solver_contract_other_angles(self, bbo, phi_deg):
        source = phase_matched_source(
            bbo, Geometry(1e-3, radians(phi_deg)), 400e-9, B_P_DEFAULT, 45e-6,
            TiltSpec.from_angle(0.0, 400e-9),
        )
        center = source.signal_wavelength
        assert abs(delta_k(source, center, center)) <= 1e-6

    def test_continuous_in_phi(self, bbo):
        angles = [
            phase_matching_angle(bbo, 400e-9, radians(phi))
            for phi in np.arange(0.1, 5.01, 0.1)
        ]
        steps = np.abs(np.diff(angles))
        assert np.all(steps < radians(0.5))

    def test_unphasematchable_reports_endpoints(self):
        flat = birefringent_dispersionless()
        with pytest.raises(PhaseMatchingError, match="unphasematchable") as err:
            phase_matching_angle(flat, 800e-9, radians(40.0))
        assert "rad/m" in str(err.value)


class TestDeltaK:
    def test_untilted_matches_textbook_composition(self, untilted):
        # independent composition from the dispersion layer
        lam_s = 800e-9 + 0.1e-9
        lam_i = 800e-9 - 0.1e-9
        w_p = 2.0 * pi * C_LIGHT * (1.0 / lam_s + 1.0 / lam_i)
        lam_p = 2.0 * pi * C_LIGHT / w_p
        expected = (
            wavenumber(untilted.crystal, lam_p, EXTRAORDINARY)
            - (
                wavenumber(untilted.crystal, lam_s, ORDINARY)
                + wavenumber(untilted.crystal, lam_i, ORDINARY)
            )
            * cos(radians(2.0))
        )
        value = delta_k(untilted, lam_s, lam_i)
        assert value == pytest.approx(expected, abs=1e-9)
        assert value == pytest.approx(DELTA_K_UNTILTED, abs=1e-6)

    def test_symmetric_under_arm_exchange(self, untilted):
        rng = np.random.default_rng(7)
        for _ in range(10):
            ls, li = (800e-9 + rng.uniform(-20e-9, 20e-9, size=2))
            assert delta_k(untilted, ls, li) == delta_k(untilted, li, ls)

    def test_first_order_slope_matches_effective_mismatch(self, untilted):
        source = untilted.with_tilt(TiltSpec.from_angle(radians(30.0), 400e-9))
        n_s = inverse_group_velocity(source.crystal, source.signal_wavelength, ORDINARY)
        expected = effective_pump_N(source) - n_s * cos(source.geometry.half_angle)
        w_0 = 2.0 * pi * C_LIGHT / source.signal_wavelength
        delta = source.pump_bandwidth * 1e-3

        def mismatch_at(offset):
            lam = 2.0 * pi * C_LIGHT / (w_0 + offset / 2.0)
            return delta_k(source, lam, lam)

        slope = (mismatch_at(delta) - mismatch_at(-delta)) / (2.0 * delta)
        assert slope == pytest.approx(expected, rel=1e-4)


class TestEffectiveN:
    def test_untilted_is_plain_pump_n(self, untilted):
        n_p = inverse_group_velocity(untilted.crystal, 400e-9, EXTRAORDINARY)
        assert effective_pump_N(untilted) == n_p

    def test_golden_at_30deg(self, untilted):
        source = untilted.with_tilt(TiltSpec.from_angle(radians(30.0), 400e-9))
        assert effective_pump_N(source) == pytest.approx(N_EFF_XI30, rel=1e-12)

    def test_monotone_in_tan_xi(self, untilted):
        xis = np.linspace(radians(-85.0), radians(85.0), 35)
        values = [
            effective_pump_N(untilted.with_tilt(TiltSpec.from_angle(float(xi), 400e-9)))
            for xi in xis
        ]
        assert np.all(np.diff(values) > 0.0)


class TestOptimalTilt:
    def test_golden(self, untilted):
        assert optimal_tilt(untilted) == pytest.approx(XI0_DEFAULT, rel=1e-9)

    def test_inverts_effective_n(self, untilted):
        xi0 = optimal_tilt(untilted)
        tuned = untilted.with_tilt(TiltSpec.from_angle(xi0, 400e-9))
        n_s = inverse_group_velocity(tuned.crystal, tuned.signal_wavelength, ORDINARY)
        target = n_s * cos(tuned.geometry.half_angle)
        assert abs(effective_pump_N(tuned) - target) <= 1e-12 * n_s

    def test_unique_zero_of_mismatch(self, untilted):
        n_s = inverse_group_velocity(untilted.crystal, untilted.signal_wavelength, ORDINARY)
        target = n_s * cos(untilted.geometry.half_angle)
        xis = np.linspace(radians(-89.0), radians(89.0), 179)
        signs = np.sign([
            effective_pump_N(untilted.with_tilt(TiltSpec.from_angle(float(xi), 400e-9)))
            - target
            for xi in xis
        ])
        assert np.count_nonzero(np.diff(signs)) == 1

    def test_group_matched_crystal_needs_no_tilt(self):
        # dispersionless birefringent material: N_p = n_p/c = N_s cos(phi)
        # holds identically once the phase-matching angle is solved.
        flat = birefringent_dispersionless()
        source = phase_matched_source(
            flat, Geometry(1e-3, radians(2.0)), 500e-9, 1e13, 45e-6,
            TiltSpec.from_angle(0.0, 500e-9),
        )
        assert pump_walkoff(source) > 0.01
        assert optimal_tilt(source) == pytest.approx(0.0, abs=1e-12)

    def test_no_walkoff_raises(self, bbo, untilted):
        source = replace(untilted, crystal=bbo.with_cut_angle(0.0))
        with pytest.raises(NoWalkoffError, match="tilt cannot act"):
            optimal_tilt(source)
