"""First-order closed-form model of the joint spectrum.

With the sinc phase-matching profile approximated by a Gaussian of the same
1/e amplitude width (sinc(bx) ~ exp[-(alpha b)^2 x^2], alpha = 0.455) the
joint spectrum becomes a separable Gaussian in the rotated detuning
coordinates lam_plus = (lam_s + lam_i)/sqrt(2), lam_minus = (lam_s -
lam_i)/sqrt(2), with closed-form rms bandwidths: the diagonal width is set
by the pump bandwidth and the group-velocity mismatch, the anti-diagonal
width by the pump waist through the spatial-to-spectral mapping.
"""

from dataclasses import dataclass
from math import cos, exp, pi, sin, sqrt

import numpy as np

from .dispersion import C_LIGHT, ORDINARY, inverse_group_velocity
from .errors import CollinearGeometryError
from .phasematch import SourceConfig, effective_pump_N

ALPHA = 0.455  # sinc-to-Gaussian 1/e width-matching constant

ANTICORRELATED = "anticorrelated"
UNCORRELATED = "uncorrelated"
CORRELATED = "correlated"


@dataclass(frozen=True)
class GaussianSpectrumModel:
    """rms bandwidths (meters) along the +45 and -45 degree directions."""

    bandwidth_plus: float
    bandwidth_minus: float
    alpha: float = ALPHA

    def __post_init__(self):
        if not (self.bandwidth_plus > 0.0 and self.bandwidth_minus > 0.0):
            raise ValueError("bandwidths must be positive")


def _prefactor(config: SourceConfig) -> float:
    return config.signal_wavelength**2 / (2.0 * pi * C_LIGHT) / sqrt(2.0)


def bandwidth_plus(config: SourceConfig) -> float:
    """rms bandwidth along the diagonal:

    dlam_plus = (lam_s^2 / 2 pi c) (1/sqrt2) [1/B_p^2 + (alpha L)^2 (N'_p - N_s cos phi)^2]^(-1/2)
    """
    n_s = inverse_group_velocity(config.crystal, config.signal_wavelength, ORDINARY)
    mismatch = effective_pump_N(config) - n_s * cos(config.geometry.half_angle)
    bracket = 1.0 / config.pump_bandwidth**2 + (ALPHA * config.geometry.length * mismatch) ** 2
    return _prefactor(config) / sqrt(bracket)


def bandwidth_minus(config: SourceConfig) -> float:
    """rms bandwidth along the anti-diagonal:

    dlam_minus = (lam_s^2 / 2 pi c) (1/sqrt2) [N_s sin(phi) W_0]^(-1)
    """
    phi = config.geometry.half_angle
    if phi == 0.0:
        raise CollinearGeometryError(
            "collinear geometry: spatial-to-spectral mapping undefined"
        )
    n_s = inverse_group_velocity(config.crystal, config.signal_wavelength, ORDINARY)
    return _prefactor(config) / (n_s * sin(phi) * config.pump_waist)


def max_bandwidth_plus(config: SourceConfig) -> float:
    """Largest reachable diagonal bandwidth, 2 sqrt(2) dlam_p (at xi = xi_0)."""
    return 2.0 * sqrt(2.0) * config.pump_bandwidth_wavelength


def model_for(config: SourceConfig) -> GaussianSpectrumModel:
    return GaussianSpectrumModel(bandwidth_plus(config), bandwidth_minus(config))


def gaussian_joint_spectrum(model: GaussianSpectrumModel, lam_s_detuning, lam_i_detuning):
    """Normalized joint-spectral density at the given detunings (1/m^2).

    S = N exp(-lam_plus^2 / 2 dlam_plus^2) exp(-lam_minus^2 / 2 dlam_minus^2)
    with N = 1/(2 pi dlam_plus dlam_minus); the coordinate rotation has unit
    Jacobian so the density integrates to 1 over the detuning plane.
    """
    plus = (np.asarray(lam_s_detuning) + np.asarray(lam_i_detuning)) / sqrt(2.0)
    minus = (np.asarray(lam_s_detuning) - np.asarray(lam_i_detuning)) / sqrt(2.0)
    norm = 1.0 / (2.0 * pi * model.bandwidth_plus * model.bandwidth_minus)
    out = norm * np.exp(
        -(plus**2) / (2.0 * model.bandwidth_plus**2)
        - minus**2 / (2.0 * model.bandwidth_minus**2)
    )
    return float(out) if np.ndim(out) == 0 else out


def classify_correlation(model: GaussianSpectrumModel, tolerance: float = 0.05) -> str:
    """Bandwidth-ratio classification of the frequency correlation.

    Wider anti-diagonal means anticorrelated, wider diagonal means
    correlated, equal within the relative tolerance means uncorrelated
    (circular contours).
    """
    if not 0.0 < tolerance < 0.5:
        raise ValueError("tolerance must be in (0, 0.5)")
    plus, minus = model.bandwidth_plus, model.bandwidth_minus
    if abs(plus - minus) <= tolerance * max(plus, minus):
        return UNCORRELATED
    return ANTICORRELATED if plus < minus else CORRELATED


def separability_waist(config: SourceConfig) -> float:
    """Waist W_0* at which the two bandwidths coincide (circular spectrum)."""
    phi = config.geometry.half_angle
    if phi == 0.0:
        raise CollinearGeometryError(
            "collinear geometry: spatial-to-spectral mapping undefined"
        )
    n_s = inverse_group_velocity(config.crystal, config.signal_wavelength, ORDINARY)
    return _prefactor(config) / (n_s * sin(phi) * bandwidth_plus(config))


def sinc_alpha_check() -> float:
    """Residual |sinc(1/alpha) - 1/e|; a standing self-test of alpha = 0.455."""
    x = 1.0 / ALPHA
    return abs(sin(x) / x - exp(-1.0))
