"""Longitudinal phase mismatch, phase-matching angle and pulse-front tilt.

Geometry: degenerate noncollinear type-I, pump extraordinary at the crystal
cut angle, signal and idler ordinary at internal angles +phi / -phi in the
y-z plane.  The mismatch is

    delta_k = k_p(w_s + w_i) - (k_s + k_i) cos(phi) + (tan(rho_p) tan(xi)/c) (w_p - w_p0)

where the last term is the pulse-front-tilt contribution, taken as exactly
linear in the pump frequency detuning; rho_p >= 0 is the pump walk-off
magnitude and the sign of the product is carried entirely by xi.
"""

from dataclasses import dataclass, replace
from math import atan, cos, pi, tan

import numpy as np

from .dispersion import (
    C_LIGHT,
    EXTRAORDINARY,
    ORDINARY,
    CrystalProperties,
    index_e_angle,
    inverse_group_velocity,
    walkoff_angle,
    wavenumber,
)
from .errors import NoWalkoffError, PhaseMatchingError


@dataclass(frozen=True)
class Geometry:
    """Crystal length L (meters) and internal noncollinear half-angle phi."""

    length: float
    half_angle: float

    def __post_init__(self):
        if not self.length > 0.0:
            raise ValueError("crystal length must be positive")
        if not 0.0 <= self.half_angle < pi / 2:
            raise ValueError("noncollinear half-angle must be in [0, pi/2)")


@dataclass(frozen=True)
class TiltSpec:
    """Pulse-front tilt xi and the angular dispersion epsilon behind it.

    The two are tied by tan(xi) = -lam * epsilon at the stored reference
    wavelength.  Grating provenance (m, d, beta_0) is kept when the spec
    was built from a grating.
    """

    xi: float
    epsilon: float
    reference_wavelength: float
    grating: tuple[int, float, float] | None = None

    def __post_init__(self):
        if not abs(self.xi) < pi / 2:
            raise ValueError("tilt angle must satisfy |xi| < pi/2")
        if not self.reference_wavelength > 0.0:
            raise ValueError("reference wavelength must be positive")
        if abs(tan(self.xi) + self.reference_wavelength * self.epsilon) > 1e-9 * (
            1.0 + abs(tan(self.xi))
        ):
            raise ValueError("xi and epsilon are inconsistent with tan(xi) = -lam*eps")

    @classmethod
    def from_angle(cls, xi: float, reference_wavelength: float) -> "TiltSpec":
        return cls(xi, -tan(xi) / reference_wavelength, reference_wavelength)


def tilt_from_grating(m: int, d: float, beta_0: float, lam: float) -> TiltSpec:
    """Tilt produced by a grating: eps = m/(d cos beta_0), tan(xi) = -lam*eps.

    m is the diffraction order, d the groove spacing in meters and beta_0
    the output diffraction angle.
    """
    if not d > 0.0:
        raise ValueError("groove spacing must be positive")
    if not abs(beta_0) < pi / 2:
        raise ValueError("diffraction angle must satisfy |beta_0| < pi/2")
    epsilon = m / (d * cos(beta_0))
    xi = atan(-lam * epsilon)
    return TiltSpec(xi, epsilon, lam, grating=(m, d, beta_0))


@dataclass(frozen=True)
class SourceConfig:
    """Full description of one pumped-crystal configuration.

    The crystal's cut angle is the pump propagation angle; build configs
    through phase_matched_source so that delta_k vanishes at the degenerate
    center wavelengths.  pump_bandwidth is the rms angular-frequency
    bandwidth B_p; signal and idler sit at exactly twice the pump wavelength.
    """

    crystal: CrystalProperties
    geometry: Geometry
    pump_wavelength: float
    pump_bandwidth: float
    pump_waist: float
    tilt: TiltSpec

    def __post_init__(self):
        if not self.pump_wavelength > 0.0:
            raise ValueError("pump wavelength must be positive")
        if not self.pump_bandwidth > 0.0:
            raise ValueError("pump bandwidth must be positive")
        if not self.pump_waist > 0.0:
            raise ValueError("pump waist must be positive")

    @property
    def signal_wavelength(self) -> float:
        """Degenerate signal/idler center wavelength, exactly 2 lam_p0."""
        return 2.0 * self.pump_wavelength

    @property
    def pump_bandwidth_wavelength(self) -> float:
        """rms pump wavelength bandwidth: dlam_p = lam_p0^2 B_p / (2 pi c)."""
        return self.pump_wavelength**2 * self.pump_bandwidth / (2.0 * pi * C_LIGHT)

    def with_tilt(self, tilt: TiltSpec) -> "SourceConfig":
        return replace(self, tilt=tilt)


def phase_matching_angle(crystal: CrystalProperties, lam_p0: float, phi: float) -> float:
    """Cut angle at which delta_k vanishes at the degenerate center.

    Deterministic 0.1-degree pre-scan over (0.1, 89.9) degrees for a sign
    change, bisection to 1e-13 rad, then two secant polish steps.
    """
    lam_s0 = 2.0 * lam_p0
    target = 2.0 * wavenumber(crystal, lam_s0, ORDINARY) * cos(phi)

    def mismatch(theta: float) -> float:
        return 2.0 * pi * index_e_angle(crystal, lam_p0, theta) / lam_p0 - target

    step = pi / 1800.0
    lo = step
    hi = pi / 2 - step
    theta = lo
    f_lo = mismatch(theta)
    bracket = None
    while theta < hi:
        nxt = min(theta + step, hi)
        f_nxt = mismatch(nxt)
        if f_lo == 0.0:
            return theta
        if (f_lo > 0.0) != (f_nxt > 0.0):
            bracket = (theta, nxt, f_lo, f_nxt)
            break
        theta, f_lo = nxt, f_nxt
    if bracket is None:
        raise PhaseMatchingError(
            "unphasematchable configuration: delta_k has no zero for "
            f"{crystal.name} at lam_p = {lam_p0 * 1e9:.6g} nm, "
            f"phi = {phi * 180 / pi:.6g} deg "
            f"(delta_k = {mismatch(lo):.6g} rad/m at 0.1 deg, "
            f"{mismatch(hi):.6g} rad/m at 89.9 deg)"
        )

    a, b, fa, fb = bracket
    while b - a > 1e-13:
        m = 0.5 * (a + b)
        fm = mismatch(m)
        if fm == 0.0:
            return m
        if (fm > 0.0) == (fa > 0.0):
            a, fa = m, fm
        else:
            b, fb = m, fm
    # secant polish inside the final bracket
    root = 0.5 * (a + b)
    for _ in range(2):
        if fb == fa:
            break
        candidate = a - fa * (b - a) / (fb - fa)
        if not a <= candidate <= b:
            break
        root = candidate
        fc = mismatch(candidate)
        if fc == 0.0:
            break
        if (fc > 0.0) == (fa > 0.0):
            a, fa = candidate, fc
        else:
            b, fb = candidate, fc
    return root


def phase_matched_source(
    crystal: CrystalProperties,
    geometry: Geometry,
    pump_wavelength: float,
    pump_bandwidth: float,
    pump_waist: float,
    tilt: TiltSpec,
) -> SourceConfig:
    """Build a SourceConfig with the cut angle solved for phase matching."""
    theta = phase_matching_angle(crystal, pump_wavelength, geometry.half_angle)
    return SourceConfig(
        crystal.with_cut_angle(theta),
        geometry,
        pump_wavelength,
        pump_bandwidth,
        pump_waist,
        tilt,
    )


def pump_walkoff(config: SourceConfig) -> float:
    """Pump walk-off magnitude rho_p at the center pump wavelength."""
    return walkoff_angle(config.crystal, config.pump_wavelength, config.crystal.cut_angle)


def delta_k(config: SourceConfig, lam_s, lam_i):
    """Signed longitudinal phase mismatch in rad/m (scalar or array inputs)."""
    crystal = config.crystal
    w_s = 2.0 * pi * C_LIGHT / np.asarray(lam_s)
    w_i = 2.0 * pi * C_LIGHT / np.asarray(lam_i)
    w_p = w_s + w_i
    lam_p = 2.0 * pi * C_LIGHT / w_p
    k_p = wavenumber(crystal, lam_p, EXTRAORDINARY)
    k_s = wavenumber(crystal, lam_s, ORDINARY)
    k_i = wavenumber(crystal, lam_i, ORDINARY)
    base = k_p - (k_s + k_i) * cos(config.geometry.half_angle)
    w_p0 = 2.0 * pi * C_LIGHT / config.pump_wavelength
    tilt_term = tan(pump_walkoff(config)) * tan(config.tilt.xi) / C_LIGHT * (w_p - w_p0)
    out = base + tilt_term
    return float(out) if np.ndim(out) == 0 else out


def effective_pump_N(config: SourceConfig) -> float:
    """N'_p = N_p + tan(rho_p) tan(xi) / c in s/m."""
    n_p = inverse_group_velocity(config.crystal, config.pump_wavelength, EXTRAORDINARY)
    return n_p + tan(pump_walkoff(config)) * tan(config.tilt.xi) / C_LIGHT


def optimal_tilt(config: SourceConfig) -> float:
    """Tilt angle xi_0 that makes N'_p equal N_s cos(phi).

    This zeroes the group-velocity-mismatch term of the diagonal bandwidth
    and therefore maximizes it.  Requires nonzero pump walk-off: the tilt
    couples to the pump group velocity only through rho_p.
    """
    tan_rho = tan(pump_walkoff(config))
    if tan_rho < 1e-15:
        raise NoWalkoffError(
            "no walk-off, tilt cannot act: the pump propagates along a "
            "principal direction of the crystal"
        )
    n_s = inverse_group_velocity(config.crystal, config.signal_wavelength, ORDINARY)
    n_p = inverse_group_velocity(config.crystal, config.pump_wavelength, EXTRAORDINARY)
    return atan(C_LIGHT * (n_s * cos(config.geometry.half_angle) - n_p) / tan_rho)
