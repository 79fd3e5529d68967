"""Refractive indices and derived dispersion quantities for uniaxial crystals.

All public functions take wavelengths in meters and angles in radians and
are pure: Sellmeier evaluation happens in micrometers internally, every
other quantity is strict SI.  Derivatives are analytic (the Sellmeier form
is differentiated directly); finite differences appear only in tests.
"""

from dataclasses import dataclass
from importlib import resources
from math import pi

import numpy as np

from .errors import AngleRangeError, ConfigError, WavelengthRangeError
from .textconfig import parse_float, parse_floats, parse_int, parse_sections

C_LIGHT = 299792458.0  # speed of light, m/s

ORDINARY = "ordinary"
EXTRAORDINARY = "extraordinary"


@dataclass(frozen=True)
class SellmeierFit:
    """One index fit: a formula id plus its coefficients.

    formula 1:  n^2 = c0 + c1 / (lam^2 - c2) + c3 * lam^2
    formula 2:  n^2 = 1 + sum_i b_i * lam^2 / (lam^2 - c_i)

    with lam in micrometers.
    """

    formula: int
    coeffs: tuple[float, ...]

    def __post_init__(self):
        if self.formula == 1:
            if len(self.coeffs) != 4:
                raise ValueError("formula 1 takes exactly 4 coefficients")
        elif self.formula == 2:
            if len(self.coeffs) < 2 or len(self.coeffs) % 2:
                raise ValueError("formula 2 takes b/c coefficient pairs")
        else:
            raise ValueError(f"unknown Sellmeier formula id {self.formula}")

    def n_squared(self, lam_um):
        lam2 = np.asarray(lam_um) ** 2
        if self.formula == 1:
            c0, c1, c2, c3 = self.coeffs
            return c0 + c1 / (lam2 - c2) + c3 * lam2
        total = np.ones_like(lam2)
        for b, c in zip(self.coeffs[0::2], self.coeffs[1::2]):
            total = total + b * lam2 / (lam2 - c)
        return total

    def dn2_dlam(self, lam_um):
        """d(n^2)/dlam in 1/um."""
        lam = np.asarray(lam_um)
        lam2 = lam**2
        if self.formula == 1:
            _, c1, c2, c3 = self.coeffs
            return -2.0 * c1 * lam / (lam2 - c2) ** 2 + 2.0 * c3 * lam
        total = np.zeros_like(lam)
        for b, c in zip(self.coeffs[0::2], self.coeffs[1::2]):
            total = total - 2.0 * b * c * lam / (lam2 - c) ** 2
        return total


@dataclass(frozen=True)
class CrystalProperties:
    """Sellmeier data plus cut angle for one uniaxial crystal.

    cut_angle is the angle between the optic axis and the pump propagation
    direction; transparency_range is (lam_min, lam_max) in meters.
    """

    name: str
    sellmeier_o: SellmeierFit
    sellmeier_e: SellmeierFit
    cut_angle: float
    transparency_range: tuple[float, float]

    def __post_init__(self):
        lo, hi = self.transparency_range
        if not 0.0 < lo < hi:
            raise ValueError(f"bad transparency range ({lo}, {hi})")
        if not 0.0 <= self.cut_angle <= pi / 2:
            raise ValueError(f"cut angle {self.cut_angle} outside [0, pi/2]")
        sweep = np.linspace(lo, hi, 64) * 1e6
        for fit in (self.sellmeier_o, self.sellmeier_e):
            n2 = fit.n_squared(sweep)
            if not np.all(np.isfinite(n2)) or np.any(n2 <= 1.0):
                raise ValueError(
                    f"{self.name}: Sellmeier fit does not give a real index > 1 "
                    "over the stated transparency range"
                )

    def with_cut_angle(self, theta: float) -> "CrystalProperties":
        return CrystalProperties(
            self.name, self.sellmeier_o, self.sellmeier_e, theta, self.transparency_range
        )


def _check_range(crystal: CrystalProperties, lam, margin: float = 0.0):
    lo, hi = crystal.transparency_range
    lam = np.asarray(lam)
    if np.any(lam < lo + margin) or np.any(lam > hi - margin):
        bad = float(np.min(lam)) if np.any(lam < lo + margin) else float(np.max(lam))
        raise WavelengthRangeError(
            f"wavelength {bad * 1e9:.6g} nm outside {crystal.name} transparency "
            f"range [{lo * 1e9:.6g}, {hi * 1e9:.6g}] nm"
        )


def _check_theta(theta):
    if np.any(np.asarray(theta) < 0.0) or np.any(np.asarray(theta) > pi / 2):
        raise AngleRangeError(f"propagation angle {theta} outside [0, pi/2]")


def _scalar(x, like):
    return float(x) if np.ndim(like) == 0 else x


def index_o(crystal: CrystalProperties, lam):
    """Ordinary refractive index at wavelength lam (meters)."""
    _check_range(crystal, lam)
    n = np.sqrt(crystal.sellmeier_o.n_squared(np.asarray(lam) * 1e6))
    return _scalar(n, lam)


def index_e_principal(crystal: CrystalProperties, lam):
    """Principal extraordinary index (propagation at 90 deg to the optic axis)."""
    _check_range(crystal, lam)
    n = np.sqrt(crystal.sellmeier_e.n_squared(np.asarray(lam) * 1e6))
    return _scalar(n, lam)


def index_e_angle(crystal: CrystalProperties, lam, theta):
    """Extraordinary index at angle theta to the optic axis.

    Index ellipse: 1/n^2(theta) = cos^2(theta)/n_o^2 + sin^2(theta)/n_e^2,
    so n(0) = n_o and n(pi/2) = n_e.
    """
    _check_range(crystal, lam)
    _check_theta(theta)
    lam_um = np.asarray(lam) * 1e6
    no2 = crystal.sellmeier_o.n_squared(lam_um)
    ne2 = crystal.sellmeier_e.n_squared(lam_um)
    n = 1.0 / np.sqrt(np.cos(theta) ** 2 / no2 + np.sin(theta) ** 2 / ne2)
    return _scalar(n, n)


def _index(crystal, lam, polarization):
    if polarization == ORDINARY:
        return index_o(crystal, lam)
    if polarization == EXTRAORDINARY:
        return index_e_angle(crystal, lam, crystal.cut_angle)
    raise ValueError(f"unknown polarization {polarization!r}")


def wavenumber(crystal: CrystalProperties, lam, polarization):
    """k = 2 pi n(lam, pol) / lam in rad/m.

    polarization is ORDINARY or EXTRAORDINARY; the extraordinary wave
    propagates at the crystal's cut angle.
    """
    return 2.0 * pi * _index(crystal, lam, polarization) / lam


def _dn_dlam(crystal, lam, polarization):
    """Analytic dn/dlam in 1/m."""
    lam_um = np.asarray(lam) * 1e6
    if polarization == ORDINARY:
        fit = crystal.sellmeier_o
        n = np.sqrt(fit.n_squared(lam_um))
        return fit.dn2_dlam(lam_um) / (2.0 * n) * 1e6
    if polarization != EXTRAORDINARY:
        raise ValueError(f"unknown polarization {polarization!r}")
    theta = crystal.cut_angle
    no2 = crystal.sellmeier_o.n_squared(lam_um)
    ne2 = crystal.sellmeier_e.n_squared(lam_um)
    no = np.sqrt(no2)
    ne = np.sqrt(ne2)
    n = 1.0 / np.sqrt(np.cos(theta) ** 2 / no2 + np.sin(theta) ** 2 / ne2)
    dno = crystal.sellmeier_o.dn2_dlam(lam_um) / (2.0 * no)
    dne = crystal.sellmeier_e.dn2_dlam(lam_um) / (2.0 * ne)
    # differentiate the ellipse: dn/dlam = n^3 (cos^2/no^3 dno + sin^2/ne^3 dne)
    dn = n**3 * (np.cos(theta) ** 2 / no**3 * dno + np.sin(theta) ** 2 / ne**3 * dne)
    return dn * 1e6


# Inverse group velocities need an interior wavelength; this margin keeps the
# finite-difference oracle in tests (step 0.01 nm, Richardson halving) valid too.
EDGE_MARGIN = 2e-11  # meters


def inverse_group_velocity(crystal: CrystalProperties, lam, polarization):
    """N = dk/domega = (n - lam dn/dlam) / c in s/m."""
    _check_range(crystal, lam, margin=EDGE_MARGIN)
    n = _index(crystal, lam, polarization)
    dn = _dn_dlam(crystal, lam, polarization)
    return (n - np.asarray(lam) * dn) / C_LIGHT


def walkoff_angle(crystal: CrystalProperties, lam, theta):
    """Poynting-vector walk-off magnitude for the extraordinary wave.

    tan(rho) = (n^2(theta)/2) sin(2 theta) |1/n_e^2 - 1/n_o^2|; the returned
    angle is always >= 0, any sign convention is applied by the caller.
    """
    _check_range(crystal, lam)
    _check_theta(theta)
    lam_um = np.asarray(lam) * 1e6
    no2 = crystal.sellmeier_o.n_squared(lam_um)
    ne2 = crystal.sellmeier_e.n_squared(lam_um)
    n2 = 1.0 / (np.cos(theta) ** 2 / no2 + np.sin(theta) ** 2 / ne2)
    tan_rho = np.abs(0.5 * n2 * np.sin(2.0 * theta) * (1.0 / ne2 - 1.0 / no2))
    rho = np.arctan(tan_rho)
    return _scalar(rho, rho)


def load_crystal(name: str, path=None, cut_angle: float = 0.0) -> CrystalProperties:
    """Load one crystal from a data file (default: the packaged data set)."""
    if path is None:
        text = resources.files("spdctilt.data").joinpath("crystals.txt").read_text("utf-8")
        origin = "spdctilt/data/crystals.txt"
    else:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ConfigError(f"cannot read crystal file {path}: {exc}") from exc
        origin = str(path)
    return load_crystal_text(name, text, origin, cut_angle)


def load_crystal_text(
    name: str, text: str, origin: str = "<crystal data>", cut_angle: float = 0.0
) -> CrystalProperties:
    """Parse crystal data from already-read text (service requests inline it)."""
    sections = parse_sections(text, origin)
    key = ("crystal", name)
    if key not in sections:
        known = ", ".join(sorted(n for k, n in sections if k == "crystal" and n))
        raise ConfigError(f"{origin}: no [crystal \"{name}\"] section (known: {known})")
    body = sections[key]
    for required in ("formula_o", "coeffs_o", "formula_e", "coeffs_e", "range_nm"):
        if required not in body:
            raise ConfigError(f"{origin}: crystal {name!r} is missing key {required!r}")
    try:
        fit_o = SellmeierFit(
            parse_int(body["formula_o"], f"{name}.formula_o"),
            parse_floats(body["coeffs_o"], f"{name}.coeffs_o"),
        )
        fit_e = SellmeierFit(
            parse_int(body["formula_e"], f"{name}.formula_e"),
            parse_floats(body["coeffs_e"], f"{name}.coeffs_e"),
        )
        rng = parse_floats(body["range_nm"], f"{name}.range_nm")
        if len(rng) != 2:
            raise ValueError("range_nm takes exactly two values")
        return CrystalProperties(
            name, fit_o, fit_e, cut_angle, (rng[0] * 1e-9, rng[1] * 1e-9)
        )
    except ValueError as exc:
        raise ConfigError(f"{origin}: crystal {name!r}: {exc}") from exc
