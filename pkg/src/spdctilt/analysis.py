"""Measured bandwidths, correlation and heralded purity of a computed grid.

The Schmidt decomposition is the SVD of the discretized amplitude kernel
with uniform quadrature weights sqrt(dlam_s dlam_i) folded in.  By default
it runs on the full complex amplitude; strip_phase compares against the
phase-blind Gaussian picture.
"""

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .biphoton import JointSpectrumGrid
from .errors import EmptySpectrumError

SIGNAL = "signal"
IDLER = "idler"
PLUS = "plus"
MINUS = "minus"

SINGULAR_VALUE_CUTOFF = 1e-12  # relative to the largest singular value


@dataclass(frozen=True)
class SchmidtResult:
    """Schmidt spectrum of one grid.

    coefficients are the normalized squared singular values in descending
    order (they sum to one); schmidt_number K = 1/sum(coeff^2) and purity
    P = 1/K, so K = 1 exactly for a separable amplitude.
    """

    coefficients: np.ndarray
    schmidt_number: float
    purity: float
    n_modes_kept: int


def schmidt_decompose(jsgrid: JointSpectrumGrid, strip_phase: bool = False) -> SchmidtResult:
    """Singular spectrum of the amplitude matrix, as Schmidt coefficients."""
    amp = jsgrid.amplitude
    if strip_phase:
        amp = np.abs(amp)
    if not np.any(amp):
        raise EmptySpectrumError("cannot decompose an identically zero amplitude")
    weighted = amp * sqrt(jsgrid.grid.signal_spacing * jsgrid.grid.idler_spacing)
    singulars = np.linalg.svd(weighted, compute_uv=False)
    kept = singulars[singulars >= SINGULAR_VALUE_CUTOFF * singulars[0]]
    coefficients = kept**2 / np.sum(kept**2)
    purity = float(np.sum(coefficients**2))
    coefficients.setflags(write=False)
    return SchmidtResult(coefficients, 1.0 / purity, purity, len(kept))


def heralded_purity(result: SchmidtResult) -> float:
    """P = sum of squared Schmidt coefficients; 1 iff a single mode."""
    return float(np.sum(result.coefficients**2))


def _moments(jsgrid: JointSpectrumGrid):
    """Means, variances and covariance of (lam_s, lam_i) under the intensity."""
    ls = jsgrid.grid.signal_detunings()
    li = jsgrid.grid.idler_detunings()
    w = jsgrid.intensity * jsgrid.grid.signal_spacing * jsgrid.grid.idler_spacing
    total = float(np.sum(w))
    ws = np.sum(w, axis=1)
    wi = np.sum(w, axis=0)
    mean_s = float(ws @ ls) / total
    mean_i = float(wi @ li) / total
    var_s = float(ws @ (ls - mean_s) ** 2) / total
    var_i = float(wi @ (li - mean_i) ** 2) / total
    cov = float((ls - mean_s) @ w @ (li - mean_i)) / total
    return mean_s, mean_i, var_s, var_i, cov


def rms_bandwidth_diag(jsgrid: JointSpectrumGrid, direction: str) -> float:
    """Measured rms width of lam_plus or lam_minus under the intensity."""
    _, _, var_s, var_i, cov = _moments(jsgrid)
    if direction == PLUS:
        return sqrt((var_s + var_i + 2.0 * cov) / 2.0)
    if direction == MINUS:
        return sqrt((var_s + var_i - 2.0 * cov) / 2.0)
    raise ValueError(f"direction must be {PLUS!r} or {MINUS!r}, got {direction!r}")


def diagonal_means(jsgrid: JointSpectrumGrid) -> tuple[float, float]:
    """Mean lam_plus and lam_minus (zero on symmetric grids)."""
    mean_s, mean_i, _, _, _ = _moments(jsgrid)
    return (mean_s + mean_i) / sqrt(2.0), (mean_s - mean_i) / sqrt(2.0)


def pearson_correlation(jsgrid: JointSpectrumGrid) -> float:
    """Pearson correlation of the signal and idler detunings under S."""
    _, _, var_s, var_i, cov = _moments(jsgrid)
    if var_s <= 0.0 or var_i <= 0.0:
        raise ValueError("correlation undefined: zero variance along one arm")
    return cov / sqrt(var_s * var_i)


def marginal_spectrum(jsgrid: JointSpectrumGrid, arm: str) -> np.ndarray:
    """1-D spectral density of one arm over its detuning axis (1/m)."""
    if arm == SIGNAL:
        return np.sum(jsgrid.intensity, axis=1) * jsgrid.grid.idler_spacing
    if arm == IDLER:
        return np.sum(jsgrid.intensity, axis=0) * jsgrid.grid.signal_spacing
    raise ValueError(f"arm must be {SIGNAL!r} or {IDLER!r}, got {arm!r}")
