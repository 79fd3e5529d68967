"""Implementations of the service commands.

Each command takes a validated RunConfig (plus per-command parameters) and
returns a CommandResult: a flat record of derived quantities in human
units, and a dict of named output files as text.  Everything downstream of
a RunConfig is deterministic, so identical requests produce byte-identical
file payloads.
"""

from bisect import insort
from dataclasses import dataclass, replace
from math import atan, cos, pi, sin, sqrt, tan

from .analysis import (
    MINUS,
    PLUS,
    pearson_correlation,
    rms_bandwidth_diag,
    schmidt_decompose,
)
from .biphoton import (
    FrequencyGrid,
    auto_grid,
    gaussian_spectrum_grid,
    joint_spectrum_grid,
)
from .dispersion import C_LIGHT, EXTRAORDINARY, ORDINARY, inverse_group_velocity
from .errors import ConfigError
from .gaussmodel import (
    bandwidth_minus,
    bandwidth_plus,
    classify_correlation,
    max_bandwidth_plus,
    model_for,
    separability_waist,
    ALPHA,
)
from .output import fmt, grid_csv, record_json, table_csv
from .phasematch import (
    SourceConfig,
    TiltSpec,
    effective_pump_N,
    optimal_tilt,
    pump_walkoff,
)
from .runconfig import DEG, RunConfig, build_source

PAPER_OPTIMAL_TILT_DEG = -13.8  # reported for an unstated configuration

FIG3_PANELS = "abcdefghi"


@dataclass(frozen=True)
class CommandResult:
    record: dict
    files: dict[str, str]


def _grid_for(source: SourceConfig, config: RunConfig, n: int | None) -> FrequencyGrid:
    nodes = n if n is not None else config.grid_n
    if config.grid_span_nm is not None:
        span = config.grid_span_nm * 1e-9
        return FrequencyGrid(span, span, nodes, nodes)
    return auto_grid(source, nodes)


def _tilt_for(source: SourceConfig, xi: float) -> SourceConfig:
    return source.with_tilt(TiltSpec.from_angle(xi, source.pump_wavelength))


def _measurements(source, grid, strip_phase):
    """Full-model grid measurements shared by summary/grid commands."""
    jsgrid = joint_spectrum_grid(source, grid)
    full = schmidt_decompose(jsgrid)
    stripped = schmidt_decompose(jsgrid, strip_phase=True)
    head = stripped if strip_phase else full
    return {
        "measured_bandwidth_plus_nm": rms_bandwidth_diag(jsgrid, PLUS) * 1e9,
        "measured_bandwidth_minus_nm": rms_bandwidth_diag(jsgrid, MINUS) * 1e9,
        "pearson_r": pearson_correlation(jsgrid),
        "schmidt_number": head.schmidt_number,
        "heralded_purity": head.purity,
        "schmidt_number_full": full.schmidt_number,
        "heralded_purity_full": full.purity,
        "schmidt_number_stripped": stripped.schmidt_number,
        "heralded_purity_stripped": stripped.purity,
        "schmidt_modes_kept": full.n_modes_kept,
    }, jsgrid


def _derived(source: SourceConfig, tolerance: float) -> dict:
    n_s = inverse_group_velocity(source.crystal, source.signal_wavelength, ORDINARY)
    n_p = inverse_group_velocity(source.crystal, source.pump_wavelength, EXTRAORDINARY)
    return {
        "theta_pm_deg": source.crystal.cut_angle / DEG,
        "pump_walkoff_deg": pump_walkoff(source) / DEG,
        "pump_inverse_group_velocity_s_per_m": n_p,
        "signal_inverse_group_velocity_s_per_m": n_s,
        "effective_pump_inverse_group_velocity_s_per_m": effective_pump_N(source),
        "tilt_deg": source.tilt.xi / DEG,
        "angular_dispersion_rad_per_m": source.tilt.epsilon,
        "optimal_tilt_deg": optimal_tilt(source) / DEG,
        "pump_bandwidth_rads": source.pump_bandwidth,
        "pump_bandwidth_wavelength_nm": source.pump_bandwidth_wavelength * 1e9,
        "bandwidth_plus_nm": bandwidth_plus(source) * 1e9,
        "bandwidth_minus_nm": bandwidth_minus(source) * 1e9,
        "bandwidth_plus_max_nm": max_bandwidth_plus(source) * 1e9,
        "separability_waist_um": separability_waist(source) * 1e6,
        "classification": classify_correlation(model_for(source), tolerance),
    }


def cmd_summary(config: RunConfig, n: int | None = None, tolerance: float = 0.05,
                strip_phase: bool = False) -> CommandResult:
    source = build_source(config)
    record = _derived(source, tolerance)
    measurements, _ = _measurements(source, _grid_for(source, config, n), strip_phase)
    record.update(measurements)
    record["grid_n"] = n if n is not None else config.grid_n
    return CommandResult(record, {})


def cmd_scan_tilt(config: RunConfig, xi_min_deg: float = -80.0,
                  xi_max_deg: float = 80.0, step_deg: float = 0.5) -> CommandResult:
    if not step_deg > 0.0 or xi_max_deg < xi_min_deg:
        raise ConfigError("empty tilt scan range")
    source = build_source(config)
    max_nm = max_bandwidth_plus(source) * 1e9
    count = int((xi_max_deg - xi_min_deg) / step_deg + 1e-9) + 1
    values = []
    for k in range(count):
        xi_deg = xi_min_deg + k * step_deg
        bw_nm = bandwidth_plus(_tilt_for(source, xi_deg * DEG)) * 1e9
        values.append((xi_deg, bw_nm))
    argmax = max(range(count), key=lambda k: values[k][1])
    rows = [
        (xi_deg, bw_nm, max_nm, k == argmax)
        for k, (xi_deg, bw_nm) in enumerate(values)
    ]
    table = table_csv(
        ["xi_deg", "dlam_plus_nm", "dlam_plus_max_nm", "is_max"],
        rows, config.echo_lines(), "tilt scan",
    )
    record = {
        "rows": count,
        "argmax_tilt_deg": values[argmax][0],
        "argmax_bandwidth_plus_nm": values[argmax][1],
        "optimal_tilt_deg": optimal_tilt(source) / DEG,
        "bandwidth_plus_max_nm": max_nm,
    }
    return CommandResult(record, {"scan_tilt.csv": table})


def cmd_scan_waist(config: RunConfig, w_min_um: float = 10.0,
                   w_max_um: float = 300.0, n_points: int = 59,
                   tolerance: float = 0.05) -> CommandResult:
    if n_points < 2 or not 0.0 < w_min_um < w_max_um:
        raise ConfigError("empty waist scan range")
    source = build_source(config)
    w_star_um = separability_waist(source) * 1e6
    waists = [
        w_min_um + k * (w_max_um - w_min_um) / (n_points - 1) for k in range(n_points)
    ]
    if w_min_um <= w_star_um <= w_max_um:
        insort(waists, w_star_um)
    rows = []
    for w_um in waists:
        cfg = replace(source, pump_waist=w_um * 1e-6)
        rows.append((
            w_um,
            bandwidth_minus(cfg) * 1e9,
            classify_correlation(model_for(cfg), tolerance),
            bool(w_um == w_star_um),
        ))
    table = table_csv(
        ["W0_um", "dlam_minus_nm", "classification", "is_separability_waist"],
        rows, config.echo_lines(), "waist scan",
    )
    record = {
        "rows": len(rows),
        "separability_waist_um": w_star_um,
        "bandwidth_plus_nm": bandwidth_plus(source) * 1e9,
    }
    return CommandResult(record, {"scan_waist.csv": table})


def _panel_files(source, config, n, tolerance, strip_phase, prefix, extra_echo):
    echo = config.echo_lines() + extra_echo
    grid = _grid_for(source, config, n)
    measurements, jsgrid = _measurements(source, grid, strip_phase)
    record = _derived(source, tolerance)
    record.update(measurements)
    record["grid_n"] = grid.n_signal
    record["grid_half_span_nm"] = grid.signal_half_span * 1e9
    gauss = gaussian_spectrum_grid(model_for(source), grid)
    files = {
        f"{prefix}_full.csv": grid_csv(jsgrid, "full model", echo),
        f"{prefix}_gauss.csv": grid_csv(gauss, "gaussian model", echo),
        f"{prefix}_summary.json": record_json(record),
    }
    return record, files


def cmd_grid(config: RunConfig, n: int | None = None, tolerance: float = 0.05,
             strip_phase: bool = False) -> CommandResult:
    source = build_source(config)
    record, files = _panel_files(source, config, n, tolerance, strip_phase, "grid", [])
    return CommandResult(record, files)


def cmd_design(config: RunConfig, target_bandwidth_nm: float,
               tolerance: float = 0.05) -> CommandResult:
    """Invert the closed-form bandwidths: find (tilt, waist) hitting a target.

    The diagonal bandwidth equation has two tilt branches on either side of
    the optimal tilt; both are returned with the single waist that makes
    the spectrum circular at that bandwidth.
    """
    source = build_source(config)
    max_bw = max_bandwidth_plus(source)
    target = target_bandwidth_nm * 1e-9
    if not target > 0.0:
        raise ConfigError("target bandwidth must be positive")
    if target > max_bw * (1.0 + 1e-12):
        raise ConfigError(
            "unreachable with this pump bandwidth: target "
            f"{target_bandwidth_nm} nm exceeds the maximum "
            f"{max_bw * 1e9} nm = 2*sqrt(2)*dlam_p"
        )
    lam_s = source.signal_wavelength
    pref = lam_s**2 / (2.0 * pi * C_LIGHT) / sqrt(2.0)
    length = source.geometry.length
    phi = source.geometry.half_angle
    n_s = inverse_group_velocity(source.crystal, lam_s, ORDINARY)
    n_p = inverse_group_velocity(source.crystal, source.pump_wavelength, EXTRAORDINARY)
    tan_rho = tan(pump_walkoff(source))
    bracket = (pref / target) ** 2 - 1.0 / source.pump_bandwidth**2
    mismatch = sqrt(max(bracket, 0.0)) / (ALPHA * length)
    base = n_s * cos(phi) - n_p
    xi_low = atan(C_LIGHT * (base - mismatch) / tan_rho)
    xi_high = atan(C_LIGHT * (base + mismatch) / tan_rho)
    waist = pref / (n_s * sin(phi) * target)

    record = {
        "target_bandwidth_nm": target_bandwidth_nm,
        "bandwidth_plus_max_nm": max_bw * 1e9,
        "tilt_low_deg": xi_low / DEG,
        "tilt_high_deg": xi_high / DEG,
        "optimal_tilt_deg": optimal_tilt(source) / DEG,
        "waist_um": waist * 1e6,
    }
    # verify by recomputation through the forward formulas
    for branch, xi in (("low", xi_low), ("high", xi_high)):
        check = replace(_tilt_for(source, xi), pump_waist=waist)
        record[f"verify_bandwidth_plus_{branch}_nm"] = bandwidth_plus(check) * 1e9
        record[f"verify_classification_{branch}"] = classify_correlation(
            model_for(check), tolerance
        )
    record["verify_bandwidth_minus_nm"] = bandwidth_minus(
        replace(source, pump_waist=waist)
    ) * 1e9
    return CommandResult(record, {"design.json": record_json(record)})


def _figure_notes(config: RunConfig, xi0_deg: float) -> str:
    delta = abs(xi0_deg - PAPER_OPTIMAL_TILT_DEG)
    if delta <= 5.0:
        verdict = (
            f"within 5 degrees of the reported optimum of {PAPER_OPTIMAL_TILT_DEG} deg, "
            "consistent given the unstated configuration behind that number."
        )
    else:
        verdict = (
            f"{fmt(delta)} deg away from the reported optimum of "
            f"{PAPER_OPTIMAL_TILT_DEG} deg. The reported value belongs to an "
            "unstated pump wavelength, crystal cut and Sellmeier fit; with the "
            "committed BBO fit the same formula lands near that value only for "
            "pump wavelengths around 600 nm, so the deviation is expected and "
            "does not affect any identity checked here (the optimum is defined "
            "by N'_p = N_s cos(phi), which this artifact satisfies to 1e-12)."
        )
    lines = [
        "# Figure reproduction notes",
        "",
        "All figure data is generated from the configuration echoed below.",
        "The published figures fix only the crystal family (BBO) and the pump",
        "bandwidth (4 nm rms); pump wavelength, crystal length, noncollinear",
        "angle and waist are assumptions of this artifact and are chosen so",
        "that the closed-form bandwidth model and the full amplitude agree",
        "over the whole scanned parameter set.",
        "",
        f"Computed optimal tilt for this configuration: {fmt(xi0_deg)} deg.",
        f"This is {verdict}",
        "",
        "Configuration:",
        "",
    ]
    lines += [f"    {line}" for line in config.echo_lines()]
    lines += [
        "",
        "Panels: rows are tilt = 0 deg / optimal / +30 deg; columns are",
        "W0 = 30 um / separability waist / 250 um, matching the nine-panel",
        "layout (a)-(i) of the published joint-spectrum figure.",
        "",
    ]
    return "\n".join(lines)


def cmd_figures(config: RunConfig, n: int | None = None, tolerance: float = 0.05,
                strip_phase: bool = False) -> CommandResult:
    """Batch dataset behind both published figures.

    Writes the tilt scan, the waist scan, and the nine-panel grid batch
    (three tilt rows by three waist columns) plus reproduction notes.
    """
    source = build_source(config)
    xi0 = optimal_tilt(source)
    files: dict[str, str] = {}
    scan_t = cmd_scan_tilt(config)
    files["fig2a_bandwidth_plus_vs_tilt.csv"] = scan_t.files["scan_tilt.csv"]
    scan_w = cmd_scan_waist(config, tolerance=tolerance)
    files["fig2b_bandwidth_minus_vs_waist.csv"] = scan_w.files["scan_waist.csv"]

    panels = []
    letters = iter(FIG3_PANELS)
    for row_name, xi in (("zero", 0.0), ("optimal", xi0), ("thirty", 30.0 * DEG)):
        tilted = _tilt_for(source, xi)
        w_star = separability_waist(tilted)
        for col_name, waist in (("30um", 30e-6), ("separability", w_star),
                                ("250um", 250e-6)):
            letter = next(letters)
            panel_source = replace(tilted, pump_waist=waist)
            extra_echo = [
                f"panel = {letter}",
                f"panel_tilt_deg = {fmt(xi / DEG)}",
                f"panel_waist_um = {fmt(waist * 1e6)}",
            ]
            record, panel_files = _panel_files(
                panel_source, config, n, tolerance, strip_phase,
                f"fig3_{letter}", extra_echo,
            )
            files.update(panel_files)
            panels.append({
                "panel": letter,
                "tilt_row": row_name,
                "waist_column": col_name,
                "tilt_deg": xi / DEG,
                "waist_um": waist * 1e6,
                "classification": record["classification"],
                "pearson_r": record["pearson_r"],
                "schmidt_number_stripped": record["schmidt_number_stripped"],
            })

    xi0_deg = xi0 / DEG
    files["figure_notes.md"] = _figure_notes(config, xi0_deg)
    record = {
        "panels": panels,
        "optimal_tilt_deg": xi0_deg,
        "paper_optimal_tilt_deg": PAPER_OPTIMAL_TILT_DEG,
        "files": sorted(files),
    }
    return CommandResult(record, files)
