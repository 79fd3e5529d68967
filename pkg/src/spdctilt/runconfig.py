"""User-facing run configuration: one [source] section of key = value lines.

This is the only place where human units (nm, um, mm, degrees) exist; they
are converted to SI exactly once, here.  The default configuration is an
assumption, chosen so that the closed-form model and the full amplitude
stay in close agreement over the whole documented parameter set (thin
crystal, small noncollinear angle); it is echoed into every output file.
"""

from dataclasses import dataclass, fields
from math import pi

from .dispersion import C_LIGHT, CrystalProperties, load_crystal, load_crystal_text
from .errors import ConfigError
from .phasematch import (
    SourceConfig,
    Geometry,
    TiltSpec,
    optimal_tilt,
    phase_matched_source,
    tilt_from_grating,
)
from .textconfig import parse_float, parse_int, parse_sections

DEG = pi / 180.0

DEFAULT_CONFIG_TEXT = """\
# Default source configuration (assumed, see README: the underlying study
# fixes only the crystal family and the pump bandwidth).
[source]
crystal = BBO
pump_wavelength_nm = 400
pump_bandwidth_nm = 4
waist_um = 45
length_mm = 0.1
noncollinear_deg = 2
tilt = optimal
grid_n = 256
grid_span = auto
"""

_SCALAR_KEYS = {
    "pump_wavelength_nm",
    "pump_bandwidth_nm",
    "pump_bandwidth_rads",
    "waist_um",
    "length_mm",
    "noncollinear_deg",
    "grating_groove_um",
    "grating_angle_deg",
    "grid_span_nm",
}
_KNOWN_KEYS = _SCALAR_KEYS | {
    "crystal",
    "crystal_file",
    "tilt",
    "grating_order",
    "grid_n",
    "grid_span",
    "output_dir",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated CLI-boundary configuration (human units)."""

    crystal_name: str = "BBO"
    crystal_file: str | None = None
    crystal_text: str | None = None
    pump_wavelength_nm: float = 400.0
    pump_bandwidth_nm: float | None = 4.0
    pump_bandwidth_rads: float | None = None
    waist_um: float = 45.0
    length_mm: float = 0.1
    noncollinear_deg: float = 2.0
    tilt_deg: float | None = None
    tilt_optimal: bool = True
    grating_order: int | None = None
    grating_groove_um: float | None = None
    grating_angle_deg: float | None = None
    grid_n: int = 256
    grid_span_nm: float | None = None
    output_dir: str | None = None

    def __post_init__(self):
        if (self.pump_bandwidth_nm is None) == (self.pump_bandwidth_rads is None):
            raise ConfigError(
                "exactly one of pump_bandwidth_nm and pump_bandwidth_rads must be given"
            )
        grating_keys = (self.grating_order, self.grating_groove_um, self.grating_angle_deg)
        has_grating = any(v is not None for v in grating_keys)
        if has_grating and any(v is None for v in grating_keys):
            raise ConfigError(
                "a grating tilt needs all of grating_order, grating_groove_um "
                "and grating_angle_deg"
            )
        has_angle = self.tilt_deg is not None or self.tilt_optimal
        if has_angle == has_grating:
            raise ConfigError("exactly one of tilt and grating_* must be given")
        if self.tilt_deg is not None and self.tilt_optimal:
            raise ConfigError("tilt cannot be both 'optimal' and a fixed angle")
        for key in (
            "pump_wavelength_nm",
            "waist_um",
            "length_mm",
            "noncollinear_deg",
        ):
            if not getattr(self, key) > 0.0:
                raise ConfigError(f"{key} must be positive")
        for key in ("pump_bandwidth_nm", "pump_bandwidth_rads", "grating_groove_um",
                    "grid_span_nm"):
            value = getattr(self, key)
            if value is not None and not value > 0.0:
                raise ConfigError(f"{key} must be positive")
        if self.noncollinear_deg >= 90.0:
            raise ConfigError("noncollinear_deg must be below 90")
        if self.tilt_deg is not None and not abs(self.tilt_deg) < 90.0:
            raise ConfigError("tilt must satisfy |tilt| < 90 degrees")
        if self.grating_angle_deg is not None and not abs(self.grating_angle_deg) < 90.0:
            raise ConfigError("grating_angle_deg must satisfy |angle| < 90 degrees")
        if self.grid_n < 16:
            raise ConfigError("grid_n must be at least 16")

    def echo_lines(self) -> list[str]:
        """Canonical key = value echo, fixed field order, for output headers."""
        out = []
        for f in fields(self):
            if f.name == "crystal_text":
                continue
            value = getattr(self, f.name)
            if value is None:
                continue
            out.append(f"{f.name} = {value!r}" if isinstance(value, str) else f"{f.name} = {value}")
        return out


def parse_runconfig(text: str, origin: str = "<config>",
                    crystal_text: str | None = None) -> RunConfig:
    """Parse and validate one [source] section into a RunConfig."""
    sections = parse_sections(text, origin)
    if ("source", None) not in sections:
        raise ConfigError(f"{origin}: missing [source] section")
    body = dict(sections[("source", None)])
    unknown = sorted(set(body) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"{origin}: unknown key(s) in [source]: {', '.join(unknown)}")

    kwargs: dict = {"crystal_text": crystal_text}
    if "crystal" in body:
        kwargs["crystal_name"] = body.pop("crystal")
    if "crystal_file" in body:
        kwargs["crystal_file"] = body.pop("crystal_file")
    if "output_dir" in body:
        kwargs["output_dir"] = body.pop("output_dir")
    if "grid_n" in body:
        kwargs["grid_n"] = parse_int(body.pop("grid_n"), f"{origin}: grid_n")
    if "grating_order" in body:
        kwargs["grating_order"] = parse_int(
            body.pop("grating_order"), f"{origin}: grating_order"
        )
    if "tilt" in body:
        raw = body.pop("tilt")
        if raw == "optimal":
            kwargs["tilt_optimal"] = True
        else:
            kwargs["tilt_deg"] = parse_float(raw, f"{origin}: tilt")
            kwargs["tilt_optimal"] = False
    elif any(k.startswith("grating_") for k in body) or "grating_order" in kwargs:
        kwargs["tilt_optimal"] = False
    if "grid_span" in body:
        raw = body.pop("grid_span")
        if raw != "auto":
            kwargs["grid_span_nm"] = parse_float(raw, f"{origin}: grid_span")
    if "pump_bandwidth_rads" in body:
        kwargs["pump_bandwidth_nm"] = None
        kwargs["pump_bandwidth_rads"] = parse_float(
            body.pop("pump_bandwidth_rads"), f"{origin}: pump_bandwidth_rads"
        )
    for key in list(body):
        if key in _SCALAR_KEYS:
            kwargs[key] = parse_float(body.pop(key), f"{origin}: {key}")
    if body:
        raise ConfigError(f"{origin}: unhandled keys {sorted(body)}")
    return RunConfig(**kwargs)


def load_runconfig_crystal(config: RunConfig) -> CrystalProperties:
    if config.crystal_text is not None:
        return load_crystal_text(config.crystal_name, config.crystal_text)
    return load_crystal(config.crystal_name, path=config.crystal_file)


def build_source(config: RunConfig) -> SourceConfig:
    """Resolve a RunConfig into a phase-matched SI SourceConfig."""
    crystal = load_runconfig_crystal(config)
    geometry = Geometry(config.length_mm * 1e-3, config.noncollinear_deg * DEG)
    lam_p = config.pump_wavelength_nm * 1e-9
    if config.pump_bandwidth_rads is not None:
        bandwidth = config.pump_bandwidth_rads
    else:
        bandwidth = 2.0 * pi * C_LIGHT * (config.pump_bandwidth_nm * 1e-9) / lam_p**2
    source = phase_matched_source(
        crystal, geometry, lam_p, bandwidth, config.waist_um * 1e-6,
        TiltSpec.from_angle(0.0, lam_p),
    )
    if config.tilt_optimal:
        tilt = TiltSpec.from_angle(optimal_tilt(source), lam_p)
    elif config.tilt_deg is not None:
        tilt = TiltSpec.from_angle(config.tilt_deg * DEG, lam_p)
    else:
        tilt = tilt_from_grating(
            config.grating_order,
            config.grating_groove_um * 1e-6,
            config.grating_angle_deg * DEG,
            lam_p,
        )
    return source.with_tilt(tilt)
