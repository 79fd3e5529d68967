"""Exception hierarchy shared by the library, the service and the CLI."""


class SpdcTiltError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SpdcTiltError):
    """Invalid configuration text, keys or values (CLI exit code 2)."""


class WavelengthRangeError(SpdcTiltError):
    """Wavelength outside the transparency range of the crystal data."""


class AngleRangeError(SpdcTiltError):
    """Propagation or tilt angle outside its allowed interval."""


class PhaseMatchingError(SpdcTiltError):
    """No phase-matching angle exists for the requested configuration."""


class NoWalkoffError(SpdcTiltError):
    """Walk-off vanishes, so pulse-front tilt cannot act on the pump."""


class CollinearGeometryError(SpdcTiltError):
    """Collinear geometry: the spatial-to-spectral mapping is undefined."""


class EmptySpectrumError(SpdcTiltError):
    """Joint spectrum is identically zero on the requested grid."""
