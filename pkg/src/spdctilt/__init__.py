"""Joint-spectrum engineering for noncollinear type-I SPDC with a
pulse-front-tilted pump: dispersion, phase matching, the full biphoton
amplitude, the closed-form Gaussian model, and Schmidt/correlation
analysis, wrapped in an HTTP service with a thin CLI client.
"""

__version__ = "0.1.0"

from .analysis import SchmidtResult, schmidt_decompose
from .biphoton import FrequencyGrid, JointSpectrumGrid, joint_spectrum_grid
from .dispersion import CrystalProperties, load_crystal
from .errors import SpdcTiltError
from .gaussmodel import GaussianSpectrumModel
from .phasematch import Geometry, SourceConfig, TiltSpec

__all__ = [
    "__version__",
    "CrystalProperties",
    "FrequencyGrid",
    "GaussianSpectrumModel",
    "Geometry",
    "JointSpectrumGrid",
    "SchmidtResult",
    "SourceConfig",
    "SpdcTiltError",
    "TiltSpec",
    "joint_spectrum_grid",
    "load_crystal",
    "schmidt_decompose",
]
