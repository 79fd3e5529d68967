from dataclasses import replace
from math import pi

import pytest

from spdctilt.biphoton import auto_grid, joint_spectrum_grid
from spdctilt.dispersion import load_crystal
from spdctilt.gaussmodel import separability_waist
from spdctilt.phasematch import TiltSpec, optimal_tilt
from spdctilt.runconfig import RunConfig, build_source

DEG = pi / 180.0


@pytest.fixture(scope="session")
def bbo():
    return load_crystal("BBO")


@pytest.fixture(scope="session")
def default_config():
    return RunConfig()


@pytest.fixture(scope="session")
def default_source(default_config):
    return build_source(default_config)


def panel_sources(source):
    """The nine documented (tilt row, waist column) combinations."""
    xi0 = optimal_tilt(source)
    panels = {}
    for row, xi in (("zero", 0.0), ("optimal", xi0), ("thirty", 30.0 * DEG)):
        tilted = source.with_tilt(TiltSpec.from_angle(xi, source.pump_wavelength))
        w_star = separability_waist(tilted)
        for col, waist in (("w30", 30e-6), ("wstar", w_star), ("w250", 250e-6)):
            panels[(row, col)] = replace(tilted, pump_waist=waist)
    return panels


@pytest.fixture(scope="session")
def nine_panels(default_source):
    """Full-model grids for the nine panels at the documented 256^2 size."""
    return {
        key: joint_spectrum_grid(cfg, auto_grid(cfg, 256))
        for key, cfg in panel_sources(default_source).items()
    }
