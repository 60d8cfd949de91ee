import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fnnbench.scenario import default_paper_scenario, ideal_scenario

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIVE_OVER_ROOT2 = 5 / math.sqrt(2)
MEASURED_NOISE = (0.9710, 0.9860, 0.943)


@pytest.fixture
def ideal():
    return ideal_scenario()


@pytest.fixture
def noisy():
    return default_paper_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)

# published space-time separation table: pair -> (d, dt, sigma_dt, ds2, sigma_ds2)
SEPARATIONS = {
    ("S1", "S2"): (195, 235.55, 0.87, 33038, 392),
    ("QRNG_A", "S1"): (110, 335.0, 0.87, 2013, 226),
    ("QRNG_A", "S2"): (306, 416.15, 1.12, 78071, 617),
    ("QRNG_A", "M_B"): (199, 461.05, 2.24, 20496, 439),
    ("QRNG_A", "M_C"): (384, 404.6, 2.35, 132743, 787),
    ("QRNG_A", "QRNG_C"): (384, 154.6, 2.35, 145308, 771),
    ("M_A", "S2"): (306, 901.35, 1.12, 20618, 638),
    ("QRNG_C", "S1"): (277, 233.4, 1.12, 71833, 556),
    ("QRNG_C", "S2"): (104, 314.55, 0.87, 1924, 214),
    ("QRNG_C", "M_A"): (384, 639.8, 2.35, 110666, 814),
    ("QRNG_C", "M_B"): (192, 562.65, 2.24, 8412, 446),
    ("M_C", "S1"): (277, 686.6, 1.12, 34360, 571),
}

# worked timeline values: name -> (value, sigma), both in ns
TIMELINE = {"T_M_A": (862.95, 1.0), "T_sQRNG_A": (363.15, 2.3), "T_eM_A": (901.35, 1.1)}
