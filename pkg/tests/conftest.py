import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

from wep_torsim.linalg2 import DensityMatrix2, HermitianOp2
from wep_torsim.quantum_state import BlochState
from wep_torsim.wep_core import WepParams


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_op(rng, scale=1.0) -> HermitianOp2:
    a11, a22, re, im = rng.normal(scale=scale, size=4)
    return HermitianOp2(a11, a22, complex(re, im))


def random_state(rng) -> BlochState:
    return BlochState(rng.uniform(0, 1), math.acos(rng.uniform(-1, 1)), rng.uniform(-math.pi, math.pi))


def random_params(rng, spread=0.1) -> WepParams:
    return WepParams(
        1 + rng.uniform(-spread, spread),
        1 + rng.uniform(-spread, spread),
        rng.uniform(0, spread),
        rng.uniform(0, 2 * math.pi),
    )


finite = st.floats(-10, 10, allow_nan=False)
unit = st.floats(0, 1)
polar = st.floats(0, math.pi)
phase = st.floats(-math.pi, math.pi)
bloch_states = st.builds(BlochState, unit, polar, phase)
wep_params = st.builds(
    WepParams,
    st.floats(0.5, 1.5),
    st.floats(0.5, 1.5),
    st.floats(0, 0.5),
    st.floats(0, 2 * math.pi),
)
hermitian_ops = st.builds(
    lambda a, b, re, im: HermitianOp2(a, b, complex(re, im)), finite, finite, finite, finite
)
