import numpy as np
import pytest

import projfree as pf


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_domains(relaxed_tn=True):
    """One instance of each standard domain kind."""
    tn_knobs = dict(lo_tol=1e-6, lo_max_iters=100_000) if relaxed_tn else {}
    return {
        "ball": pf.Ball(4, 1.5),
        "box": pf.Box.symmetric(4, 0.8),
        "simplex": pf.Simplex(5),
        "trace_norm_ball": pf.TraceNormBall(3, 4, 2.0, **tn_knobs),
    }


@pytest.fixture
def domains():
    return make_domains()
