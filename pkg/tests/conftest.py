import numpy as np
import pytest

from resolvkit import _kernels


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # First call pays JIT compilation when the numba backend is active; keep
    # that cost out of the timed acceptance sections.
    log_q = np.log(np.array([0.5, 0.3, 0.2]))
    mass = np.array([0.5, 0.3, 0.2])
    _kernels.class_smooth_entropy(log_q, mass, 0.1)
    _kernels.class_kept_scan(log_q, mass, 0.1)
    _kernels.ball_dominance(np.array([[0.3, 0.3, 0.4]]), np.array([0.5, 0.8, 1.0]))
