import numpy as np
import pytest

import wsprox


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation once so timed tests measure steady state."""
    y = np.array([0.7, 1.0, 0.9, 0.99])
    for algo in wsprox.particles.SOLVERS:
        wsprox.isotonic_fit(y, algo=algo)
    wsprox.rightmost_collision(
        wsprox.ParticleSystem(y, np.zeros(4), np.ones(4, dtype=np.int64)), 0
    )
