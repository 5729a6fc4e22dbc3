import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from memkernel import PronySeries, kernel_to_acf
from memkernel.experiments import five_mode_kernel

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True
)
settings.load_profile("default")


@pytest.fixture(scope="session")
def gamma5():
    return five_mode_kernel()


@pytest.fixture(scope="session")
def h5(gamma5):
    return kernel_to_acf(gamma5, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_stable_series(rng, n_real=2, n_pairs=1, max_rate=3.0, min_rate=0.2):
    """Real-valued exponential sum with random real modes and conjugate pairs."""
    w, lam = [], []
    for _ in range(n_real):
        w.append(rng.uniform(-1, 1) or 0.5)
        lam.append(-rng.uniform(min_rate, max_rate))
    for _ in range(n_pairs):
        a = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        b = complex(-rng.uniform(min_rate, max_rate), rng.uniform(0.2, 4.0))
        w += [a, a.conjugate()]
        lam += [b, b.conjugate()]
    return PronySeries(w, lam)
