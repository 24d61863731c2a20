import numpy as np
import pytest

from toomcook.harness import trial_inputs


@pytest.fixture(scope="session")
def measure_cache():
    """Shared measurement memo for the acceptance suite."""
    return {}


def batch_inputs(seed, trials, dims, n_h, n, channels=1):
    pairs = [trial_inputs(seed, t, dims, n_h, n, channels)
             for t in range(trials)]
    return (np.stack([p[0] for p in pairs]),
            np.stack([p[1] for p in pairs]))
