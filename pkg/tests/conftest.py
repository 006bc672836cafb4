import pytest

from dswlab import Sech2Model

SWEEP_EPS = (0.08, 0.04, 0.02, 0.01)
T_SWEEP = 0.4


@pytest.fixture(scope="session")
def model():
    """Shared sech^2 model so solver caches persist across test modules."""
    return Sech2Model()


@pytest.fixture(scope="session")
def zone04(model):
    from dswlab.whitham import solve_zone

    return solve_zone(model, T_SWEEP)


@pytest.fixture(scope="session")
def sweep_result(model):
    """KdV sweep at t = 0.4; KdV solves are cached on disk after the first run."""
    from dswlab.compare import sweep

    return sweep(model, SWEEP_EPS, T_SWEEP)
