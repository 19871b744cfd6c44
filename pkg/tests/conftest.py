import pytest

from gsm.model.ball import BallSpec
from gsm.model.coefficients import NoiseLevel
from qfe.utils.logging import init_logger


@pytest.fixture(scope='session', autouse=True)
def quiet_logger():
    init_logger(log_level='WARNING')

@pytest.fixture
def sparse_ball() -> BallSpec:
    """``p < 2`` ball in the nonparametric region (s = 1/12)"""
    return BallSpec.lp(1.5, 0.25, 1.0)

@pytest.fixture
def efficient_ball() -> BallSpec:
    """``p < 2`` ball in the efficient region (alpha > 1/(2p))"""
    return BallSpec.lp(1.25, 0.5, 1.0)

@pytest.fixture
def hilbert_ball() -> BallSpec:
    return BallSpec.lp(2.0, 0.25, 1.0)

@pytest.fixture
def besov_ball() -> BallSpec:
    return BallSpec.besov(1.5, 2.0, 0.5, 1.0)

@pytest.fixture
def noise_1024() -> NoiseLevel:
    return NoiseLevel(1024.0)
