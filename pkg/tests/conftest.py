import pytest

from src.model.priors import NormalPrior, Orientation, PointPrior, TestSpec, TruncatedTPrior
from src.parallel import shutdown_executor


@pytest.fixture(scope="session", autouse=True)
def worker_pool():
    yield
    shutdown_executor()


@pytest.fixture
def smd_test():
    """Standardized mean difference, two groups, evidence for H1 at k = 1/6."""
    return TestSpec(0.0, 1 / 6, Orientation.EVIDENCE_FOR_H1, 2.0, "smd")


@pytest.fixture
def unit_information_prior():
    return NormalPrior(0.0, 1 / 2 ** 0.5)


@pytest.fixture
def jzs_one_sided():
    return TruncatedTPrior(0.0, 1 / 2 ** 0.5, 1.0, lower=0.0)


@pytest.fixture
def mirtazapine():
    """HAM-D mean difference with sigma = 15 against a point alternative of -6."""
    return TestSpec(0.0, 1 / 10, Orientation.EVIDENCE_FOR_H1, 2.0 * 15.0 ** 2, "meandiff"), PointPrior(-6.0)
