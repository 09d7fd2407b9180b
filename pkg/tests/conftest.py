import numpy as np
import pytest

from girgbp import GirgParams, degree_normalized_kernel_constant


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def sparse_params():
    """Small 2-d model whose expected degrees equal the weights."""
    c = degree_normalized_kernel_constant(2, 2.0, 2.5)
    return GirgParams(n=2000.0, d=2, alpha=2.0, beta=2.5, c=c)
