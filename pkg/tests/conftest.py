import numpy as np
import pytest

import wmslab
from wmslab import tanner


@pytest.fixture(scope="session")
def bench12():
    """The bundled 9x12 (3,4)-regular benchmark code."""
    return wmslab.load_benchmark_code()


@pytest.fixture(scope="session")
def bench12_codebook(bench12):
    return tanner.enumerate_codewords(bench12)


@pytest.fixture(scope="session")
def cb45():
    """Complete-bipartite (4,5) code: four identical all-ones checks."""
    return tanner.from_dense_matrix(np.ones((4, 5), dtype=np.uint8))


def random_regular(n, dv, dc, seed, girth_min=4):
    return tanner.build_regular_graph(n, dv, dc, girth_min=girth_min, seed=seed)
