import os

# keep BLAS single-threaded before numpy loads: deterministic timings and
# honest single-thread runtime measurements in the acceptance tests
os.environ.setdefault("OPENBLAS_NUM_THREADS", "1")
os.environ.setdefault("OMP_NUM_THREADS", "1")
os.environ.setdefault("MKL_NUM_THREADS", "1")

import math

import pytest

from roughlap.mesh import generate_flat_torus, generate_icosphere

TWO_PI = 2 * math.pi


@pytest.fixture(scope="session")
def torus16():
    return generate_flat_torus(TWO_PI, TWO_PI, 16, 16)


@pytest.fixture(scope="session")
def sphere_s2():
    return generate_icosphere(1.0, 2)


@pytest.fixture(scope="session")
def sphere_s3():
    return generate_icosphere(1.0, 3)
