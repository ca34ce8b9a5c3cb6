"""Eigensolver contract: certification, determinism, clustering."""

import numpy as np
import pytest
import scipy.sparse as sp

from roughlap.eigen import (EigenConvergenceError, EigenResult, SolverConfig,
                            cluster_multiplicities, first_positive,
                            smallest_eigenpairs)
from roughlap.operators import connection_laplacian_1forms, build_connection


def test_diagonal_case():
    L = sp.diags([0.0, 1.0, 2.0]).tocsr()
    M = np.ones(3)
    res = smallest_eigenpairs(L, M, SolverConfig(k=2))
    assert np.allclose(res.values, [0.0, 1.0], atol=1e-12)
    assert np.all(res.residuals <= 1e-8)


def test_mass_scales_spectrum():
    L = sp.diags([2.0, 4.0, 8.0, 16.0]).tocsr()
    M = np.full(4, 2.0)
    res = smallest_eigenpairs(L, M, SolverConfig(k=3))
    assert np.allclose(res.values, [1.0, 2.0, 4.0], atol=1e-12)


def test_vectors_mass_orthonormal():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((30, 30))
    L = sp.csr_matrix(a @ a.T)
    M = rng.uniform(0.5, 2.0, 30)
    res = smallest_eigenpairs(L, M, SolverConfig(k=5))
    gram = res.vectors.T.conj() @ (M[:, None] * res.vectors)
    assert np.abs(gram - np.eye(5)).max() < 1e-8


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(k=0)
    with pytest.raises(ValueError):
        SolverConfig(tol=0.0)
    L = sp.identity(3, format="csr")
    with pytest.raises(ValueError):
        smallest_eigenpairs(L, np.ones(3), SolverConfig(k=3))  # k >= dim
    with pytest.raises(ValueError):
        smallest_eigenpairs(L, np.ones(2), SolverConfig(k=1))  # dim mismatch
    with pytest.raises(ValueError):
        smallest_eigenpairs(L, np.array([1.0, -1.0, 1.0]), SolverConfig(k=1))


def _torus_pencil(torus16):
    conn = build_connection(torus16)
    return connection_laplacian_1forms(torus16, conn)


def test_determinism_bitwise(torus16):
    op, mass = _torus_pencil(torus16)
    config = SolverConfig(k=5, seed=42, dense_cutoff=0)
    a = smallest_eigenpairs(op, mass, config)
    b = smallest_eigenpairs(op, mass, config)
    assert a.iterations == b.iterations
    assert np.array_equal(a.values, b.values)


def test_dense_sparse_oracle(torus16):
    op, mass = _torus_pencil(torus16)
    dense = smallest_eigenpairs(op, mass, SolverConfig(k=6, dense_cutoff=10 ** 6))
    sparse = smallest_eigenpairs(op, mass, SolverConfig(k=6, dense_cutoff=0))
    assert np.abs(dense.values - sparse.values).max() < 1e-8 * dense.scale


def test_monotone_under_k(torus16):
    op, mass = _torus_pencil(torus16)
    small = smallest_eigenpairs(op, mass, SolverConfig(k=3))
    large = smallest_eigenpairs(op, mass, SolverConfig(k=7))
    assert np.abs(small.values - large.values[:3]).max() < 1e-8 * small.scale


def test_nonconvergence_raises(torus16):
    op, mass = _torus_pencil(torus16)
    with pytest.raises(EigenConvergenceError):
        smallest_eigenpairs(op, mass, SolverConfig(k=5, dense_cutoff=0, max_iter=1))


def test_cluster_multiplicities_example():
    got = cluster_multiplicities([0.99, 1.00, 1.01, 2.0], rel_gap=0.02)
    assert got == [(pytest.approx(1.0), 3), (2.0, 1)]


def test_cluster_multiplicities_empty_and_single():
    assert cluster_multiplicities([]) == []
    assert cluster_multiplicities([3.5]) == [(3.5, 1)]


def test_first_positive_threshold():
    res = EigenResult(values=np.array([1e-12, 0.5, 1.0]),
                      vectors=np.eye(3), residuals=np.zeros(3),
                      iterations=0, scale=1.0)
    assert first_positive(res) == 0.5
    all_zero = EigenResult(values=np.array([1e-12, 1e-11]),
                           vectors=np.eye(2), residuals=np.zeros(2),
                           iterations=0, scale=1.0)
    assert first_positive(all_zero) is None
