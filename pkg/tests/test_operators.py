"""Discrete operators: structure, kernels, spectra against analytic oracles."""

import math

import numpy as np
import pytest
import scipy.io

from roughlap import mesh as M
from roughlap import operators as O
from roughlap.eigen import SolverConfig, smallest_eigenpairs

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def torus(torus16):
    return torus16


@pytest.fixture(scope="module")
def torus_conn(torus16):
    return O.build_connection(torus16)


@pytest.fixture(scope="module")
def sphere_conn(sphere_s2):
    return O.build_connection(sphere_s2)


def smallest(op, mass, k, **kw):
    return smallest_eigenpairs(op, mass, SolverConfig(k=k, **kw))


# -- structural invariants ------------------------------------------------------

def test_cotan_hermitian_and_kernel(torus):
    op, mass = O.cotan_laplacian(torus)
    assert op.hermiticity_defect() == 0.0
    const = np.ones(torus.n_vertices)
    assert np.abs(op.matrix @ const).max() < 1e-12
    assert mass.trace() == pytest.approx(torus.total_area, rel=1e-12)


def test_connection_hermitian(torus, torus_conn):
    op, _ = O.connection_laplacian_1forms(torus, torus_conn)
    assert op.hermiticity_defect() == 0.0


def test_psd_smallest_ritz(sphere_s2, sphere_conn):
    for op, mass in (O.cotan_laplacian(sphere_s2),
                     O.connection_laplacian_1forms(sphere_s2, sphere_conn),
                     O.hodge_laplacian_1forms(sphere_s2)):
        res = smallest(op, mass, 2, dense_cutoff=10 ** 6)
        assert res.values[0] >= -1e-9 * op.one_norm()


def test_transport_antisymmetry(torus_conn, torus):
    for a, b in torus.edges[:50]:
        r_ab = torus_conn.rho[(int(a), int(b))]
        r_ba = torus_conn.rho[(int(b), int(a))]
        assert math.remainder(r_ab + r_ba, TWO_PI) == pytest.approx(0.0, abs=1e-12)


def test_torus_connection_is_flat(torus_conn):
    assert np.abs(torus_conn.face_curvatures).max() < 1e-12


def test_sphere_holonomy_totals_4pi(sphere_conn):
    assert sphere_conn.face_curvatures.sum() == pytest.approx(4 * math.pi, abs=1e-9)


def test_mass_matrix_rejects_nonpositive():
    with pytest.raises(ValueError):
        O.MassMatrix(np.array([1.0, 0.0]))


# -- spectra against analytic oracles ---------------------------------------------

def test_cotan_torus_first_positive(torus):
    op, mass = O.cotan_laplacian(torus)
    res = smallest(op, mass, 6)
    assert abs(res.values[0]) < 1e-10
    # (1,0) modes of the 2pi-torus: eigenvalue 1, discretized at 16x16
    assert res.values[1] == pytest.approx(1.0, rel=0.02)
    assert np.allclose(res.values[1:5], res.values[1], rtol=1e-9)


def test_cotan_sphere_first_cluster(sphere_s2):
    op, mass = O.cotan_laplacian(sphere_s2)
    res = smallest(op, mass, 5)
    assert abs(res.values[0]) < 1e-10
    assert np.allclose(res.values[1:4], 2.0, rtol=0.02)


def test_connection_torus_kernel_and_cluster(torus, torus_conn):
    op, mass = O.connection_laplacian_1forms(torus, torus_conn)
    res = smallest(op, mass, 6)
    assert abs(res.values[0]) < 1e-9          # one complex zero = two real dims
    assert res.values[1] > 0.9                # next cluster near 1
    assert np.allclose(res.values[1:5], res.values[1], rtol=1e-9)


def test_connection_sphere_cluster(sphere_s2, sphere_conn):
    op, mass = O.connection_laplacian_1forms(sphere_s2, sphere_conn)
    res = smallest(op, mass, 4)
    assert np.allclose(res.values[:3], 1.0, rtol=0.02)
    assert res.values[3] > 3.0                # spectral gap to the l=2 band


def test_hodge_torus_harmonic_dimension(torus):
    op, mass = O.hodge_laplacian_1forms(torus)
    assert op.dimension < torus.n_edges       # null diagonal edges condensed
    res = smallest(op, mass, 4)
    assert np.abs(res.values[:2]).max() < 1e-9 * op.one_norm()
    assert res.values[2] > 0.9


def test_hodge_sphere_no_kernel(sphere_s2):
    op, mass = O.hodge_laplacian_1forms(sphere_s2)
    assert op.dimension == sphere_s2.n_edges  # all-acute mesh: nothing condensed
    res = smallest(op, mass, 4)
    assert np.allclose(res.values[:3], 2.0, rtol=0.02)
    assert res.values[0] > 1.0


def test_connection_sphere_refinement_convergence():
    # s=2 -> s=3 crosses the analytic value (error sign flip); decay is
    # monotone from s=3 on
    errors = []
    for s in (3, 4):
        mesh = M.generate_icosphere(1.0, s)
        op, mass = O.connection_laplacian_1forms(mesh, O.build_connection(mesh))
        res = smallest(op, mass, 3)
        errors.append(abs(res.values[0] - 1.0))
    assert errors[1] < errors[0]
    assert errors[1] < 2e-6


def test_dense_oracle_agreement(torus, torus_conn):
    op, mass = O.connection_laplacian_1forms(torus, torus_conn)
    dense = smallest(op, mass, 5, dense_cutoff=10 ** 6)
    sparse = smallest(op, mass, 5, dense_cutoff=0)
    scale = dense.scale
    assert np.abs(dense.values - sparse.values).max() < 1e-8 * scale


# -- Weitzenboeck and Rayleigh quotients -------------------------------------------

def test_weitzenboeck_torus(torus):
    rows = O.weitzenboeck_eigen_check(torus, 6)
    assert len(rows) == 6
    assert rows[0][2] == 0.0                  # flat: zero curvature shift
    assert max(r[3] for r in rows) < 0.05


def test_weitzenboeck_sphere(sphere_s2):
    rows = O.weitzenboeck_eigen_check(sphere_s2, 6)
    assert rows[0][2] == pytest.approx(1.0, rel=0.03)
    assert max(r[3] for r in rows) < 0.03


def test_weitzenboeck_empty():
    t = M.generate_flat_torus(1.0, 1.0, 4, 4)
    assert O.weitzenboeck_eigen_check(t, 0) == []


def test_rayleigh_eigenvector_recovers_eigenvalue(torus, torus_conn):
    op, mass = O.connection_laplacian_1forms(torus, torus_conn)
    res = smallest(op, mass, 3)
    for idx in range(3):
        rq = O.rayleigh_quotient(op, mass, res.vectors[:, idx])
        assert rq == pytest.approx(res.values[idx], abs=1e-9 * res.scale)


def test_rayleigh_scale_invariant(torus, torus_conn):
    op, mass = O.connection_laplacian_1forms(torus, torus_conn)
    rng = np.random.default_rng(7)
    x = rng.standard_normal(op.dimension) + 1j * rng.standard_normal(op.dimension)
    base = O.rayleigh_quotient(op, mass, x)
    assert O.rayleigh_quotient(op, mass, (2.5 - 1j) * x) == pytest.approx(base, rel=1e-12)
    with pytest.raises(ValueError):
        O.rayleigh_quotient(op, mass, np.zeros(op.dimension, dtype=complex))


def test_killing_rotation_quotient(sphere_s3):
    conn = O.build_connection(sphere_s3)
    op, mass = O.connection_laplacian_1forms(sphere_s3, conn)
    z = O.encode_tangent_field(sphere_s3, conn, O.rotation_field(sphere_s3))
    assert O.rayleigh_quotient(op, mass, z) == pytest.approx(1.0, abs=0.02)


def test_translation_field_is_parallel(torus, torus_conn):
    op, mass = O.connection_laplacian_1forms(torus, torus_conn)
    for direction in ((1.0, 0.0), (0.0, 1.0), (0.6, -0.8)):
        z = O.encode_tangent_field(torus, torus_conn,
                                   O.constant_chart_field(torus, direction))
        assert O.rayleigh_quotient(op, mass, z) == pytest.approx(0.0, abs=1e-12)


def test_kato_fraction_in_range(sphere_s2, sphere_conn):
    z = O.encode_tangent_field(sphere_s2, sphere_conn, O.rotation_field(sphere_s2))
    frac = O.kato_fraction(sphere_s2, sphere_conn, z)
    assert 0.0 <= frac <= 1.0
    assert frac > 0.9  # Killing duals satisfy the pointwise inequality broadly


# -- face gradients ------------------------------------------------------------------

def test_face_gradient_bounded_for_unit_slope(torus):
    # sin(u) is periodic, so vertex values are consistent across the wrap;
    # the interpolant's slope never exceeds the true sup |cos| = 1
    grads = O.face_gradient_magnitudes(torus, np.sin(torus.params[:, 0]))
    assert grads.max() <= 1.0 + 1e-9
    assert grads.max() > 0.9


def test_face_gradient_on_sphere_coordinate(sphere_s3):
    grads = O.face_gradient_magnitudes(sphere_s3, sphere_s3.vertices[:, 2])
    assert grads.max() <= 1.0 + 1e-9
    assert grads.max() > 0.95


# -- export -----------------------------------------------------------------------

def test_matrixmarket_roundtrip(tmp_path, torus, torus_conn):
    op, mass = O.connection_laplacian_1forms(torus, torus_conn)
    path = tmp_path / "conn.mtx"
    O.save_operator(op, path)
    back = scipy.io.mmread(path).tocsr()
    diff = back - op.matrix
    assert diff.nnz == 0 or np.abs(diff.data).max() < 1e-12
    O.save_operator(mass, tmp_path / "mass.mtx")
    back_mass = scipy.io.mmread(tmp_path / "mass.mtx").tocsr()
    assert np.allclose(back_mass.diagonal(), mass.weights)
