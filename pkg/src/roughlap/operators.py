"""Discrete Laplacians on triangle meshes: functions, 1-forms, Hodge.

The function Laplacian is the classical cotan stiffness matrix with lumped
(barycentric) vertex-area mass.  For 1-forms the tangent bundle of an
oriented surface is treated as a complex line bundle: one complex unknown
per vertex encodes a tangent vector in a local frame, parallel transport
along an edge is a unit complex rotation obtained by intrinsic unfolding,
and the connection Laplacian is the cotan stiffness with its off-diagonal
weights rotated by those transports.  The Hodge 1-form Laplacian is the
standard discrete-exterior-calculus operator on edge values,
``*1 d0 *0^-1 d0^T *1 + d1^T *2 d1`` against the diagonal edge mass ``*1``.

On right-triangulated flat tori the circumcentric edge weight of every cell
diagonal vanishes (the two opposite angles are right angles), which makes
the Hodge edge mass singular; those null edge dofs are eliminated exactly
by a Schur complement, which preserves the finite generalized spectrum and
the harmonic space.

Per-vertex frames use length-normalized angle coordinates: the corner
angles around each vertex are rescaled to sum to 2*pi.  With that choice
the transport rotations around any face compose to exactly the face's share
of curvature, distributing each angle defect over its incident corners, and
the per-face holonomies sum to 2*pi*chi (checked at build time).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.io import mmwrite
from scipy.sparse.linalg import splu

from roughlap.mesh import MeshError, TriangleMesh, _wrap_angle

__all__ = [
    "SparseHermitianOperator",
    "MassMatrix",
    "ConnectionData",
    "cotan_laplacian",
    "build_connection",
    "connection_laplacian_1forms",
    "hodge_laplacian_1forms",
    "weitzenboeck_eigen_check",
    "rayleigh_quotient",
    "edge_cotan_weights",
    "vertex_frames",
    "encode_tangent_field",
    "rotation_field",
    "constant_chart_field",
    "kato_fraction",
    "face_gradient_magnitudes",
    "save_operator",
]

HOLONOMY_TOL = 1e-8


@dataclass
class SparseHermitianOperator:
    """Hermitian sparse matrix, symmetrized exactly at assembly.

    ``dof_labels`` records which mesh entities the rows correspond to when
    the operator does not live on all of them (the condensed Hodge case:
    retained edge indices).
    """

    matrix: sp.csr_matrix
    dof_labels: np.ndarray | None = None

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        d = self.matrix - self.matrix.getH()
        return 0.0 if d.nnz == 0 else float(np.abs(d.data).max())

    def one_norm(self) -> float:
        return float(sp.linalg.norm(self.matrix, 1))


@dataclass
class MassMatrix:
    """Diagonal positive mass (lumped vertex or edge measures)."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=float)
        if np.any(self.weights <= 0):
            raise ValueError("mass weights must be strictly positive")

    @property
    def dimension(self) -> int:
        return len(self.weights)

    def trace(self) -> float:
        return float(self.weights.sum())


@dataclass
class ConnectionData:
    """Per-directed-edge parallel transport on the tangent line bundle.

    rho[(a, b)] is the frame rotation a vector picks up moving from the
    frame at a to the frame at b; rho[(b, a)] = -rho[(a, b)] mod 2*pi.
    phi[(a, b)] is the normalized angle coordinate of edge a->b in the
    frame at a; scales[v] = 2*pi / (total corner angle at v); the first
    entry of neighbors_ccw[v] is the frame reference direction.
    """

    rho: dict[tuple[int, int], float]
    phi: dict[tuple[int, int], float]
    scales: np.ndarray
    neighbors_ccw: list[list[int]]
    face_curvatures: np.ndarray = field(repr=False, default=None)


def _symmetrized(rows, cols, vals, n: int) -> sp.csr_matrix:
    a = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    a.sum_duplicates()
    return (a + a.getH()) * 0.5


def edge_cotan_weights(mesh: TriangleMesh) -> np.ndarray:
    """w_e = (cot(alpha) + cot(beta))/2 over the two corners opposite edge e."""
    w = np.zeros(mesh.n_edges)
    cot = 1.0 / np.tan(mesh.corner_angles)  # corner m; its opposite side is (m+1)%3
    for m in range(3):
        opposite_side = (m + 1) % 3
        np.add.at(w, mesh.face_edges[:, opposite_side], 0.5 * cot[:, m])
    return w


def cotan_laplacian(mesh: TriangleMesh) -> tuple[SparseHermitianOperator, MassMatrix]:
    """Cotan stiffness with lumped vertex-area mass.

    Row sums vanish, so constants span the kernel on a connected mesh; the
    matrix is PSD (it is the Galerkin stiffness of linear elements).
    """
    w = edge_cotan_weights(mesh)
    i, j = mesh.edges[:, 0], mesh.edges[:, 1]
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([j, i, i, j])
    vals = np.concatenate([-w, -w, w, w])
    matrix = _symmetrized(rows, cols, vals, mesh.n_vertices)
    return SparseHermitianOperator(matrix), MassMatrix(mesh.vertex_areas.copy())


def build_connection(mesh: TriangleMesh) -> ConnectionData:
    """Levi-Civita transport angles from intrinsic unfolding.

    Walks the one-ring of every vertex in orientation order, accumulates
    corner angles rescaled to total 2*pi, and sets the transport along
    a->b so that the direction "a to b" at a maps to "a to b" (= opposite
    of b->a) at b.  Build-time check: the transport composition around
    every face equals that face's curvature share (sum of rescaled corner
    angles minus pi) to within 1e-8.
    """
    n_v = mesh.n_vertices
    angle_at = mesh.corner_angle_lookup()

    # third vertex of the face containing directed edge (v, w): the next
    # one-ring neighbor of v after w, in orientation order
    next_around: dict[tuple[int, int], int] = {}
    corner_between: dict[tuple[int, int], float] = {}
    for f_idx, (i, j, k) in enumerate(mesh.faces):
        i, j, k = int(i), int(j), int(k)
        next_around[(i, j)] = k
        next_around[(j, k)] = i
        next_around[(k, i)] = j
        corner_between[(i, j)] = angle_at[(f_idx, i)]
        corner_between[(j, k)] = angle_at[(f_idx, j)]
        corner_between[(k, i)] = angle_at[(f_idx, k)]

    first_neighbor = np.full(n_v, -1, dtype=np.int64)
    for a, b in mesh.edges:
        a, b = int(a), int(b)
        if first_neighbor[a] < 0 or b < first_neighbor[a]:
            first_neighbor[a] = b
        if first_neighbor[b] < 0 or a < first_neighbor[b]:
            first_neighbor[b] = a

    phi: dict[tuple[int, int], float] = {}
    scales = np.empty(n_v)
    neighbors_ccw: list[list[int]] = []
    for v in range(n_v):
        ring = [int(first_neighbor[v])]
        cumulative = [0.0]
        total = 0.0
        while True:
            w = ring[-1]
            total += corner_between[(v, w)]
            nxt = next_around[(v, w)]
            if nxt == ring[0]:
                break
            ring.append(nxt)
            cumulative.append(total)
            if len(ring) > mesh.n_edges:
                raise MeshError(f"one-ring walk at vertex {v} does not close")
        s = 2.0 * math.pi / total
        scales[v] = s
        neighbors_ccw.append(ring)
        for w, angle in zip(ring, cumulative):
            phi[(v, w)] = s * angle

    rho: dict[tuple[int, int], float] = {}
    for a, b in mesh.edges:
        a, b = int(a), int(b)
        r = _wrap_angle(phi[(b, a)] + math.pi - phi[(a, b)])
        rho[(a, b)] = r
        rho[(b, a)] = _wrap_angle(-r)

    # holonomy consistency: transport around face (i,j,k) composes to the
    # face curvature sum_c (scale_c * angle_c) - pi
    face_curv = np.empty(mesh.n_faces)
    for f_idx, (i, j, k) in enumerate(mesh.faces):
        i, j, k = int(i), int(j), int(k)
        hol = _wrap_angle(rho[(i, j)] + rho[(j, k)] + rho[(k, i)])
        expected = (scales[i] * angle_at[(f_idx, i)]
                    + scales[j] * angle_at[(f_idx, j)]
                    + scales[k] * angle_at[(f_idx, k)] - math.pi)
        if abs(_wrap_angle(hol - expected)) > HOLONOMY_TOL:
            raise MeshError(
                f"holonomy inconsistency on face {f_idx}: {hol} vs {expected}")
        face_curv[f_idx] = expected
    return ConnectionData(rho=rho, phi=phi, scales=scales,
                          neighbors_ccw=neighbors_ccw, face_curvatures=face_curv)


def connection_laplacian_1forms(mesh: TriangleMesh, conn: ConnectionData
                                ) -> tuple[SparseHermitianOperator, MassMatrix]:
    """Connection Laplacian on tangent fields / 1-forms (metric duality).

    Complex Hermitian cotan matrix: entry (a, b) is -w_ab * exp(i rho[b->a]),
    so the quadratic form is sum_e w_e |z_a - transport(z_b)|^2; mass is the
    lumped vertex area.  Kernel = parallel fields (2 real dimensions on a
    flat torus, none on a sphere).
    """
    w = edge_cotan_weights(mesh)
    n = mesh.n_vertices
    i = mesh.edges[:, 0]
    j = mesh.edges[:, 1]
    rot_ji = np.array([conn.rho[(int(b), int(a))] for a, b in mesh.edges])
    off_ij = -w * np.exp(1j * rot_ji)          # row i, col j: transport j -> i
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([j, i, i, j])
    vals = np.concatenate([off_ij, np.conj(off_ij),
                           w.astype(complex), w.astype(complex)])
    matrix = _symmetrized(rows, cols, vals, n)
    return SparseHermitianOperator(matrix), MassMatrix(mesh.vertex_areas.copy())


def _incidence_matrices(mesh: TriangleMesh) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """d0: 0-cochains -> 1-cochains (E x V); d1: 1-cochains -> 2-cochains (F x E)."""
    e = mesh.n_edges
    v = mesh.n_vertices
    f = mesh.n_faces
    rows = np.repeat(np.arange(e), 2)
    cols = mesh.edges.ravel()
    vals = np.tile([-1.0, 1.0], e)
    d0 = sp.coo_matrix((vals, (rows, cols)), shape=(e, v)).tocsr()

    rows_f = np.repeat(np.arange(f), 3)
    cols_e = mesh.face_edges.ravel()
    heads = mesh.faces[:, [1, 2, 0]]  # side s runs faces[:, s] -> heads[:, s]
    along = (mesh.edges[mesh.face_edges, 1] == heads)
    vals_f = np.where(along, 1.0, -1.0).ravel()
    d1 = sp.coo_matrix((vals_f, (rows_f, cols_e)), shape=(f, e)).tocsr()
    return d0, d1


def hodge_laplacian_1forms(mesh: TriangleMesh,
                           null_weight_tol: float = 1e-12
                           ) -> tuple[SparseHermitianOperator, MassMatrix]:
    """DEC Hodge Laplacian on 1-forms, as a generalized pencil (A, *1).

    A = *1 d0 *0^-1 d0^T *1 + d1^T *2 d1 with circumcentric edge weights *1,
    lumped vertex areas *0, and inverse face areas *2.  Kernel dimension is
    the first Betti number.  Edges whose weight is below
    ``null_weight_tol * max(w)`` carry no L^2 mass (zero dual length) and are
    eliminated by an exact Schur complement; the retained edge indices are
    stored in ``dof_labels``.  Negative weights (non-Delaunay meshes) are
    rejected.
    """
    w = edge_cotan_weights(mesh)
    w_max = np.abs(w).max()
    keep = w > null_weight_tol * w_max
    if np.any(w < -null_weight_tol * w_max):
        raise MeshError("negative circumcentric edge weight: mesh is not Delaunay")
    d0, d1 = _incidence_matrices(mesh)
    s1 = sp.diags(w)
    s0_inv = sp.diags(1.0 / mesh.vertex_areas)
    s2 = sp.diags(1.0 / mesh.face_areas)
    a = (s1 @ d0 @ s0_inv @ d0.T @ s1 + d1.T @ s2 @ d1).tocsr()
    a = (a + a.T) * 0.5

    if keep.all():
        return (SparseHermitianOperator(a, dof_labels=np.arange(mesh.n_edges)),
                MassMatrix(w))

    kept = np.flatnonzero(keep)
    null = np.flatnonzero(~keep)
    a_pp = a[kept][:, kept].tocsr()
    a_pz = a[kept][:, null].tocsc()
    a_zz = a[null][:, null].tocsc()
    a_zz.eliminate_zeros()
    off_diag = a_zz - sp.diags(a_zz.diagonal())
    if off_diag.nnz == 0 or np.abs(off_diag.data).max() < 1e-15 * np.abs(a_zz.diagonal()).max():
        # null edges never share a face on lattice meshes: the block is diagonal
        correction = a_pz @ sp.diags(1.0 / a_zz.diagonal()) @ a_pz.T
    else:
        correction = sp.csr_matrix(a_pz @ splu(a_zz).solve(a_pz.T.toarray()))
    schur = a_pp - correction
    schur = (schur + schur.T) * 0.5
    return SparseHermitianOperator(schur.tocsr(), dof_labels=kept), MassMatrix(w[kept])


def rayleigh_quotient(L, M, x: np.ndarray) -> float:
    """(x^H L x) / (x^H M x) for the generalized pencil; real and nonnegative."""
    a = L.matrix if isinstance(L, SparseHermitianOperator) else L
    m = M.weights if isinstance(M, MassMatrix) else np.asarray(M)
    x = np.asarray(x)
    denom = np.real(np.vdot(x, m * x))
    if denom <= 0.0:
        raise ValueError("Rayleigh quotient needs x with positive mass norm")
    num = np.vdot(x, a @ x)
    if abs(num.imag) > 1e-9 * max(abs(num.real), 1.0):
        raise ValueError(f"quadratic form not real: {num}")
    return float(num.real / denom)


def weitzenboeck_eigen_check(mesh: TriangleMesh, k: int, solver_config=None
                             ) -> list[tuple[float, float, float, float]]:
    """Pair Hodge and connection-Laplacian eigenvalues through the curvature shift.

    On a surface the Hodge Laplacian on 1-forms equals the connection
    Laplacian plus the Gauss curvature, so for (near-)constant curvature the
    k smallest eigenvalues satisfy mu_i = lambda_i + K.  K is estimated
    intrinsically as total curvature / area = 2*pi*chi / area.  Connection
    eigenvalues are complex-multiplicity values and are doubled to match the
    real Hodge count.  Returns rows (mu_i, lambda_i, K, relative mismatch).
    """
    from roughlap.eigen import SolverConfig, smallest_eigenpairs
    from roughlap.mesh import euler_characteristic

    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        return []
    shift = 2.0 * math.pi * euler_characteristic(mesh) / mesh.total_area
    config = solver_config or SolverConfig()

    conn = build_connection(mesh)
    l_conn, m_conn = connection_laplacian_1forms(mesh, conn)
    k_complex = (k + 1) // 2
    res_conn = smallest_eigenpairs(l_conn, m_conn,
                                   _with_k(config, max(k_complex + 2, 4)))
    rough = np.repeat(res_conn.values, 2)[:k]

    l_hodge, m_hodge = hodge_laplacian_1forms(mesh)
    res_hodge = smallest_eigenpairs(l_hodge, m_hodge, _with_k(config, max(k + 2, 4)))
    hodge = res_hodge.values[:k]

    span = max(abs(hodge[-1]), abs(rough[-1]) + abs(shift), 1e-30)
    out = []
    for mu, lam in zip(hodge, rough):
        # spec'd relative mismatch |mu - (lam+K)| / mu; kernel pairs (mu ~ 0)
        # are normalized by the spectral span instead
        denom = abs(mu) if abs(mu) > 1e-6 * span else span
        out.append((float(mu), float(lam), shift, float(abs(mu - lam - shift) / denom)))
    return out


def _with_k(config, k: int):
    from dataclasses import replace
    return replace(config, k=k)


# -- tangent-field sampling --------------------------------------------------

def vertex_frames(mesh: TriangleMesh, conn: ConnectionData
                  ) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Orthonormal frame (e1, e2, normal) per vertex, e1 along the reference edge.

    Embedded meshes: normal is the area-weighted face normal, e1 the
    tangential projection of the reference edge direction.  Intrinsic
    meshes (flat tori) synthesize frames in the parameter chart from the
    stored background edge angles.
    """
    n_v = mesh.n_vertices
    e1 = np.zeros((n_v, 3))
    e2 = np.zeros((n_v, 3))
    nrm = np.zeros((n_v, 3))
    if mesh.edge_angles is not None:
        for v in range(n_v):
            ref = conn.neighbors_ccw[v][0]
            ang = mesh.edge_angles[(v, ref)]
            e1[v] = (math.cos(ang), math.sin(ang), 0.0)
            e2[v] = (-math.sin(ang), math.cos(ang), 0.0)
            nrm[v] = (0.0, 0.0, 1.0)
        return e1, e2, nrm

    face_normals = np.cross(
        mesh.vertices[mesh.faces[:, 1]] - mesh.vertices[mesh.faces[:, 0]],
        mesh.vertices[mesh.faces[:, 2]] - mesh.vertices[mesh.faces[:, 0]])
    np.add.at(nrm, mesh.faces.ravel(), np.repeat(face_normals, 3, axis=0))
    nrm /= np.linalg.norm(nrm, axis=1, keepdims=True)
    for v in range(n_v):
        ref = conn.neighbors_ccw[v][0]
        d = mesh.vertices[ref] - mesh.vertices[v]
        d = d - (d @ nrm[v]) * nrm[v]
        e1[v] = d / np.linalg.norm(d)
        e2[v] = np.cross(nrm[v], e1[v])
    return e1, e2, nrm


def encode_tangent_field(mesh: TriangleMesh, conn: ConnectionData,
                         vectors: np.ndarray) -> np.ndarray:
    """Project a 3D vector field to the tangent planes and encode per vertex.

    The complex coordinate keeps the tangential magnitude; the frame angle
    is rescaled by the vertex's angle-normalization factor, matching the
    convention of the transport angles.
    """
    e1, e2, nrm = vertex_frames(mesh, conn)
    v = np.asarray(vectors, dtype=float)
    tangential = v - np.sum(v * nrm, axis=1, keepdims=True) * nrm
    u = np.sum(tangential * e1, axis=1)
    w = np.sum(tangential * e2, axis=1)
    mag = np.hypot(u, w)
    theta = np.arctan2(w, u)
    return mag * np.exp(1j * conn.scales * theta)


def rotation_field(mesh: TriangleMesh, axis=(0.0, 0.0, 1.0)) -> np.ndarray:
    """Velocity field of the rotation about ``axis``: axis x position."""
    return np.cross(np.asarray(axis, dtype=float), mesh.vertices)


def constant_chart_field(mesh: TriangleMesh, direction=(1.0, 0.0)) -> np.ndarray:
    """Constant field in the flat parameter chart (translation generator)."""
    if mesh.edge_angles is None:
        raise MeshError("constant chart fields need an intrinsic chart (flat torus)")
    d = np.zeros((mesh.n_vertices, 3))
    d[:, 0] = direction[0]
    d[:, 1] = direction[1]
    return d


def kato_fraction(mesh: TriangleMesh, conn: ConnectionData, z: np.ndarray,
                  slack: float = 0.05) -> float:
    """Fraction of vertices where |grad |z|| <= (1+slack) |grad z| discretely.

    Both gradients use the same per-vertex Dirichlet densities built from
    cotan edge weights (clamped at zero), so the comparison is like for
    like.  Diagnostic only: discretization noise makes a small violating
    fraction normal near the zeros of z.
    """
    w = np.maximum(edge_cotan_weights(mesh), 0.0)
    a = np.abs(z)
    i = mesh.edges[:, 0]
    j = mesh.edges[:, 1]
    rot_ji = np.array([conn.rho[(int(bb), int(aa))] for aa, bb in mesh.edges])
    diff_form = np.abs(z[i] - np.exp(1j * rot_ji) * z[j]) ** 2
    diff_abs = (a[i] - a[j]) ** 2
    dens_form = np.zeros(mesh.n_vertices)
    dens_abs = np.zeros(mesh.n_vertices)
    np.add.at(dens_form, i, w * diff_form)
    np.add.at(dens_form, j, w * diff_form)
    np.add.at(dens_abs, i, w * diff_abs)
    np.add.at(dens_abs, j, w * diff_abs)
    ok = np.sqrt(dens_abs) <= (1.0 + slack) * np.sqrt(dens_form)
    return float(np.mean(ok))


def face_gradient_magnitudes(mesh: TriangleMesh, values: np.ndarray) -> np.ndarray:
    """|grad f| per face for a vertex-sampled function, from intrinsic lengths.

    Each face is laid out isometrically in the plane and the gradient of the
    linear interpolant is read off; works unchanged for intrinsic (torus)
    metrics.
    """
    f = np.asarray(values, dtype=float)
    if len(f) != mesh.n_vertices:
        raise ValueError("values must be sampled per vertex")
    side = mesh.edge_lengths[mesh.face_edges]     # side s = faces[:,s] -> faces[:,(s+1)%3]
    l01, l12, l20 = side[:, 0], side[:, 1], side[:, 2]
    x2 = (l01 ** 2 + l20 ** 2 - l12 ** 2) / (2.0 * l01)
    y2 = 2.0 * mesh.face_areas / l01
    f0 = f[mesh.faces[:, 0]]
    f1 = f[mesh.faces[:, 1]]
    f2 = f[mesh.faces[:, 2]]
    # planar layout p0=(0,0), p1=(l01,0), p2=(x2,y2); grad = sum f_i perp(e_i)/(2A)
    gx = (f0 * (-(y2 - 0.0)) + f1 * y2) / (2.0 * mesh.face_areas)
    gy = (f0 * (x2 - l01) + f1 * (-x2) + f2 * l01) / (2.0 * mesh.face_areas)
    return np.hypot(gx, gy)


def save_operator(op, path) -> None:
    """Export as a MatrixMarket coordinate file for external cross-checks."""
    if isinstance(op, SparseHermitianOperator):
        matrix = op.matrix
    elif isinstance(op, MassMatrix):
        matrix = sp.diags(op.weights).tocsr()
    else:
        matrix = op
    mmwrite(str(path), matrix)
