"""Closed oriented triangle meshes of the model surfaces.

Two generators: an icosphere (subdivided icosahedron projected to the
sphere) and a flat torus on a periodic rectangular lattice.  The torus is
metrically *intrinsic*: every edge carries its flat length (lx/nx, ly/ny, or
the cell diagonal), stored positions are chart coordinates for visualization
only.  That keeps the metric exactly flat, so parallel 1-forms exist exactly
and the analytic spectra apply without embedding distortion.

All derived geometry -- corner angles, face areas, vertex areas, angle
defects -- is computed from edge lengths alone (law of cosines / Heron), so
embedded and intrinsic meshes go through one code path.  Validation enforces
closed manifold (every edge in exactly two faces), consistent orientation
(each directed edge appears once), connectivity, and non-degeneracy.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

__all__ = [
    "MeshError",
    "TriangleMesh",
    "MeshGeometry",
    "FlatTorus",
    "IcoSphere",
    "ProductSpec",
    "generate_flat_torus",
    "generate_icosphere",
    "build_mesh",
    "euler_characteristic",
    "graph_diameter",
    "curvature_lp_norm",
    "mesh_geometry",
    "save_mesh",
    "load_mesh",
]

DEGENERACY_FLOOR = 1e-14  # faces below this fraction of the mean area are rejected


class MeshError(ValueError):
    """Raised when mesh data violates the closed-oriented-surface contract."""


class TriangleMesh:
    """Closed oriented triangle mesh with an intrinsic edge-length metric.

    Parameters
    ----------
    vertices : (V, 3) float array
        Positions.  For intrinsic meshes these are chart coordinates only.
    faces : (F, 3) int array
        Consistently oriented triangles.
    edge_lengths : dict[(int, int), float], optional
        Intrinsic length for every undirected edge, keyed by sorted pair.
        When omitted, lengths come from the embedding.
    edge_angles : dict[(int, int), float], optional
        Direction angle of each *directed* edge in a global flat frame
        (intrinsic meshes only); used to build tangent frames for sampling.
    params : (V, 2) float array, optional
        Parameter-domain coordinates (tori: the (u, v) chart).
    periodic : dict, optional
        Torus periodicity record {lx, ly, nx, ny}, persisted as a sidecar.
    """

    def __init__(self, vertices, faces, edge_lengths=None, edge_angles=None,
                 params=None, periodic=None):
        self.vertices = np.ascontiguousarray(vertices, dtype=float)
        self.faces = np.ascontiguousarray(faces, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshError("vertices must be (V, 3)")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise MeshError("faces must be (F, 3)")
        if self.faces.min(initial=0) < 0 or self.faces.max(initial=-1) >= len(self.vertices):
            raise MeshError("face index out of range")
        self.edge_angles = edge_angles
        self.params = None if params is None else np.asarray(params, dtype=float)
        self.periodic = periodic

        self._build_edges()
        self._build_metric(edge_lengths)
        self._validate()

    # -- construction ------------------------------------------------------

    def _build_edges(self) -> None:
        f = self.faces
        pairs = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        canon = np.sort(pairs, axis=1)
        self.edges, inverse, counts = np.unique(canon, axis=0,
                                                return_inverse=True,
                                                return_counts=True)
        if not np.all(counts == 2):
            bad = self.edges[counts != 2][:5]
            raise MeshError(f"mesh not closed: edges with face count != 2, e.g. {bad.tolist()}")
        # directed edges must be unique for a consistent orientation
        directed = {tuple(e) for e in pairs}
        if len(directed) != len(pairs):
            raise MeshError("orientation inconsistent: repeated directed edge")
        n_f = len(f)
        # side s of face f is (f[s], f[(s+1)%3]); edge index per side
        self.face_edges = inverse.reshape(3, n_f).T  # (F, 3), column s = side s
        # the face on each side of every edge, in canonical-direction order
        ef = np.full((len(self.edges), 2), -1, dtype=np.int64)
        face_ids = np.tile(np.arange(n_f), 3)
        along = pairs[:, 0] < pairs[:, 1]  # side runs in canonical direction
        for e_idx, f_idx, is_along in zip(inverse, face_ids, along):
            ef[e_idx, 0 if is_along else 1] = f_idx
        if (ef < 0).any():
            raise MeshError("orientation inconsistent: edge missing a coherent side")
        self.edge_faces = ef

    def _build_metric(self, edge_lengths) -> None:
        if edge_lengths is None:
            diff = self.vertices[self.edges[:, 0]] - self.vertices[self.edges[:, 1]]
            self.edge_lengths = np.linalg.norm(diff, axis=1)
            self.intrinsic = False
        else:
            lengths = np.empty(len(self.edges))
            for i, (a, b) in enumerate(self.edges):
                key = (int(a), int(b))
                if key not in edge_lengths:
                    raise MeshError(f"intrinsic metric missing edge {key}")
                lengths[i] = edge_lengths[key]
            self.edge_lengths = lengths
            self.intrinsic = True
        if np.any(self.edge_lengths <= 0):
            raise MeshError("nonpositive edge length")

        # per-face side lengths: side s opposite corner (s+2) % 3
        side = self.edge_lengths[self.face_edges]  # (F, 3)
        # corner c is between sides c and (c+2)%3; the opposite side is (c+1)%3
        a = side[:, [1, 2, 0]]   # opposite each corner 0,1,2
        b = side[:, [2, 0, 1]]
        c = side[:, [0, 1, 2]]
        cos = np.clip((b ** 2 + c ** 2 - a ** 2) / (2.0 * b * c), -1.0, 1.0)
        self.corner_angles = np.arccos(cos)  # (F, 3), corner m at vertex faces[f, m]
        s = side.sum(axis=1) / 2.0
        h = s[:, None] - side
        prod = s * h[:, 0] * h[:, 1] * h[:, 2]
        if np.any(prod < 0):
            raise MeshError("triangle inequality violated by intrinsic lengths")
        self.face_areas = np.sqrt(prod)

        v = len(self.vertices)
        self.vertex_areas = np.zeros(v)
        np.add.at(self.vertex_areas, self.faces.ravel(),
                  np.repeat(self.face_areas / 3.0, 3))
        angle_sums = np.zeros(v)
        np.add.at(angle_sums, self.faces.ravel(), self.corner_angles.ravel())
        self.angle_defects = 2.0 * math.pi - angle_sums
        self.total_area = float(self.face_areas.sum())

    def _validate(self) -> None:
        mean_area = self.face_areas.mean()
        if np.any(self.face_areas <= DEGENERACY_FLOOR * mean_area):
            raise MeshError("degenerate face (area below 1e-14 of mean)")
        if np.any(self.vertex_areas <= 0):
            raise MeshError("isolated vertex (zero dual area)")
        n_comp, _ = connected_components(self.adjacency(), directed=False)
        if n_comp != 1:
            raise MeshError(f"mesh not connected ({n_comp} components)")

    # -- queries -----------------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def adjacency(self) -> coo_matrix:
        """Symmetric edge-length-weighted adjacency matrix."""
        i, j = self.edges[:, 0], self.edges[:, 1]
        w = self.edge_lengths
        n = self.n_vertices
        return coo_matrix((np.concatenate([w, w]),
                           (np.concatenate([i, j]), np.concatenate([j, i]))),
                          shape=(n, n))

    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(a), int(b)): i for i, (a, b) in enumerate(self.edges)}

    def corner_angle_lookup(self) -> dict[tuple[int, int], float]:
        """Map (face index, vertex id) -> interior angle at that corner."""
        out = {}
        for f_idx, tri in enumerate(self.faces):
            for m in range(3):
                out[(f_idx, int(tri[m]))] = float(self.corner_angles[f_idx, m])
        return out

    def directed_edge_faces(self) -> dict[tuple[int, int], int]:
        """Map directed edge (a, b) -> index of the one face traversing it."""
        out = {}
        for f_idx, (i, j, k) in enumerate(self.faces):
            out[(int(i), int(j))] = f_idx
            out[(int(j), int(k))] = f_idx
            out[(int(k), int(i))] = f_idx
        return out


@dataclass(frozen=True)
class MeshGeometry:
    """Measured geometry of a mesh: dual areas, curvature measure, diameter."""

    vertex_areas: np.ndarray
    angle_defects: np.ndarray
    diameter_graph: float
    total_area: float


# -- model manifolds -------------------------------------------------------

@dataclass(frozen=True)
class FlatTorus:
    lx: float
    ly: float
    nx: int
    ny: int


@dataclass(frozen=True)
class IcoSphere:
    radius: float
    subdivisions: int


@dataclass(frozen=True)
class ProductSpec:
    """Product of model manifolds; spectral composition only, no 4-d mesh."""

    factors: tuple


def build_mesh(manifold) -> TriangleMesh:
    if isinstance(manifold, FlatTorus):
        return generate_flat_torus(manifold.lx, manifold.ly, manifold.nx, manifold.ny)
    if isinstance(manifold, IcoSphere):
        return generate_icosphere(manifold.radius, manifold.subdivisions)
    if isinstance(manifold, ProductSpec):
        raise MeshError("product manifolds are spectral-only; no mesh is built")
    raise TypeError(f"not a model manifold: {manifold!r}")


def generate_flat_torus(lx: float, ly: float, nx: int, ny: int) -> TriangleMesh:
    """Triangulated flat torus with periodic lattice connectivity.

    Each lattice cell splits along a diagonal, alternating the diagonal
    direction checkerboard-fashion so that shortest edge paths exist along
    both diagonal directions (a single fixed direction inflates the graph
    diameter of anti-diagonal vertex pairs by ~8%).  Edges carry intrinsic
    lengths lx/nx (horizontal), ly/ny (vertical), and the cell diagonal;
    angle defects vanish identically and the total area is lx*ly.
    """
    if nx < 3 or ny < 3:
        raise MeshError(f"torus needs nx, ny >= 3, got {nx}, {ny}")
    if lx <= 0 or ly <= 0:
        raise MeshError("torus side lengths must be positive")
    dx, dy = lx / nx, ly / ny
    diag = math.hypot(dx, dy)

    def vid(i: int, j: int) -> int:
        return (j % ny) * nx + (i % nx)

    verts = np.zeros((nx * ny, 3))
    params = np.zeros((nx * ny, 2))
    for j in range(ny):
        for i in range(nx):
            verts[vid(i, j), :2] = (i * dx, j * dy)
            params[vid(i, j)] = (i * dx, j * dy)

    faces = []
    lengths: dict[tuple[int, int], float] = {}
    angles: dict[tuple[int, int], float] = {}
    diag_angle = math.atan2(dy, dx)

    def add_edge(a: int, b: int, length: float, angle: float) -> None:
        lengths[tuple(sorted((a, b)))] = length
        angles[(a, b)] = angle
        angles[(b, a)] = _wrap_angle(angle + math.pi)

    for j in range(ny):
        for i in range(nx):
            a = vid(i, j)        # cell corners: a SW, b SE, c NE, d NW
            b = vid(i + 1, j)
            c = vid(i + 1, j + 1)
            d = vid(i, j + 1)
            add_edge(a, b, dx, 0.0)
            add_edge(a, d, dy, math.pi / 2.0)
            if (i + j) % 2 == 0:  # up-right diagonal
                faces.append((a, b, c))
                faces.append((a, c, d))
                add_edge(a, c, diag, diag_angle)
            else:                 # up-left diagonal
                faces.append((a, b, d))
                faces.append((b, c, d))
                add_edge(b, d, diag, _wrap_angle(math.pi - diag_angle))

    return TriangleMesh(verts, np.array(faces), edge_lengths=lengths,
                        edge_angles=angles, params=params,
                        periodic={"lx": lx, "ly": ly, "nx": nx, "ny": ny})


def _icosahedron(radius: float) -> tuple[np.ndarray, np.ndarray]:
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = np.array([
        [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
        [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
        [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
    ], dtype=float)
    verts *= radius / np.linalg.norm(verts[0])
    faces = np.array([
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ], dtype=np.int64)
    # enforce outward orientation (positive signed volume)
    vol = np.einsum("ij,ij->", verts[faces[:, 0]],
                    np.cross(verts[faces[:, 1]], verts[faces[:, 2]]))
    if vol < 0:
        faces = faces[:, [0, 2, 1]]
    return verts, faces


def generate_icosphere(radius: float, subdivisions: int) -> TriangleMesh:
    """Icosahedron, 4-to-1 subdivided s times, vertices projected to radius."""
    if radius <= 0:
        raise MeshError(f"radius must be positive, got {radius}")
    if subdivisions < 0:
        raise MeshError(f"subdivisions must be >= 0, got {subdivisions}")
    verts, faces = _icosahedron(radius)
    verts = list(verts)
    for _ in range(subdivisions):
        midpoint: dict[tuple[int, int], int] = {}

        def mid(a: int, b: int) -> int:
            key = (a, b) if a < b else (b, a)
            if key not in midpoint:
                p = 0.5 * (verts[a] + verts[b])
                p *= radius / np.linalg.norm(p)
                midpoint[key] = len(verts)
                verts.append(p)
            return midpoint[key]

        new_faces = []
        for i, j, k in faces:
            ij, jk, ki = mid(i, j), mid(j, k), mid(k, i)
            new_faces += [(i, ij, ki), (ij, j, jk), (ki, jk, k), (ij, jk, ki)]
        faces = np.array(new_faces, dtype=np.int64)
    return TriangleMesh(np.array(verts), faces)


# -- measurements ----------------------------------------------------------

def euler_characteristic(mesh: TriangleMesh) -> int:
    return mesh.n_vertices - mesh.n_edges + mesh.n_faces


def graph_diameter(mesh: TriangleMesh, exact_limit: int = 5000,
                   n_sources: int = 64) -> float:
    """Largest shortest-path distance along edges.

    Exact all-pairs for meshes up to ``exact_limit`` vertices; above that a
    deterministic sample of ``n_sources`` source vertices gives a lower
    bound (the graph metric itself upper-bounds the surface metric on
    refined meshes, so the refinement tests absorb both biases).
    """
    g = mesh.adjacency().tocsr()
    n = mesh.n_vertices
    if n <= exact_limit:
        sources = None
        dist = dijkstra(g, directed=False)
    else:
        sources = np.unique(np.linspace(0, n - 1, n_sources).astype(int))
        dist = dijkstra(g, directed=False, indices=sources)
    if not np.isfinite(dist).all():
        raise MeshError("mesh not connected; diameter undefined")
    return float(dist.max())


def curvature_lp_norm(mesh: TriangleMesh, p: float,
                      convention_scale: float = 2.0) -> float:
    """Normalized L^p norm of the pointwise curvature magnitude.

    The vertex curvature density is angle defect / dual area; on a surface
    the full curvature tensor is determined by the Gauss curvature K, and
    ``convention_scale`` encodes the tensor-norm convention (the default 2
    comes from the squared-component sum, which gives |Riem| = 2|K|).
    The norm is (sum_v area_v |scale*K_v|^p / total_area)^(1/p).
    """
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    if convention_scale <= 0:
        raise ValueError("convention_scale must be positive")
    density = np.abs(mesh.angle_defects) / mesh.vertex_areas * convention_scale
    weights = mesh.vertex_areas / mesh.total_area
    return float((weights @ density ** p) ** (1.0 / p))


def mesh_geometry(mesh: TriangleMesh, **diameter_kwargs) -> MeshGeometry:
    return MeshGeometry(vertex_areas=mesh.vertex_areas,
                        angle_defects=mesh.angle_defects,
                        diameter_graph=graph_diameter(mesh, **diameter_kwargs),
                        total_area=mesh.total_area)


# -- persistence -----------------------------------------------------------

def save_mesh(mesh: TriangleMesh, path: str | Path) -> None:
    """Write ASCII OFF; torus periodicity goes to a '<path>.json' sidecar."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_faces} {mesh.n_edges}\n")
        for v in mesh.vertices:
            fh.write(f"{float(v[0])!r} {float(v[1])!r} {float(v[2])!r}\n")
        for f in mesh.faces:
            fh.write(f"3 {f[0]} {f[1]} {f[2]}\n")
    if mesh.periodic is not None:
        Path(str(path) + ".json").write_text(json.dumps(mesh.periodic))


def load_mesh(path: str | Path) -> TriangleMesh:
    """Read an OFF file; a '<path>.json' sidecar restores the intrinsic torus metric."""
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines()
             if ln.strip() and not ln.startswith("#")]
    if lines[0].strip() != "OFF":
        raise MeshError(f"{path}: not an OFF file")
    nv, nf, _ = (int(tok) for tok in lines[1].split())
    verts = np.array([[float(x) for x in ln.split()[:3]] for ln in lines[2:2 + nv]])
    faces = np.array([[int(x) for x in ln.split()[1:4]] for ln in lines[2 + nv:2 + nv + nf]])
    sidecar = Path(str(path) + ".json")
    if sidecar.exists():
        spec = json.loads(sidecar.read_text())
        return generate_flat_torus(spec["lx"], spec["ly"], spec["nx"], spec["ny"])
    return TriangleMesh(verts, faces)


def _wrap_angle(a: float) -> float:
    """Wrap to (-pi, pi]."""
    a = math.fmod(a, 2.0 * math.pi)
    if a <= -math.pi:
        a += 2.0 * math.pi
    elif a > math.pi:
        a -= 2.0 * math.pi
    return a
