"""Smallest generalized eigenpairs of (L, M), certified and deterministic.

L is sparse Hermitian positive semidefinite, M positive diagonal.  The
pencil is whitened through M^(-1/2), solved densely below a size cutoff and
by shift-invert Lanczos (ARPACK through a seeded start vector and an
explicit sparse LU of B - sigma*I) above it.  The small negative shift
keeps the factorization definite when L has a kernel.  Every returned pair
carries the relative residual |L x - lambda M x| / |M x|; exceeding the
configured tolerance raises, carrying the best residuals seen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh, splu

__all__ = [
    "SolverConfig",
    "EigenResult",
    "EigenConvergenceError",
    "smallest_eigenpairs",
    "cluster_multiplicities",
    "first_positive",
]


@dataclass(frozen=True)
class SolverConfig:
    """k smallest pairs, residual tolerance, determinism seed.

    ``shift`` overrides the automatic shift-invert target (default: a small
    negative multiple of the mean whitened diagonal, safe for kernels).
    ``dense_cutoff`` routes problems at or below that size to a dense solve.
    """

    k: int = 6
    tol: float = 1e-8
    max_iter: int = 4000
    seed: int = 0
    shift: float = 0.0
    dense_cutoff: int = 800

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")


@dataclass
class EigenResult:
    """Ascending eigenvalues with M-orthonormal vectors and residuals.

    ``scale`` is the 1-norm of the whitened operator, the natural yardstick
    for deciding whether a small eigenvalue is a kernel value.
    ``iterations`` counts inverse applications in the sparse path (0 for
    the dense path).
    """

    values: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray
    iterations: int
    scale: float


class EigenConvergenceError(RuntimeError):
    def __init__(self, message: str, values=None, residuals=None):
        super().__init__(message)
        self.values = values
        self.residuals = residuals


def _unpack(L, M):
    a = L.matrix if hasattr(L, "matrix") else sp.csr_matrix(L)
    m = M.weights if hasattr(M, "weights") else np.asarray(M, dtype=float)
    if a.shape[0] != a.shape[1]:
        raise ValueError("operator must be square")
    if len(m) != a.shape[0]:
        raise ValueError(f"mass dimension {len(m)} != operator dimension {a.shape[0]}")
    if np.any(m <= 0):
        raise ValueError("mass must be positive")
    return a, m


def smallest_eigenpairs(L, M, config: SolverConfig = SolverConfig()) -> EigenResult:
    """k smallest eigenpairs of L x = lambda M x, residual-certified.

    Deterministic for a fixed config seed: the dense path is direct and the
    ARPACK path uses a seeded start vector with tol=0 (machine-precision
    Ritz convergence).
    """
    a, m = _unpack(L, M)
    n = a.shape[0]
    if config.k >= n:
        raise ValueError(f"k={config.k} must be below the dimension {n}")
    d_inv_sqrt = 1.0 / np.sqrt(m)
    b = sp.diags(d_inv_sqrt) @ a @ sp.diags(d_inv_sqrt)
    b = ((b + b.getH()) * 0.5).tocsr()
    scale = float(sp.linalg.norm(b, 1))

    if n <= config.dense_cutoff:
        vals, vecs = eigh(b.toarray())
        vals = vals[:config.k]
        vecs = vecs[:, :config.k]
        iterations = 0
    else:
        vals, vecs, iterations = _shift_invert(b, config)

    order = np.argsort(vals)
    vals = np.ascontiguousarray(vals[order], dtype=float)
    vecs = vecs[:, order]
    x = d_inv_sqrt[:, None] * vecs
    x /= np.sqrt(np.sum(m[:, None] * np.abs(x) ** 2, axis=0))[None, :]

    residuals = np.empty(config.k)
    for idx in range(config.k):
        lhs = a @ x[:, idx] - vals[idx] * (m * x[:, idx])
        residuals[idx] = np.linalg.norm(lhs) / np.linalg.norm(m * x[:, idx])
    if np.any(residuals > config.tol):
        raise EigenConvergenceError(
            f"residuals {residuals} exceed tol {config.tol}",
            values=vals, residuals=residuals)
    return EigenResult(values=vals, vectors=x, residuals=residuals,
                       iterations=iterations, scale=scale)


def _shift_invert(b: sp.csr_matrix, config: SolverConfig):
    n = b.shape[0]
    diag_mean = float(np.abs(b.diagonal()).mean())
    sigma = config.shift if config.shift != 0.0 else -1e-3 * max(diag_mean, 1e-300)
    factor = splu((b - sigma * sp.identity(n, dtype=b.dtype, format="csr")).tocsc())
    count = [0]

    def solve(rhs):
        count[0] += 1
        return factor.solve(rhs)

    op_inv = LinearOperator(b.shape, matvec=solve, dtype=b.dtype)
    rng = np.random.default_rng(config.seed)
    v0 = rng.standard_normal(n)
    if np.iscomplexobj(b.data):
        v0 = v0 + 1j * rng.standard_normal(n)
    try:
        vals, vecs = eigsh(b, k=config.k, sigma=sigma, which="LM",
                           v0=v0, maxiter=config.max_iter, tol=0,
                           OPinv=op_inv)
    except ArpackNoConvergence as exc:
        raise EigenConvergenceError(
            f"ARPACK did not converge within {config.max_iter} iterations",
            values=getattr(exc, "eigenvalues", None),
            residuals=None) from exc
    return vals, vecs, count[0]


def cluster_multiplicities(values, rel_gap: float = 0.02) -> list[tuple[float, int]]:
    """Greedy clustering of an ascending value list by relative gaps.

    Consecutive values join the current cluster while their gap is below
    ``rel_gap`` times the larger magnitude.  Returns (cluster mean, count)
    in order.
    """
    vals = np.asarray(list(values), dtype=float)
    if len(vals) == 0:
        return []
    clusters: list[list[float]] = [[vals[0]]]
    for prev, cur in zip(vals[:-1], vals[1:]):
        denom = max(abs(prev), abs(cur), 1e-300)
        if (cur - prev) / denom < rel_gap:
            clusters[-1].append(cur)
        else:
            clusters.append([cur])
    return [(float(np.mean(c)), len(c)) for c in clusters]


def first_positive(result: EigenResult, zero_tol: float = 1e-8) -> float | None:
    """Smallest eigenvalue above zero_tol * operator scale; None if all below.

    A None return means every computed value sits in the kernel band and
    the caller should request more pairs.
    """
    threshold = zero_tol * result.scale
    for v in result.values:
        if v > threshold:
            return float(v)
    return None
