"""Symmetric eigenvalue routines, PSD testing and splittable random streams.

Dense problems go through LAPACK (``numpy.linalg.eigh``).  Extremal eigenpairs
of sparse matrices are computed with a Lanczos iteration that keeps the whole
Krylov basis and re-orthogonalizes against it (and against an optional known
null vector) at every step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "DENSE_CAP",
    "CapExceeded",
    "ConvergenceError",
    "DenseSymmetric",
    "SparseSymmetric",
    "RandomStream",
    "eig_dense",
    "extremal_eig",
    "psd_with_known_null",
    "split_stream",
    "as_generator",
]

DENSE_CAP = 2000
# psd_with_known_null switches from the dense path to Lanczos above this order
LANCZOS_MIN_ORDER = 600


class ConvergenceError(RuntimeError):
    """An iterative method hit its iteration cap before converging."""


class CapExceeded(ValueError):
    """Problem size is above a configured brute-force or dense cap."""


# ---------------------------------------------------------------------------
# matrix carriers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DenseSymmetric:
    """Symmetric matrix stored as its packed lower triangle (row-major)."""

    n: int
    packed: np.ndarray

    @classmethod
    def from_array(cls, a, atol: float = 0.0) -> "DenseSymmetric":
        a = np.asarray(a, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        if not np.allclose(a, a.T, rtol=0.0, atol=atol):
            raise ValueError("matrix is not symmetric")
        rows, cols = np.tril_indices(a.shape[0])
        packed = a[rows, cols].copy()
        packed.setflags(write=False)
        return cls(a.shape[0], packed)

    def toarray(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        rows, cols = np.tril_indices(self.n)
        out[rows, cols] = self.packed
        out[cols, rows] = self.packed
        return out


@dataclass(frozen=True)
class SparseSymmetric:
    """Symmetric matrix in CSR form holding both triangles.

    Construction checks structural and numerical symmetry, so every instance
    satisfies ``M[i, j] == M[j, i]`` exactly.
    """

    csr: sp.csr_matrix = field(repr=False)

    def __post_init__(self):
        m = sp.csr_matrix(self.csr, dtype=float)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        m.sum_duplicates()
        m.sort_indices()
        if (m != m.T).nnz:
            raise ValueError("matrix is not symmetric")
        object.__setattr__(self, "csr", m)

    @classmethod
    def from_array(cls, a) -> "SparseSymmetric":
        return cls(sp.csr_matrix(np.asarray(a, dtype=float)))

    @property
    def n(self) -> int:
        return self.csr.shape[0]

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.csr @ x

    def norm_inf(self) -> float:
        """Largest absolute row sum."""
        if self.csr.nnz == 0:
            return 0.0
        return float(abs(self.csr).sum(axis=1).max())

    def toarray(self) -> np.ndarray:
        return self.csr.toarray()


def _as_dense_array(m) -> np.ndarray:
    if isinstance(m, (DenseSymmetric, SparseSymmetric)):
        return m.toarray()
    if sp.issparse(m):
        return m.toarray()
    return np.asarray(m, dtype=float)


def _as_sparse(m) -> SparseSymmetric:
    if isinstance(m, SparseSymmetric):
        return m
    if isinstance(m, DenseSymmetric):
        return SparseSymmetric.from_array(m.toarray())
    if sp.issparse(m):
        return SparseSymmetric(m)
    return SparseSymmetric.from_array(m)


# ---------------------------------------------------------------------------
# dense path
# ---------------------------------------------------------------------------


def eig_dense(m, vectors: bool = False, cap: int = DENSE_CAP):
    """Full spectrum of a symmetric matrix, eigenvalues ascending.

    Parameters
    ----------
    m : DenseSymmetric, SparseSymmetric or array_like
    vectors : bool
        Also return the orthonormal eigenvectors as columns.
    cap : int
        Largest order accepted.
    """
    a = _as_dense_array(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if a.shape[0] > cap:
        raise CapExceeded(f"order {a.shape[0]} exceeds dense cap {cap}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    if vectors:
        return np.linalg.eigh(a)
    return np.linalg.eigvalsh(a)


# ---------------------------------------------------------------------------
# Lanczos
# ---------------------------------------------------------------------------


def _default_max_iter(n: int) -> int:
    return max(300, int(math.ceil(50 * math.sqrt(n))))


def extremal_eig(
    m,
    which: str = "largest",
    deflate=None,
    max_iter: int | None = None,
    tol: float = 1e-10,
    deflate_tol: float = 1e-8,
    rng=None,
):
    """Extremal eigenpair of a symmetric matrix by Lanczos iteration.

    The Krylov basis is kept in full and every new vector is
    re-orthogonalized against it and against ``deflate``; the iteration
    therefore lives in the orthogonal complement of the deflation vector.

    Parameters
    ----------
    m : SparseSymmetric or array_like
    which : {"largest", "smallest"}
    deflate : array_like, optional
        Known null vector of ``m`` to project out.
    max_iter : int, optional
        Iteration cap; defaults to ``max(300, 50 * sqrt(n))``.
    tol : float
        Stop once the Ritz residual is at most ``tol * ||m||``.
    deflate_tol : float
        ``deflate`` is rejected unless ``||m u|| <= deflate_tol * ||m||``.
    rng : RandomStream, Generator or int, optional
        Source of the start vector; a fixed stream is used by default so the
        result is deterministic.

    Returns
    -------
    (float, ndarray)
        Eigenvalue and unit eigenvector.
    """
    if which not in ("largest", "smallest"):
        raise ValueError(f"which must be 'largest' or 'smallest', got {which!r}")
    a = _as_sparse(m)
    n = a.n
    norm = a.norm_inf()
    if n == 0 or norm == 0.0:
        raise ValueError("matrix must be nonzero")

    u = None
    if deflate is not None:
        u = np.asarray(deflate, dtype=float).ravel()
        if u.shape != (n,) or not np.any(u):
            raise ValueError("invalid deflation vector")
        u = u / np.linalg.norm(u)
        if np.linalg.norm(a.matvec(u)) > deflate_tol * norm:
            raise ValueError("deflation vector is not in the null space")

    dim = n - (1 if u is not None else 0)
    if dim == 0:
        raise ValueError("nothing left after deflation")
    if max_iter is None:
        max_iter = _default_max_iter(n)
    kmax = min(max_iter, dim)

    gen = as_generator(rng if rng is not None else split_stream(0x1A2C05, 0))

    def project(x, basis):
        if u is not None:
            x -= u * (u @ x)
        if basis.shape[1]:
            x -= basis @ (basis.T @ x)
        return x

    def fresh(basis):
        for _ in range(10):
            x = project(gen.standard_normal(n), basis)
            x = project(x, basis)
            nx = np.linalg.norm(x)
            if nx > 1e-8:
                return x / nx
        raise ConvergenceError("could not draw a start vector outside the basis")

    q_basis = np.empty((n, kmax))
    alphas = np.empty(kmax)
    betas = np.empty(kmax)
    q = fresh(q_basis[:, :0])
    beta_prev = 0.0
    q_prev = np.zeros(n)
    pick = 0 if which == "smallest" else None

    for j in range(kmax):
        q_basis[:, j] = q
        w = a.matvec(q)
        alpha = float(q @ w)
        w -= alpha * q + beta_prev * q_prev
        # two passes of classical Gram-Schmidt keep the basis orthogonal
        w = project(w, q_basis[:, : j + 1])
        w = project(w, q_basis[:, : j + 1])
        beta = float(np.linalg.norm(w))
        alphas[j] = alpha
        betas[j] = beta
        k = j + 1

        exhausted = k == dim
        breakdown = beta <= 1e-12 * norm
        if k >= 2 and (exhausted or breakdown or k % 4 == 0 or k == kmax):
            idx = pick if pick is not None else k - 1
            theta, s = eigh_tridiagonal(
                alphas[:k], betas[: k - 1], select="i", select_range=(idx, idx)
            )
            resid = beta * abs(s[-1, 0])
            if exhausted or (resid <= tol * norm and not breakdown):
                vec = project(q_basis[:, :k] @ s[:, 0], q_basis[:, :0])
                vec /= np.linalg.norm(vec)
                return float(theta[0]), vec
        elif k == 1 and exhausted:
            return alpha, q.copy()

        if j + 1 == kmax:
            break
        if breakdown:
            # invariant subspace found; continue in a fresh direction
            q_prev = q
            q = fresh(q_basis[:, :k])
            beta_prev = 0.0
            betas[j] = 0.0
        else:
            q_prev = q
            q = w / beta
            beta_prev = beta

    raise ConvergenceError(f"Lanczos did not converge within {kmax} iterations")


# ---------------------------------------------------------------------------
# PSD certificate
# ---------------------------------------------------------------------------


def psd_with_known_null(
    m,
    method: str = "auto",
    null_tol: float = 1e-10,
    lanczos_min_order: int = LANCZOS_MIN_ORDER,
):
    """Smallest eigenvalue of ``m`` on the complement of the all-ones vector.

    ``m`` must annihilate the all-ones vector (every row sums to zero).

    Returns
    -------
    (float, bool)
        ``lambda2`` and whether it exceeds ``1e-8 * max(1, ||m||_inf)``.
    """
    a = _as_sparse(m)
    n = a.n
    norm = a.norm_inf()
    ones = np.ones(n)
    if np.abs(a.matvec(ones)).max(initial=0.0) > null_tol * max(1.0, norm):
        raise ValueError("matrix does not annihilate the all-ones vector")
    tau = 1e-8 * max(1.0, norm)
    if n < 2:
        raise ValueError("need at least two vertices")
    if norm == 0.0:
        return 0.0, False

    if method == "auto":
        method = "lanczos" if n >= lanczos_min_order else "dense"
    if method == "dense":
        # lift the all-ones eigenvalue above the spectrum; the smallest
        # eigenvalue left is the one on the complement
        lift = 2.0 * norm + 1.0
        lam = float(eig_dense(a.toarray() + lift / n)[0])
    elif method == "lanczos":
        lam, _ = extremal_eig(a, which="smallest", deflate=ones)
    else:
        raise ValueError(f"unknown method {method!r}")
    return lam, lam > tau


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RandomStream:
    """Reproducible random source keyed by ``(seed, index path)``.

    Each call to :meth:`generator` returns a fresh Philox generator positioned
    at the start of the stream, so the stream is a value, not a cursor.
    """

    seed: int
    index: tuple[int, ...] = ()

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=self.index)
        return np.random.Generator(np.random.Philox(ss))

    def child(self, key: int) -> "RandomStream":
        return RandomStream(self.seed, self.index + (int(key),))


def split_stream(seed: int, index: int) -> RandomStream:
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    return RandomStream(int(seed), (int(index),))


def as_generator(rng) -> np.random.Generator:
    """Accept a RandomStream, a Generator or an integer seed."""
    if isinstance(rng, RandomStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        raise ValueError("an explicit random stream is required")
    return RandomStream(int(rng)).generator()
