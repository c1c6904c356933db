"""Recovery algorithms for binary node labels from censored parities.

Every decoder returns a :class:`DecodeResult` whose ``estimate`` is the
canonical member of its global-flip class (first bit 0).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph
from .measurement import (
    CensoredMeasurements,
    NoisePattern,
    as_assignment,
    certificate_matrix,
    edge_parities,
    signed_weight_matrix,
)
from .numerics import (
    CapExceeded,
    DENSE_CAP,
    RandomStream,
    as_generator,
    eig_dense,
    extremal_eig,
    psd_with_known_null,
    split_stream,
)

__all__ = [
    "ML_CAP",
    "DecodeResult",
    "SdpConfig",
    "canonical",
    "ml_cost",
    "ml_bruteforce",
    "sdp_decode",
    "certificate_check",
    "spectral_decode",
    "two_path_vote",
    "local_failure_witnesses",
    "agreement_error",
    "DECODERS",
]

ML_CAP = 24
_CHUNK = 1 << 14


def canonical(x) -> np.ndarray:
    """Representative of ``{x, x ^ 1}`` whose first bit is 0."""
    x = np.asarray(x, dtype=np.uint8)
    if x.size and x[0]:
        x = x ^ 1
    return as_assignment(x)


def ml_cost(g: Graph, meas: CensoredMeasurements, x) -> int:
    """Number of edges whose measurement disagrees with ``x``."""
    return int(np.count_nonzero(meas.y != edge_parities(g, x)))


def agreement_error(a, b) -> int:
    """Hamming distance up to a global flip."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = int(np.count_nonzero(a != b))
    return min(d, a.size - d)


@dataclass(frozen=True)
class DecodeResult:
    algorithm: str
    estimate: np.ndarray
    objective: float
    tie: bool = False
    num_optimal_classes: int | None = None
    undecided: tuple[int, ...] | None = None
    certified: bool | None = None
    lambda2: float | None = None
    converged: bool | None = None
    rank_one: bool | None = None

    @property
    def bits(self) -> str:
        return "".join(str(int(b)) for b in self.estimate)

    def to_json(self) -> dict:
        out = {
            "algorithm": self.algorithm,
            "estimate": self.bits,
            "objective": self.objective,
            "tie": self.tie,
        }
        for key in ("num_optimal_classes", "certified", "lambda2", "converged", "rank_one"):
            val = getattr(self, key)
            if val is not None:
                out[key] = val
        if self.undecided is not None:
            out["undecided"] = list(self.undecided)
        return out


# ---------------------------------------------------------------------------
# maximum likelihood
# ---------------------------------------------------------------------------


def _sign_table(k: int) -> np.ndarray:
    """All ``2**k`` sign vectors, row r encoding the bits of r MSB-first."""
    codes = np.arange(1 << k, dtype=np.int64)
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return 1.0 - 2.0 * ((codes[:, None] >> shifts) & 1)


def ml_bruteforce(g: Graph, meas: CensoredMeasurements, cap: int = ML_CAP) -> DecodeResult:
    """Exhaustive ML decoding over all ``2**(n-1)`` flip classes.

    Vertex 0 is pinned to 0.  The other vertices are split into a leading
    block (rows) and a trailing block (columns); with ``s = (-1)**x`` the
    number of agreeing edges minus disagreeing edges is
    ``q_lead(row) + q_trail(col) + S_lead W_cross S_trail^T``, so the whole
    cost table is one matrix product.  Row-major order of the table is
    lexicographic order of the assignment, so the first minimizer is the
    lexicographically smallest.
    """
    n = g.n
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the brute-force cap {cap}")
    if n == 0:
        raise ValueError("empty graph")
    w = signed_weight_matrix(g, meas).toarray()
    free = n - 1
    n_lead = free // 2
    lead = np.arange(0, n_lead + 1)  # vertex 0 plus the leading block
    trail = np.arange(n_lead + 1, n)
    s_lead = np.ones((1 << n_lead, n_lead + 1))
    s_lead[:, 1:] = _sign_table(n_lead)
    s_trail = _sign_table(free - n_lead)
    w_ll = w[np.ix_(lead, lead)]
    w_tt = w[np.ix_(trail, trail)]
    q_lead = 0.5 * np.sum((s_lead @ w_ll) * s_lead, axis=1)
    q_trail = 0.5 * np.sum((s_trail @ w_tt) * s_trail, axis=1)
    half_cross = s_lead @ w[np.ix_(lead, trail)]

    best, n_best, arg = None, 0, 0
    block = max(1, _CHUNK * 16 // max(1, s_trail.shape[0]))
    for r0 in range(0, s_lead.shape[0], block):
        agree = q_lead[r0 : r0 + block, None] + q_trail[None, :] + half_cross[r0 : r0 + block] @ s_trail.T
        cost = np.rint((g.m - agree) / 2.0).astype(np.int64).ravel()
        lo = int(cost.min())
        hits = int(np.count_nonzero(cost == lo))
        if best is None or lo < best:
            best, n_best = lo, hits
            arg = r0 * s_trail.shape[0] + int(np.argmax(cost == lo))
        elif lo == best:
            n_best += hits
    shifts = np.arange(free - 1, -1, -1, dtype=np.int64)
    x = np.zeros(n, dtype=np.uint8)
    x[1:] = (arg >> shifts) & 1
    return DecodeResult(
        algorithm="ml",
        estimate=as_assignment(x),
        objective=float(best),
        tie=n_best > 1,
        num_optimal_classes=n_best,
    )


# ---------------------------------------------------------------------------
# SDP by low-rank factorization
# ---------------------------------------------------------------------------


def default_rank(n: int) -> int:
    return max(1, min(math.ceil(math.sqrt(2 * n)) + 1, n))


@dataclass(frozen=True)
class SdpConfig:
    """Settings for the factored SDP ascent.

    ``rank=None`` picks ``min(ceil(sqrt(2n)) + 1, n)``.
    """

    rank: int | None = None
    max_iter: int = 20000
    grad_tol: float = 1e-8
    step: str = "bb"  # "bb" (Barzilai-Borwein trial step) or "fixed"
    rng: RandomStream = field(default_factory=lambda: split_stream(0, 0))

    def __post_init__(self):
        if self.rank is not None and self.rank < 2:
            raise ValueError("rank must be at least 2")
        if self.grad_tol <= 0 or self.max_iter < 1:
            raise ValueError("tolerances and iteration cap must be positive")
        if self.step not in ("bb", "fixed"):
            raise ValueError(f"unknown step policy {self.step!r}")


def _normalize_rows(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sdp_decode(g: Graph, meas: CensoredMeasurements, cfg: SdpConfig | None = None) -> DecodeResult:
    """Maximize ``Tr[W X]`` over ``X = V V^T`` with unit-norm rows of V.

    Riemannian gradient ascent on the product of spheres with an Armijo
    backtracking line search, then rounding by the signs of V projected on
    its top right-singular direction.  ``rank_one`` reports whether the
    second singular value of V is below ``1e-6`` times the first; when it is
    not, the rounding is a heuristic.  The ascent stops when the
    gradient norm reaches ``grad_tol``, or when 25 consecutive steps fail to
    raise the objective by more than ``1e-14 * |f|``; in the latter case
    ``converged`` holds only if the gradient is at the floor that the
    objective's floating-point resolution allows.
    """
    cfg = cfg or SdpConfig()
    n = g.n
    if n == 0:
        raise ValueError("empty graph")
    w = signed_weight_matrix(g, meas).csr
    k = cfg.rank if cfg.rank is not None else default_rank(n)
    gen = as_generator(cfg.rng)
    v = _normalize_rows(gen.standard_normal((n, k)))

    def riem_grad(v):
        egrad = 2.0 * (w @ v)
        return egrad - np.sum(egrad * v, axis=1, keepdims=True) * v

    def objective(v):
        return float(np.sum(v * (w @ v)))

    lip = 2.0 * max(1.0, float(abs(w).sum(axis=1).max()) if w.nnz else 1.0)
    t = 1.0 / lip
    f = objective(v)
    rg = rg_prev = v_prev = None
    converged = False
    stalled = 0
    for _ in range(cfg.max_iter):
        rg = riem_grad(v)
        gnorm2 = float(np.sum(rg * rg))
        if math.sqrt(gnorm2) <= cfg.grad_tol:
            converged = True
            break
        if cfg.step == "bb" and rg_prev is not None:
            s = v - v_prev
            yk = rg - rg_prev
            sy = abs(float(np.sum(s * yk)))
            t = float(np.sum(s * s)) / sy if sy > 0 else 1.0 / lip
            t = min(max(t, 1e-3 / lip), 1e3 / lip)
        elif cfg.step == "fixed":
            t = 1.0 / lip
        while True:
            cand = _normalize_rows(v + t * rg)
            fc = objective(cand)
            if fc >= f + 1e-4 * t * gnorm2 or t < 1e-12 / lip:
                break
            t *= 0.5
        # on degenerate optima the gap falls below the resolution of f long
        # before the gradient reaches grad_tol; stop instead of spinning
        resolution = 1e-14 * max(1.0, abs(f))
        stalled = stalled + 1 if fc - f <= resolution else 0
        if stalled >= 25:
            # an Armijo step gains about |grad|^2 / lip, so gradients below
            # sqrt(resolution * lip) cannot be reduced further in floating point
            converged = math.sqrt(gnorm2) <= 10.0 * math.sqrt(resolution * lip)
            break
        v_prev, rg_prev = v, rg
        v, f = cand, fc

    _, sing, vt = np.linalg.svd(v, full_matrices=False)
    proj = v @ vt[0]
    x = (proj < 0).astype(np.uint8)
    rank_one = bool(sing.shape[0] < 2 or sing[1] <= 1e-6 * sing[0])
    return DecodeResult(
        algorithm="sdp",
        estimate=canonical(x),
        objective=objective(v),
        converged=converged,
        rank_one=rank_one,
    )


# ---------------------------------------------------------------------------
# dual certificate
# ---------------------------------------------------------------------------


def certificate_check(g: Graph, meas: CensoredMeasurements, candidate, method: str = "auto"):
    """``(lambda2, certified)`` for the matrix ``L_G - 2 L_H`` of ``candidate``.

    Strict certification means ``candidate``'s rank-one matrix is the unique
    optimum of the SDP relaxation.
    """
    return psd_with_known_null(certificate_matrix(g, meas, candidate), method=method)


# ---------------------------------------------------------------------------
# spectral and voting baselines
# ---------------------------------------------------------------------------


def spectral_decode(g: Graph, meas: CensoredMeasurements) -> DecodeResult:
    """Signs of the leading eigenvector of W."""
    if g.m == 0:
        raise ValueError("graph has no edges")
    w = signed_weight_matrix(g, meas)
    if g.n <= DENSE_CAP:
        _, vecs = eig_dense(w, vectors=True)
        top = vecs[:, -1]
    else:
        _, top = extremal_eig(w, which="largest")
    x = canonical((top < 0).astype(np.uint8))
    return DecodeResult("spectral", x, float(ml_cost(g, meas, x)))


def two_path_vote(g: Graph, meas: CensoredMeasurements, center: int | None = None) -> DecodeResult:
    """Majority vote over all length-2 paths to a center vertex.

    The center defaults to the smallest-index vertex of maximum degree and is
    labelled 0.  Vertex v gets 0 when ``sum_k rho_ck rho_kv`` over common
    neighbours k is positive and 1 when negative; a zero sum marks v as
    undecided and labels it like the center.  Direct edges to the center
    carry no vote.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    if center is None:
        center = int(np.argmax(g.degrees))
    if not 0 <= center < g.n:
        raise ValueError(f"center {center} out of range")
    w = signed_weight_matrix(g, meas).csr
    margin = np.asarray((w[center] @ w).todense()).ravel()
    margin[center] = 0.0
    x = (margin < 0).astype(np.uint8)
    undecided = np.flatnonzero(margin == 0)
    undecided = tuple(int(i) for i in undecided if i != center)
    x = canonical(x)
    return DecodeResult(
        "vote", x, float(ml_cost(g, meas, x)), tie=bool(undecided), undecided=undecided
    )


def local_failure_witnesses(g: Graph, z) -> tuple[np.ndarray, np.ndarray]:
    """Vertices where at least half of the incident edges are noisy.

    Returns ``(strict, tie)``: strict when more than half are noisy (flipping
    that vertex alone lowers the ML cost), tie when exactly half.
    """
    z = z.z if isinstance(z, NoisePattern) else np.asarray(z, dtype=np.uint8)
    if z.shape != (g.m,):
        raise ValueError("noise pattern is not aligned with the graph")
    noisy_edges = g.edges[z.astype(bool)]
    noisy = np.bincount(noisy_edges.ravel(), minlength=g.n)
    deg = g.degrees
    strict = np.flatnonzero(2 * noisy > deg)
    tie = np.flatnonzero((2 * noisy == deg) & (deg > 0))
    return strict, tie


DECODERS = {
    "ml": ml_bruteforce,
    "sdp": sdp_decode,
    "spectral": spectral_decode,
    "vote": two_path_vote,
}
