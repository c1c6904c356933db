"""Simple undirected graphs, generators, cuts and spectral connectivity.

Edges are kept as a lexicographically sorted ``(m, 2)`` integer array with
``u < v`` in every row.  The row position of an edge is its canonical index;
every per-edge vector elsewhere in the package is aligned to it.
"""
from __future__ import annotations

import math
import os
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .numerics import CapExceeded, ConvergenceError, SparseSymmetric, as_generator, eig_dense

__all__ = [
    "CHEEGER_CAP",
    "Graph",
    "GraphFormatError",
    "VertexSubset",
    "gen_erdos_renyi",
    "gen_random_regular",
    "complete_graph",
    "cycle_graph",
    "path_graph",
    "star_graph",
    "empty_graph",
    "is_connected",
    "cut_and_vol",
    "cheeger_constant",
    "spectral_lambdas",
    "load_graph",
    "save_graph",
]

CHEEGER_CAP = 22
_CHUNK = 1 << 15


class GraphFormatError(ValueError):
    """Malformed edge-list file or invalid edge set."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``.

    Use :meth:`from_edges` to build one from arbitrary pairs; the raw
    constructor expects an already canonical edge array.
    """

    n: int
    edges: np.ndarray = field(repr=False)

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if self.n < 0:
            raise GraphFormatError("vertex count must be nonnegative")
        if e.size:
            if e.min() < 0 or e.max() >= self.n:
                raise GraphFormatError("vertex id out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise GraphFormatError("self-loop")
            if np.any(e[:, 0] > e[:, 1]):
                raise GraphFormatError("edge rows must satisfy u < v")
            key = e[:, 0] * self.n + e[:, 1]
            if np.any(np.diff(key) <= 0):
                if np.any(np.diff(np.sort(key)) == 0):
                    raise GraphFormatError("duplicate edge")
                raise GraphFormatError("edge list is not sorted")
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "edges", e)

    @classmethod
    def from_edges(cls, n: int, pairs) -> "Graph":
        """Normalize ``pairs`` (swap so u < v, sort) and build the graph.

        Self-loops and repeated pairs raise :class:`GraphFormatError`.
        """
        e = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size:
            e = np.sort(e, axis=1)
            order = np.lexsort((e[:, 1], e[:, 0]))
            e = e[order]
            if np.any(e[:, 0] == e[:, 1]):
                raise GraphFormatError("self-loop")
            if len(e) > 1 and np.any(np.all(e[1:] == e[:-1], axis=1)):
                raise GraphFormatError("duplicate edge")
        return cls(int(n), e)

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n)
        deg.setflags(write=False)
        return deg

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, ...]:
        """Per-vertex sorted neighbor arrays."""
        a = self.adjacency_matrix()
        return tuple(a.indices[a.indptr[i] : a.indptr[i + 1]] for i in range(self.n))

    @property
    def average_degree(self) -> float:
        return 2.0 * self.m / self.n if self.n else 0.0

    @property
    def min_degree(self) -> int:
        return int(self.degrees.min()) if self.n else 0

    def edge_index(self, u: int, v: int) -> int:
        """Canonical index of edge ``{u, v}``; raises KeyError if absent."""
        if u > v:
            u, v = v, u
        key = self.edges[:, 0] * self.n + self.edges[:, 1]
        i = int(np.searchsorted(key, u * self.n + v))
        if i >= self.m or key[i] != u * self.n + v:
            raise KeyError((u, v))
        return i

    def adjacency_matrix(self, weights=None) -> sp.csr_matrix:
        """Symmetric CSR adjacency with optional per-edge weights."""
        w = np.ones(self.m) if weights is None else np.asarray(weights, dtype=float)
        r = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        c = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        a = sp.csr_matrix((np.concatenate([w, w]), (r, c)), shape=(self.n, self.n))
        a.sort_indices()
        return a

    def laplacian(self, weights=None) -> SparseSymmetric:
        """``D - A`` for the (optionally edge-weighted) graph."""
        a = self.adjacency_matrix(weights)
        d = np.asarray(a.sum(axis=1)).ravel()
        return SparseSymmetric(sp.diags(d, format="csr") - a)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __hash__(self):
        return hash((self.n, self.edges.tobytes()))


@dataclass(frozen=True)
class VertexSubset:
    """Subset of ``range(n)`` stored as a boolean membership mask."""

    mask: np.ndarray

    @classmethod
    def of(cls, n: int, members) -> "VertexSubset":
        mask = np.zeros(n, dtype=bool)
        mask[list(members)] = True
        return cls(mask)

    @property
    def n(self) -> int:
        return self.mask.shape[0]

    def is_proper(self) -> bool:
        return bool(self.mask.any() and not self.mask.all())


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def complete_graph(n: int) -> Graph:
    u, v = np.triu_indices(n, k=1)
    return Graph(n, np.column_stack([u, v]))


def empty_graph(n: int) -> Graph:
    return Graph(n, np.empty((0, 2), dtype=np.int64))


def path_graph(n: int) -> Graph:
    i = np.arange(n - 1)
    return Graph(n, np.column_stack([i, i + 1]))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    i = np.arange(n)
    return Graph.from_edges(n, np.column_stack([i, (i + 1) % n]))


def star_graph(n: int) -> Graph:
    """Hub 0 joined to leaves ``1..n-1``."""
    leaves = np.arange(1, n)
    return Graph(n, np.column_stack([np.zeros_like(leaves), leaves]))


def gen_erdos_renyi(n: int, p: float, rng) -> Graph:
    """G(n, p): each of the n(n-1)/2 pairs present independently.

    Pairs are visited in canonical (row-major upper triangle) order, one
    uniform draw per pair, so the sample is a fixed function of the stream.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    gen = as_generator(rng)
    u, v = np.triu_indices(n, k=1)
    keep = gen.random(u.shape[0]) < p
    return Graph(n, np.column_stack([u[keep], v[keep]]))


def gen_random_regular(n: int, d: int, rng, max_restarts: int | None = None) -> Graph:
    """Random d-regular graph from the pairing model.

    Stubs are shuffled and paired; any loop or repeated pair discards the
    whole pairing.  Gives up after ``10 * n * d`` restarts by default.
    For ``d > (n - 1) / 2`` the complement, which is ``(n - 1 - d)``-regular,
    is drawn instead; complementing is a bijection, so the law is unchanged
    while the pairing succeeds far more often.
    """
    if not 0 <= d < n:
        raise ValueError("need 0 <= d < n")
    if (n * d) % 2:
        raise ValueError(f"n * d must be even (n={n}, d={d})")
    if d == 0:
        return empty_graph(n)
    if 2 * d > n - 1:
        sparse = gen_random_regular(n, n - 1 - d, rng, max_restarts)
        dense = np.ones((n, n), dtype=bool)
        dense[sparse.edges[:, 0], sparse.edges[:, 1]] = False
        u, v = np.nonzero(np.triu(dense, k=1))
        return Graph(n, np.column_stack([u, v]))
    gen = as_generator(rng)
    if max_restarts is None:
        max_restarts = 10 * n * d
    stubs = np.repeat(np.arange(n), d)
    for _ in range(max_restarts + 1):
        pairs = gen.permutation(stubs).reshape(-1, 2)
        pairs.sort(axis=1)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        key = np.sort(pairs[:, 0] * n + pairs[:, 1])
        if np.any(np.diff(key) == 0):
            continue
        return Graph(n, np.column_stack([key // n, key % n]))
    raise ConvergenceError(f"pairing model did not yield a simple graph in {max_restarts} restarts")


# ---------------------------------------------------------------------------
# connectivity, cuts, Cheeger
# ---------------------------------------------------------------------------


def is_connected(g: Graph) -> bool:
    """Breadth-first search from vertex 0 reaches every vertex."""
    if g.n <= 1:
        return True
    adj = g.adjacency
    seen = np.zeros(g.n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        for w in adj[queue.popleft()]:
            if not seen[w]:
                seen[w] = True
                count += 1
                queue.append(int(w))
    return count == g.n


def cut_and_vol(g: Graph, s) -> tuple[int, int, int]:
    """(edges crossing S, vol(S), vol(S^c))."""
    mask = s.mask if isinstance(s, VertexSubset) else np.asarray(s, dtype=bool)
    if mask.shape != (g.n,):
        raise ValueError("subset size does not match the graph")
    if not mask.any() or mask.all():
        raise ValueError("subset must be nonempty and proper")
    cut = int(np.count_nonzero(mask[g.edges[:, 0]] != mask[g.edges[:, 1]]))
    vol_s = int(g.degrees[mask].sum())
    return cut, vol_s, int(g.degrees.sum()) - vol_s


def cheeger_constant(g: Graph, cap: int = CHEEGER_CAP) -> float:
    """Exact ``min_S cut(S) / min(vol S, vol S^c)`` by exhaustive search.

    Only subsets containing vertex 0 are visited, which covers each
    complementary pair once.  Subsets where the smaller volume is zero are
    skipped.
    """
    if g.m == 0:
        raise ValueError("graph has no edges")
    if g.n > cap:
        raise CapExceeded(f"n={g.n} exceeds the brute-force cap {cap}")
    n = g.n
    total = int(g.degrees.sum())
    u = g.edges[:, 0]
    v = g.edges[:, 1]
    deg = g.degrees.astype(np.int64)
    best = math.inf
    # vertex 0 always in S; bits 0..n-2 select vertices 1..n-1
    count = 1 << (n - 1)
    shifts = np.arange(n - 1, dtype=np.int64)
    for start in range(0, count, _CHUNK):
        codes = np.arange(start, min(count, start + _CHUNK), dtype=np.int64)
        bits = np.ones((codes.shape[0], n), dtype=bool)
        bits[:, 1:] = (codes[:, None] >> shifts) & 1
        if start + _CHUNK >= count:
            # drop S = V
            bits = bits[:-1]
        if bits.shape[0] == 0:
            continue
        cut = np.count_nonzero(bits[:, u] != bits[:, v], axis=1)
        vol = bits @ deg
        small = np.minimum(vol, total - vol)
        ok = small > 0
        if ok.any():
            best = min(best, float((cut[ok] / small[ok]).min()))
    return best


def spectral_lambdas(g: Graph) -> tuple[float, float]:
    """Second-largest and smallest eigenvalues of ``A / d`` for d-regular g."""
    if g.n < 2:
        raise ValueError("need at least two vertices")
    deg = g.degrees
    d = int(deg[0])
    if np.any(deg != d):
        raise ValueError("graph is not regular")
    if d == 0:
        raise ValueError("degree must be positive")
    w = eig_dense(g.adjacency_matrix().toarray() / d)
    return float(w[-2]), float(w[0])


# ---------------------------------------------------------------------------
# edge-list files
# ---------------------------------------------------------------------------


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, line


def parse_graph(text: str) -> Graph:
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise GraphFormatError("missing 'n <N>' header") from None
    parts = header.split()
    if len(parts) != 2 or parts[0] != "n":
        raise GraphFormatError(f"line {lineno}: expected 'n <N>', got {header!r}")
    try:
        n = int(parts[1])
    except ValueError:
        raise GraphFormatError(f"line {lineno}: bad vertex count {parts[1]!r}") from None
    pairs = []
    for lineno, line in lines:
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer vertex in {line!r}") from None
        if not (0 <= a < n and 0 <= b < n):
            raise GraphFormatError(f"line {lineno}: vertex out of range in {line!r}")
        if a == b:
            raise GraphFormatError(f"line {lineno}: self-loop {a} {b}")
        pairs.append((a, b))
    return Graph.from_edges(n, np.array(pairs, dtype=np.int64).reshape(-1, 2))


def format_graph(g: Graph) -> str:
    out = [f"n {g.n}"]
    out.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(out) + "\n"


def load_graph(path: str | os.PathLike) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def save_graph(g: Graph, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_graph(g))
