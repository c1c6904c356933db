"""Censored parity measurements on the edges of a graph.

An assignment is a length-n 0/1 vector.  The measurement on edge ``(u, v)``
is ``y = x[u] ^ x[v] ^ z`` with i.i.d. Bernoulli noise ``z``.  Bits are the
stored form; signs ``(-1)**y`` only appear inside the matrix builders.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, GraphFormatError, _content_lines
from .numerics import SparseSymmetric, as_generator

__all__ = [
    "CensoredMeasurements",
    "NoisePattern",
    "TernaryLabels",
    "as_assignment",
    "edge_parities",
    "noise_from_uniforms",
    "synthesize",
    "censored_block_sample",
    "signed_weight_matrix",
    "error_subgraph",
    "certificate_matrix",
    "gauge_transform",
    "load_measurements",
    "save_measurements",
]


def _frozen_bits(a, length: int | None = None, what: str = "vector") -> np.ndarray:
    b = np.asarray(a)
    if b.ndim != 1:
        raise ValueError(f"{what} must be one-dimensional")
    if b.size and not np.isin(b, (0, 1)).all():
        raise ValueError(f"{what} must contain only 0/1 entries")
    b = b.astype(np.uint8)
    if length is not None and b.shape[0] != length:
        raise ValueError(f"{what} has length {b.shape[0]}, expected {length}")
    b.setflags(write=False)
    return b


def as_assignment(x, n: int | None = None) -> np.ndarray:
    """Validate and freeze a 0/1 node assignment."""
    return _frozen_bits(x, n, "assignment")


def edge_parities(g: Graph, x) -> np.ndarray:
    """``x[u] ^ x[v]`` for every edge in canonical order."""
    x = as_assignment(x, g.n)
    return x[g.edges[:, 0]] ^ x[g.edges[:, 1]]


@dataclass(frozen=True)
class CensoredMeasurements:
    """Observed per-edge bits aligned to ``graph.edges``."""

    graph: Graph = field(repr=False)
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y", _frozen_bits(self.y, self.graph.m, "measurement"))

    @property
    def signs(self) -> np.ndarray:
        return 1.0 - 2.0 * self.y

    def __eq__(self, other):
        if not isinstance(other, CensoredMeasurements):
            return NotImplemented
        return self.graph == other.graph and np.array_equal(self.y, other.y)


@dataclass(frozen=True)
class NoisePattern:
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "z", _frozen_bits(self.z, None, "noise"))

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.z)


@dataclass(frozen=True)
class TernaryLabels:
    """Censored block model sample.

    ``labels[e]`` is the 0/1 label of edge ``e`` of the base graph; every
    pair that is not an edge carries the absent label ``'*'``.
    """

    graph: Graph = field(repr=False)
    labels: np.ndarray
    q1: float
    q2: float

    def __post_init__(self):
        object.__setattr__(self, "labels", _frozen_bits(self.labels, self.graph.m, "labels"))

    def label(self, i: int, j: int):
        try:
            return int(self.labels[self.graph.edge_index(i, j)])
        except KeyError:
            return "*"

    def to_measurements(self, atol: float = 1e-12) -> CensoredMeasurements:
        """Read the labels as parity measurements; needs ``q1 == 1 - q2``."""
        if abs(self.q1 + self.q2 - 1.0) > atol:
            raise ValueError("only the symmetric case q1 = 1 - q2 maps to parity measurements")
        return CensoredMeasurements(self.graph, self.labels)


def _check_eps(eps: float) -> None:
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"noise level must lie in [0, 1/2], got {eps}")


def noise_from_uniforms(u, eps: float) -> NoisePattern:
    """Threshold uniforms at ``eps``; larger eps flips a superset of edges."""
    _check_eps(eps)
    return NoisePattern((np.asarray(u) < eps).astype(np.uint8))


def synthesize(g: Graph, x, eps: float, rng) -> tuple[CensoredMeasurements, NoisePattern]:
    """Draw ``y = B_G x ^ z`` with ``z`` i.i.d. Bernoulli(eps).

    One uniform is drawn per edge and thresholded at ``eps``, so the same
    stream at two noise levels gives nested noise supports.
    """
    _check_eps(eps)
    x = as_assignment(x, g.n)
    noise = noise_from_uniforms(as_generator(rng).random(g.m), eps)
    return CensoredMeasurements(g, edge_parities(g, x) ^ noise.z), noise


def censored_block_sample(g: Graph, x, q1: float, q2: float, rng) -> TernaryLabels:
    """Label each base-graph edge 1 w.p. q1 (same side) or q2 (opposite sides)."""
    for q in (q1, q2):
        if not 0.0 <= q <= 1.0:
            raise ValueError("q1 and q2 must lie in [0, 1]")
    cross = edge_parities(g, x).astype(bool)
    prob = np.where(cross, q2, q1)
    labels = (as_generator(rng).random(g.m) < prob).astype(np.uint8)
    return TernaryLabels(g, labels, float(q1), float(q2))


def _check_aligned(g: Graph, meas: CensoredMeasurements) -> None:
    if meas.graph is not g and meas.graph != g:
        raise ValueError("measurements belong to a different graph")


def signed_weight_matrix(g: Graph, meas: CensoredMeasurements) -> SparseSymmetric:
    """``W[i, j] = (-1)**y_ij`` on edges, zero elsewhere."""
    _check_aligned(g, meas)
    return SparseSymmetric(g.adjacency_matrix(meas.signs))


def error_subgraph(g: Graph, meas: CensoredMeasurements, candidate) -> np.ndarray:
    """Boolean edge mask of measurements that disagree with ``candidate``."""
    _check_aligned(g, meas)
    return (meas.y != edge_parities(g, candidate))


def certificate_matrix(g: Graph, meas: CensoredMeasurements, candidate) -> SparseSymmetric:
    """``L_G - 2 L_H`` for the error subgraph H of ``candidate``.

    Written as a Laplacian with edge weights ``+1`` (agreeing) and ``-1``
    (disagreeing), so every row sums to zero exactly.
    """
    h = error_subgraph(g, meas, candidate)
    return g.laplacian(1.0 - 2.0 * h)


def gauge_transform(g: Graph, meas: CensoredMeasurements, s) -> CensoredMeasurements:
    """``y ^ B_G s``: relabel by flipping every vertex in ``s``."""
    _check_aligned(g, meas)
    return CensoredMeasurements(g, meas.y ^ edge_parities(g, s))


# ---------------------------------------------------------------------------
# measurement files
# ---------------------------------------------------------------------------


def parse_measurements(text: str, g: Graph) -> CensoredMeasurements:
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise GraphFormatError("missing 'n <N> m <M>' header") from None
    parts = header.split()
    if len(parts) != 4 or parts[0] != "n" or parts[2] != "m":
        raise GraphFormatError(f"line {lineno}: expected 'n <N> m <M>', got {header!r}")
    try:
        n, m = int(parts[1]), int(parts[3])
    except ValueError:
        raise GraphFormatError(f"line {lineno}: bad header {header!r}") from None
    if n != g.n or m != g.m:
        raise GraphFormatError(f"header n={n} m={m} does not match graph n={g.n} m={g.m}")
    y = []
    for k, (lineno, line) in enumerate(lines):
        parts = line.split()
        if len(parts) != 3:
            raise GraphFormatError(f"line {lineno}: expected 'u v y', got {line!r}")
        try:
            u, v, bit = (int(t) for t in parts)
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer field in {line!r}") from None
        if k >= g.m:
            raise GraphFormatError(f"line {lineno}: more than {g.m} measurements")
        if (u, v) != tuple(g.edges[k]):
            raise GraphFormatError(
                f"line {lineno}: edge ({u}, {v}) out of canonical order, expected {tuple(g.edges[k].tolist())}"
            )
        if bit not in (0, 1):
            raise GraphFormatError(f"line {lineno}: measurement must be 0 or 1")
        y.append(bit)
    if len(y) != g.m:
        raise GraphFormatError(f"expected {g.m} measurements, found {len(y)}")
    return CensoredMeasurements(g, np.array(y, dtype=np.uint8))


def format_measurements(meas: CensoredMeasurements) -> str:
    g = meas.graph
    out = [f"n {g.n} m {g.m}"]
    out.extend(f"{u} {v} {b}" for (u, v), b in zip(g.edges.tolist(), meas.y.tolist()))
    return "\n".join(out) + "\n"


def load_measurements(path: str | os.PathLike, g: Graph) -> CensoredMeasurements:
    with open(path, encoding="utf-8") as fh:
        return parse_measurements(fh.read(), g)


def save_measurements(meas: CensoredMeasurements, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_measurements(meas))
