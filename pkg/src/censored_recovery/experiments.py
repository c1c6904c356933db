"""Monte-Carlo trials, parameter sweeps and the phase-transition figure.

Trial ``i`` of a configuration draws all of its randomness from
``split_stream(seed, i)`` refined by a key of the graph family, never by the
noise level.  Two configurations that differ only in ``eps`` therefore see the
same graph, the same ground truth and the same per-edge uniforms, and the
larger noise level flips a superset of edges.
"""
from __future__ import annotations

import csv
import io
import math
import os
import zlib
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from xml.sax.saxutils import escape, quoteattr

import numpy as np
from scipy.optimize import brentq
from scipy.stats import binomtest

from .decoders import (
    SdpConfig,
    agreement_error,
    certificate_check,
    local_failure_witnesses,
    ml_bruteforce,
    sdp_decode,
    spectral_decode,
    two_path_vote,
)
from .graph import Graph, gen_erdos_renyi, gen_random_regular, is_connected, load_graph
from .measurement import synthesize
from .numerics import split_stream
from .thresholds import sdp_er_bound

__all__ = [
    "GraphSpec",
    "TrialConfig",
    "TrialRecord",
    "SweepRow",
    "SweepResult",
    "run_trial",
    "run_sweep",
    "wilson_interval",
    "threshold_n",
    "figure_preset",
    "FIGURE_PRESETS",
    "emit_csv",
    "emit_svg",
    "read_csv",
    "CSV_COLUMNS",
]

DECODER_NAMES = ("ml", "sdp", "spectral", "vote", "cert")
CSV_COLUMNS = ["variant", "n", "p", "eps", "decoder", "trials", "successes", "ratio", "ci_lo", "ci_hi", "seed"]

# stream children inside one trial
_GRAPH, _TRUTH, _NOISE, _SDP = range(4)


@dataclass(frozen=True)
class GraphSpec:
    """``er`` (n, p), ``regular`` (n, d) or ``file`` (path)."""

    family: str
    n: int = 0
    p: float = 0.0
    d: int = 0
    path: str = ""

    def __post_init__(self):
        if self.family not in ("er", "regular", "file"):
            raise ValueError(f"unknown graph family {self.family!r}")

    @classmethod
    def er(cls, n: int, p: float) -> "GraphSpec":
        return cls("er", n=n, p=p)

    @classmethod
    def regular(cls, n: int, d: int) -> "GraphSpec":
        return cls("regular", n=n, d=d)

    @classmethod
    def file(cls, path: str) -> "GraphSpec":
        return cls("file", n=load_graph(path).n, path=str(path))

    def key(self) -> int:
        """Stable 32-bit key; independent of the noise level."""
        text = f"{self.family}:{self.n}:{self.p!r}:{self.d}:{self.path}"
        return zlib.crc32(text.encode("utf-8"))

    @property
    def density(self) -> float:
        """Edge probability written to the ``p`` column of sweep CSVs."""
        if self.family == "er":
            return self.p
        if self.family == "regular":
            return self.d / (self.n - 1) if self.n > 1 else 0.0
        g = _cached_file_graph(self.path)
        return 2.0 * g.m / (g.n * (g.n - 1)) if g.n > 1 else 0.0

    def build(self, stream) -> Graph:
        if self.family == "er":
            return gen_erdos_renyi(self.n, self.p, stream)
        if self.family == "regular":
            return gen_random_regular(self.n, self.d, stream)
        return _cached_file_graph(self.path)


@lru_cache(maxsize=8)
def _cached_file_graph(path: str) -> Graph:
    return load_graph(path)


@dataclass(frozen=True)
class TrialConfig:
    graph: GraphSpec
    eps: float
    decoders: tuple[str, ...] = ("cert",)
    trials: int = 1
    seed: int = 0
    truth: str = "random"
    variant: str = ""
    sdp: SdpConfig | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trial count must be at least 1")
        if not 0.0 <= self.eps <= 0.5:
            raise ValueError("eps must lie in [0, 1/2]")
        if self.truth not in ("random", "zero"):
            raise ValueError("truth policy must be 'random' or 'zero'")
        bad = set(self.decoders) - set(DECODER_NAMES)
        if bad:
            raise ValueError(f"unknown decoders {sorted(bad)}")
        object.__setattr__(self, "decoders", tuple(self.decoders))

    @property
    def label(self) -> str:
        return self.variant or self.graph.family


@dataclass(frozen=True)
class TrialRecord:
    index: int
    seed: int
    success: dict
    error: dict
    lambda2: float | None
    certified: bool | None
    ml_cost: int | None
    ml_tie: bool | None
    m: int
    min_degree: int
    avg_degree: float
    connected: bool
    strict_witnesses: int


def run_trial(cfg: TrialConfig, idx: int) -> TrialRecord:
    """Generate one instance and run every selected decoder on it.

    Success means agreement error 0 against the ground truth; the ``cert``
    entry is the strict dual-certificate verdict for the ground truth.
    """
    stream = split_stream(cfg.seed, idx).child(cfg.graph.key())
    g = cfg.graph.build(stream.child(_GRAPH))
    if cfg.truth == "zero":
        x = np.zeros(g.n, dtype=np.uint8)
    else:
        x = stream.child(_TRUTH).generator().integers(0, 2, g.n, dtype=np.uint8)
    meas, noise = synthesize(g, x, cfg.eps, stream.child(_NOISE))

    success, error = {}, {}
    lam = cert = cost = tie = None
    for name in cfg.decoders:
        if name == "cert":
            lam, cert = certificate_check(g, meas, x)
            success[name] = bool(cert)
            error[name] = 0 if cert else -1
            continue
        if name == "ml":
            res = ml_bruteforce(g, meas)
            cost, tie = int(res.objective), bool(res.tie)
        elif name == "sdp":
            base = cfg.sdp or SdpConfig()
            res = sdp_decode(g, meas, replace(base, rng=stream.child(_SDP)))
        elif name == "spectral":
            res = spectral_decode(g, meas)
        else:
            res = two_path_vote(g, meas)
        err = agreement_error(res.estimate, x)
        error[name] = err
        success[name] = err == 0

    strict, _ = local_failure_witnesses(g, noise)
    return TrialRecord(
        index=idx,
        seed=cfg.seed,
        success=success,
        error=error,
        lambda2=None if lam is None else float(lam),
        certified=cert,
        ml_cost=cost,
        ml_tie=tie,
        m=g.m,
        min_degree=g.min_degree,
        avg_degree=g.average_degree,
        connected=is_connected(g),
        strict_witnesses=int(strict.size),
    )


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


@dataclass(frozen=True)
class SweepRow:
    variant: str
    n: int
    p: float
    eps: float
    decoder: str
    trials: int
    successes: int
    ratio: float
    ci_lo: float
    ci_hi: float
    seed: int


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    # name -> n of the vertical reference lines drawn by emit_svg
    reference_lines: dict[str, float] = field(default_factory=dict)

    @property
    def n_values(self) -> list[int]:
        return sorted({r.n for r in self.rows})

    @property
    def p_values(self) -> list[float]:
        return sorted({r.p for r in self.rows})

    @property
    def eps_values(self) -> list[float]:
        return sorted({r.eps for r in self.rows})

    def select(self, **match) -> list[SweepRow]:
        return [r for r in self.rows if all(getattr(r, k) == v for k, v in match.items())]

    def row(self, **match) -> SweepRow:
        hits = self.select(**match)
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} rows match {match}")
        return hits[0]


def _run_block(cfg: TrialConfig, start: int, stop: int) -> list[TrialRecord]:
    return [run_trial(cfg, i) for i in range(start, stop)]


def _blocks(configs, block_size):
    for ci, cfg in enumerate(configs):
        for start in range(0, cfg.trials, block_size):
            yield ci, cfg, start, min(cfg.trials, start + block_size)


def run_sweep(configs, jobs: int = 1, block_size: int = 25, keep_records: bool = False):
    """Run every trial of every configuration and aggregate success counts.

    Trials are independent and carry their own streams, so the aggregate does
    not depend on ``jobs`` or on scheduling.  With ``keep_records`` the
    per-trial records are returned too, as ``(result, records)`` with
    ``records[i]`` ordered by trial index for ``configs[i]``.
    """
    configs = list(configs)
    counts = defaultdict(int)
    records: dict[int, list[TrialRecord]] = defaultdict(list)
    blocks = list(_blocks(configs, block_size))

    def absorb(ci, recs):
        for rec in recs:
            for name, ok in rec.success.items():
                counts[ci, name] += int(ok)
        if keep_records:
            records[ci].extend(recs)

    if jobs <= 1:
        for ci, cfg, a, b in blocks:
            absorb(ci, _run_block(cfg, a, b))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [(ci, pool.submit(_run_block, cfg, a, b)) for ci, cfg, a, b in blocks]
            for ci, fut in futures:
                absorb(ci, fut.result())

    rows = []
    for ci, cfg in enumerate(configs):
        for name in cfg.decoders:
            k = counts[ci, name]
            lo, hi = wilson_interval(k, cfg.trials)
            rows.append(
                SweepRow(cfg.label, cfg.graph.n, cfg.graph.density, cfg.eps, name,
                         cfg.trials, k, k / cfg.trials, lo, hi, cfg.seed)
            )
    result = SweepResult(rows)
    if keep_records:
        ordered = [sorted(records[ci], key=lambda r: r.index) for ci in range(len(configs))]
        return result, ordered
    return result


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------


FIGURE_PRESETS = {
    "top": {"p": 0.75, "eps": 0.35, "trials": 500},
    "bottom": {"p": 0.85, "eps": 0.4, "trials": 100},
}
DEFAULT_N_GRID = tuple(range(20, 501, 20))


def threshold_n(p: float, coeff: float) -> int:
    """Smallest integer n past the turning point with ``p n >= coeff log n``."""
    if p <= 0:
        raise ValueError("p must be positive")
    f = lambda n: p * n - coeff * math.log(n)
    lo = max(3.0, coeff / p)
    if f(lo) >= 0:
        return math.ceil(lo)
    hi = 2.0 * lo
    while f(hi) < 0:
        hi *= 2.0
    n = math.ceil(brentq(f, lo, hi))
    while f(n) < 0:
        n += 1
    return n


def figure_reference_lines(p: float, eps: float) -> dict[str, int]:
    """n where ``d = p n`` meets the ML-sufficient and SDP-sufficient bounds.

    The ML line uses the large-noise form ``2 / (1 - 2 eps)^2``; the SDP line
    uses the full G(n, p) guarantee at ``delta = 0``.
    """
    lines = {}
    if eps < 0.5:
        lines["it"] = threshold_n(p, 2.0 / (1.0 - 2.0 * eps) ** 2)
        lines["sdp"] = threshold_n(p, sdp_er_bound(eps, 0.0).required)
    return lines


def figure_configs(variant: str, scale: float = 1.0, n_grid=None, seed: int = 0,
                   decoders=("cert",)) -> list[TrialConfig]:
    if variant not in FIGURE_PRESETS:
        raise ValueError(f"variant must be one of {sorted(FIGURE_PRESETS)}")
    if not 0.0 < scale <= 1.0:
        raise ValueError("scale must lie in (0, 1]")
    pre = FIGURE_PRESETS[variant]
    trials = max(1, round(pre["trials"] * scale))
    grid = DEFAULT_N_GRID if n_grid is None else tuple(n_grid)
    return [
        TrialConfig(GraphSpec.er(n, pre["p"]), pre["eps"], tuple(decoders), trials, seed, variant=variant)
        for n in grid
    ]


def figure_preset(variant: str = "top", scale: float = 1.0, n_grid=None, seed: int = 0,
                  jobs: int = 1, out_dir: str | os.PathLike | None = None) -> SweepResult:
    """Fraction of trials with a strictly PSD certificate, against n.

    Writes ``figure_<variant>.csv`` and ``figure_<variant>.svg`` into
    ``out_dir`` when given.
    """
    pre = FIGURE_PRESETS.get(variant)
    configs = figure_configs(variant, scale, n_grid, seed)
    result = run_sweep(configs, jobs=jobs)
    result.reference_lines = figure_reference_lines(pre["p"], pre["eps"])
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        emit_csv(result, os.path.join(out_dir, f"figure_{variant}.csv"))
        emit_svg(result, os.path.join(out_dir, f"figure_{variant}.svg"),
                 title=f"p = {pre['p']}, eps = {pre['eps']}")
    return result


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def format_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in result.rows:
        writer.writerow([r.variant, r.n, repr(r.p), repr(r.eps), r.decoder, r.trials,
                         r.successes, repr(r.ratio), repr(r.ci_lo), repr(r.ci_hi), r.seed])
    return buf.getvalue()


def parse_csv(text: str) -> SweepResult:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for rec in reader:
        if not rec:
            continue
        v, n, p, eps, dec, trials, succ, ratio, lo, hi, seed = rec
        rows.append(SweepRow(v, int(n), float(p), float(eps), dec, int(trials), int(succ),
                             float(ratio), float(lo), float(hi), int(seed)))
    return SweepResult(rows)


def emit_csv(result: SweepResult, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(result))


def read_csv(path) -> SweepResult:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_csv(fh.read())


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def format_svg(result: SweepResult, title: str = "", width: int = 640, height: int = 400) -> str:
    """Success ratio against n, one polyline per (variant, p, eps, decoder)."""
    left, right, top, bottom = 60, 20, 30, 50
    series = defaultdict(list)
    for r in result.rows:
        series[r.variant, r.p, r.eps, r.decoder].append((r.n, r.ratio))
    xs = [r.n for r in result.rows] + list(result.reference_lines.values())
    x_lo, x_hi = (min(xs), max(xs)) if xs else (0, 1)
    if x_hi == x_lo:
        x_hi = x_lo + 1
    pw, ph = width - left - right, height - top - bottom

    def sx(n):
        return left + (n - x_lo) / (x_hi - x_lo) * pw

    def sy(r):
        return top + (1.0 - r) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line class="axis" x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        out.append(f'<text x="{left - 8}" y="{sy(frac) + 4:.1f}" font-size="11" text-anchor="end">{frac:g}</text>')
    for n in (x_lo, x_hi):
        out.append(f'<text x="{sx(n):.1f}" y="{top + ph + 16}" font-size="11" text-anchor="middle">{n:g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 12}" font-size="12" text-anchor="middle">n</text>')
    if title:
        out.append(f'<text x="{left + pw / 2:.1f}" y="18" font-size="13" text-anchor="middle">{escape(title)}</text>')
    for i, (key, pts) in enumerate(sorted(series.items())):
        pts.sort()
        coords = " ".join(f"{sx(n):.2f},{sy(r):.2f}" for n, r in pts)
        label = quoteattr(f"{key[0]} {key[3]}")
        out.append(f'<polyline class="series" data-label={label} fill="none" '
                   f'stroke="{_PALETTE[i % len(_PALETTE)]}" stroke-width="1.5" points="{coords}"/>')
    for name, n in sorted(result.reference_lines.items()):
        x = sx(n)
        out.append(f'<line class="threshold" data-label="{name}" x1="{x:.2f}" y1="{top}" '
                   f'x2="{x:.2f}" y2="{top + ph}" stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{x + 3:.2f}" y="{top + 12}" font-size="10">{name} n={n:g}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(result: SweepResult, path, title: str = "") -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_svg(result, title))
