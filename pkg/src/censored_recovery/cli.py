"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 input/format error, 3 computation
error (non-convergence or a size cap).
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import thresholds as th
from .decoders import (
    SdpConfig,
    certificate_check,
    ml_bruteforce,
    sdp_decode,
    spectral_decode,
    two_path_vote,
)
from .experiments import (
    DECODER_NAMES,
    GraphSpec,
    TrialConfig,
    figure_preset,
    format_csv,
    format_svg,
    run_sweep,
)
from .graph import (
    GraphFormatError,
    cheeger_constant,
    format_graph,
    gen_erdos_renyi,
    gen_random_regular,
    is_connected,
    load_graph,
    spectral_lambdas,
)
from .measurement import as_assignment, format_measurements, load_measurements, synthesize
from .numerics import CapExceeded, ConvergenceError, split_stream

USAGE, INPUT, COMPUTE = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE)


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t]


def _ints(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ":" in part:
            a, b, *step = (int(t) for t in part.split(":"))
            out.extend(range(a, b + 1, step[0] if step else 1))
        elif part:
            out.append(int(part))
    return out


def _bits(text: str) -> np.ndarray:
    if not text or set(text) - {"0", "1"}:
        raise UsageError(f"expected a bit string, got {text!r}")
    return as_assignment([int(c) for c in text])


def _write(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit(args, payload: dict) -> None:
    if args.format == "json":
        _write(args, json.dumps(payload, indent=2, sort_keys=False) + "\n")
    else:
        width = max((len(k) for k in payload), default=0)
        lines = []
        for key, val in payload.items():
            if isinstance(val, dict):
                val = " ".join(f"{k}={v!r}" for k, v in val.items())
            elif isinstance(val, float):
                val = repr(val)
            lines.append(f"{key:<{width}}  {val}")
        _write(args, "\n".join(lines) + "\n")


def _sdp_config(args) -> SdpConfig:
    return SdpConfig(rank=args.rank, max_iter=args.max_iters, grad_tol=args.tol,
                     rng=split_stream(args.seed, 0))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_gen(args):
    stream = split_stream(args.seed, 0)
    if args.family == "er":
        if args.n is None or args.p is None:
            raise UsageError("gen er needs --n and --p")
        g = gen_erdos_renyi(args.n, args.p, stream)
    else:
        if args.n is None or args.d is None:
            raise UsageError("gen regular needs --n and --d")
        g = gen_random_regular(args.n, args.d, stream)
    _write(args, format_graph(g))


def cmd_synth(args):
    g = load_graph(args.graph)
    if args.truth == "random":
        x = split_stream(args.seed, 1).generator().integers(0, 2, g.n, dtype=np.uint8)
    elif args.truth == "zero":
        x = np.zeros(g.n, dtype=np.uint8)
    else:
        x = _bits(args.truth)
        if x.size != g.n:
            raise UsageError(f"truth has {x.size} bits, graph has {g.n} vertices")
    meas, _ = synthesize(g, x, args.eps, split_stream(args.seed, 2))
    _write(args, format_measurements(meas))
    if args.truth_out:
        with open(args.truth_out, "w", encoding="utf-8") as fh:
            fh.write("".join(str(int(b)) for b in x) + "\n")


def cmd_decode(args):
    g = load_graph(args.graph)
    meas = load_measurements(args.meas, g)
    if args.alg == "ml":
        res = ml_bruteforce(g, meas)
    elif args.alg == "sdp":
        res = sdp_decode(g, meas, _sdp_config(args))
    elif args.alg == "spectral":
        res = spectral_decode(g, meas)
    else:
        res = two_path_vote(g, meas, args.center)
    if args.certify:
        lam, ok = certificate_check(g, meas, res.estimate)
        from dataclasses import replace

        res = replace(res, lambda2=lam, certified=bool(ok))
    _emit(args, res.to_json())


def cmd_cert(args):
    g = load_graph(args.graph)
    meas = load_measurements(args.meas, g)
    cand = _bits(args.candidate) if args.candidate else np.zeros(g.n, dtype=np.uint8)
    if cand.size != g.n:
        raise UsageError(f"candidate has {cand.size} bits, graph has {g.n} vertices")
    lam, ok = certificate_check(g, meas, cand)
    _emit(args, {"candidate": "".join(map(str, cand.tolist())), "lambda2": lam, "certified": bool(ok)})


def cmd_cheeger(args):
    g = load_graph(args.graph)
    h = cheeger_constant(g, cap=args.cap)
    payload = {"n": g.n, "m": g.m, "h_G": h, "connected": is_connected(g)}
    deg = g.degrees
    if g.n > 1 and deg.min() == deg.max() and deg[0] > 0:
        lam2, _ = spectral_lambdas(g)
        lo, hi = th.cheeger_inequality_bounds(lam2)
        payload.update({"lambda2": lam2, "cheeger_lower": lo, "cheeger_upper": hi})
    _emit(args, payload)


def cmd_spectrum(args):
    g = load_graph(args.graph)
    lam2, lamn = spectral_lambdas(g)
    _emit(args, {"n": g.n, "d": int(g.degrees[0]), "lambda2": lam2, "lambda_n": lamn,
                 "spectral_gap": 1.0 - lam2})


def _need(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"--bound {args.bound} needs {' '.join(missing)}")


def cmd_threshold(args):
    b = args.bound
    if args.graph:
        g = load_graph(args.graph)
        args.n = args.n if args.n is not None else g.n
        args.min_deg = args.min_deg if args.min_deg is not None else g.min_degree
        if b == "cheeger" and args.h is None:
            args.h = cheeger_constant(g)
        if b == "sdp-regular" and args.lambda2 is None:
            args.lambda2, args.lambda_n = spectral_lambdas(g)
    delta = args.delta if args.delta is not None else 0.0
    if b == "necessary":
        _need(args, "n", "tau", "eps")
        rep = th.necessary_bound(args.n, args.tau, args.eps)
    elif b == "er":
        _need(args, "n", "eps")
        if args.d is None:
            _need(args, "p")
            args.d = (args.n - 1) * args.p
        rep = th.er_sufficient_check(args.n, args.d, args.eps)
    elif b == "cheeger":
        _need(args, "n", "min_deg", "h", "eps")
        rep = th.cheeger_sufficient_check(args.n, args.min_deg, args.h, args.eps)
    elif b == "sdp-er":
        _need(args, "eps")
        rep = th.sdp_er_bound(args.eps, delta)
    elif b == "sdp-regular":
        _need(args, "eps", "lambda2", "lambda_n")
        rep = th.sdp_regular_bound(args.eps, delta, args.lambda2, args.lambda_n)
    else:
        _need(args, "n", "p", "eps")
        rep = th.path_vote_check(args.n, args.p, args.eps, delta)
    _emit(args, rep.to_json())


def cmd_sweep(args):
    decoders = tuple(d for d in args.decoders.split(",") if d)
    configs = []
    for n in _ints(args.n):
        for eps in _floats(args.eps):
            if args.family == "er":
                for p in _floats(args.p):
                    spec = GraphSpec.er(n, p)
                    configs.append(TrialConfig(spec, eps, decoders, args.trials, args.seed,
                                               args.truth, sdp=_sdp_config(args)))
            else:
                spec = GraphSpec.regular(n, args.d)
                configs.append(TrialConfig(spec, eps, decoders, args.trials, args.seed,
                                           args.truth, sdp=_sdp_config(args)))
    result = run_sweep(configs, jobs=args.jobs)
    _write(args, format_csv(result))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_svg(result))


def cmd_figure(args):
    grid = _ints(args.n_grid) if args.n_grid else None
    result = figure_preset(args.variant, args.scale, grid, args.seed, args.jobs, args.output)
    if not args.output:
        sys.stdout.write(format_csv(result))
    for name, n in sorted(result.reference_lines.items()):
        print(f"reference line {name}: n = {n}", file=sys.stderr)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="censored-recovery",
                     description="Recover binary node labels from noisy censored edge parities.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, output=True, fmt=False, seed=False):
        if output:
            p.add_argument("-o", "--output", help="write to this path instead of stdout")
        if fmt:
            p.add_argument("--format", choices=("text", "json"), default="text")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen", help="generate a random graph")
    p.add_argument("family", choices=("er", "regular"))
    p.add_argument("--n", type=int)
    p.add_argument("--p", type=float)
    p.add_argument("--d", type=int)
    common(p, seed=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("synth", help="synthesize noisy measurements on a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--truth", default="random", help="'random', 'zero' or a bit string")
    p.add_argument("--truth-out", help="also write the ground truth bit string here")
    common(p, seed=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("decode", help="recover labels from measurements")
    p.add_argument("--graph", required=True)
    p.add_argument("--meas", required=True)
    p.add_argument("--alg", choices=("ml", "sdp", "spectral", "vote"), required=True)
    p.add_argument("--center", type=int)
    p.add_argument("--certify", action="store_true", help="also check the dual certificate of the estimate")
    _sdp_flags(p)
    common(p, fmt=True, seed=True)
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("cert", help="check the dual certificate of a candidate")
    p.add_argument("--graph", required=True)
    p.add_argument("--meas", required=True)
    p.add_argument("--candidate", help="bit string; all zeros by default")
    common(p, fmt=True)
    p.set_defaults(func=cmd_cert)

    p = sub.add_parser("cheeger", help="exact Cheeger constant by enumeration")
    p.add_argument("--graph", required=True)
    p.add_argument("--cap", type=int, default=22)
    common(p, fmt=True)
    p.set_defaults(func=cmd_cheeger)

    p = sub.add_parser("spectrum", help="lambda2 and lambda_n of a regular graph")
    p.add_argument("--graph", required=True)
    common(p, fmt=True)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("threshold", help="evaluate a recovery bound")
    p.add_argument("--bound", required=True,
                   choices=("necessary", "er", "cheeger", "sdp-er", "sdp-regular", "vote"))
    p.add_argument("--graph", help="take n, min degree, h_G or lambdas from this graph")
    for flag, typ in (("n", float), ("p", float), ("d", float), ("eps", float), ("tau", float),
                      ("delta", float), ("h", float), ("min-deg", float), ("lambda2", float),
                      ("lambda-n", float)):
        p.add_argument(f"--{flag}", type=typ)
    common(p, fmt=True)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("sweep", help="Monte-Carlo success ratios over a parameter grid")
    p.add_argument("--family", choices=("er", "regular"), default="er")
    p.add_argument("--n", required=True, help="comma list or a:b:step ranges")
    p.add_argument("--p", default="0.5", help="comma list")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--eps", required=True, help="comma list")
    p.add_argument("--decoders", default="cert", help=f"comma list from {','.join(DECODER_NAMES)}")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--truth", choices=("random", "zero"), default="random")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--svg", help="also write a plot here")
    _sdp_flags(p)
    common(p, seed=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="phase-transition figure presets")
    p.add_argument("--variant", choices=("top", "bottom"), default="top")
    p.add_argument("--scale", type=float, default=1.0, help="fraction of the preset trial count")
    p.add_argument("--n-grid", help="comma list or a:b:step ranges (default 20:500:20)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", help="directory for figure_<variant>.csv/.svg")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_figure)
    return parser


def _sdp_flags(p):
    p.add_argument("--rank", type=int)
    p.add_argument("--max-iters", type=int, default=20000)
    p.add_argument("--tol", type=float, default=1e-8)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except (GraphFormatError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return INPUT
    except (CapExceeded, ConvergenceError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return COMPUTE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
