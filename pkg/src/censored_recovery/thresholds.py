"""Closed-form recovery thresholds and the information measures they use.

All logarithms are natural.  Every bound is evaluated from its explicit
leading terms; the vanishing remainders of the asymptotic statements are
dropped.  Each report carries the exact displayed expression in
``required`` and the ``eps -> 1/2`` form in ``asymptotic``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

__all__ = [
    "ThresholdReport",
    "kl_half",
    "binary_entropy",
    "necessary_bound",
    "er_sufficient_check",
    "cheeger_sufficient_check",
    "sdp_er_bound",
    "sdp_regular_bound",
    "path_vote_check",
    "cheeger_inequality_bounds",
]


@dataclass
class ThresholdReport:
    """Result of one bound evaluation.

    ``required`` is the bound on ``d / log n`` (``None`` for pure
    predicates); ``asymptotic`` is the ``eps -> 1/2`` form of the same bound.
    """

    bound_name: str
    required: float | None
    verdict: bool | None = None
    asymptotic: float | None = None
    inputs: dict = field(default_factory=dict)
    notes: str = ""

    def to_json(self) -> dict:
        return asdict(self)


def kl_half(eps: float) -> float:
    """D(1/2 || eps) in nats, ``-log(4 eps (1 - eps)) / 2``; inf at eps = 0."""
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"eps must lie in [0, 1/2], got {eps}")
    if eps == 0.0:
        return math.inf
    if eps < 0.25:
        return -0.5 * math.log(4.0 * eps * (1.0 - eps))
    # 1 - 2 eps is exact here, and log1p keeps relative precision as eps -> 1/2
    return -0.5 * math.log1p(-((1.0 - 2.0 * eps) ** 2))


def binary_entropy(eps: float) -> float:
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    if eps in (0.0, 1.0):
        return 0.0
    return -eps * math.log(eps) - (1.0 - eps) * math.log1p(-eps)


def _check_eps_open(eps: float) -> None:
    if not 0.0 <= eps < 0.5:
        raise ValueError(f"eps must lie in [0, 1/2), got {eps}")


def necessary_bound(n: float, tau: float, eps: float) -> ThresholdReport:
    """Smallest average degree for which exact recovery is not ruled out.

    ``d_min = [(1 - 3 tau / 2) / D(1/2||eps) - 1 / log n] * log n``; the
    lower bound holds for graphs with ``d <= n**tau``.  A nonpositive value
    means the bound is vacuous.
    """
    if not 0.0 <= tau < 2.0 / 3.0:
        raise ValueError("tau must lie in [0, 2/3)")
    if n < 3:
        raise ValueError("n must be at least 3")
    log_n = math.log(n)
    coeff = 1.0 - 1.5 * tau
    kl = kl_half(eps)
    ratio = coeff / kl - 1.0 / log_n if kl > 0 else math.inf
    d_min = ratio * log_n
    asym = 2.0 * coeff / (1.0 - 2.0 * eps) ** 2 if eps < 0.5 else math.inf
    return ThresholdReport(
        "necessary",
        required=ratio,
        asymptotic=asym,
        inputs={"n": n, "tau": tau, "eps": eps, "d_max": n**tau, "d_min": d_min},
        verdict=None,
        notes="vacuous" if d_min <= 0 else "",
    )


def er_sufficient_check(n: float, d: float, eps: float) -> ThresholdReport:
    """ML sufficient condition for G(n, p) with average degree d.

    Verdict is ``d / log n >= 1 / ((1 - sqrt(2 log n / d)) D(1/2||eps))``.
    Requires ``d > 2 log n``.
    """
    log_n = math.log(n)
    if d <= 2.0 * log_n:
        raise ValueError(f"need d > 2 log n = {2 * log_n:.6g}, got d = {d}")
    kl = kl_half(eps)
    shrink = 1.0 - math.sqrt(2.0 * log_n / d)
    required = 1.0 / (shrink * kl) if kl > 0 else math.inf
    asym = 2.0 / (1.0 - 2.0 * eps) ** 2 if eps < 0.5 else math.inf
    return ThresholdReport(
        "er",
        required=required,
        verdict=d / log_n >= required,
        asymptotic=asym,
        inputs={"n": n, "d": d, "eps": eps},
    )


def cheeger_sufficient_check(n: float, min_deg: float, h_g: float, eps: float) -> ThresholdReport:
    """ML sufficient condition from the Cheeger constant.

    Verdict is ``min_deg / log n > 1 / (h_G D(1/2||eps))`` (strict); pass
    the degree of a d-regular graph as ``min_deg`` for the regular form.
    """
    if h_g <= 0:
        raise ValueError("Cheeger constant must be positive")
    if not 0.0 < eps <= 0.5:
        raise ValueError("eps must lie in (0, 1/2]")
    log_n = math.log(n)
    kl = kl_half(eps)
    required = 1.0 / (h_g * kl) if kl > 0 else math.inf
    asym = 2.0 / (h_g * (1.0 - 2.0 * eps) ** 2) if eps < 0.5 else math.inf
    return ThresholdReport(
        "cheeger",
        required=required,
        verdict=min_deg / log_n > required,
        asymptotic=asym,
        inputs={"n": n, "min_deg": min_deg, "h_G": h_g, "eps": eps},
    )


def sdp_er_bound(eps: float, delta: float = 0.0) -> ThresholdReport:
    """SDP guarantee on G(n, p): ``(1+delta) (4/(1-2eps)^2 + 4/(3(1-2eps)))``.

    Meeting it gives exact recovery with probability at least
    ``1 - n**-delta``.
    """
    _check_eps_open(eps)
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    s = 1.0 - 2.0 * eps
    return ThresholdReport(
        "sdp-er",
        required=(1.0 + delta) * (4.0 / s**2 + 4.0 / (3.0 * s)),
        asymptotic=4.0 * (1.0 + delta) / s**2,
        inputs={"eps": eps, "delta": delta},
    )


def sdp_regular_bound(eps: float, delta: float, lambda2: float, lambda_n: float) -> ThresholdReport:
    """SDP guarantee on a d-regular graph with normalized eigenvalues.

    Meeting it gives exact recovery with probability at least
    ``1 - n**-delta``.  ``inputs["expander_form"]`` is the limit for
    ``lambda2, lambda_n -> 0``.
    """
    _check_eps_open(eps)
    if lambda2 >= 1:
        raise ValueError("lambda2 must be below 1")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    s = 1.0 - 2.0 * eps
    gap = 1.0 - lambda2
    spread = 1.0 + abs(lambda_n)
    front = 4.0 * spread / gap**2 * (1.0 + delta)
    bracket = 1.0 / s**2 + gap / (3.0 * s * spread) + gap / (3.0 * spread) - 1.0
    expander = 4.0 * (1.0 + delta) / s**2
    return ThresholdReport(
        "sdp-regular",
        required=front * bracket,
        asymptotic=front / s**2,
        inputs={"eps": eps, "delta": delta, "lambda2": lambda2, "lambda_n": lambda_n,
                "expander_form": expander},
    )


def path_vote_check(n: float, p: float, eps: float, delta: float = 0.0) -> ThresholdReport:
    """Sufficient condition for 2-path majority voting on G(n, p).

    Verdict is ``(n-2) p^2 s^4 / 2 >= (1+delta) log n (1 + (1+p^2 s^2) s^2 / 3)``
    with ``s = 1 - 2 eps``.  ``required`` holds the right-hand side and
    ``asymptotic`` the large-n requirement on ``d / log n``,
    ``sqrt(2(1+delta)) / s^2 * sqrt(n / log n)``.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    s = 1.0 - 2.0 * eps
    log_n = math.log(n)
    lhs = (n - 2) * p**2 * s**4 / 2.0
    rhs = (1.0 + delta) * log_n * (1.0 + (1.0 + p**2 * s**2) * s**2 / 3.0)
    asym = math.sqrt(2.0 * (1.0 + delta)) / s**2 * math.sqrt(n / log_n) if s > 0 else math.inf
    return ThresholdReport(
        "vote",
        required=rhs,
        verdict=lhs >= rhs and lhs > 0,
        asymptotic=asym,
        inputs={"n": n, "p": p, "eps": eps, "delta": delta, "lhs": lhs},
    )


def cheeger_inequality_bounds(lambda2: float) -> tuple[float, float]:
    """``((1 - lambda2) / 2, sqrt(2 (1 - lambda2)))`` for a regular graph."""
    if lambda2 > 1:
        raise ValueError("lambda2 cannot exceed 1")
    gap = 1.0 - lambda2
    return gap / 2.0, math.sqrt(2.0 * gap)
