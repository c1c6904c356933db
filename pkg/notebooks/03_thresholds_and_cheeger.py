# %% [markdown]
# # Recovery thresholds and graph expansion
#
# Bounds are expressed as a required average degree per `log n`.  Each report
# carries the full expression and its large-noise form.

# %%
import math

from censored_recovery.graph import cheeger_constant, complete_graph, cycle_graph, gen_random_regular, spectral_lambdas
from censored_recovery.numerics import split_stream
from censored_recovery import thresholds as th

for eps in (0.1, 0.25, 0.35, 0.45):
    nec = th.necessary_bound(1e4, 0.0, eps)
    sdp = th.sdp_er_bound(eps)
    print(f"eps={eps:.2f}  kl={th.kl_half(eps):.5f}  necessary~{nec.asymptotic:8.2f}  "
          f"sdp={sdp.required:8.2f} (large-noise {sdp.asymptotic:8.2f})")

# %% [markdown]
# Sufficient conditions on G(n, p) for the exhaustive decoder and for 2-path
# voting.

# %%
print(th.er_sufficient_check(1000, 300, 0.3))
print(th.path_vote_check(500, 0.5, 0.1))

# %% [markdown]
# For regular graphs the Cheeger constant is sandwiched by the normalized
# second eigenvalue.  Small graphs allow exact enumeration.

# %%
for name, g in [("K4", complete_graph(4)), ("C8", cycle_graph(8)),
                ("3-regular n=14", gen_random_regular(14, 3, split_stream(1, 0)))]:
    lam2, lamn = spectral_lambdas(g)
    lo, hi = th.cheeger_inequality_bounds(lam2)
    h = cheeger_constant(g)
    print(f"{name:15s} lambda2={lam2:+.4f} lambda_n={lamn:+.4f}  {lo:.4f} <= h={h:.4f} <= {hi:.4f}")
    d = int(g.degrees[0])
    print("   SDP requirement", round(th.sdp_regular_bound(0.2, 0.0, lam2, lamn).required, 3),
          " Cheeger ML check at eps=0.01:", th.cheeger_sufficient_check(g.n, d, h, 0.01).verdict)
