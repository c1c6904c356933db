# %% [markdown]
# # Phase transition of the certificate
#
# Fraction of trials on G(n, 0.75) with noise 0.35 in which the certificate
# for the true labelling is strictly positive.  The full preset uses 500
# trials per n; a reduced scale keeps this quick.  Pass `jobs` to use
# several processes; the CSV does not depend on it.

# %%
from censored_recovery.experiments import figure_preset, format_csv

result = figure_preset("top", scale=0.05, n_grid=range(20, 501, 40), seed=0, out_dir="figure_out")
print(result.reference_lines)
print(format_csv(result))

# %% [markdown]
# A coarse text rendering of the curve, with the two reference lines marked.

# %%
lines = result.reference_lines
for row in result.rows:
    mark = " ".join(k for k, n in lines.items() if abs(n - row.n) < 20)
    print(f"n={row.n:4d} {'#' * round(40 * row.ratio):40s} {row.ratio:.2f} {mark}")

# %% [markdown]
# Common random numbers make the certificate monotone in the noise level trial
# by trial: a larger noise level flips a superset of edges.

# %%
from censored_recovery.experiments import GraphSpec, TrialConfig, run_sweep

cfgs = [TrialConfig(GraphSpec.er(200, 0.75), eps, ("cert",), 40) for eps in (0.3, 0.35, 0.4)]
_, recs = run_sweep(cfgs, keep_records=True)
pairs = [(a.lambda2, b.lambda2) for lo, hi in zip(recs, recs[1:]) for a, b in zip(lo, hi)]
print("pairs:", len(pairs), "monotone:", all(b <= a + 1e-9 for a, b in pairs))
