# %% [markdown]
# # Measurements and decoders
#
# A small random graph, a hidden labelling, and noisy parities on the edges.
# Every decoder returns labels up to a global flip, so results are compared
# with `agreement_error`.

# %%
import numpy as np

from censored_recovery.decoders import (
    SdpConfig,
    agreement_error,
    ml_bruteforce,
    sdp_decode,
    spectral_decode,
    two_path_vote,
)
from censored_recovery.graph import gen_erdos_renyi, is_connected
from censored_recovery.measurement import synthesize
from censored_recovery.numerics import split_stream

g = gen_erdos_renyi(16, 0.5, split_stream(3, 0))
x = split_stream(3, 1).generator().integers(0, 2, g.n)
print(g.n, "vertices,", g.m, "edges, connected:", is_connected(g))

# %% [markdown]
# With noise level 0.1 each parity is flipped independently.  The noise draw
# is one uniform per edge, so re-running at another level reuses it.

# %%
meas, noise = synthesize(g, x, 0.1, split_stream(3, 2))
print("flipped edges:", noise.support.tolist())

# %%
results = [
    ml_bruteforce(g, meas),
    sdp_decode(g, meas, SdpConfig(rng=split_stream(3, 3))),
    spectral_decode(g, meas),
    two_path_vote(g, meas),
]
for res in results:
    print(f"{res.algorithm:9s} {res.bits}  error={agreement_error(res.estimate, x)}  objective={res.objective:.4f}")

# %% [markdown]
# The ML decoder also reports how many label classes reach the minimum cost.
# A tie means the data cannot single out the truth.

# %%
ml = results[0]
print("ML cost", ml.objective, "optimal classes", ml.num_optimal_classes)
