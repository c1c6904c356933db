# %% [markdown]
# # The dual certificate
#
# For a candidate labelling, `H` is the set of edges whose parity disagrees
# with the measurement.  The matrix `L_G - 2 L_H` always kills the all-ones
# vector; when its next eigenvalue is positive the candidate's rank-one
# matrix is the unique optimum of the semidefinite relaxation.

# %%
import numpy as np

from censored_recovery.decoders import SdpConfig, certificate_check, ml_bruteforce, sdp_decode
from censored_recovery.graph import Graph, complete_graph, gen_erdos_renyi
from censored_recovery.measurement import CensoredMeasurements, certificate_matrix, synthesize
from censored_recovery.numerics import eig_dense, split_stream

# %% [markdown]
# Two hand-checkable cases.  A triangle with one bad edge has spectrum
# {-1, 0, 3}; K4 with one bad edge sits exactly on the PSD boundary.

# %%
tri = complete_graph(3)
meas = CensoredMeasurements(tri, [1, 0, 0])
print(certificate_matrix(tri, meas, [0, 0, 0]).toarray())
print("spectrum", eig_dense(certificate_matrix(tri, meas, [0, 0, 0])).round(12))
print("certificate", certificate_check(tri, meas, [0, 0, 0]))

k4 = complete_graph(4)
y = np.zeros(6, dtype=int)
y[k4.edge_index(2, 3)] = 1
print("K4 one flip", certificate_check(k4, CensoredMeasurements(k4, y), [0, 0, 0, 0]))

# %% [markdown]
# On random instances a strict certificate forces the SDP solution to be
# rank one, so its objective equals `2 (m - 2 * ML cost)`.

# %%
for seed in range(8):
    g = gen_erdos_renyi(12, 0.7, split_stream(seed, 0))
    x = split_stream(seed, 1).generator().integers(0, 2, g.n)
    meas, _ = synthesize(g, x, 0.1, split_stream(seed, 2))
    lam, ok = certificate_check(g, meas, x)
    sdp = sdp_decode(g, meas, SdpConfig(rng=split_stream(seed, 3)))
    ml = ml_bruteforce(g, meas)
    print(f"seed {seed}: lambda2={lam:+.3f} certified={ok!s:5}  "
          f"sdp={sdp.objective:8.4f} rank_one={sdp.rank_one!s:5}  2(m-2c)={2 * (g.m - 2 * ml.objective):5.0f}")
