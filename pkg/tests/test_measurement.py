import math

import numpy as np
import pytest
from scipy.stats import chi2_contingency

from censored_recovery.graph import Graph, complete_graph, gen_erdos_renyi
from censored_recovery.measurement import (
    CensoredMeasurements,
    censored_block_sample,
    certificate_matrix,
    edge_parities,
    error_subgraph,
    format_measurements,
    gauge_transform,
    load_measurements,
    parse_measurements,
    save_measurements,
    signed_weight_matrix,
    synthesize,
)
from censored_recovery.graph import GraphFormatError
from censored_recovery.numerics import split_stream

from conftest import triangle_one_flip


def random_instance(seed, n_max=12, p=0.5, eps=0.2):
    r = np.random.default_rng(seed)
    n = int(r.integers(2, n_max + 1))
    g = gen_erdos_renyi(n, p, split_stream(seed, 0))
    x = r.integers(0, 2, n)
    meas, noise = synthesize(g, x, eps, split_stream(seed, 1))
    return g, x, meas, noise, r


def test_synthesize_noiseless():
    g = complete_graph(5)
    x = [0, 1, 1, 0, 1]
    meas, noise = synthesize(g, x, 0.0, split_stream(0, 0))
    assert not noise.z.any()
    assert np.array_equal(meas.y, [x[u] ^ x[v] for u, v in g.edges])
    meas, _ = synthesize(g, [0] * 5, 0.0, split_stream(0, 0))
    assert not meas.y.any()


def test_synthesize_flip_rate():
    g = complete_graph(448)  # about 10^5 edges
    _, noise = synthesize(g, np.zeros(448, dtype=int), 0.35, split_stream(3, 0))
    assert abs(noise.z.mean() - 0.35) < 0.01


def test_synthesize_errors():
    g = complete_graph(3)
    with pytest.raises(ValueError):
        synthesize(g, [0, 0, 0], 0.6, split_stream(0, 0))
    with pytest.raises(ValueError):
        synthesize(g, [0, 0], 0.1, split_stream(0, 0))


def test_noise_nested_across_eps():
    g = complete_graph(30)
    x = np.zeros(30, dtype=int)
    _, lo = synthesize(g, x, 0.1, split_stream(5, 0))
    _, hi = synthesize(g, x, 0.3, split_stream(5, 0))
    assert np.all(hi.z >= lo.z)


def test_noise_count_binomial_mean():
    g = complete_graph(8)
    x = np.zeros(8, dtype=int)
    counts = [synthesize(g, x, 0.2, split_stream(s, 0))[1].z.sum() for s in range(10_000)]
    sd = math.sqrt(g.m * 0.2 * 0.8 / 10_000)
    assert abs(np.mean(counts) - g.m * 0.2) <= 3 * sd


def test_block_sample_extremes():
    g = complete_graph(6)
    x = np.array([0, 0, 1, 1, 0, 1])
    same = edge_parities(g, x) == 0
    t = censored_block_sample(g, x, 1.0, 0.0, split_stream(0, 0))
    assert np.array_equal(t.labels.astype(bool), same)
    t = censored_block_sample(g, x, 0.0, 1.0, split_stream(0, 0))
    assert np.array_equal(t.labels.astype(bool), ~same)


def test_block_sample_star_off_support():
    g = Graph.from_edges(3, [(0, 1)])
    t = censored_block_sample(g, [0, 0, 0], 0.5, 0.5, split_stream(0, 0))
    assert t.label(0, 2) == "*" and t.label(1, 2) == "*"
    assert t.label(1, 0) in (0, 1)
    with pytest.raises(ValueError):
        censored_block_sample(g, [0, 0, 0], 1.5, 0.0, split_stream(0, 0))


def test_block_sample_matches_synthesize_in_distribution():
    # with q1 = eps, q2 = 1 - eps a label is 1 w.p. eps on same-side edges and
    # 1 - eps on cross edges, which is exactly y = x_u ^ x_v ^ z
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    x = [0, 0, 1]
    eps = 0.3
    draws = 10_000
    a = np.array([censored_block_sample(g, x, eps, 1 - eps, split_stream(s, 0)).labels for s in range(draws)])
    b = np.array([synthesize(g, x, eps, split_stream(s, 1))[0].y for s in range(draws)])
    for e in range(g.m):
        ones_a, ones_b = a[:, e].sum(), b[:, e].sum()
        table = [[ones_a, draws - ones_a], [ones_b, draws - ones_b]]
        assert chi2_contingency(table).pvalue > 1e-3
    conv = censored_block_sample(g, x, eps, 1 - eps, split_stream(0, 0)).to_measurements()
    assert isinstance(conv, CensoredMeasurements)
    with pytest.raises(ValueError):
        censored_block_sample(g, x, 0.2, 0.2, split_stream(0, 0)).to_measurements()


def test_signed_weight_matrix():
    g = Graph.from_edges(2, [(0, 1)])
    assert np.array_equal(signed_weight_matrix(g, CensoredMeasurements(g, [0])).toarray(), [[0, 1], [1, 0]])
    assert np.array_equal(signed_weight_matrix(g, CensoredMeasurements(g, [1])).toarray(), [[0, -1], [-1, 0]])
    g = complete_graph(3)
    meas, _ = synthesize(g, [0, 1, 0], 0.0, split_stream(0, 0))
    w = signed_weight_matrix(g, meas).toarray()
    assert (w[0, 1], w[1, 2], w[0, 2]) == (-1, -1, 1)
    assert np.array_equal(w, w.T) and not np.diag(w).any()


def test_error_subgraph_examples():
    g, x, meas, noise, _ = random_instance(1)
    assert np.array_equal(error_subgraph(g, meas, x), noise.z.astype(bool))
    assert np.array_equal(error_subgraph(g, meas, 1 - x), noise.z.astype(bool))
    g, meas = triangle_one_flip()
    assert error_subgraph(g, meas, [0, 0, 0]).tolist() == [True, False, False]


def test_certificate_matrix_examples():
    g = complete_graph(5)
    x = [1, 0, 0, 1, 1]
    meas, _ = synthesize(g, x, 0.0, split_stream(0, 0))
    assert np.array_equal(certificate_matrix(g, meas, x).toarray(), g.laplacian().toarray())
    g, meas = triangle_one_flip()
    m = certificate_matrix(g, meas, [0, 0, 0]).toarray()
    assert np.array_equal(m, [[0, 1, -1], [1, 0, -1], [-1, -1, 2]])
    for seed in range(100):
        g, x, meas, _, r = random_instance(seed)
        m = certificate_matrix(g, meas, r.integers(0, 2, g.n)).toarray()
        assert np.array_equal(m, m.T)
        assert not m.sum(axis=1).any()


def test_gauge_transform_identities():
    g, x, meas, _, r = random_instance(2)
    assert gauge_transform(g, meas, np.zeros(g.n, dtype=int)) == meas
    assert gauge_transform(g, meas, np.ones(g.n, dtype=int)) == meas
    s = r.integers(0, 2, g.n)
    assert gauge_transform(g, gauge_transform(g, meas, s), s) == meas


def test_gauge_covariance():
    for seed in range(200):
        g, x, meas, _, r = random_instance(seed)
        s = r.integers(0, 2, g.n)
        cand = r.integers(0, 2, g.n)
        shifted = gauge_transform(g, meas, s)
        assert np.array_equal(error_subgraph(g, shifted, cand ^ s), error_subgraph(g, meas, cand))
        a = certificate_matrix(g, shifted, cand ^ s).toarray()
        b = certificate_matrix(g, meas, cand).toarray()
        assert np.array_equal(a, b)


def test_measurement_file_roundtrip(tmp_path):
    g, _, meas, _, _ = random_instance(4)
    save_measurements(meas, tmp_path / "m.txt")
    assert load_measurements(tmp_path / "m.txt", g) == meas


def test_measurement_file_errors():
    g = complete_graph(3)
    good = format_measurements(CensoredMeasurements(g, [1, 0, 1]))
    assert parse_measurements("# c\n" + good, g).y.tolist() == [1, 0, 1]
    bad = [
        "n 3 m 3\n0 2 0\n0 1 1\n1 2 1\n",  # wrong order
        "n 3 m 2\n0 1 0\n0 2 0\n",  # wrong count
        "n 4 m 3\n0 1 0\n0 2 0\n1 2 0\n",  # wrong n
        "n 3 m 3\n0 1 2\n0 2 0\n1 2 0\n",  # bad bit
        "n 3 m 3\n0 1 0\n0 2 0\n",  # truncated
        "0 1 0\n",
    ]
    for text in bad:
        with pytest.raises(GraphFormatError):
            parse_measurements(text, g)
