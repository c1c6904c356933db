import xml.etree.ElementTree as ET

import numpy as np
import pytest

from censored_recovery.experiments import (
    CSV_COLUMNS,
    GraphSpec,
    SweepResult,
    TrialConfig,
    figure_configs,
    figure_preset,
    figure_reference_lines,
    format_csv,
    format_svg,
    parse_csv,
    emit_csv,
    read_csv,
    run_sweep,
    run_trial,
    threshold_n,
    wilson_interval,
)
from censored_recovery.graph import save_graph, cycle_graph
from censored_recovery.thresholds import sdp_er_bound

SVG = "{http://www.w3.org/2000/svg}"


def test_config_validation():
    spec = GraphSpec.er(10, 0.5)
    with pytest.raises(ValueError):
        TrialConfig(spec, 0.6)
    with pytest.raises(ValueError):
        TrialConfig(spec, 0.1, trials=0)
    with pytest.raises(ValueError):
        TrialConfig(spec, 0.1, decoders=("magic",))
    with pytest.raises(ValueError):
        TrialConfig(spec, 0.1, truth="adversarial")
    with pytest.raises(ValueError):
        GraphSpec("tree", 5)


def test_noiseless_trial_all_succeed():
    cfg = TrialConfig(GraphSpec.er(12, 0.8), 0.0, ("ml", "sdp", "spectral", "cert"), seed=3)
    rec = run_trial(cfg, 0)
    assert rec.connected
    assert all(rec.success.values()) and rec.certified
    assert rec.ml_cost == 0 and rec.ml_tie is False


def test_trial_deterministic():
    cfg = TrialConfig(GraphSpec.er(14, 0.5), 0.2, ("ml", "sdp", "cert", "vote"), seed=11)
    assert run_trial(cfg, 4) == run_trial(cfg, 4)
    assert run_trial(cfg, 4) != run_trial(cfg, 5)


def test_truth_policy_gauge_invariance():
    spec = GraphSpec.er(30, 0.4)
    for idx in range(10):
        a = run_trial(TrialConfig(spec, 0.2, ("cert",), seed=2, truth="random"), idx)
        b = run_trial(TrialConfig(spec, 0.2, ("cert",), seed=2, truth="zero"), idx)
        assert a.lambda2 == pytest.approx(b.lambda2, abs=1e-9)
        assert a.certified == b.certified


def test_graph_key_ignores_eps_and_graph_shared():
    spec = GraphSpec.er(20, 0.5)
    a = run_trial(TrialConfig(spec, 0.1, ("cert",)), 0)
    b = run_trial(TrialConfig(spec, 0.3, ("cert",)), 0)
    assert a.m == b.m and a.min_degree == b.min_degree
    assert GraphSpec.er(20, 0.5).key() != GraphSpec.er(20, 0.6).key()


def test_regular_and_file_specs(tmp_path):
    rec = run_trial(TrialConfig(GraphSpec.regular(10, 3), 0.0, ("cert", "ml")), 0)
    assert rec.min_degree == 3 and rec.m == 15
    path = tmp_path / "c8.el"
    save_graph(cycle_graph(8), path)
    spec = GraphSpec.file(str(path))
    assert spec.n == 8 and spec.density == pytest.approx(16 / 56)
    rec = run_trial(TrialConfig(spec, 0.0, ("ml", "cert")), 0)
    assert rec.m == 8 and rec.success["ml"] and rec.certified
    assert GraphSpec.regular(10, 3).density == pytest.approx(3 / 9)


def test_wilson_interval():
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0 and 0.2 < hi < 0.35
    lo, hi = wilson_interval(10, 10)
    assert hi == 1.0 and 0.65 < lo < 0.8
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi and lo + hi == pytest.approx(1.0)
    # closed form
    z = 1.959963984540054
    k, n = 37, 120
    ph = k / n
    centre = (ph + z * z / (2 * n)) / (1 + z * z / n)
    half = z / (1 + z * z / n) * np.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n))
    assert wilson_interval(k, n) == pytest.approx((centre - half, centre + half), abs=1e-12)


def test_single_trial_cells():
    configs = [TrialConfig(GraphSpec.er(n, 0.5), 0.2, ("cert",)) for n in (10, 20)]
    res = run_sweep(configs)
    for row in res.rows:
        assert row.ratio in (0.0, 1.0)
        assert row.ci_lo <= row.ratio <= row.ci_hi


def test_complete_noiseless_always_certified():
    configs = [TrialConfig(GraphSpec.er(n, 1.0), 0.0, ("cert",), trials=5) for n in (5, 30, 80)]
    assert all(r.ratio == 1.0 for r in run_sweep(configs).rows)


def test_max_noise_ml_fails():
    cfg = TrialConfig(GraphSpec.er(10, 0.6), 0.5, ("ml",), trials=200, seed=1)
    assert run_sweep([cfg]).rows[0].ratio < 0.1


def test_sweep_records_and_axes():
    configs = [TrialConfig(GraphSpec.er(n, 0.6), eps, ("cert", "ml"), trials=30)
               for n in (8, 12) for eps in (0.05, 0.2)]
    res, records = run_sweep(configs, keep_records=True)
    assert res.n_values == [8, 12] and res.eps_values == [0.05, 0.2] and res.p_values == [0.6]
    assert [r.index for r in records[0]] == list(range(30))
    row = res.row(n=8, eps=0.05, decoder="ml")
    assert row.successes == sum(r.success["ml"] for r in records[0])
    with pytest.raises(KeyError):
        res.row(n=8)


def test_sweep_parallel_identical():
    configs = [TrialConfig(GraphSpec.er(n, 0.5), 0.1, ("cert", "vote"), trials=30, seed=4)
               for n in (20, 40)]
    assert format_csv(run_sweep(configs, jobs=1)) == format_csv(run_sweep(configs, jobs=3, block_size=7))


def test_csv_roundtrip(tmp_path):
    configs = [TrialConfig(GraphSpec.er(n, 0.3), 0.1, ("cert",), trials=7, variant="demo") for n in (10, 15)]
    res = run_sweep(configs)
    emit_csv(res, tmp_path / "s.csv")
    back = read_csv(tmp_path / "s.csv")
    assert back.rows == res.rows
    text = format_csv(res)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert format_csv(parse_csv(text)) == text


def test_empty_csv():
    assert format_csv(SweepResult()) == ",".join(CSV_COLUMNS) + "\n"
    assert parse_csv(format_csv(SweepResult())).rows == []
    with pytest.raises(ValueError):
        parse_csv("a,b\n")


def test_svg_structure():
    configs = [TrialConfig(GraphSpec.er(n, 0.75), 0.35, ("cert", "vote"), trials=2) for n in (20, 40, 60)]
    res = run_sweep(configs)
    res.reference_lines = {"it": 30, "sdp": 50}
    root = ET.fromstring(format_svg(res, title="a < b"))
    assert root.tag == SVG + "svg"
    polylines = root.findall(f"{SVG}polyline[@class='series']")
    assert len(polylines) == 2
    thresholds = root.findall(f"{SVG}line[@class='threshold']")
    assert len(thresholds) == 2
    for line in thresholds:
        assert line.get("x1") == line.get("x2")
    assert "href" not in format_svg(res)


def test_threshold_n():
    coeff = sdp_er_bound(0.35).required
    n = threshold_n(0.75, coeff)
    assert 0.75 * n >= coeff * np.log(n)
    assert 0.75 * (n - 1) < coeff * np.log(n - 1)
    assert n == 389
    assert figure_reference_lines(0.75, 0.35) == {"it": 149, "sdp": 389}


def test_figure_configs():
    cfgs = figure_configs("top", 0.4)
    assert len(cfgs) == 25 and cfgs[0].trials == 200 and cfgs[0].graph.p == 0.75
    assert cfgs[-1].graph.n == 500 and cfgs[0].eps == 0.35
    assert figure_configs("bottom", 1.0)[0].trials == 100
    with pytest.raises(ValueError):
        figure_configs("middle")
    with pytest.raises(ValueError):
        figure_configs("top", 0.0)


def test_figure_preset_writes(tmp_path):
    res = figure_preset("bottom", 0.05, n_grid=[20, 40], out_dir=tmp_path)
    assert (tmp_path / "figure_bottom.csv").exists() and (tmp_path / "figure_bottom.svg").exists()
    assert read_csv(tmp_path / "figure_bottom.csv").rows == res.rows
    assert set(res.reference_lines) == {"it", "sdp"}
