import json
import math

import numpy as np
import pytest

import polarsc as ps
from polarsc.decoders import DecoderConfig
from polarsc.sim import CSV_HEADER
from conftest import make_code, seeded_llp


def _spec(code, decoder, grid, kind="awgn", blocks=200, errors=0, cap=None, seed=3):
    return ps.ExperimentSpec(
        code=code, channel_kind=kind, grid=grid, decoder=decoder,
        min_blocks=blocks, min_block_errors=errors,
        max_blocks=cap or blocks, seed=seed)


def test_sc_near_noiseless_point(code16):
    # sigma^2 ~ 1e-12 at rate 1/2 corresponds to ~120 dB
    spec = _spec(code16, DecoderConfig("sc"), [120.0], blocks=100)
    rec, = ps.run_bler_sweep(spec)
    assert rec.blocks == 100
    assert rec.block_errors == 0 and rec.bler == 0.0
    assert rec.avg_metric_ops == 16 * 4


def test_all_frozen_code_never_errs():
    cfg = ps.CodeConfig(3, [], frozen_values=np.ones(8, dtype=np.int8))
    spec = _spec(cfg, DecoderConfig("sc"), [0.5], kind="bec", blocks=50)
    rec, = ps.run_bler_sweep(spec)
    assert rec.bler == 0.0


def test_sweep_deterministic(code16, tmp_path):
    spec = _spec(code16, DecoderConfig("scl", L=4), [1.0, 2.0], blocks=300)
    r1 = ps.run_bler_sweep(spec)
    r2 = ps.run_bler_sweep(spec)
    assert r1 == r2
    f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
    ps.export_results(r1, f1)
    ps.export_results(r2, f2)
    assert f1.read_bytes() == f2.read_bytes()


def test_stopping_rule():
    code = make_code(16, 8, method="awgn", param=1.0, design_rate=0.5)
    # needs both min_blocks and min_block_errors, capped by max_blocks
    spec = ps.ExperimentSpec(code=code, channel_kind="awgn", grid=[0.0],
                             decoder=DecoderConfig("sc"), min_blocks=50,
                             min_block_errors=30, max_blocks=5000, seed=1)
    rec, = ps.run_bler_sweep(spec)
    assert rec.blocks >= 50 and (rec.block_errors >= 30 or rec.blocks == 5000)
    spec2 = ps.ExperimentSpec(code=code, channel_kind="awgn", grid=[0.0],
                              decoder=DecoderConfig("sc"), min_blocks=50,
                              min_block_errors=10 ** 9, max_blocks=80, seed=1)
    rec2, = ps.run_bler_sweep(spec2)
    assert rec2.blocks == 80


def test_export_csv_shape(tmp_path):
    code = make_code(8, 4, method="bec", param=0.4)
    spec = _spec(code, DecoderConfig("sc"), [1.0, 2.0, 3.0], blocks=20)
    recs = ps.run_bler_sweep(spec)
    out = tmp_path / "r.csv"
    ps.export_results(recs, out)
    lines = out.read_text().strip().split("\n")
    assert lines[0] == CSV_HEADER
    assert len(lines) == len(recs) + 1
    # ml column empty for plain sweeps
    assert lines[1].split(",")[7] == ""
    empty = tmp_path / "empty.csv"
    ps.export_results([], empty)
    assert empty.read_text().strip() == CSV_HEADER


def test_export_json_roundtrip(tmp_path):
    from polarsc.sim import records_from_json
    code = make_code(8, 4, method="bec", param=0.4)
    spec = _spec(code, DecoderConfig("scl", L=2), [1.5], blocks=30)
    recs = ps.run_ml_bound(spec)
    out = tmp_path / "r.json"
    ps.export_results(recs, out, fmt="json")
    assert records_from_json(out) == recs


def test_wilson_interval():
    lo, hi = ps.wilson_interval(0, 100)
    assert lo == pytest.approx(0.0, abs=1e-12) and 0.0 < hi < 0.05
    lo, hi = ps.wilson_interval(50, 100)
    assert lo < 0.5 < hi
    lo1k = ps.wilson_interval(50, 1000)
    assert (lo1k[1] - lo1k[0]) < (hi - lo)


def test_ml_bound_counts():
    code = make_code(16, 8, method="awgn", param=2.0, design_rate=0.5)
    spec = _spec(code, DecoderConfig("scl", L=4), [120.0], blocks=50)
    rec, = ps.run_ml_bound(spec)
    assert rec.ml_lower_count == 0 and rec.block_errors == 0
    spec = _spec(code, DecoderConfig("scl", L=4), [1.0], blocks=400)
    rec, = ps.run_ml_bound(spec)
    assert 0 <= rec.ml_lower_count <= rec.block_errors
    with pytest.raises(ValueError):
        ps.run_ml_bound(_spec(code, DecoderConfig("sc"), [1.0]))


def test_ml_bound_exact_at_full_list():
    # L = 2^K makes SCL exact ML, so the counted events are exactly the
    # ML errors measured independently by brute force on the same seeds
    code = make_code(16, 8, method="awgn", param=2.0, design_rate=0.5)
    blocks = 1200
    spec = _spec(code, DecoderConfig("scl", L=256), [2.0], blocks=blocks, seed=17)
    rec, = ps.run_ml_bound(spec)
    ch = ps.ChannelModel("biawgn", ps.ebn0_db_to_sigma2(2.0, 0.5))
    ml_errors = 0
    for b in range(blocks):
        rng = np.random.default_rng([17, 0, b])
        u = code.frozen_full()
        u[code.info_set] = rng.integers(0, 2, code.K, dtype=np.int8)
        y = ps.transmit(ps.encode(u, code), ch, rng)
        got, _ = ps.brute_force_ml(ps.initial_log_app(y, ch), code)
        ml_errors += not np.array_equal(got, u)
    assert rec.block_errors == ml_errors
    assert abs(rec.ml_lower_count - ml_errors) <= 1
    # and within the binomial 95% CI of the exact rate
    p = ml_errors / blocks
    half = 1.96 * math.sqrt(max(p * (1 - p), 1e-12) / blocks)
    assert abs(rec.ml_lower_count / blocks - p) <= half + 1e-12


def test_scl_complexity_proportional_to_width():
    code = make_code(64, 32, method="awgn", param=2.0, design_rate=0.5)
    n = 6
    for L in (2, 8, 32):
        spec = _spec(code, DecoderConfig("scl", L=L), [2.0], blocks=30)
        rec, = ps.run_bler_sweep(spec)
        assert 0.5 * L * 64 * n <= rec.avg_metric_ops <= 1.0 * L * 64 * n


def test_bler_improves_with_width():
    # SCL(32) <= SCL(8) <= SCL(2) <= SC at a mid-SNR point, with CI slack
    code = make_code(64, 32, method="awgn", param=2.0, design_rate=0.5)
    blers, cis = {}, {}
    for name, dc in [("sc", DecoderConfig("sc")),
                     ("scl2", DecoderConfig("scl", L=2)),
                     ("scl8", DecoderConfig("scl", L=8)),
                     ("scl32", DecoderConfig("scl", L=32))]:
        rec, = ps.run_bler_sweep(_spec(code, dc, [2.0], blocks=2500, seed=23))
        blers[name], cis[name] = rec.bler, rec.bler_ci95
    order = ["scl32", "scl8", "scl2", "sc"]
    for a, b in zip(order, order[1:]):
        assert blers[a] <= blers[b] + cis[a] + cis[b]


def test_bler_monotone_in_snr():
    code = make_code(64, 32, method="awgn", param=2.0, design_rate=0.5)
    spec = _spec(code, DecoderConfig("sc"), [0.0, 1.5, 3.0], blocks=2000, seed=29)
    recs = ps.run_bler_sweep(spec)
    for a, b in zip(recs, recs[1:]):
        assert b.bler <= a.bler + a.bler_ci95 + b.bler_ci95


def test_nonzero_frozen_values_roundtrip():
    rng = np.random.default_rng(5)
    prof = ps.bhattacharyya_bec(0.4, 16)
    base = ps.select_information_set(prof, 8)
    cfg = ps.CodeConfig(4, base.info_set,
                        frozen_values=rng.integers(0, 2, 8).astype(np.int8))
    spec = _spec(cfg, DecoderConfig("scl", L=4), [3.0], blocks=300)
    rec, = ps.run_bler_sweep(spec)
    assert rec.blocks == 300  # decodes run; frozen values honored throughout
    u, llp = seeded_llp(cfg, ps.ChannelModel("biawgn", 1e-12), 1, 0)
    assert np.array_equal(ps.decode_sc(llp, cfg).u_hat, u)
