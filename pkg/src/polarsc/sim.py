"""Monte-Carlo BLER/complexity simulation harness.

A sweep point simulates seeded blocks until both a minimum block count and
a minimum block-error count are reached (or a hard cap).  Each block's
randomness comes from a generator derived from (master seed, grid index,
block index), so results do not depend on how blocks are distributed over
workers.  Block errors are counted on information positions only.
"""

from dataclasses import dataclass, field
import json
import math

import numpy as np

from .channel import channel_for_point, initial_log_app, transmit
from .core import encode
from .decoders import DecoderConfig, decode, score_path


@dataclass
class ExperimentSpec:
    code: object
    channel_kind: str            # "bec" or "awgn"
    grid: list                   # E_b/N_0 in dB, or epsilon values
    decoder: DecoderConfig
    min_blocks: int = 10_000
    min_block_errors: int = 100
    max_blocks: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if self.channel_kind not in ("bec", "awgn"):
            raise ValueError(f"unknown channel kind {self.channel_kind!r}")
        if not self.grid:
            raise ValueError("empty parameter grid")
        if self.min_blocks < 1:
            raise ValueError("min_blocks must be >= 1")


@dataclass
class SimRecord:
    snr_db: float                # grid value: E_b/N_0 dB, or epsilon for bec
    blocks: int
    block_errors: int
    bler: float
    bler_ci95: float             # Wilson 95% half-width
    avg_metric_ops: float
    avg_pruned_paths: float
    ml_lower_count: int = None
    seed: int = 0


_Z95 = 1.959963984540054


def wilson_interval(errors, blocks):
    """Wilson 95% confidence interval for a binomial proportion."""
    if blocks == 0:
        return 0.0, 1.0
    p = errors / blocks
    z2 = _Z95 * _Z95
    denom = 1.0 + z2 / blocks
    center = (p + z2 / (2 * blocks)) / denom
    half = (_Z95 / denom) * math.sqrt(p * (1 - p) / blocks + z2 / (4 * blocks * blocks))
    return max(0.0, center - half), min(1.0, center + half)


def _simulate_point(spec, gi, value, collect_ml):
    code = spec.code
    ch = channel_for_point(spec.channel_kind, value, code.rate)
    info = code.info_set
    base_u = code.frozen_full()
    blocks = 0
    errors = 0
    ml_count = 0
    ops_total = 0
    pruned_total = 0
    while blocks < spec.max_blocks and (
            blocks < spec.min_blocks or errors < spec.min_block_errors):
        rng = np.random.default_rng([spec.seed, gi, blocks])
        u = base_u.copy()
        if code.K:
            u[info] = rng.integers(0, 2, code.K, dtype=np.int8)
        y = transmit(encode(u, code), ch, rng)
        llp = initial_log_app(y, ch)
        res = decode(llp, code, spec.decoder)
        blocks += 1
        ops_total += res.metric_ops
        pruned_total += res.pruned_paths
        if code.K and not np.array_equal(res.u_hat[info], u[info]):
            errors += 1
            if collect_ml and res.metric > score_path(llp, code, u):
                ml_count += 1
    lo, hi = wilson_interval(errors, blocks)
    return SimRecord(
        snr_db=float(value),
        blocks=blocks,
        block_errors=errors,
        bler=errors / blocks,
        bler_ci95=(hi - lo) / 2.0,
        avg_metric_ops=ops_total / blocks,
        avg_pruned_paths=pruned_total / blocks,
        ml_lower_count=ml_count if collect_ml else None,
        seed=spec.seed,
    )


def run_bler_sweep(spec):
    """Simulate every grid point; returns one SimRecord per point."""
    return [_simulate_point(spec, gi, v, False) for gi, v in enumerate(spec.grid)]


def run_ml_bound(spec):
    """BLER sweep that additionally counts blocks where the decoded block is
    strictly more likely than the transmitted one; count/blocks lower-bounds
    the ML error rate. Requires an SCL decoder."""
    if spec.decoder.algorithm != "scl":
        raise ValueError("run_ml_bound requires an SCL decoder")
    return [_simulate_point(spec, gi, v, True) for gi, v in enumerate(spec.grid)]


CSV_HEADER = ("snr_db,blocks,block_errors,bler,bler_ci95,"
              "avg_metric_ops,avg_pruned_paths,ml_lower_count,seed")


def _num(x):
    return repr(float(x))


def export_results(records, path, fmt="csv"):
    """Write records to CSV (fixed column order) or JSON."""
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in records:
            ml = "" if r.ml_lower_count is None else str(int(r.ml_lower_count))
            lines.append(",".join([
                _num(r.snr_db), str(int(r.blocks)), str(int(r.block_errors)),
                _num(r.bler), _num(r.bler_ci95), _num(r.avg_metric_ops),
                _num(r.avg_pruned_paths), ml, str(int(r.seed)),
            ]))
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    elif fmt == "json":
        docs = []
        for r in records:
            docs.append({
                "snr_db": float(r.snr_db),
                "blocks": int(r.blocks),
                "block_errors": int(r.block_errors),
                "bler": float(r.bler),
                "bler_ci95": float(r.bler_ci95),
                "avg_metric_ops": float(r.avg_metric_ops),
                "avg_pruned_paths": float(r.avg_pruned_paths),
                "ml_lower_count": None if r.ml_lower_count is None else int(r.ml_lower_count),
                "seed": int(r.seed),
            })
        with open(path, "w") as fh:
            json.dump(docs, fh, indent=1)
            fh.write("\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")


def records_from_json(path):
    """Round-trip loader for JSON exports."""
    with open(path) as fh:
        docs = json.load(fh)
    return [SimRecord(**d) for d in docs]
