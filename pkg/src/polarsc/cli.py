"""Command-line interface: construct codes, run sweeps, decode one block.

Channel notation is ``bec:<epsilon>`` or ``awgn:<ebn0_db>``; decoder
notation is ``sc``, ``scl:L=32``, ``scs:L=32,D=1024`` or ``sch:L=32,D=256``,
optionally with ``,tau=<v>`` or ``,ptol=<v>``.
"""

import argparse
import json
import sys

import numpy as np

from .channel import BEC_ERASURE, channel_for_point, initial_log_app, parse_channel_spec
from .construction import (bhattacharyya_bec, gaussian_approx_awgn,
                           monte_carlo_awgn, monte_carlo_pe,
                           select_information_set)
from .channel import ChannelModel
from .core import load_code, save_code
from .decoders import decode, parse_decoder_spec
from .sim import ExperimentSpec, export_results, run_bler_sweep, run_ml_bound


def _parse_grid(text):
    if ":" not in text:
        return [float(text)]
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must be start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("grid step must be positive")
    vals = []
    v = start
    while v <= stop + 1e-9:
        vals.append(round(v, 10))
        v += step
    return vals


def _block_length(value):
    N = int(value)
    if N < 1 or (N & (N - 1)) != 0:
        raise argparse.ArgumentTypeError(f"block length must be a power of two, got {N}")
    return N


def _cmd_construct(args):
    kind, param = parse_channel_spec(args.channel)
    N = args.n
    if args.k is not None:
        K = args.k
    else:
        K = round(args.rate * N)
    if not 0 <= K <= N:
        raise SystemExit(f"need 0 <= K <= N, got K={K}")
    rate = K / N if K else 0.5
    method = args.method
    if method == "auto":
        method = "bhattacharyya" if kind == "bec" else "ga"
    if method == "bhattacharyya":
        if kind != "bec":
            raise SystemExit("bhattacharyya construction needs a bec channel")
        prof = bhattacharyya_bec(param, N)
    elif method == "ga":
        if kind != "awgn":
            raise SystemExit("ga construction needs an awgn channel")
        prof = gaussian_approx_awgn(param, rate, N)
    elif method == "mc":
        if kind == "bec":
            prof = monte_carlo_pe(ChannelModel("bec", param), N, args.mc_trials, args.seed)
        else:
            prof = monte_carlo_awgn(param, rate, N, args.mc_trials, args.seed)
    else:
        raise SystemExit(f"unknown method {method!r}")
    cfg = select_information_set(prof, K)
    save_code(cfg, args.out)
    print(f"wrote {args.out}: N={cfg.N} K={cfg.K} method={prof.method} "
          f"channel={args.channel}")
    return 0


def _spec_from_args(args):
    code = load_code(args.code)
    dcfg = parse_decoder_spec(args.decoder)
    if args.snr is not None:
        kind, grid = "awgn", _parse_grid(args.snr)
    else:
        kind, grid = "bec", _parse_grid(args.epsilon)
    return ExperimentSpec(
        code=code, channel_kind=kind, grid=grid, decoder=dcfg,
        min_blocks=args.min_blocks, min_block_errors=args.min_errors,
        max_blocks=args.max_blocks, seed=args.seed)


def _print_records(records):
    for r in records:
        ml = "" if r.ml_lower_count is None else f" mlcount={r.ml_lower_count}"
        print(f"point={r.snr_db:g} blocks={r.blocks} errors={r.block_errors} "
              f"bler={r.bler:.3e} ops={r.avg_metric_ops:.1f}{ml}")


def _write_meta(args, spec, command):
    """Sidecar recording how the results were produced (channel convention,
    construction method, decoder, stopping rule)."""
    cons = spec.code.construction_meta
    meta = {
        "command": command,
        "code_file": args.code,
        "block_length": spec.code.N,
        "information_length": spec.code.K,
        "construction_method": cons.get("method"),
        "construction_channel_param": cons.get("channel_param"),
        "channel": args.snr is not None and "awgn" or "bec",
        "grid": spec.grid,
        "noise_convention": "sigma2 = 1/(2*R*10^(EbN0_dB/10))",
        "decoder": args.decoder,
        "min_blocks": spec.min_blocks,
        "min_block_errors": spec.min_block_errors,
        "max_blocks": spec.max_blocks,
        "seed": spec.seed,
    }
    with open(str(args.out) + ".meta.json", "w") as fh:
        json.dump(meta, fh, indent=1)
        fh.write("\n")


def _cmd_simulate(args):
    spec = _spec_from_args(args)
    records = run_bler_sweep(spec)
    export_results(records, args.out, args.format)
    _write_meta(args, spec, "simulate")
    _print_records(records)
    print(f"wrote {args.out}")
    return 0


def _cmd_mlbound(args):
    if not args.decoder.startswith("scl"):
        args.decoder = "scl:L=32"
    spec = _spec_from_args(args)
    records = run_ml_bound(spec)
    export_results(records, args.out, args.format)
    _write_meta(args, spec, "mlbound")
    _print_records(records)
    print(f"wrote {args.out}")
    return 0


def _cmd_decode(args):
    code = load_code(args.code)
    dcfg = parse_decoder_spec(args.decoder)
    with open(args.obs) as fh:
        doc = json.load(fh)
    kind, param = parse_channel_spec(doc["channel"])
    ch = channel_for_point(kind, param, code.rate)
    vals = doc["values"]
    if len(vals) != code.N:
        raise SystemExit(f"observation length {len(vals)} != N={code.N}")
    if kind == "bec":
        y = np.array([BEC_ERASURE if v is None else int(v) for v in vals], dtype=np.int8)
    else:
        y = np.array(vals, dtype=float)
    res = decode(initial_log_app(y, ch), code, dcfg)
    print(np.packbits(res.u_hat).tobytes().hex())
    return 0


def _add_sim_args(p):
    p.add_argument("--code", required=True, help="code specification file (JSON)")
    p.add_argument("--decoder", default="sc", help="decoder spec, e.g. scl:L=32")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--snr", help="E_b/N_0 grid in dB: start:stop:step or a single value")
    g.add_argument("--epsilon", help="BEC erasure grid: start:stop:step or a single value")
    p.add_argument("--min-blocks", type=int, default=10_000)
    p.add_argument("--min-errors", type=int, default=100)
    p.add_argument("--max-blocks", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def main(argv=None):
    ap = argparse.ArgumentParser(prog="polarsc")
    sub = ap.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("construct", help="build a code specification file")
    pc.add_argument("--channel", required=True, help="bec:<epsilon> or awgn:<ebn0_db>")
    pc.add_argument("--n", type=_block_length, required=True,
                    help="block length N (a power of two)")
    g = pc.add_mutually_exclusive_group(required=True)
    g.add_argument("--rate", type=float)
    g.add_argument("--k", type=int)
    pc.add_argument("--method", choices=("auto", "bhattacharyya", "ga", "mc"),
                    default="auto")
    pc.add_argument("--mc-trials", type=int, default=100_000)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--out", required=True)
    pc.set_defaults(func=_cmd_construct)

    ps = sub.add_parser("simulate", help="seeded BLER/complexity sweep")
    _add_sim_args(ps)
    ps.set_defaults(func=_cmd_simulate)

    pm = sub.add_parser("mlbound", help="sweep with the ML lower-bound counter "
                                        "(decoder forced to SCL)")
    _add_sim_args(pm)
    pm.set_defaults(func=_cmd_mlbound)

    pd = sub.add_parser("decode", help="decode one observation block")
    pd.add_argument("--code", required=True)
    pd.add_argument("--obs", required=True,
                    help='JSON file {"channel": "awgn:2.0", "values": [...]}; '
                         "null marks a BEC erasure")
    pd.add_argument("--decoder", default="sc")
    pd.set_defaults(func=_cmd_decode)

    args = ap.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
