"""The four code-tree search decoders: SC, SCL, SCS and SCH.

All decoders consume per-symbol initial log-APP pairs (see
``channel.initial_log_app``) and share one metric arithmetic, so the
documented equivalences (SCH(L,2L) = SCL(L), SCH(L,D>=LN) = SCS(L,D),
width-1 collapse to SC) hold bit-exactly.
"""

from dataclasses import dataclass
import math

import numpy as np

from . import _kernels
from .core import bit_reversal_permutation

ALGORITHMS = ("sc", "scl", "scs", "sch")


@dataclass
class DecoderConfig:
    """Search parameters: width L, stack depth D, pruning threshold tau.

    ``tau`` and ``p_tol`` are mutually exclusive; ``p_tol`` derives tau via
    :func:`tau_from_tolerance` once the code (hence K) is known.  tau=None
    disables pruning.  ``max_approx`` replaces max* by a plain max
    (approximation mode, off by default).
    """

    algorithm: str
    L: int = 1
    D: int = 0
    tau: float = None
    p_tol: float = None
    max_approx: bool = False

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.L < 1:
            raise ValueError(f"search width L must be >= 1, got {self.L}")
        if self.algorithm == "scs" and self.D < 2:
            raise ValueError(f"SCS needs stack depth D >= 2, got {self.D}")
        if self.algorithm == "sch" and self.D < 2 * self.L:
            raise ValueError(f"SCH needs D >= 2L = {2 * self.L}, got {self.D}")
        if self.tau is not None and self.p_tol is not None:
            raise ValueError("tau and p_tol are mutually exclusive")
        if self.tau is not None and not math.isinf(self.tau):
            if self.tau != 0.0 and self.tau < 1.0:
                raise ValueError(f"tau must be >= 1 (or 0/None to disable), got {self.tau}")
        if self.p_tol is not None and self.p_tol <= 0.0:
            raise ValueError(f"p_tol must be positive, got {self.p_tol}")


@dataclass
class DecodeResult:
    u_hat: np.ndarray
    metric: float
    metric_ops: int
    pruned_paths: int = 0
    list_labels: np.ndarray = None
    list_metrics: np.ndarray = None
    counting_vector: np.ndarray = None
    peak_stack: int = 0


def tau_from_tolerance(K, L, p_tol):
    """Pruning threshold from a tolerable extra error probability:
    tau = K (L-1) / p_tol. L=1 gives 0, meaning pruning disabled."""
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if p_tol <= 0.0:
        raise ValueError(f"p_tol must be positive, got {p_tol}")
    return K * (L - 1) / p_tol


def parse_decoder_spec(spec):
    """Parse CLI decoder notation, e.g. ``sc``, ``scl:L=32``,
    ``scs:L=32,D=1024``, ``sch:L=32,D=256,tau=1e8``, ``scl:L=16,ptol=1e-5``."""
    name, _, rest = spec.partition(":")
    name = name.strip().lower()
    if name not in ALGORITHMS:
        raise ValueError(f"unknown decoder {name!r} in {spec!r}")
    kw = {}
    if rest:
        for item in rest.split(","):
            key, _, val = item.partition("=")
            key = key.strip().lower()
            if not val:
                raise ValueError(f"malformed decoder option {item!r} in {spec!r}")
            if key == "l":
                kw["L"] = int(val)
            elif key == "d":
                kw["D"] = int(val)
            elif key == "tau":
                kw["tau"] = float(val)
            elif key == "ptol":
                kw["p_tol"] = float(val)
            else:
                raise ValueError(f"unknown decoder option {key!r} in {spec!r}")
    return DecoderConfig(name, **kw)


def _resolve_log_tau(dcfg, K):
    tau = dcfg.tau
    if dcfg.p_tol is not None:
        tau = tau_from_tolerance(K, dcfg.L, dcfg.p_tol)
    if tau is None or tau == 0.0 or math.isinf(tau):
        return np.inf
    return math.log(tau)


def _ctx(code):
    """Kernel-side views of the code: info mask, frozen values, layer offsets."""
    ctx = getattr(code, "_kernel_ctx", None)
    if ctx is None:
        n = code.n
        poff = np.zeros(n + 1, dtype=np.int64)
        off = 0
        for lam in range(1, n + 1):
            poff[lam] = off
            off += 2 * (1 << (n - lam))
        ctx = (code.info_mask().astype(np.int8), code.frozen_full(), poff)
        code._kernel_ctx = ctx
    return ctx


def _flat(llp, N):
    llp = np.asarray(llp, dtype=np.float64)
    if llp.shape != (N, 2):
        raise ValueError(f"expected ({N}, 2) initial log-APPs, got {llp.shape}")
    return np.ascontiguousarray(llp).reshape(-1)


def _decode_length_one(llp, code, want_list):
    mask = code.info_mask()
    if mask[0]:
        b = 0 if llp[0, 0] >= llp[0, 1] else 1
        metric = float(llp[0, b])
    else:
        b = int(code.frozen_full()[0])
        metric = 0.0
    u = np.array([b], dtype=np.int8)
    res = DecodeResult(u_hat=u, metric=metric, metric_ops=0, peak_stack=1)
    if want_list:
        res.list_labels = u.reshape(1, 1).copy()
        res.list_metrics = np.array([metric])
    return res


def decode_sc(llp, code, max_approx=False):
    """Greedy width-1 decode: at information positions take the bit with the
    larger extension metric (tie -> 0); frozen positions take the frozen
    value."""
    if code.N == 1:
        return _decode_length_one(np.asarray(llp, dtype=float), code, False)
    mask, frozen, poff = _ctx(code)
    u, metric, ops = _kernels.sc_kernel(_flat(llp, code.N), mask, frozen,
                                        code.n, poff, 1 if max_approx else 0)
    return DecodeResult(u_hat=u, metric=float(metric), metric_ops=int(ops))


def decode_scl(llp, code, dcfg):
    """Breadth-first width-L list decode; the result carries the full
    surviving list (largest metric first)."""
    if code.N == 1:
        return _decode_length_one(np.asarray(llp, dtype=float), code, True)
    mask, frozen, poff = _ctx(code)
    log_tau = _resolve_log_tau(dcfg, code.K)
    ub, met, lex, A, best, ops, pruned = _kernels.scl_kernel(
        _flat(llp, code.N), mask, frozen, code.n, poff, dcfg.L, log_tau,
        1 if dcfg.max_approx else 0)
    order = sorted(range(A), key=lambda a: (-met[a], lex[a]))
    return DecodeResult(
        u_hat=ub[best].copy(),
        metric=float(met[best]),
        metric_ops=int(ops),
        pruned_paths=int(pruned),
        list_labels=ub[order].copy(),
        list_metrics=met[list(order)].copy(),
    )


def _decode_stack(llp, code, dcfg, hybrid):
    if code.N == 1:
        return _decode_length_one(np.asarray(llp, dtype=float), code, False)
    mask, frozen, poff = _ctx(code)
    log_tau = _resolve_log_tau(dcfg, code.K)
    u, metric, ops, pruned, cvec, peak, status = _kernels.stack_kernel(
        _flat(llp, code.N), mask, frozen, code.n, poff,
        dcfg.L, dcfg.D, log_tau, 1 if hybrid else 0,
        1 if dcfg.max_approx else 0)
    if status == 1:
        raise AssertionError(
            f"stack occupancy exceeded D={dcfg.D} (peak {peak}); "
            "the mode-switching rules should prevent this")
    if status == 2:
        raise RuntimeError("candidate stack exhausted before reaching a leaf")
    return DecodeResult(
        u_hat=u, metric=float(metric), metric_ops=int(ops),
        pruned_paths=int(pruned), counting_vector=cvec, peak_stack=int(peak))


def decode_scs(llp, code, dcfg):
    """Best-first stack decode with width cap L and depth cap D."""
    return _decode_stack(llp, code, dcfg, hybrid=False)


def decode_sch(llp, code, dcfg):
    """Stack decode that equalizes path lengths when the stack nears
    capacity; never deletes for capacity, so the output does not depend
    on D."""
    return _decode_stack(llp, code, dcfg, hybrid=True)


def decode(llp, code, dcfg):
    """Dispatch on DecoderConfig.algorithm."""
    if dcfg.algorithm == "sc":
        return decode_sc(llp, code, max_approx=dcfg.max_approx)
    if dcfg.algorithm == "scl":
        return decode_scl(llp, code, dcfg)
    if dcfg.algorithm == "scs":
        return decode_scs(llp, code, dcfg)
    return decode_sch(llp, code, dcfg)


def score_path(llp, code, labels):
    """Metric of the given length-N labels through the same recursion the
    decoders use (frozen positions carry the metric)."""
    labels = np.asarray(labels, dtype=np.int8)
    if labels.shape != (code.N,):
        raise ValueError(f"expected {code.N} labels, got {labels.shape}")
    llp = np.asarray(llp, dtype=float)
    if code.N == 1:
        return float(llp[0, labels[0]]) if code.info_mask()[0] else 0.0
    mask, frozen, poff = _ctx(code)
    _, metric, _ = _kernels.forced_kernel(_flat(llp, code.N), labels, mask,
                                          code.n, poff, 0)
    return float(metric)


_GENIE_POFF = {}


def forced_path_pairs(llp, labels):
    """Per-bit metric pairs along fixed labels, with every previous bit
    taken as given; the genie-aided per-channel view used by Monte-Carlo
    construction."""
    llp = np.asarray(llp, dtype=np.float64)
    N = llp.shape[0]
    labels = np.asarray(labels, dtype=np.int8)
    if N == 1:
        return llp.copy()
    n = N.bit_length() - 1
    if 1 << n != N:
        raise ValueError(f"block length must be a power of two, got {N}")
    poff = _GENIE_POFF.get(n)
    if poff is None:
        poff = np.zeros(n + 1, dtype=np.int64)
        off = 0
        for lam in range(1, n + 1):
            poff[lam] = off
            off += 2 * (1 << (n - lam))
        _GENIE_POFF[n] = poff
    mask = np.ones(N, dtype=np.int8)
    pairs, _, _ = _kernels.forced_kernel(
        np.ascontiguousarray(llp).reshape(-1), labels, mask, n, poff, 0)
    return pairs


def _encode_rows(U, n):
    """Encode each row of U (shape (M, N)) as a codeword."""
    X = U[:, bit_reversal_permutation(n)]
    M, N = X.shape
    size = N
    while size > 1:
        h = size >> 1
        Xv = X.reshape(M, -1, size)
        Xv[:, :, :h] ^= Xv[:, :, h:]
        size = h
    return X


def brute_force_ml(llp, code):
    """Exhaustive maximum-likelihood oracle over all 2^K source blocks.

    Ranks by the full-block log likelihood (the product of per-symbol
    posteriors of the codeword); ties resolve to the lexicographically
    smallest label vector. Limited to K <= 20.
    """
    if code.K > 20:
        raise ValueError(f"brute_force_ml is limited to K <= 20, got K={code.K}")
    llp = np.asarray(llp, dtype=float)
    K, N = code.K, code.N
    M = 1 << K
    U = np.zeros((M, N), dtype=np.int8)
    U[:, code.frozen_set] = code.frozen_values
    if K:
        bits = ((np.arange(M)[:, None] >> np.arange(K - 1, -1, -1)) & 1).astype(np.int8)
        U[:, code.info_set] = bits
    X = _encode_rows(U, code.n)
    scores = llp[np.arange(N), X].sum(axis=1)
    best = int(np.argmax(scores))
    return U[best].copy(), float(scores[best])
