"""Code definition, bit-reversal permutation, polar encoding and the SC union bound."""

import json

import numpy as np


class CodeConfig:
    """Static definition of a polar code.

    Parameters
    ----------
    n : int
        Block-length exponent; the block length is N = 2**n.
    info_set : array-like of int
        Sorted 0-based indices of the K information positions.
    frozen_values : array-like of {0,1}, optional
        Values of the frozen bits, one per frozen index in increasing
        index order. Defaults to all zeros.
    construction_meta : dict, optional
        Free-form record of how the information set was chosen.
    """

    def __init__(self, n, info_set, frozen_values=None, construction_meta=None):
        if n < 0:
            raise ValueError(f"n must be >= 0, got {n}")
        self.n = int(n)
        self.N = 1 << self.n
        info_set = np.asarray(sorted(int(i) for i in info_set), dtype=np.int64)
        if len(set(info_set.tolist())) != len(info_set):
            raise ValueError("info_set contains duplicate indices")
        # K = 0 (all-frozen) is accepted: decoders and the simulator define
        # behavior for it.
        if len(info_set) > self.N:
            raise ValueError(f"need K <= N, got K={len(info_set)}, N={self.N}")
        if len(info_set) and (info_set[0] < 0 or info_set[-1] >= self.N):
            raise ValueError("info_set indices out of range")
        self.info_set = info_set
        self.K = len(info_set)
        self.frozen_set = np.setdiff1d(np.arange(self.N), info_set)
        if frozen_values is None:
            frozen_values = np.zeros(self.N - self.K, dtype=np.int8)
        frozen_values = np.asarray(frozen_values, dtype=np.int8)
        if frozen_values.shape != (self.N - self.K,):
            raise ValueError(
                f"frozen_values must have length N-K={self.N - self.K}, "
                f"got {frozen_values.shape}"
            )
        if np.any((frozen_values != 0) & (frozen_values != 1)):
            raise ValueError("frozen_values must be 0/1")
        self.frozen_values = frozen_values
        self.construction_meta = dict(construction_meta or {})

    @property
    def rate(self):
        return self.K / self.N

    def info_mask(self):
        """Boolean mask over 0..N-1, True at information positions."""
        mask = np.zeros(self.N, dtype=bool)
        mask[self.info_set] = True
        return mask

    def frozen_full(self):
        """Length-N vector with frozen values in place and 0 at info positions."""
        full = np.zeros(self.N, dtype=np.int8)
        full[self.frozen_set] = self.frozen_values
        return full

    def __repr__(self):
        return f"CodeConfig(N={self.N}, K={self.K})"


_BITREV_CACHE = {}


def bit_reversal_permutation(n):
    """Return the bit-reversal permutation of {0..2^n - 1} as an int array.

    Position i maps to the integer whose n-bit binary representation is
    the reverse of i's. The permutation is an involution. The returned
    array is cached and read-only.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    perm = _BITREV_CACHE.get(n)
    if perm is None:
        N = 1 << n
        perm = np.zeros(N, dtype=np.int64)
        for i in range(N):
            r = 0
            v = i
            for _ in range(n):
                r = (r << 1) | (v & 1)
                v >>= 1
            perm[i] = r
        perm.setflags(write=False)
        _BITREV_CACHE[n] = perm
    return perm


def encode(u, cfg):
    """Polar-encode a length-N source block.

    Computes x = u * B_N * F_2^{xor n} over GF(2) with the in-place
    butterfly; equals the explicit generator-matrix product.

    Parameters
    ----------
    u : array-like of {0,1}, length N
        Source block with frozen positions already set.
    cfg : CodeConfig

    Returns
    -------
    ndarray of int8, length N
    """
    u = np.asarray(u, dtype=np.int8)
    if u.shape != (cfg.N,):
        raise ValueError(f"expected source block of length {cfg.N}, got {u.shape}")
    x = u[bit_reversal_permutation(cfg.n)]
    size = cfg.N
    while size > 1:
        half = size >> 1
        xv = x.reshape(-1, size)
        xv[:, :half] ^= xv[:, half:]
        size = half
    return x


def generator_matrix(n):
    """Explicit G_N = B_N * F_2^{xor n} over GF(2); reference for tests."""
    F = np.array([[1, 0], [1, 1]], dtype=np.int8)
    G = np.array([[1]], dtype=np.int8)
    for _ in range(n):
        G = np.kron(F, G)
    return G[bit_reversal_permutation(n)]


def sc_union_bound(pe, info_set):
    """Union bound on the SC block error rate: min(1, sum of pe over info_set)."""
    pe = np.asarray(pe, dtype=float)
    if np.any(pe < 0.0) or np.any(pe > 1.0):
        raise ValueError("error probabilities must lie in [0, 1]")
    idx = np.asarray(list(info_set), dtype=np.int64)
    if idx.size == 0:
        return 0.0
    return float(min(1.0, pe[idx].sum()))


def save_code(cfg, path):
    """Write a code specification file (JSON).

    Fields: ``n`` (exponent), ``K``, ``info_set`` (sorted 0-based array),
    ``frozen_values`` (length N-K, in increasing frozen-index order) and
    ``construction`` (method name, channel parameter, per-channel
    reliability array). Arrays are index 0 first.
    """
    meta = cfg.construction_meta
    doc = {
        "n": cfg.n,
        "K": cfg.K,
        "info_set": cfg.info_set.tolist(),
        "frozen_values": cfg.frozen_values.tolist(),
        "construction": {
            "method": meta.get("method", "unspecified"),
            "channel_param": meta.get("channel_param"),
            "reliabilities": list(meta.get("reliabilities", [])),
        },
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_code(path):
    """Read a code specification file written by :func:`save_code`."""
    with open(path) as fh:
        doc = json.load(fh)
    cons = doc.get("construction", {})
    meta = {
        "method": cons.get("method", "unspecified"),
        "channel_param": cons.get("channel_param"),
        "reliabilities": cons.get("reliabilities", []),
    }
    return CodeConfig(doc["n"], doc["info_set"], doc.get("frozen_values"),
                      construction_meta=meta)
