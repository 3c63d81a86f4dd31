"""Log-APP path-metric engine.

A decoding path of length i carries the log a posteriori probability of its
label prefix as the search metric.  Extending a path by one bit runs the
layered odd/even recursion: "odd" node updates combine the two hypotheses of
the not-yet-fixed partner bit through max*, "even" node updates are plain
sums.  At frozen positions the competition metric is carried over from the
parent while the recursion state still absorbs the frozen bit.

This module is the reference implementation: plain numpy, layer-granular
lazy copy, and the linear-domain recursion (`prefix_app`) used as a test
oracle.  The production decoders run the same arithmetic in compiled
kernels (see ``_kernels``).
"""

import math

import numpy as np

from .channel import LOG_ZERO
from .core import bit_reversal_permutation


def max_star(a, b):
    """Jacobian logarithm max(a,b) + ln(1 + e^-|a-b|).

    The LOG_ZERO sentinel is absorbing: max*(a, sentinel) == a exactly.
    """
    if a <= LOG_ZERO:
        return b if b > LOG_ZERO else LOG_ZERO
    if b <= LOG_ZERO:
        return a
    if a >= b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


def _max_star_arr(a, b):
    """Elementwise max* with sentinel handling."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    big = np.maximum(a, b)
    small = np.minimum(a, b)
    out = np.where(
        small <= LOG_ZERO,
        np.maximum(big, LOG_ZERO),
        big + np.log1p(np.exp(small - big)),
    )
    return out


def _log_sum(a, b):
    """Log-domain product (addition) with the absorbing floor."""
    return np.maximum(a + b, LOG_ZERO)


class MetricCounter:
    """Counts metric recursive operations: one per odd- or even-form node
    update at any recursion stage. A full SC decode totals exactly
    N*log2(N)."""

    def __init__(self):
        self.count = 0

    def add(self, k):
        self.count += k


class DecodingPath:
    """A partial path v_1^i on the code tree.

    Holds the label bits, the log-APP competition metric, and the per-stage
    intermediate log-probability arrays needed to extend the path.  Stage
    state is shared between clones and copied on first divergent write;
    labels live on a parent-link chain.  A logical copy is therefore O(1)
    and the aggregate copy cost of a width-L decode stays O(L N log N).

    Build roots with :func:`new_path`; grow with :func:`extend_path`.
    """

    __slots__ = ("cfg", "llp", "n", "length", "metric", "_parent", "_bit",
                 "_mat", "_p", "_c", "_own_p", "_own_c", "_pair", "counter",
                 "stats", "max_approx")

    def __init__(self, cfg, llp, counter, stats, max_approx=False):
        self.cfg = cfg
        self.llp = llp
        self.n = cfg.n
        self.length = 0
        self.metric = 0.0
        self.max_approx = max_approx
        self._parent = None
        self._bit = 0
        self._mat = np.zeros(cfg.N, dtype=np.int8)
        # stage arrays: _p[lam] has 2^(n-lam) nodes x 2 bit hypotheses,
        # lam = 1..n; _c additionally has lam = 0 holding codeword bits.
        self._p = [None] + [np.zeros((1 << (self.n - lam), 2)) for lam in range(1, self.n + 1)]
        self._c = [np.zeros((1 << (self.n - lam), 2), dtype=np.int8) for lam in range(0, self.n + 1)]
        self._own_p = [False] + [True] * self.n
        self._own_c = [True] * (self.n + 1)
        self._pair = None
        self.counter = counter
        self.stats = stats

    @property
    def labels(self):
        """Label bits v_1^i (materialized from the ancestry chain on first
        use and cached)."""
        if self._mat is None:
            chain = []
            node = self
            while node._mat is None:
                chain.append((node.length - 1, node._bit))
                node = node._parent
            arr = node._mat.copy()
            self.stats["copied"] += arr.size
            for pos, bit in chain:
                arr[pos] = bit
            self._mat = arr
        return self._mat[:self.length]

    def _writable_p(self, lam):
        if not self._own_p[lam]:
            self._p[lam] = self._p[lam].copy()
            self._own_p[lam] = True
            self.stats["copied"] += self._p[lam].size
        return self._p[lam]

    def _writable_c(self, lam):
        if not self._own_c[lam]:
            self._c[lam] = self._c[lam].copy()
            self._own_c[lam] = True
            self.stats["copied"] += self._c[lam].size
        return self._c[lam]

    def _sweep(self):
        """Run the node updates for the current phase; cache the metric pair."""
        phase = self.length
        n = self.n
        if n == 0:
            self._pair = (float(self.llp[0, 0]), float(self.llp[0, 1]))
            return
        lam = n
        ph = phase
        while (ph & 1) == 0 and lam > 1:
            lam -= 1
            ph >>= 1
        ops = 0
        for l in range(lam, n + 1):
            src = self.llp if l == 1 else self._p[l - 1]
            left = src[0::2]
            right = src[1::2]
            dst = self._writable_p(l)
            if ((phase >> (n - l)) & 1) == 0:
                comb = np.maximum if self.max_approx else _max_star_arr
                dst[:, 0] = comb(_log_sum(left[:, 0], right[:, 0]),
                                 _log_sum(left[:, 1], right[:, 1]))
                dst[:, 1] = comb(_log_sum(left[:, 1], right[:, 0]),
                                 _log_sum(left[:, 0], right[:, 1]))
            else:
                s = self._c[l][:, 0]
                ls0 = np.where(s == 0, left[:, 0], left[:, 1])
                ls1 = np.where(s == 0, left[:, 1], left[:, 0])
                dst[:, 0] = _log_sum(ls0, right[:, 0])
                dst[:, 1] = _log_sum(ls1, right[:, 1])
            ops += dst.shape[0]
        if self.counter is not None:
            self.counter.add(ops)
        self._pair = (float(self._p[n][0, 0]), float(self._p[n][0, 1]))

    def _absorb(self, bit):
        """Feed the decided bit into the partial-sum arrays."""
        phase = self.length - 1
        n = self.n
        if n == 0:
            return
        self._writable_c(n)[0, phase & 1] = bit
        lam = n
        ph = phase
        while (ph & 1) == 1 and lam >= 1:
            psi = ph >> 1
            par = psi & 1
            cl = self._c[lam]
            dst = self._writable_c(lam - 1)
            dst[0::2, par] = cl[:, 0] ^ cl[:, 1]
            dst[1::2, par] = cl[:, 1]
            lam -= 1
            ph = psi

    def codeword_bits(self):
        """Codeword accumulated in the bottom stage; valid once length == N.

        Equals encode(labels); kept as an internal consistency check.
        """
        if self.length != self.cfg.N:
            raise ValueError("codeword bits are defined only for full-length paths")
        if self.n == 0:
            return np.asarray(self.labels).copy()
        return self._c[0][:, 0].copy()


def new_path(cfg, llp, counter=None, max_approx=False):
    """The null path: length 0, metric 0.  ``max_approx`` switches the odd
    node updates from exact max* to a plain max."""
    llp = np.asarray(llp, dtype=float)
    if llp.shape != (cfg.N, 2):
        raise ValueError(f"expected ({cfg.N}, 2) initial log-APPs, got {llp.shape}")
    return DecodingPath(cfg, llp, counter, {"copied": 0}, max_approx=max_approx)


def clone_path(p):
    """Logical copy sharing unmodified stage state (copy-on-write)."""
    q = DecodingPath.__new__(DecodingPath)
    q.cfg = p.cfg
    q.llp = p.llp
    q.n = p.n
    q.length = p.length
    q.metric = p.metric
    q._parent = p._parent
    q._bit = p._bit
    q._mat = p._mat
    q._p = list(p._p)
    q._c = list(p._c)
    q._own_p = [False] * len(p._own_p)
    q._own_c = [False] * len(p._own_c)
    p._own_p = [False] * len(p._own_p)
    p._own_c = [False] * len(p._own_c)
    q._pair = p._pair
    q.counter = p.counter
    q.stats = p.stats
    q.max_approx = p.max_approx
    return q


def extend_path(p, bit):
    """Extend a path by one bit, returning the new path.

    The metric pair for both extensions is computed by a single sweep of
    node updates (cached on the parent, so extending with the other bit
    costs no further metric operations).  At frozen positions only the
    configured frozen value is legal and the metric carries over.
    """
    i = p.length
    if i >= p.cfg.N:
        raise ValueError("path is already full length")
    is_info = bool(p.cfg.info_mask()[i])
    if not is_info:
        expected = int(p.cfg.frozen_full()[i])
        if bit != expected:
            raise ValueError(
                f"position {i} is frozen to {expected}, cannot extend with {bit}")
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit}")
    if p._pair is None:
        p._sweep()
    pair = p._pair
    child = clone_path(p)
    child._parent = p
    child._bit = bit
    child._mat = None
    child.length = i + 1
    if is_info:
        child.metric = pair[bit]
    child._absorb(bit)
    child._pair = None
    return child


def posteriors_from_llp(llp):
    """Linear-domain per-symbol posterior pairs from log pairs."""
    return np.exp(np.maximum(np.asarray(llp, dtype=float), LOG_ZERO))


def prefix_app(v, posteriors, cfg):
    """A posteriori probability of a label prefix, by the linear recursion.

    Direct application of the odd/even APP recursions down to the
    per-symbol posteriors; exponential-friendly only at desk scale
    (N <= 16).  Used as a test oracle.

    Parameters
    ----------
    v : sequence of {0,1}
        The label prefix v_1^i, possibly empty.
    posteriors : (N, 2) array
        Per-symbol linear-domain posteriors P(x_j = b | y_j).
    cfg : CodeConfig
    """
    posteriors = np.asarray(posteriors, dtype=float)
    if cfg.N > 16:
        raise ValueError("prefix_app oracle is limited to N <= 16")
    v = [int(b) for b in v]
    if len(v) > cfg.N:
        raise ValueError("prefix longer than the block")
    return _app_recursive(v, posteriors)


def _app_recursive(v, post):
    m = post.shape[0]
    i = len(v)
    if i == 0:
        return 1.0
    if m == 1:
        return float(post[0, v[0]])
    half = m // 2
    odd = v[0::2]
    even = v[1::2]
    if i % 2 == 1:
        total = 0.0
        for b in (0, 1):
            e = even + [b]
            mixed = [odd[k] ^ e[k] for k in range(len(odd))]
            total += _app_recursive(mixed, post[:half]) * _app_recursive(e, post[half:])
        return total
    mixed = [odd[k] ^ even[k] for k in range(len(odd))]
    return _app_recursive(mixed, post[:half]) * _app_recursive(even, post[half:])


_CODEWORD_INT_CACHE = {}


def _codeword_ints(n):
    """codeword-as-integer (MSB = first bit) for every label vector v,
    in label-lexicographic order."""
    tab = _CODEWORD_INT_CACHE.get(n)
    if tab is None:
        N = 1 << n
        U = ((np.arange(1 << N)[:, None] >> np.arange(N - 1, -1, -1)) & 1).astype(np.int8)
        X = U[:, bit_reversal_permutation(n)]
        size = N
        while size > 1:
            h = size >> 1
            Xv = X.reshape(1 << N, -1, size)
            Xv[:, :, :h] ^= Xv[:, :, h:]
            size = h
        tab = (X.astype(np.int64) << np.arange(N - 1, -1, -1)).sum(axis=1)
        _CODEWORD_INT_CACHE[n] = tab
    return tab


def prefix_app_table(i, posteriors, cfg):
    """APPs of all 2^i prefixes of length i, in label-lexicographic order.

    Equivalent to calling :func:`prefix_app` on every prefix (the even
    recursion telescopes to a product of per-symbol posteriors over the
    codeword, and prefix probabilities are suffix sums of leaf
    probabilities); vectorized so the normalization and monotonicity
    properties can be checked exhaustively.
    """
    posteriors = np.asarray(posteriors, dtype=float)
    if cfg.N > 16:
        raise ValueError("prefix_app_table is limited to N <= 16")
    if not 0 <= i <= cfg.N:
        raise ValueError(f"need 0 <= i <= N, got {i}")
    joint = np.ones(1)
    for j in range(cfg.N):
        joint = np.kron(joint, posteriors[j])
    leaf = joint[_codeword_ints(cfg.n)]
    return leaf.reshape(1 << i, -1).sum(axis=1)


def reference_sc_decode(llp, cfg, counter=None):
    """Greedy SC decode built on extend_path; reference for the kernels."""
    p = new_path(cfg, llp, counter=counter)
    mask = cfg.info_mask()
    frozen = cfg.frozen_full()
    for i in range(cfg.N):
        if mask[i]:
            if p._pair is None:
                p._sweep()
            bit = 0 if p._pair[0] >= p._pair[1] else 1
        else:
            bit = int(frozen[i])
        p = extend_path(p, bit)
    return p
