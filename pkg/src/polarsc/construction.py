"""Per-channel reliability estimation and information-set selection.

Three routes are provided: the exact Bhattacharyya recursion for the BEC,
the Gaussian approximation for the binary-input AWGN channel, and
genie-aided Monte-Carlo estimation, which serves as the reference oracle
for the other two.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .channel import ChannelModel, ebn0_db_to_sigma2, initial_log_app, transmit
from .core import CodeConfig, encode
from .decoders import forced_path_pairs

# Trials are consumed in fixed-size chunks, each with its own RNG stream
# derived from (seed, chunk index), so a worker split at chunk granularity
# cannot change the merged result.
MC_CHUNK = 1024


@dataclass
class ReliabilityProfile:
    """Per-channel reliability estimates; smaller = more reliable."""

    method: str
    channel_param: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)


def _check_block_length(N):
    N = int(N)
    n = N.bit_length() - 1
    if N < 1 or (1 << n) != N:
        raise ValueError(f"block length must be a power of two, got {N}")
    return n


def bhattacharyya_bec(epsilon, N):
    """Exact Bhattacharyya parameters of the N polarized BECs.

    Seed Z = epsilon; each polarization step maps Z to the interleaved pair
    (2Z - Z^2, Z^2), index i corresponding to the i-th synthesized channel.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"erasure probability must be in [0,1], got {epsilon}")
    n = _check_block_length(N)
    z = np.array([epsilon], dtype=float)
    for _ in range(n):
        nz = np.empty(2 * z.shape[0])
        nz[0::2] = 2.0 * z - z * z
        nz[1::2] = z * z
        z = nz
    return ReliabilityProfile("bhattacharyya_bec", float(epsilon), z)


# Two-piece closed form for the Gaussian-approximation phi function
# (mean-LLR transfer of a check node):
#   phi(x) = exp(-0.4527 x^0.86 + 0.0218)            for 0 < x < 10
#   phi(x) = sqrt(pi/x) e^(-x/4) (1 - 10/(7x))       for x >= 10
_PHI_A = -0.4527
_PHI_B = 0.86
_PHI_C = 0.0218
_MEAN_CAP = 1.0e5


def _phi(x):
    if x < 10.0:
        return math.exp(_PHI_A * x ** _PHI_B + _PHI_C)
    return math.sqrt(math.pi / x) * math.exp(-x / 4.0) * (1.0 - 10.0 / (7.0 * x))


def _phi_inv(y):
    if y <= 0.0:
        return _MEAN_CAP
    if y >= _phi(10.0):
        # closed-form inverse of the small-x piece
        x = ((_PHI_C - math.log(y)) / -_PHI_A) ** (1.0 / _PHI_B)
        return min(x, _MEAN_CAP)
    lo, hi = 10.0, 20.0
    while _phi(hi) > y:
        hi *= 2.0
        if hi >= _MEAN_CAP:
            return _MEAN_CAP
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _phi(mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9 * hi:
            break
    return 0.5 * (lo + hi)


def _q_func(x):
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def gaussian_approx_awgn(ebn0_db, rate, N):
    """Gaussian-approximation error probabilities of the polarized
    binary-input AWGN channels.

    LLR means start at 2/sigma^2 with sigma^2 = 1/(2 R 10^(EbN0/10)); a
    polarization step maps mean m to the interleaved pair
    (phi_inv(1 - (1 - phi(m))^2), 2m) and P_e = Q(sqrt(m/2)).
    """
    if not 0.0 < rate <= 1.0:
        raise ValueError(f"rate must be in (0,1], got {rate}")
    n = _check_block_length(N)
    sigma2 = ebn0_db_to_sigma2(ebn0_db, rate)
    means = np.array([2.0 / sigma2])
    for _ in range(n):
        nm = np.empty(2 * means.shape[0])
        for j, m in enumerate(means):
            p = _phi(m)
            nm[2 * j] = _phi_inv(1.0 - (1.0 - p) ** 2)
            nm[2 * j + 1] = min(2.0 * m, _MEAN_CAP)
        means = nm
    pe = np.array([_q_func(math.sqrt(m / 2.0)) for m in means])
    return ReliabilityProfile("gaussian_approx_awgn", float(ebn0_db), pe)


def monte_carlo_pe(channel, N, trials, seed):
    """Genie-aided per-channel error rates.

    Transmits random source blocks and decodes each bit with all previous
    bits corrected to the truth; values[i] is the fraction of trials whose
    i-th decision errs (ties decide 0). Deterministic given the seed and
    independent of any worker split at chunk granularity.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    n = _check_block_length(N)
    cfg = CodeConfig(n, range(N))
    errors = np.zeros(N, dtype=np.int64)
    done = 0
    chunk = 0
    while done < trials:
        take = min(MC_CHUNK, trials - done)
        rng = np.random.default_rng([seed, chunk])
        for _ in range(take):
            u = rng.integers(0, 2, N).astype(np.int8)
            y = transmit(encode(u, cfg), channel, rng)
            pairs = forced_path_pairs(initial_log_app(y, channel), u)
            hard = (pairs[:, 0] < pairs[:, 1]).astype(np.int8)
            errors += hard != u
        done += take
        chunk += 1
    return ReliabilityProfile(f"monte_carlo_{channel.kind}",
                              float(channel.param), errors / trials)


def monte_carlo_awgn(ebn0_db, rate, N, trials, seed):
    """Monte-Carlo profile for a BIAWGN channel given E_b/N_0 in dB."""
    ch = ChannelModel("biawgn", ebn0_db_to_sigma2(ebn0_db, rate))
    prof = monte_carlo_pe(ch, N, trials, seed)
    prof.channel_param = float(ebn0_db)
    return prof


def select_information_set(profile, K):
    """Pick the K most reliable channels (smallest values, ties to the
    smaller index) and return the resulting CodeConfig."""
    values = profile.values
    N = values.shape[0]
    n = _check_block_length(N)
    if not 0 <= K <= N:
        raise ValueError(f"need 0 <= K <= N, got K={K}")
    order = np.lexsort((np.arange(N), values))
    info = np.sort(order[:K])
    meta = {
        "method": profile.method,
        "channel_param": profile.channel_param,
        "reliabilities": [float(v) for v in values],
    }
    return CodeConfig(n, info, construction_meta=meta)
