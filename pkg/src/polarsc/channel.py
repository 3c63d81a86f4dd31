"""Channel simulation and conversion of observations into initial log-APPs.

Conventions fixed here and used everywhere else:

* natural logarithms throughout;
* antipodal mapping bit 0 -> +1, bit 1 -> -1;
* "minus infinity" is the absorbing sentinel ``LOG_ZERO`` (-1e6), never an
  IEEE infinity;
* E_b/N_0 (dB) converts to noise variance as sigma^2 = 1 / (2 R 10^(dB/10)).
"""

import math

import numpy as np

# Log-domain floor. Any log value at or below this behaves as log(0): it is
# absorbing under addition and max*.
LOG_ZERO = -1.0e6

# BEC observation symbol codes.
BEC_ERASURE = 2


class ChannelModel:
    """A memoryless binary-input channel: ``bec`` with erasure probability
    ``param`` or ``biawgn`` with noise variance ``param``."""

    def __init__(self, kind, param):
        kind = kind.lower()
        if kind == "bec":
            if not 0.0 <= param <= 1.0:
                raise ValueError(f"erasure probability must be in [0,1], got {param}")
        elif kind == "biawgn":
            if param <= 0.0:
                raise ValueError(f"noise variance must be > 0, got {param}")
        else:
            raise ValueError(f"unknown channel kind {kind!r}")
        self.kind = kind
        self.param = float(param)

    def __repr__(self):
        return f"ChannelModel({self.kind!r}, {self.param!r})"


def ebn0_db_to_sigma2(ebn0_db, rate):
    """sigma^2 = 1 / (2 * R * 10^(EbN0/10))."""
    if rate <= 0.0:
        raise ValueError(f"rate must be positive, got {rate}")
    return 1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0))


def parse_channel_spec(spec):
    """Parse CLI channel notation ``bec:<epsilon>`` / ``awgn:<ebn0_db>``.

    Returns ``(kind, value)`` where value is epsilon for ``bec`` and
    E_b/N_0 in dB for ``awgn`` (conversion to sigma^2 needs the code rate).
    """
    try:
        kind, value = spec.split(":", 1)
        value = float(value)
    except ValueError:
        raise ValueError(f"malformed channel spec {spec!r}") from None
    kind = kind.lower()
    if kind not in ("bec", "awgn"):
        raise ValueError(f"unknown channel kind in {spec!r}")
    return kind, value


def channel_for_point(kind, value, rate):
    """Build the ChannelModel for one grid point of a sweep."""
    if kind == "bec":
        return ChannelModel("bec", value)
    return ChannelModel("biawgn", ebn0_db_to_sigma2(value, rate))


def transmit(x, ch, rng):
    """Send a codeword through the channel.

    Parameters
    ----------
    x : array of {0,1}
    ch : ChannelModel
    rng : numpy Generator (or an integer seed)

    Returns
    -------
    ndarray
        float64 observations for biawgn; int8 symbols for bec with
        ``BEC_ERASURE`` marking erased positions.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    x = np.asarray(x, dtype=np.int8)
    if ch.kind == "biawgn":
        sigma = math.sqrt(ch.param)
        return (1.0 - 2.0 * x) + sigma * rng.standard_normal(x.shape[0])
    y = x.copy()
    y[rng.random(x.shape[0]) < ch.param] = BEC_ERASURE
    return y


def initial_log_app(y, ch):
    """Per-symbol log a posteriori probabilities under the uniform prior.

    Returns an (N, 2) array; column b holds log P(x_i = b | y_i).  For the
    biawgn channel log P(b|y) = -log(1 + exp(-(1-2b) * 2y / sigma^2)); for
    the bec, erased symbols give (log 1/2, log 1/2) and clean symbols give
    0 for the observed bit and LOG_ZERO for the other.
    """
    y = np.asarray(y)
    if ch.kind == "biawgn":
        t = 2.0 * y.astype(float) / ch.param
        llp = np.empty((y.shape[0], 2))
        llp[:, 0] = -_softplus(-t)
        llp[:, 1] = -_softplus(t)
        return np.maximum(llp, LOG_ZERO)
    llp = np.full((y.shape[0], 2), LOG_ZERO)
    half = -math.log(2.0)
    erased = y == BEC_ERASURE
    llp[erased, :] = half
    llp[(~erased) & (y == 0), 0] = 0.0
    llp[(~erased) & (y == 1), 1] = 0.0
    return llp


def _softplus(t):
    """log(1 + exp(t)), elementwise, overflow-safe."""
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    pos = t > 0
    out[pos] = t[pos] + np.log1p(np.exp(-t[pos]))
    out[~pos] = np.log1p(np.exp(t[~pos]))
    return out
