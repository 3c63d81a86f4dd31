import numpy as np
import pytest

import polarsc as ps


def make_code(N, K, method="bec", param=0.4, design_rate=None):
    """Construct a small test code deterministically."""
    if method == "bec":
        prof = ps.bhattacharyya_bec(param, N)
    else:
        prof = ps.gaussian_approx_awgn(param, design_rate or K / N, N)
    return ps.select_information_set(prof, K)


def random_block(cfg, rng):
    u = cfg.frozen_full()
    if cfg.K:
        u[cfg.info_set] = rng.integers(0, 2, cfg.K, dtype=np.int8)
    return u


def seeded_llp(cfg, ch, seed, block):
    """One transmitted block with its initial log-APPs, per-block seeded."""
    rng = np.random.default_rng([seed, block])
    u = random_block(cfg, rng)
    y = ps.transmit(ps.encode(u, cfg), ch, rng)
    return u, ps.initial_log_app(y, ch)


@pytest.fixture(scope="session")
def awgn_2db():
    return ps.ChannelModel("biawgn", ps.ebn0_db_to_sigma2(2.0, 0.5))


@pytest.fixture(scope="session")
def code16():
    return make_code(16, 8, method="awgn", param=1.0, design_rate=0.5)


@pytest.fixture(scope="session")
def code64():
    return make_code(64, 32, method="awgn", param=2.0, design_rate=0.5)
