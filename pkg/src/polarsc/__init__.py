"""Polar codes with successive-cancellation tree-search decoding.

Encoders, code construction (Bhattacharyya / Gaussian approximation /
genie-aided Monte-Carlo), the SC decoder and its list (SCL), stack (SCS)
and hybrid (SCH) variants with metric-threshold pruning, and a seeded
BLER/complexity simulation harness.
"""

from .channel import (BEC_ERASURE, LOG_ZERO, ChannelModel, ebn0_db_to_sigma2,
                      initial_log_app, parse_channel_spec, transmit)
from .construction import (ReliabilityProfile, bhattacharyya_bec,
                           gaussian_approx_awgn, monte_carlo_awgn,
                           monte_carlo_pe, select_information_set)
from .core import (CodeConfig, bit_reversal_permutation, encode,
                   generator_matrix, load_code, save_code, sc_union_bound)
from .decoders import (DecodeResult, DecoderConfig, brute_force_ml, decode,
                       decode_sc, decode_sch, decode_scl, decode_scs,
                       forced_path_pairs, parse_decoder_spec, score_path,
                       tau_from_tolerance)
from .metrics import (DecodingPath, MetricCounter, clone_path, extend_path,
                      max_star, new_path, posteriors_from_llp, prefix_app,
                      prefix_app_table, reference_sc_decode)
from .sim import (ExperimentSpec, SimRecord, export_results, run_bler_sweep,
                  run_ml_bound, wilson_interval)

__version__ = "0.1.0"
