"""The code tree and the four searches on a toy code.

Shows path metrics as log-APPs (they sum to one per level and can only
fall along a path), then compares how SC, SCL, SCS and SCH explore the
tree on the same received block.
"""

import numpy as np

import polarsc as ps
from polarsc.decoders import DecoderConfig

N, K = 8, 4
code = ps.select_information_set(ps.bhattacharyya_bec(0.5, N), K)
print(f"code: N={N}, K={K}, info set {code.info_set.tolist()}")

rng = np.random.default_rng(5)
u = code.frozen_full()
u[code.info_set] = rng.integers(0, 2, K)
ch = ps.ChannelModel("biawgn", ps.ebn0_db_to_sigma2(1.0, code.rate))
y = ps.transmit(ps.encode(u, code), ch, rng)
llp = ps.initial_log_app(y, ch)
post = ps.posteriors_from_llp(llp)

# --- the metric is a probability -----------------------------------------
print("\nper-level sums of path APPs (each is exactly 1):")
for i in (1, 3, 5, 8):
    print(f"  level {i}: {ps.prefix_app_table(i, post, code).sum():.12f}")

# follow the transmitted path and watch its metric fall monotonically
p = ps.new_path(code, llp)
trace = []
for bit in u:
    p = ps.extend_path(p, int(bit))
    trace.append(p.metric)
print("metric along the transmitted path:",
      " ".join(f"{m:6.2f}" for m in trace))

# --- the four searches -----------------------------------------------------
print(f"\ntransmitted block: {u.tolist()}")
results = {
    "SC": ps.decode_sc(llp, code),
    "SCL(4)": ps.decode_scl(llp, code, DecoderConfig("scl", L=4)),
    "SCS(4,64)": ps.decode_scs(llp, code, DecoderConfig("scs", L=4, D=64)),
    "SCH(4,8)": ps.decode_sch(llp, code, DecoderConfig("sch", L=4, D=8)),
}
for name, res in results.items():
    tag = "ok " if np.array_equal(res.u_hat, u) else "ERR"
    print(f"  {name:10s} -> {res.u_hat.tolist()}  [{tag}] "
          f"metric {res.metric:7.3f}, {res.metric_ops:3d} metric ops")

# the identities: width-1 searches collapse to SC, SCH interpolates
sc = results["SC"]
assert np.array_equal(
    ps.decode_scl(llp, code, DecoderConfig("scl", L=1)).u_hat, sc.u_hat)
assert np.array_equal(
    results["SCH(4,8)"].u_hat, results["SCL(4)"].u_hat)  # D = 2L
assert np.array_equal(
    ps.decode_sch(llp, code, DecoderConfig("sch", L=4, D=4 * N)).u_hat,
    results["SCS(4,64)"].u_hat)                           # D >= L*N
print("\nidentities hold: SCL(1)=SC, SCH(L,2L)=SCL(L), SCH(L,LN)=SCS(L,LN)")

# --- exhaustive search is the reference ------------------------------------
u_ml, m_ml = ps.brute_force_ml(llp, code)
full = ps.decode_scl(llp, code, DecoderConfig("scl", L=2 ** K))
print(f"L=2^K list equals brute-force ML: "
      f"{np.array_equal(full.u_hat, u_ml)} (ML metric {m_ml:.3f})")
