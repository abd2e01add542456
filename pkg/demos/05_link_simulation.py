"""End-to-end FER and MSE sweeps.

Runs the Monte Carlo harness for EPS, UEPS and traditional pilot insertion
with MMSE estimation at 50 Hz Doppler, using a short stop rule so the demo
finishes in about a minute.  The CLI ``polarpilot simulate-fer`` runs the
same harness from a config file.

Run with ``python3 demos/05_link_simulation.py``.
"""
# %%
import sys

from polarpilot import ExperimentConfig, run_fer, run_mse, write_csv

sweep = tuple((e, 50.0) for e in (4.0, 10.0, 16.0))
common = dict(K=128, sweep=sweep, estimator="mmse", min_frame_errors=50, max_frames=20_000, seed=5)

# %% FER for the three schemes; EPS and UEPS use the same number of information pilots.
rows = []
rows += run_fer(ExperimentConfig(scheme="eps", **common))
rows += run_fer(ExperimentConfig(scheme="ueps", num_info_pilots=42, **common))
rows += run_fer(ExperimentConfig(scheme="traditional", **common))
write_csv(rows, sys.stdout, timing=False)

# %% Channel estimation MSE, no decoding involved.
for est in ("ls", "mmse"):
    cfg = ExperimentConfig(scheme="eps", K=128, sweep=sweep, estimator=est, max_frames=5000, seed=5)
    for r in run_mse(cfg):
        print(f"{est:>4} {r.ebno_db:4.0f} dB: pilots {r.mse_pilots:.4f}, full block {r.mse_full:.4f}")
