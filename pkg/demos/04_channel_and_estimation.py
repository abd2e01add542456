"""Correlated Rayleigh fading and pilot-based channel estimation.

Draws Jakes-correlated fading, sends an all-zero block and compares LS,
MMSE and the interpolated full-block estimates for EPS and UEPS pilots.

Run with ``python3 demos/04_channel_and_estimation.py``.
"""
# %%
import numpy as np

from polarpilot import EstimatorConfig, FadingScenario, construct_info_set, gen_rayleigh_block
from polarpilot import interpolate_linear, jakes_autocorr, ls_estimate, mmse_estimate, transmit
from polarpilot import select_eps, select_ueps

T = 1 / 256e3
print("J0 correlation across a 256-symbol block at 10 / 50 Hz:",
      jakes_autocorr(256, 10, T), jakes_autocorr(256, 50, T))

# %% Empirical lag correlation against the Bessel target.
scen = FadingScenario(fd_hz=2000, symbol_time=T, ebno_db=10.0, rate=0.5)
h = gen_rayleigh_block(scen, 64, np.random.default_rng(0), frames=5000).h
for lag in (1, 8, 32):
    emp = np.mean(h[:, lag:] * np.conj(h[:, :-lag])).real
    print(f"lag {lag:2d}: empirical {emp:.3f}, target {jakes_autocorr(lag, 2000, T):.3f}")

# %% Estimation error for both pilot plans at 50 Hz and 5 dB.
spec = construct_info_set(8, 128)
eps = select_eps(spec, 64)
ueps = select_ueps(spec, 64, num_info_pilots=eps.info_pilots.size)
rate = (spec.K - eps.info_pilots.size) / spec.N
scen = FadingScenario(fd_hz=50, symbol_time=T, ebno_db=5.0, rate=rate)
rng = np.random.default_rng(3)
real = gen_rayleigh_block(scen, spec.N, rng, frames=20000)
y = transmit(np.zeros((20000, spec.N), dtype=np.uint8), real, rng)
for name, plan in (("EPS", eps), ("UEPS", ueps)):
    pos = plan.positions.members
    for kind in ("ls", "mmse"):
        cfg = EstimatorConfig.jakes(kind, 5.0, rate, 50, T)
        est = ls_estimate(y[:, pos - 1], np.ones(pos.size))
        if kind == "mmse":
            est = mmse_estimate(est, pos, cfg)
        full = interpolate_linear(pos, est, spec.N)
        mse = np.mean(np.abs(full - real.h) ** 2)
        print(f"{name:>4} {kind:>4}: full-block MSE {mse:.4f}")
