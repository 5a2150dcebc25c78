"""Steady-state energy and counter/co-rotating revivals vs t_M.

At resonance the co-rotating oscillation frequency is nu = gamma; at
integer nu t_M / 2 pi the co-rotating energy flow vanishes and the
counter-rotating one dominates, heating the steady state to +omega_s/2.
"""

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from coolsim import QubitParams, co_counter_ratio, steady_energy

gamma = 0.1
ts = np.linspace(1.0, 200.0, 2000)
params = [QubitParams(1.0, 1.0, gamma, float(t)) for t in ts]
energies = [steady_energy(p) for p in params]
ratios = [co_counter_ratio(p) for p in params]

for k in (1, 2, 3):
    t_rev = 2 * math.pi * k / gamma
    print(f"revival k={k}: t_M={t_rev:7.2f}, "
          f"ratio={co_counter_ratio(QubitParams(1.0, 1.0, gamma, t_rev))}, "
          f"E_inf={steady_energy(QubitParams(1.0, 1.0, gamma, t_rev)):+.3f}")

fig, ax = plt.subplots(figsize=(6, 3.6), constrained_layout=True)
ax.plot(ts, energies, "k-", lw=1)
ax.set_xlabel(r"$t_M$")
ax.set_ylabel(r"$E_\infty$")
twin = ax.twinx()
twin.semilogy(ts, np.clip(ratios, 1e-12, 1e12), color="tab:red", lw=0.8)
twin.set_ylabel("counter/co flow ratio", color="tab:red")
fig.savefig("demo_rwa_revivals.png", dpi=130)
print("wrote demo_rwa_revivals.png")
