"""Cool a single qubit by randomized repeated meter interactions.

Builds the averaged one-iteration channel for a qubit with unknown
quantization axis, extracts the stroboscopic steady state for a few
coupling strengths and interaction times, and shows the 1/t_M error
scaling at weak coupling.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from coolsim import (
    ProtocolConfig,
    QuadratureScheme,
    QubitSystem,
    average_channel,
    build_system,
    default_omega_window,
    fixed_point,
)
from coolsim.scenarios import omega_node_count

spec = QubitSystem(omega_s=1.0)
h_s = build_system(spec)
window = default_omega_window(spec)
print(f"meter splitting window: {window}")

t_grid = np.geomspace(3, 1000, 10)
fig, ax = plt.subplots(figsize=(5, 4), constrained_layout=True)
for gamma in (1e-3, 1e-2, 1e-1):
    errors = []
    for t_m in t_grid:
        cfg = ProtocolConfig(
            gamma=gamma, t_m=float(t_m), omega_window=window,
            averaging=QuadratureScheme(16, 16, omega_node_count(float(t_m), window)))
        res = fixed_point(average_channel(spec, cfg), h_s)
        errors.append(res.energy + 0.5)
        print(f"gamma={gamma:7.0e} t_M={t_m:7.1f}: E_inf={res.energy:+.6f} "
              f"(residual {res.residual:.1e})")
    ax.loglog(t_grid, errors, marker="o", ms=3, label=f"$\\gamma$={gamma:g}")

ax.loglog(t_grid, 1 / t_grid, "k:", label=r"$1/t_M$")
ax.set_xlabel(r"interaction time $t_M$")
ax.set_ylabel(r"$E_\infty + \omega_S/2$")
ax.legend()
fig.savefig("demo_cool_a_qubit.png", dpi=130)
print("wrote demo_cool_a_qubit.png")
