"""Continuous steering baseline: Lindblad relaxation of a qubit.

The infinite-reset-rate limit of blind steering obeys a Lindblad master
equation.  With a single sigma_minus jump the qubit relaxes exponentially
to its ground state; this script integrates the equation and compares
the decay of the excited population with the analytic exponential.
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from coolsim import (
    DensityMatrix,
    LindbladSpec,
    QubitSystem,
    SIGMA_MINUS,
    build_system,
    lindblad_evolve,
)

kappa = 0.25
spec = LindbladSpec(build_system(QubitSystem(1.0)), (SIGMA_MINUS,), kappa,
                    t_final=30.0, dt=0.005)
rec = lindblad_evolve(spec, DensityMatrix.from_matrix(np.diag([1.0, 0.0])))
p_up = rec.energies + 0.5
print(f"trace drift over the run: {rec.trace_drift:.2e}")
print(f"final excited population {p_up[-1]:.3e} "
      f"(analytic {np.exp(-kappa * rec.times[-1]):.3e})")

fig, ax = plt.subplots(figsize=(5.5, 3.6), constrained_layout=True)
ax.semilogy(rec.times, np.clip(p_up, 1e-16, None), label="RK4 integration")
ax.semilogy(rec.times, np.exp(-kappa * rec.times), "k:", label=r"$e^{-\kappa t}$")
ax.set_xlabel("time")
ax.set_ylabel("excited population")
ax.legend()
fig.savefig("demo_steering_lindblad.png", dpi=130)
print("wrote demo_steering_lindblad.png")
