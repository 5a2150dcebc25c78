"""Stochastic realizations of the cooling protocol.

One trajectory applies a fresh randomly sampled iteration channel
``n_iterations`` times, recording the stroboscopic energy at every meter
reset (and optionally intra-interval energies, which show the coherent
oscillations between resets).  Randomness comes from counter-based
streams keyed by (seed, trajectory, iteration), so runs are reproducible
regardless of execution order and trajectories parallelize trivially.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import _kraus_from_eigh, _meter_populations
from .models import SystemSpec, build_joint, build_system
from .operators import DensityMatrix, eigh
from .protocol import ProtocolConfig, draw_sample, iteration_rng
from .steady import ground_projector


@dataclass(frozen=True)
class TrajectoryRecord:
    """Time series of one run: times, energies, ground fidelities and the
    per-iteration (theta, phi, omega_m) sample log."""

    times: np.ndarray
    energies: np.ndarray
    fidelities: np.ndarray
    samples_used: tuple[tuple[float, float, float], ...] = ()
    trace_drift: float | None = None

    def __post_init__(self):
        if len(self.times) != len(self.energies):
            raise ValueError("times and energies must have equal length")


@dataclass(frozen=True)
class EnsembleResult:
    mean: TrajectoryRecord
    variance: np.ndarray
    n_trajectories: int

    @property
    def stderr(self) -> np.ndarray:
        return np.sqrt(self.variance / self.n_trajectories)


def _apply_kraus(kraus: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return np.einsum("kab,by,kxy->ax", kraus, rho, kraus.conj())


def run_trajectory(spec: SystemSpec, cfg: ProtocolConfig,
                   rho0: DensityMatrix | None = None,
                   stream_index: int = 0) -> TrajectoryRecord:
    """One stochastic protocol realization.

    The initial state defaults to the maximally mixed (system-agnostic)
    state.  With ``record_substeps = n > 0`` each interval contributes n
    evenly spaced intra-interval points, the last one being the
    stroboscopic point at the meter reset.
    """
    h_s = build_system(spec)
    d = h_s.dim
    rho = (np.eye(d, dtype=complex) / d) if rho0 is None else rho0.mat.copy()
    p0, _ = ground_projector(h_s)

    def energy(r):
        return float(np.real(np.einsum("ij,ji->", h_s.mat, r)))

    def fidelity(r):
        return float(np.real(np.einsum("ij,ji->", p0.mat, r)))

    times = [0.0]
    energies = [energy(rho)]
    fidelities = [fidelity(rho)]
    log: list[tuple[float, float, float]] = []

    n_sub = cfg.record_substeps
    sub_times = (np.arange(1, n_sub + 1) / n_sub * cfg.t_m) if n_sub > 0 else np.array([cfg.t_m])

    for n in range(cfg.n_iterations):
        rng = iteration_rng(cfg.seed, stream_index, n)
        sample = draw_sample(cfg, rng)
        theta, phi = sample.axes[0]
        log.append((theta, phi, sample.omega_m))

        h_joint = build_joint(spec, sample)
        w, v = eigh(h_joint.mat)
        pops = _meter_populations(spec, cfg.meter_beta, sample.omega_m)
        for s in sub_times:
            kraus = _kraus_from_eigh(w, v, float(s), d, pops)
            rho_s = _apply_kraus(kraus, rho)
            times.append(n * cfg.t_m + float(s))
            energies.append(energy(rho_s))
            fidelities.append(fidelity(rho_s))
        rho = rho_s  # the last substep is the stroboscopic endpoint

    return TrajectoryRecord(np.array(times), np.array(energies),
                            np.array(fidelities), tuple(log))


def run_ensemble(spec: SystemSpec, cfg: ProtocolConfig, n_traj: int,
                 rho0: DensityMatrix | None = None,
                 workers: int | None = None) -> EnsembleResult:
    """Mean and per-time sample variance over independent trajectories.

    Trajectory k uses the stream family (seed, k, .); the result does not
    depend on ``workers``.
    """
    if n_traj < 2:
        raise ValueError("an ensemble needs at least two trajectories")

    def one(k: int) -> TrajectoryRecord:
        return run_trajectory(spec, cfg, rho0, stream_index=k)

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, range(n_traj)))
    else:
        records = [one(k) for k in range(n_traj)]

    energies = np.stack([r.energies for r in records])
    fidelities = np.stack([r.fidelities for r in records])
    mean = TrajectoryRecord(records[0].times, energies.mean(axis=0),
                            fidelities.mean(axis=0))
    return EnsembleResult(mean, energies.var(axis=0, ddof=1), n_traj)
