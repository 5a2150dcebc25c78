"""Experiment scenarios: deterministic CSV producers behind the CLI.

Each scenario resolves its parameters (defaults overridden by the config
file), runs the simulation and writes one CSV per figure panel plus a
JSON manifest.  Numbers are written in shortest round-trip decimal form,
so identical inputs and seed reproduce byte-identical payloads.

CSV schemas (header rows are fixed):

- fig2-qubit-sweep      gamma,t_m,energy,energy_error,e_est
                        (fig2_heatmap / fig2_cut_vs_tm / fig2_cut_vs_gamma)
- fig3a-coupling-compare t,E_co_rotating,E_sigmaxx,E_random
- fig3b-rwa-ratio       t_m,energy,ratio_counter_co
- fig4-heisenberg-sweep gamma,t_m,energy,energy_error,e_est
                        (fig4_heatmap / fig4_cut_vs_tm / fig4_cut_vs_gamma)
- fig4d-scaling         n_sites,t_m,energy,energy_error,e_est
- oracle-crosscheck     gamma,t_m,max_abs_error

The omega quadrature must resolve integrand oscillations of period
2 pi / t_m across the sampling window, so the node count scales with the
largest interaction time of a sweep (capped at 1024).
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .channels import averaged_superops, channel_from_joint, Channel
from .models import (
    CouplingForm,
    CouplingSample,
    HeisenbergChain,
    MeterSpec,
    QubitSystem,
    build_system,
)
from .protocol import (
    FormCoupling,
    ProtocolConfig,
    QuadratureScheme,
    RandomHaarAxis,
    default_omega_window,
)
from .qubit_theory import (
    QubitParams,
    closed_form_energy,
    co_counter_ratio,
    energy_estimate,
    steady_energy,
)
from .steady import fixed_point, ground_projector
from .trajectories import run_ensemble, run_trajectory


class ConfigError(ValueError):
    """Invalid scenario name or parameters; maps to exit code 1."""


def omega_node_count(t_max: float, window: tuple[float, float],
                     cap: int = 1024) -> int:
    """Gauss-Legendre nodes needed in omega_m for interaction time t_max."""
    width = window[1] - window[0]
    if width <= 0:
        return 1
    return int(max(32, min(cap, math.ceil(0.35 * t_max * width))))


def _fmt(x) -> str:
    """Shortest round-trip decimal for binary64 (ints stay ints)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def write_csv(path: Path, header: list[str], rows: list[tuple]) -> Path:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])
    return path


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# scenario implementations
# ---------------------------------------------------------------------------

def _qubit_sweep_energies(omega_s: float, gammas: np.ndarray, t_ms: np.ndarray,
                          n_cos_theta: int, jobs: int) -> np.ndarray:
    """Steady-state energies on the (gamma, t_m) grid, sharing one
    eigendecomposition pass per gamma across all interaction times."""
    spec = QubitSystem(omega_s)
    window = default_omega_window(spec)
    n_om = omega_node_count(float(t_ms.max()), window)
    h_s = build_system(spec)
    t_list = [float(t) for t in t_ms]
    out = np.empty((len(gammas), len(t_ms)))
    for i, gamma in enumerate(gammas):
        cfg = ProtocolConfig(gamma=float(gamma), t_m=t_list[0], omega_window=window,
                             averaging=QuadratureScheme(n_cos_theta, 16, n_om))
        supers = averaged_superops(spec, cfg, t_list, workers=jobs)
        for j, s in enumerate(supers):
            out[i, j] = fixed_point(Channel(2, s), h_s).energy
    return out


def run_fig2(params: dict, out_dir: Path, jobs: int, seed: int) -> list[Path]:
    omega_s = params["omega_s"]
    gammas = np.geomspace(params["gamma_min"], params["gamma_max"], params["n_gamma"])
    t_ms = np.geomspace(params["t_m_min"], params["t_m_max"], params["n_t_m"])
    ground = -abs(omega_s) / 2

    def rows_for(gs, ts, energies):
        rows = []
        for i, g in enumerate(gs):
            for j, t in enumerate(ts):
                e = energies[i, j]
                rows.append((g, t, e, e - ground, energy_estimate(g, t)))
        return rows

    heat = _qubit_sweep_energies(omega_s, gammas, t_ms, params["n_cos_theta"], jobs)
    files = [write_csv(out_dir / "fig2_heatmap.csv",
                       ["gamma", "t_m", "energy", "energy_error", "e_est"],
                       rows_for(gammas, t_ms, heat))]

    cut_gammas = np.array(params["cut_gammas"], dtype=float)
    cut = _qubit_sweep_energies(omega_s, cut_gammas, t_ms, params["n_cos_theta"], jobs)
    files.append(write_csv(out_dir / "fig2_cut_vs_tm.csv",
                           ["gamma", "t_m", "energy", "energy_error", "e_est"],
                           rows_for(cut_gammas, t_ms, cut)))

    cut_tms = np.array(params["cut_t_ms"], dtype=float)
    cut2 = _qubit_sweep_energies(omega_s, gammas, cut_tms, params["n_cos_theta"], jobs)
    files.append(write_csv(out_dir / "fig2_cut_vs_gamma.csv",
                           ["gamma", "t_m", "energy", "energy_error", "e_est"],
                           rows_for(gammas, cut_tms, cut2)))
    return files


def run_fig3a(params: dict, out_dir: Path, jobs: int, seed: int) -> list[Path]:
    omega_s, gamma = params["omega_s"], params["gamma"]
    omega_m, t_m = params["omega_m"], params["t_m"]
    spec = QubitSystem(omega_s)
    window = (omega_m, omega_m)  # pinned meter splitting, as in the comparison
    common = dict(gamma=gamma, t_m=t_m, omega_window=window,
                  n_iterations=params["n_iterations"],
                  record_substeps=params["record_substeps"], seed=seed)
    rec_co = run_trajectory(spec, ProtocolConfig(
        axis_mode=FormCoupling(CouplingForm.CO_ROTATING), **common))
    rec_xx = run_trajectory(spec, ProtocolConfig(
        axis_mode=FormCoupling(CouplingForm.SIGMA_X_TAU_X), **common))
    ens = run_ensemble(spec, ProtocolConfig(axis_mode=RandomHaarAxis(), **common),
                       n_traj=params["n_random_trajectories"], workers=jobs)
    rows = list(zip(rec_co.times, rec_co.energies, rec_xx.energies,
                    ens.mean.energies))
    return [write_csv(out_dir / "fig3a_coupling_compare.csv",
                      ["t", "E_co_rotating", "E_sigmaxx", "E_random"], rows)]


def run_fig3b(params: dict, out_dir: Path, jobs: int, seed: int) -> list[Path]:
    t_grid = np.linspace(params["t_m_min"], params["t_m_max"], params["n_t_m"])
    rows = []
    for t in t_grid:
        p = QubitParams(params["omega_s"], params["omega_m"], params["gamma"],
                        float(t), params["n_m"])
        rows.append((t, steady_energy(p), co_counter_ratio(p)))
    return [write_csv(out_dir / "fig3b_rwa_ratio.csv",
                      ["t_m", "energy", "ratio_counter_co"], rows)]


def _chain_spec(n_sites: int, couplings=None) -> HeisenbergChain:
    if couplings is None:
        couplings = [1.0] * (n_sites - 1) + [0.0]  # open antiferromagnetic chain
    return HeisenbergChain(n_sites, tuple(couplings))


def _chain_sweep_energies(spec: HeisenbergChain, gammas, t_ms,
                          n_cos_theta: int, jobs: int) -> np.ndarray:
    window = default_omega_window(spec)
    n_om = omega_node_count(float(np.max(t_ms)), window)
    h_s = build_system(spec)
    t_list = [float(t) for t in t_ms]
    out = np.empty((len(gammas), len(t_ms)))
    for i, gamma in enumerate(gammas):
        cfg = ProtocolConfig(gamma=float(gamma), t_m=t_list[0], omega_window=window,
                             averaging=QuadratureScheme(n_cos_theta, 16, n_om))
        supers = averaged_superops(spec, cfg, t_list, workers=jobs)
        for j, s in enumerate(supers):
            out[i, j] = fixed_point(Channel(spec.dim, s), h_s).energy
    return out


def run_fig4(params: dict, out_dir: Path, jobs: int, seed: int) -> list[Path]:
    spec = _chain_spec(params["n_sites"], params.get("couplings"))
    gammas = np.geomspace(params["gamma_min"], params["gamma_max"], params["n_gamma"])
    t_ms = np.geomspace(params["t_m_min"], params["t_m_max"], params["n_t_m"])
    _, e0 = ground_projector(build_system(spec))

    def rows_for(gs, ts, energies):
        return [(g, t, energies[i, j], energies[i, j] - e0, energy_estimate(g, t))
                for i, g in enumerate(gs) for j, t in enumerate(ts)]

    heat = _chain_sweep_energies(spec, gammas, t_ms, params["n_cos_theta"], jobs)
    files = [write_csv(out_dir / "fig4_heatmap.csv",
                       ["gamma", "t_m", "energy", "energy_error", "e_est"],
                       rows_for(gammas, t_ms, heat))]
    cut_gammas = np.array(params["cut_gammas"], dtype=float)
    cut = _chain_sweep_energies(spec, cut_gammas, t_ms, params["n_cos_theta"], jobs)
    files.append(write_csv(out_dir / "fig4_cut_vs_tm.csv",
                           ["gamma", "t_m", "energy", "energy_error", "e_est"],
                           rows_for(cut_gammas, t_ms, cut)))
    cut_tms = np.array(params["cut_t_ms"], dtype=float)
    cut2 = _chain_sweep_energies(spec, gammas, cut_tms, params["n_cos_theta"], jobs)
    files.append(write_csv(out_dir / "fig4_cut_vs_gamma.csv",
                           ["gamma", "t_m", "energy", "energy_error", "e_est"],
                           rows_for(gammas, cut_tms, cut2)))
    return files


def run_fig4d(params: dict, out_dir: Path, jobs: int, seed: int) -> list[Path]:
    gamma = params["gamma"]
    t_ms = np.array(params["t_m_list"], dtype=float)
    rows = []
    for n_sites in params["n_sites_list"]:
        spec = _chain_spec(int(n_sites))
        _, e0 = ground_projector(build_system(spec))
        energies = _chain_sweep_energies(spec, np.array([gamma]), t_ms,
                                         params["n_cos_theta"], jobs)[0]
        for t, e in zip(t_ms, energies):
            rows.append((int(n_sites), t, e, e - e0, energy_estimate(gamma, t)))
    return [write_csv(out_dir / "fig4d_scaling.csv",
                      ["n_sites", "t_m", "energy", "energy_error", "e_est"], rows)]


def run_oracle_crosscheck(params: dict, out_dir: Path, jobs: int, seed: int) -> list[Path]:
    omega_s, omega_m, n_m = params["omega_s"], params["omega_m"], params["n_m"]
    n_iter = params["n_iterations"]
    gammas = np.geomspace(params["gamma_min"], params["gamma_max"], params["n_gamma"])
    t_ms = np.geomspace(params["t_m_min"], params["t_m_max"], params["n_t_m"])
    spec = QubitSystem(omega_s)
    h_s = build_system(spec).mat
    beta = math.inf if n_m == 0 else math.log(1.0 / n_m - 1.0) / omega_m

    rows = []
    for gamma in gammas:
        for t in t_ms:
            sample = CouplingSample(float(gamma), omega_m,
                                    form=CouplingForm.SIGMA_X_TAU_X)
            meter = MeterSpec(omega_m, beta)
            ch = channel_from_joint(spec, sample, float(t), meter)
            p = QubitParams(omega_s, omega_m, float(gamma), float(t), n_m)
            rho = np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex)  # E(0) = 0, coherent
            e_0 = float(np.real(np.einsum("ij,ji->", h_s, rho)))
            worst = 0.0
            for n in range(1, n_iter + 1):
                rho = ch.apply(rho)
                e_exact = float(np.real(np.einsum("ij,ji->", h_s, rho)))
                worst = max(worst, abs(e_exact - closed_form_energy(p, e_0, n)))
            rows.append((gamma, t, worst))
    return [write_csv(out_dir / "oracle_crosscheck.csv",
                      ["gamma", "t_m", "max_abs_error"], rows)]


# ---------------------------------------------------------------------------
# registry and manifest
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    defaults: dict
    runner: Callable[[dict, Path, int, int], list[Path]]


SCENARIOS: dict[str, Scenario] = {}


def _register(name, description, defaults, runner):
    SCENARIOS[name] = Scenario(name, description, defaults, runner)


_register(
    "fig2-qubit-sweep",
    "steady-state energy of a randomly cooled qubit over a (gamma, t_m) grid"
    " with cut panels",
    {"omega_s": 1.0, "gamma_min": 1e-3, "gamma_max": 0.3, "n_gamma": 16,
     "t_m_min": 1.0, "t_m_max": 1000.0, "n_t_m": 16,
     "cut_gammas": [1e-3, 1e-2, 1e-1], "cut_t_ms": [10.0, 100.0, 1000.0],
     "n_cos_theta": 16},
    run_fig2,
)
_register(
    "fig3a-coupling-compare",
    "energy vs time for co-rotating, sigma_x tau_x and randomized couplings",
    {"omega_s": 1.0, "gamma": 0.1, "omega_m": 1.0, "t_m": 20.0,
     "n_iterations": 50, "record_substeps": 20, "n_random_trajectories": 200},
    run_fig3a,
)
_register(
    "fig3b-rwa-ratio",
    "steady-state energy and counter/co rotating flow ratio vs t_m (revivals)",
    {"omega_s": 1.0, "omega_m": 1.0, "gamma": 0.1, "n_m": 0.0,
     "t_m_min": 1.0, "t_m_max": 200.0, "n_t_m": 400},
    run_fig3b,
)
_register(
    "fig4-heisenberg-sweep",
    "steady-state energy of a Heisenberg chain over a (gamma, t_m) grid",
    {"n_sites": 3, "couplings": None, "gamma_min": 1e-3, "gamma_max": 0.3,
     "n_gamma": 16, "t_m_min": 1.0, "t_m_max": 1000.0, "n_t_m": 16,
     "cut_gammas": [1e-3, 1e-2, 1e-1], "cut_t_ms": [10.0, 100.0, 1000.0],
     "n_cos_theta": 8},
    run_fig4,
)
_register(
    "fig4d-scaling",
    "chain steady-state energy vs t_m for N = 3, 4, 5 at weak coupling",
    {"gamma": 1e-3, "t_m_list": [100.0, 300.0, 1000.0],
     "n_sites_list": [3, 4, 5], "n_cos_theta": 8, "surrogate_bounds": None},
    run_fig4d,
)
_register(
    "oracle-crosscheck",
    "max |closed form - exact iteration| of the qubit energy per grid point",
    {"omega_s": 1.0, "omega_m": 1.3, "n_m": 0.0, "gamma_min": 1e-3,
     "gamma_max": 0.3, "n_gamma": 12, "t_m_min": 1.0, "t_m_max": 100.0,
     "n_t_m": 12, "n_iterations": 100},
    run_oracle_crosscheck,
)


def list_scenarios(machine_readable: bool = False) -> str:
    """Registry listing: one description line (plus defaults) per scenario,
    or a JSON array with ``machine_readable``."""
    if machine_readable:
        payload = [
            {"name": s.name, "description": s.description, "defaults": s.defaults}
            for s in SCENARIOS.values()
        ]
        return json.dumps(payload, indent=2, sort_keys=True)
    lines = []
    for s in SCENARIOS.values():
        defaults = ", ".join(f"{k}={v}" for k, v in s.defaults.items())
        lines.append(f"{s.name}: {s.description}")
        lines.append(f"    defaults: {defaults}")
    return "\n".join(lines)


def resolve_params(scenario: Scenario, overrides: dict) -> dict:
    params = dict(scenario.defaults)
    unknown = set(overrides) - set(params)
    if unknown:
        raise ConfigError(
            f"unknown parameters for {scenario.name}: {sorted(unknown)}")
    params.update(overrides)
    return params


def run_scenario(name: str, overrides: dict, out_dir: Path, jobs: int,
                 seed: int) -> list[Path]:
    """Run one scenario; writes its CSVs plus manifest.json in out_dir."""
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario '{name}'; see 'coolsim list'")
    scenario = SCENARIOS[name]
    params = resolve_params(scenario, overrides)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest_path = out_dir / "manifest.json"
    manifest = {
        "tool": "coolsim",
        "version": __version__,
        "scenario": name,
        "config": params,
        "seed": seed,
        "started_at": datetime.now(timezone.utc).isoformat(),
        "status": "running",
        "outputs": {},
    }
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    try:
        files = scenario.runner(params, out_dir, jobs, seed)
        manifest["status"] = "complete"
    except Exception:
        manifest["status"] = "failed"
        manifest["finished_at"] = datetime.now(timezone.utc).isoformat()
        manifest["outputs"] = {
            p.name: _sha256(p) for p in sorted(out_dir.glob("*.csv"))
        }
        manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                                 encoding="utf-8")
        raise
    manifest["finished_at"] = datetime.now(timezone.utc).isoformat()
    manifest["outputs"] = {p.name: _sha256(p) for p in files}
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n",
                             encoding="utf-8")
    return files + [manifest_path]
