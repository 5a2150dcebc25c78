"""Figure rendering from validated scenario tables.

One image per panel.  Output is deterministic: the SVG backend gets a
fixed hash salt and no date metadata, so re-rendering the same inputs
reproduces identical bytes (tested), and the Agg PNG writer is
deterministic by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .schemas import SCENARIO_SCHEMAS, SchemaMismatchError, Table, load_table  # noqa: E402

plt.rcParams["svg.hashsalt"] = "coolsim-figures"


@dataclass(frozen=True)
class FigureJob:
    """One scenario's rendering work order."""

    scenario: str
    csv_dir: Path
    out_dir: Path
    image_format: str = "png"
    # style options: reference lines for fig4d (n_sites -> energy bound)
    surrogate_bounds: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.scenario not in SCENARIO_SCHEMAS:
            raise SchemaMismatchError(f"unknown scenario '{self.scenario}'")
        if self.image_format not in ("png", "svg"):
            raise ValueError("image format must be png or svg")


def _save(fig, path: Path) -> Path:
    if path.suffix == ".svg":
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def _positive(values: np.ndarray) -> np.ndarray:
    return np.clip(values, 1e-300, None)


def _sweep_heatmap(table: Table, title: str, out: Path) -> Path:
    gammas = np.unique(table["gamma"])
    t_ms = np.unique(table["t_m"])
    grid = np.full((len(gammas), len(t_ms)), np.nan)
    gi = {g: i for i, g in enumerate(gammas)}
    ti = {t: j for j, t in enumerate(t_ms)}
    for g, t, err in zip(table["gamma"], table["t_m"], table["energy_error"]):
        grid[gi[g], ti[t]] = err
    fig, ax = plt.subplots(figsize=(5.0, 4.0), constrained_layout=True)
    mesh = ax.pcolormesh(t_ms, gammas, np.log10(_positive(grid)), shading="auto",
                         cmap="viridis")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"interaction time $t_M$")
    ax.set_ylabel(r"coupling $\gamma$")
    ax.set_title(title)
    fig.colorbar(mesh, ax=ax, label=r"$\log_{10}(E_\infty - E_0)$")
    return _save(fig, out)


def _sweep_cut(table: Table, x_col: str, series_col: str, title: str,
               out: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.0, 4.0), constrained_layout=True)
    for val in np.unique(table[series_col]):
        sel = table[series_col] == val
        order = np.argsort(table[x_col][sel])
        x = table[x_col][sel][order]
        ax.loglog(x, _positive(table["energy_error"][sel][order]),
                  marker="o", ms=3, label=f"{series_col}={val:g}")
        ax.loglog(x, _positive(table["e_est"][sel][order]),
                  color="black", lw=0.8, ls=":")
    ax.set_xlabel(x_col)
    ax.set_ylabel(r"$E_\infty - E_0$")
    ax.set_title(title + " (dotted: estimate)")
    ax.legend(fontsize=8)
    return _save(fig, out)


def _render_sweep(job: FigureJob, prefix: str, title: str) -> list[Path]:
    schemas = SCENARIO_SCHEMAS[job.scenario]
    outs = []
    suffix = "." + job.image_format
    heat = load_table(job.csv_dir / f"{prefix}_heatmap.csv", schemas[f"{prefix}_heatmap.csv"])
    outs.append(_sweep_heatmap(heat, title, job.out_dir / f"{prefix}_heatmap{suffix}"))
    cut_tm = load_table(job.csv_dir / f"{prefix}_cut_vs_tm.csv",
                        schemas[f"{prefix}_cut_vs_tm.csv"])
    outs.append(_sweep_cut(cut_tm, "t_m", "gamma", title,
                           job.out_dir / f"{prefix}_cut_vs_tm{suffix}"))
    cut_g = load_table(job.csv_dir / f"{prefix}_cut_vs_gamma.csv",
                       schemas[f"{prefix}_cut_vs_gamma.csv"])
    outs.append(_sweep_cut(cut_g, "gamma", "t_m", title,
                           job.out_dir / f"{prefix}_cut_vs_gamma{suffix}"))
    return outs


def _render_fig3a(job: FigureJob) -> list[Path]:
    name = "fig3a_coupling_compare.csv"
    table = load_table(job.csv_dir / name, SCENARIO_SCHEMAS[job.scenario][name])
    fig, ax = plt.subplots(figsize=(6.0, 3.6), constrained_layout=True)
    for col, label in [("E_co_rotating", "co-rotating"),
                       ("E_sigmaxx", r"$\sigma_x \tau_x$"),
                       ("E_random", "randomized axis (mean)")]:
        ax.plot(table["t"], table[col], lw=1.2, label=label)
    ax.set_xlabel(r"time $\omega_S t$")
    ax.set_ylabel(r"system energy $E_S$")
    ax.set_title("cooling under three coupling choices")
    ax.legend(fontsize=8)
    out = job.out_dir / f"fig3a_coupling_compare.{job.image_format}"
    return [_save(fig, out)]


def _render_fig3b(job: FigureJob) -> list[Path]:
    name = "fig3b_rwa_ratio.csv"
    table = load_table(job.csv_dir / name, SCENARIO_SCHEMAS[job.scenario][name])
    fig, ax = plt.subplots(figsize=(6.0, 3.6), constrained_layout=True)
    ax.plot(table["t_m"], table["energy"], color="black", lw=1.2,
            label="steady-state energy")
    ax.set_xlabel(r"interaction time $t_M$")
    ax.set_ylabel(r"$E_\infty$", color="black")
    twin = ax.twinx()
    ratio = table["ratio_counter_co"]
    finite = np.isfinite(ratio)
    capped = np.where(finite, ratio, np.nan)
    twin.semilogy(table["t_m"], capped, color="tab:red", lw=1.0,
                  label="counter/co ratio")
    twin.set_ylabel("counter/co flow ratio", color="tab:red")
    ax.set_title("revivals of the counter-rotating flows")
    out = job.out_dir / f"fig3b_rwa_ratio.{job.image_format}"
    return [_save(fig, out)]


def _render_fig4d(job: FigureJob) -> list[Path]:
    name = "fig4d_scaling.csv"
    table = load_table(job.csv_dir / name, SCENARIO_SCHEMAS[job.scenario][name])
    fig, ax = plt.subplots(figsize=(5.0, 4.0), constrained_layout=True)
    for n in np.unique(table["n_sites"]):
        sel = table["n_sites"] == n
        order = np.argsort(table["t_m"][sel])
        x = table["t_m"][sel][order]
        ax.loglog(x, _positive(table["energy_error"][sel][order]),
                  marker="o", ms=3, label=f"N={int(n)}")
        ax.loglog(x, _positive(table["e_est"][sel][order]), color="black",
                  lw=0.8, ls=":")
        bound = job.surrogate_bounds.get(str(int(n)))
        if bound is not None:
            ax.axhline(bound, ls="--", lw=0.8, color="gray")
    ax.set_xlabel(r"interaction time $t_M$")
    ax.set_ylabel(r"$E_\infty - E_0$")
    ax.set_title("chain cooling error vs interaction time")
    ax.legend(fontsize=8)
    out = job.out_dir / f"fig4d_scaling.{job.image_format}"
    return [_save(fig, out)]


def _render_oracle(job: FigureJob) -> list[Path]:
    name = "oracle_crosscheck.csv"
    table = load_table(job.csv_dir / name, SCENARIO_SCHEMAS[job.scenario][name])
    fig, ax = plt.subplots(figsize=(5.0, 4.0), constrained_layout=True)
    err = _positive(table["max_abs_error"])
    sc = ax.scatter(table["t_m"], table["gamma"], c=np.log10(err), cmap="magma")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(r"$t_M$")
    ax.set_ylabel(r"$\gamma$")
    ax.set_title("closed form vs exact iteration")
    fig.colorbar(sc, ax=ax, label=r"$\log_{10}$ max abs energy error")
    out = job.out_dir / f"oracle_crosscheck.{job.image_format}"
    return [_save(fig, out)]


def render(job: FigureJob) -> list[Path]:
    """Render every panel of one scenario; returns the written images."""
    job.out_dir.mkdir(parents=True, exist_ok=True)
    if job.scenario == "fig2-qubit-sweep":
        return _render_sweep(job, "fig2", "qubit steady-state cooling error")
    if job.scenario == "fig4-heisenberg-sweep":
        return _render_sweep(job, "fig4", "chain steady-state cooling error")
    if job.scenario == "fig3a-coupling-compare":
        return _render_fig3a(job)
    if job.scenario == "fig3b-rwa-ratio":
        return _render_fig3b(job)
    if job.scenario == "fig4d-scaling":
        return _render_fig4d(job)
    if job.scenario == "oracle-crosscheck":
        return _render_oracle(job)
    raise SchemaMismatchError(f"unknown scenario '{job.scenario}'")
