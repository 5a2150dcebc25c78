"""CSV schemas of the coolsim scenarios and their validation.

The plot tool consumes only the CSV files and the run manifest; nothing
is recomputed.  Each scenario maps to a fixed set of (csv file, header)
pairs, one rendered panel per file except fig4d's single panel.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


class SchemaMismatchError(ValueError):
    """CSV does not match the scenario schema; the message names the
    offending file and column."""


SWEEP_COLUMNS = ["gamma", "t_m", "energy", "energy_error", "e_est"]

#: scenario -> {csv filename: expected header}
SCENARIO_SCHEMAS: dict[str, dict[str, list[str]]] = {
    "fig2-qubit-sweep": {
        "fig2_heatmap.csv": SWEEP_COLUMNS,
        "fig2_cut_vs_tm.csv": SWEEP_COLUMNS,
        "fig2_cut_vs_gamma.csv": SWEEP_COLUMNS,
    },
    "fig3a-coupling-compare": {
        "fig3a_coupling_compare.csv": ["t", "E_co_rotating", "E_sigmaxx", "E_random"],
    },
    "fig3b-rwa-ratio": {
        "fig3b_rwa_ratio.csv": ["t_m", "energy", "ratio_counter_co"],
    },
    "fig4-heisenberg-sweep": {
        "fig4_heatmap.csv": SWEEP_COLUMNS,
        "fig4_cut_vs_tm.csv": SWEEP_COLUMNS,
        "fig4_cut_vs_gamma.csv": SWEEP_COLUMNS,
    },
    "fig4d-scaling": {
        "fig4d_scaling.csv": ["n_sites", "t_m", "energy", "energy_error", "e_est"],
    },
    "oracle-crosscheck": {
        "oracle_crosscheck.csv": ["gamma", "t_m", "max_abs_error"],
    },
}


@dataclass(frozen=True)
class Table:
    """A validated CSV: column name -> float array."""

    path: Path
    columns: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    def __len__(self) -> int:
        return len(next(iter(self.columns.values())))


def load_table(path: Path, expected_header: list[str]) -> Table:
    """Read and validate one scenario CSV against its schema."""
    if not path.is_file():
        raise SchemaMismatchError(f"{path.name}: file is missing")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaMismatchError(f"{path.name}: empty file, expected header "
                                      f"{expected_header}")
        missing = [c for c in expected_header if c not in header]
        if missing:
            raise SchemaMismatchError(f"{path.name}: missing column '{missing[0]}'")
        extra = [c for c in header if c not in expected_header]
        if extra:
            raise SchemaMismatchError(f"{path.name}: unexpected column '{extra[0]}'")
        rows = list(reader)
    if not rows:
        raise SchemaMismatchError(f"{path.name}: no data rows")
    data: dict[str, list[float]] = {c: [] for c in header}
    for i, row in enumerate(rows, start=2):
        if len(row) != len(header):
            raise SchemaMismatchError(f"{path.name}: line {i} has {len(row)} fields, "
                                      f"expected {len(header)}")
        for col, field in zip(header, row):
            try:
                data[col].append(float(field))
            except ValueError:
                raise SchemaMismatchError(
                    f"{path.name}: column '{col}' has non-numeric value "
                    f"{field!r} on line {i}")
    return Table(path, {c: np.array(v) for c, v in data.items()})
