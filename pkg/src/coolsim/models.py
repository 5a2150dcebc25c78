"""System, meter and coupling Hamiltonians.

Systems come in two flavours: a single qubit with level splitting
``omega_s`` and a configurable quantization axis, and a Heisenberg chain
with per-bond couplings (spin operators S = sigma/2, with the last
coupling closing the ring; setting it to zero gives an open chain).

Joint spaces are ordered system factors first, then one meter qubit per
system constituent (meter i paired with site i).  Meter Hamiltonians are
``(omega_m/2) tau_z`` with ``omega_m > 0``, so the meter ground state is
|down>.

Coupling forms:

- ``AXIS_TAU_X``       gamma * sigma(theta, phi) (x) tau_x   (qubit), or
                       (gamma/2) * sum_i sigma_i(theta, phi) tau_x,i (chain)
- ``SIGMA_X_TAU_X``    (gamma/2) (sigma+ tau- + sigma- tau+)
                       + (gamma/2) (sigma+ tau+ + sigma- tau-)
- ``CO_ROTATING``      (gamma/2) (sigma+ tau- + sigma- tau+)
- ``COUNTER_ROTATING`` (gamma/2) (sigma+ tau+ + sigma- tau-)

The rotating/sigma_x forms are defined in the computational (z) basis and
are valid for qubit systems only; they exist for protocol comparisons at
known quantization axis.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .operators import (
    DEFAULT_POLICY,
    DensityMatrix,
    NumericPolicy,
    Operator,
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    eig_hermitian,
    operator,
    pauli_axis,
    site_operator,
)


class DegenerateSystemError(ValueError):
    """Raised for a qubit with vanishing level splitting."""


class FormMismatchError(ValueError):
    """Raised when a coupling form is invalid for the given system."""


class CouplingForm(enum.Enum):
    AXIS_TAU_X = "axis-tau-x"
    SIGMA_X_TAU_X = "sigma-x-tau-x"
    CO_ROTATING = "co-rotating"
    COUNTER_ROTATING = "counter-rotating"


@dataclass(frozen=True)
class QubitSystem:
    """Two-level system H_S = (omega_s/2) sigma(axis)."""

    omega_s: float
    axis: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if abs(self.omega_s) < 1e-15:
            raise DegenerateSystemError("qubit splitting must be nonzero")

    @property
    def n_sites(self) -> int:
        return 1

    @property
    def dim(self) -> int:
        return 2


@dataclass(frozen=True)
class HeisenbergChain:
    """H_S = sum_i J_i S_i . S_{i+1} with S = sigma/2.

    ``couplings[i]`` couples sites (i, i+1); the last entry couples site
    N to site 1 and a value of zero leaves the chain open.  Negative
    (positive) J is ferromagnetic (antiferromagnetic).
    """

    n_sites: int
    couplings: tuple[float, ...]

    def __post_init__(self):
        if self.n_sites < 2:
            raise ValueError("chain needs at least two sites")
        if len(self.couplings) != self.n_sites:
            raise ValueError(
                f"need {self.n_sites} couplings (last one closes the ring), "
                f"got {len(self.couplings)}"
            )
        object.__setattr__(self, "couplings", tuple(float(j) for j in self.couplings))

    @property
    def dim(self) -> int:
        return 2 ** self.n_sites


SystemSpec = QubitSystem | HeisenbergChain


@dataclass(frozen=True)
class MeterSpec:
    """Meter qubit: splitting omega_m > 0, inverse temperature beta_m.

    ``beta_m = inf`` (the default) prepares the ground state |down>; the
    thermal occupation is n_m = 1 / (1 + exp(beta_m * omega_m)) in [0, 1/2].
    """

    omega_m: float
    beta_m: float = math.inf

    def __post_init__(self):
        if self.omega_m <= 0:
            raise ValueError("meter splitting must be positive")
        if self.beta_m < 0:
            raise ValueError("meter inverse temperature must be >= 0")

    @property
    def occupation(self) -> float:
        if math.isinf(self.beta_m):
            return 0.0
        return 1.0 / (1.0 + math.exp(self.beta_m * self.omega_m))


@dataclass(frozen=True)
class CouplingSample:
    """One realization of the randomized interaction.

    ``axes`` holds one (theta, phi) pair per site; a single shared pair
    may be given and is broadcast to all sites (the protocol always uses
    a shared axis and a shared omega_m within one iteration).
    """

    gamma: float
    omega_m: float
    axes: tuple[tuple[float, float], ...] = ((0.0, 0.0),)
    form: CouplingForm = CouplingForm.AXIS_TAU_X

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError("coupling strength must be >= 0")
        if self.omega_m < 0:
            raise ValueError("meter splitting must be >= 0")
        axes = self.axes
        if len(axes) == 2 and np.isscalar(axes[0]):
            axes = (tuple(axes),)
        object.__setattr__(
            self, "axes", tuple((float(t), float(p)) for t, p in axes)
        )

    def axis_for_site(self, site: int) -> tuple[float, float]:
        if len(self.axes) == 1:
            return self.axes[0]
        return self.axes[site]


def build_system(spec: SystemSpec) -> Operator:
    """System Hamiltonian; dim 2 for a qubit, 2^N for a chain."""
    if isinstance(spec, QubitSystem):
        return operator(spec.omega_s / 2 * pauli_axis(*spec.axis).mat, (2,))
    n = spec.n_sites
    h = np.zeros((2 ** n, 2 ** n), dtype=complex)
    paulis = (SIGMA_X.mat, SIGMA_Y.mat, SIGMA_Z.mat)
    for i, j_i in enumerate(spec.couplings):
        if j_i == 0.0:
            continue
        j = (i + 1) % n
        for s in paulis:
            h += j_i * 0.25 * (site_operator(s, i, n) @ site_operator(s, j, n))
    return Operator(h, (2,) * n)


def _qubit_coupling(sample: CouplingSample) -> np.ndarray:
    """4x4 interaction term for the qubit forms, system factor first."""
    g = sample.gamma
    if sample.form is CouplingForm.AXIS_TAU_X:
        theta, phi = sample.axis_for_site(0)
        return g * np.kron(pauli_axis(theta, phi).mat, SIGMA_X.mat)
    co = np.kron(SIGMA_PLUS.mat, SIGMA_MINUS.mat) + np.kron(SIGMA_MINUS.mat, SIGMA_PLUS.mat)
    counter = np.kron(SIGMA_PLUS.mat, SIGMA_PLUS.mat) + np.kron(SIGMA_MINUS.mat, SIGMA_MINUS.mat)
    if sample.form is CouplingForm.CO_ROTATING:
        return g / 2 * co
    if sample.form is CouplingForm.COUNTER_ROTATING:
        return g / 2 * counter
    if sample.form is CouplingForm.SIGMA_X_TAU_X:
        return g / 2 * (co + counter)
    raise FormMismatchError(f"unknown coupling form {sample.form}")


def build_joint(spec: SystemSpec, sample: CouplingSample) -> Operator:
    """Joint Hamiltonian H_S + H_SM + H_M on system (x) meters.

    Subsystem ordering is all system factors first, then one meter per
    site, meter i paired with site i.
    """
    if isinstance(spec, QubitSystem):
        h_s = build_system(spec).mat
        h = (
            np.kron(h_s, np.eye(2))
            + sample.omega_m / 2 * np.kron(np.eye(2), SIGMA_Z.mat)
            + _qubit_coupling(sample)
        )
        return Operator(h, (2, 2))

    if sample.form is not CouplingForm.AXIS_TAU_X:
        raise FormMismatchError(
            f"form {sample.form.value} is only defined for qubit systems"
        )
    n = spec.n_sites
    dim_m = 2 ** n
    h_s = build_system(spec).mat
    h = np.kron(h_s, np.eye(dim_m))
    tau_z_total = sum(site_operator(SIGMA_Z.mat, i, n) for i in range(n))
    h += sample.omega_m / 2 * np.kron(np.eye(2 ** n), tau_z_total)
    for i in range(n):
        theta, phi = sample.axis_for_site(i)
        a_i = site_operator(pauli_axis(theta, phi).mat, i, n)
        tau_x_i = site_operator(SIGMA_X.mat, i, n)
        h += sample.gamma / 2 * np.kron(a_i, tau_x_i)
    return Operator(h, (2,) * (2 * n))


def meter_state(m: MeterSpec) -> DensityMatrix:
    """Thermal meter state diag(n_m, 1 - n_m) in the tau_z basis."""
    n_m = m.occupation
    return DensityMatrix.from_matrix(np.diag([n_m, 1.0 - n_m]), (2,))


@dataclass(frozen=True)
class EigenOperatorSet:
    """Decomposition of a coupling operator by energy gaps of H_S.

    ``operators[w]`` connects eigenspaces separated by gap w > 0 from the
    higher to the lower one (for the two-level example with sigma_x this
    is sigma_minus = |ground><excited|); ``operators[0.0]``, when present,
    is the block-diagonal component.  The original operator is recovered
    as A(0) + sum_{w>0} [A(w) + A(w)^dag].
    """

    frequencies: tuple[float, ...]
    operators: dict[float, Operator]

    def reconstruct(self) -> Operator:
        dims = next(iter(self.operators.values())).dims
        dim = next(iter(self.operators.values())).dim
        total = np.zeros((dim, dim), dtype=complex)
        for w in self.frequencies:
            a_w = self.operators[w].mat
            total += a_w if w == 0.0 else a_w + a_w.conj().T
        return Operator(total, dims)


def eigenoperator_decomp(h_s: Operator, a: Operator,
                         degeneracy_tol: float | None = None,
                         policy: NumericPolicy = DEFAULT_POLICY) -> EigenOperatorSet:
    """Split ``a`` into eigenoperators A(w) = sum_{e'-e=w} P(e) a P(e').

    Gap frequencies are clustered with ``degeneracy_tol`` (default
    1e-9 times the spectral radius of ``h_s``) to separate true
    degeneracies from eigensolver noise.
    """
    spec = eig_hermitian(h_s, policy)
    evals, v = spec.eigenvalues, spec.eigenvectors.mat
    radius = max(np.abs(evals).max(), 1.0)
    tol = degeneracy_tol if degeneracy_tol is not None else policy.degeneracy_rtol * radius

    a_eig = v.conj().T @ a.mat @ v  # coupling operator in the energy eigenbasis
    gaps = evals[None, :] - evals[:, None]  # gaps[r, c] = e_c - e_r

    # cluster all non-negative gaps
    flat = np.sort(gaps[gaps >= -tol].ravel())
    freqs: list[float] = []
    for g in flat:
        if not freqs or g - freqs[-1] > tol:
            freqs.append(float(max(g, 0.0)))
        else:
            freqs[-1] = float(max(freqs[-1], 0.0))

    ops: dict[float, Operator] = {}
    for w in freqs:
        mask = np.abs(gaps - w) <= tol
        block = np.where(mask, a_eig, 0.0)
        mat = v @ block @ v.conj().T
        if np.abs(mat).max() > 1e-14:
            ops[w] = Operator(mat, h_s.dims)
    kept = tuple(sorted(ops.keys()))
    return EigenOperatorSet(kept, ops)
