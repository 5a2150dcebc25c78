"""Fixed points of averaged channels and ground-space diagnostics.

The stroboscopic steady state is the fixed point of the one-iteration
averaged map.  For superoperators up to 4096 x 4096 a dense eigensolve is
used and the full peripheral spectrum is reported; larger problems fall
back to power iteration with Cesaro (running-average) acceleration, which
damps eigenvalues near the unit circle.

A degenerate fixed space (several eigenvalues at unit modulus, e.g. for
symmetric chains at finite sampling) is reported, not resolved: the
result then carries the energy-minimal valid state found among the fixed
eigenvectors and Cesaro-refined seeds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import Channel, apply_superop, average_channel, tp_residual
from .models import SystemSpec, build_system
from .operators import (
    DEFAULT_POLICY,
    DensityMatrix,
    NumericPolicy,
    Operator,
    eig_hermitian,
)
from .protocol import ProtocolConfig


class NoConvergenceError(RuntimeError):
    def __init__(self, max_iter: int, residual: float):
        super().__init__(
            f"no fixed point to tolerance after {max_iter} iterations "
            f"(residual {residual:.3e})"
        )
        self.max_iter = max_iter
        self.residual = residual


@dataclass(frozen=True)
class SteadyStateResult:
    rho_inf: DensityMatrix
    energy: float
    residual: float
    iterations: int
    fixed_space_dim: int
    subdominant_modulus: float
    degenerate_fixed_space: bool = False


def trace_norm(mat: np.ndarray) -> float:
    """Sum of singular values; for Hermitian input the sum of |eigenvalues|."""
    if np.abs(mat - mat.conj().T).max() < 1e-13:
        return float(np.abs(np.linalg.eigvalsh((mat + mat.conj().T) / 2)).sum())
    return float(np.linalg.svd(mat, compute_uv=False).sum())


def ground_projector(h_s: Operator,
                     policy: NumericPolicy = DEFAULT_POLICY) -> tuple[Operator, float]:
    """Projector onto the ground eigenspace and the ground energy.

    Degeneracy is resolved with tolerance 1e-9 times the spectral radius.
    """
    spec = eig_hermitian(h_s, policy)
    evals, v = spec.eigenvalues, spec.eigenvectors.mat
    radius = max(float(np.abs(evals).max()), 1.0)
    tol = policy.degeneracy_rtol * radius
    members = evals <= evals[0] + tol
    cols = v[:, members]
    return Operator(cols @ cols.conj().T, h_s.dims), float(evals[0])


def fidelity_ground(rho: DensityMatrix, h_s: Operator,
                    policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Ground-space population tr(P_0 rho), in [0, 1]."""
    p0, _ = ground_projector(h_s, policy)
    val = float(np.real(np.einsum("ij,ji->", p0.mat, rho.mat)))
    return min(max(val, 0.0), 1.0)


def _hermitize_normalize(mat: np.ndarray) -> np.ndarray:
    mat = (mat + mat.conj().T) / 2
    tr = np.trace(mat).real
    if abs(tr) < 1e-300:
        raise ValueError("traceless fixed-point candidate")
    return mat / tr


def _psd_clip(mat: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mat)
    w = np.clip(w, 0.0, None)
    out = (v * w) @ v.conj().T
    return out / np.trace(out).real


def _cesaro_refine(superop: np.ndarray, rho: np.ndarray, steps: int = 256) -> np.ndarray:
    """Running average of the orbit; projects onto the fixed space."""
    acc = np.zeros_like(rho)
    cur = rho
    for _ in range(steps):
        cur = apply_superop(superop, cur)
        acc += cur
    return _hermitize_normalize(acc / steps)


def fixed_point(ch: Channel, h_s: Operator, tol: float = 1e-10,
                max_iter: int = 10 ** 6, dense_cutoff: int = 4096) -> SteadyStateResult:
    """Stroboscopic steady state of a trace-preserving channel.

    Dense route (D^2 <= ``dense_cutoff``): eigensolve of the
    superoperator, candidate from the eigenvalue nearest one, Hermitized
    and renormalized.  The fixed-space dimension counts unit-modulus
    eigenvalues to 1e-8; if it exceeds one the degeneracy is flagged and
    the energy-minimal valid candidate is reported (see module
    docstring).  Larger problems use Cesaro-accelerated power iteration
    from the maximally mixed state (fixed-space diagnostics are then
    unavailable: the dimension is reported as 1 and the subdominant
    modulus as NaN).
    """
    residual_pre = tp_residual(ch.superop)
    if residual_pre > 1e-9:
        raise ValueError(f"channel is not trace preserving (residual {residual_pre:.2e})")
    d = ch.dim
    superop = ch.superop

    if d * d <= dense_cutoff:
        evals, evecs = np.linalg.eig(superop)
        dist_to_one = np.abs(evals - 1.0)
        unit_modulus = np.abs(np.abs(evals) - 1.0) <= 1e-8
        fixed_space_dim = int(np.count_nonzero(unit_modulus))
        moduli = np.sort(np.abs(evals))[::-1]
        outside = moduli[np.abs(moduli - 1.0) > 1e-8]
        subdominant = float(outside[0]) if outside.size else float(moduli[-1])

        candidates: list[np.ndarray] = []
        order = np.argsort(dist_to_one)
        for k in order[: max(1, fixed_space_dim)]:
            if dist_to_one[k] > 1e-6:
                break
            try:
                candidates.append(_hermitize_normalize(evecs[:, k].reshape((d, d), order="F")))
            except ValueError:
                continue
        degenerate = fixed_space_dim > 1
        if degenerate:
            p0, _ = ground_projector(h_s)
            seed = p0.mat / np.trace(p0.mat).real
            candidates.append(_cesaro_refine(superop, seed))
            candidates.append(_cesaro_refine(superop, np.eye(d, dtype=complex) / d))

        best = None
        for cand in candidates:
            res = trace_norm(apply_superop(superop, cand) - cand)
            min_eig = float(np.linalg.eigvalsh(cand)[0])
            if min_eig < -1e-9:
                cand = _psd_clip(cand)
                res = trace_norm(apply_superop(superop, cand) - cand)
                min_eig = float(np.linalg.eigvalsh(cand)[0])
            energy = float(np.real(np.einsum("ij,ji->", h_s.mat, cand)))
            ok = res <= max(tol, 1e-9)
            key = (not ok, energy)
            if best is None or key < best[0]:
                best = (key, cand, res, energy)
        _, rho, residual, energy = best
        if residual > max(tol, 1e-9):
            raise NoConvergenceError(0, residual)
        rho_dm = DensityMatrix.from_matrix(_psd_clip(rho) if
                                           np.linalg.eigvalsh(rho)[0] < -1e-10 else rho,
                                           h_s.dims)
        return SteadyStateResult(rho_dm, energy, residual, 0, fixed_space_dim,
                                 subdominant, degenerate)

    # power iteration with block-restarted Cesaro averaging: each block's
    # running average damps peripheral unit-circle eigenvalues by ~1/block,
    # and restarting from the averaged state makes the blocks compound
    rho = np.eye(d, dtype=complex) / d
    residual = math.inf
    block = 64
    iterations = 0
    while iterations < max_iter:
        acc = np.zeros_like(rho)
        cur = rho
        for _ in range(min(block, max_iter - iterations)):
            cur = apply_superop(superop, cur)
            acc += cur
            iterations += 1
        rho = _hermitize_normalize(acc / max(1, min(block, iterations)))
        residual = trace_norm(apply_superop(superop, rho) - rho)
        if residual <= tol:
            energy = float(np.real(np.einsum("ij,ji->", h_s.mat, rho)))
            return SteadyStateResult(
                DensityMatrix.from_matrix(_psd_clip(rho), h_s.dims),
                energy, residual, iterations, 1, math.nan)
    raise NoConvergenceError(max_iter, residual)


@dataclass(frozen=True)
class GroundInvarianceReport:
    """Energy gained by the ground state over one averaged iteration.

    ``ratio`` compares the gain at gamma against the gain at gamma/2; a
    value >= 3 is the second-order (heating suppressed to O(gamma^2))
    signature.
    """

    ground_energy: float
    delta_energy: float
    delta_energy_halved: float
    ratio: float
    second_order: bool


def ground_invariance_check(spec: SystemSpec, cfg: ProtocolConfig,
                            workers: int | None = None) -> GroundInvarianceReport:
    """One averaged exact iteration applied to the (normalized) ground projector."""
    h_s = build_system(spec)
    p0, e0 = ground_projector(h_s)
    rho0 = p0.mat / np.trace(p0.mat).real
    e_start = float(np.real(np.einsum("ij,ji->", h_s.mat, rho0)))

    deltas = []
    for gamma in (cfg.gamma, cfg.gamma / 2):
        cfg_g = ProtocolConfig(
            gamma=gamma, t_m=cfg.t_m, omega_window=cfg.omega_window,
            axis_mode=cfg.axis_mode, meter_beta=cfg.meter_beta, seed=cfg.seed,
            averaging=cfg.averaging)
        ch = average_channel(spec, cfg_g, workers=workers)
        rho1 = ch.apply(rho0)
        deltas.append(float(np.real(np.einsum("ij,ji->", h_s.mat, rho1))) - e_start)
    delta, delta_half = deltas
    ratio = math.inf if delta_half == 0.0 else delta / delta_half
    return GroundInvarianceReport(e0, delta, delta_half, ratio,
                                  delta_half <= delta / 3 + 1e-30)
