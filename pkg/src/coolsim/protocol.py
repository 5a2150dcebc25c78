"""Protocol configuration, randomized-coupling sampling and averaging nodes.

The per-iteration randomness is a triple (theta, phi, omega_m): a coupling
axis drawn uniformly on the Bloch sphere (measure d(cos theta) d(phi)) and
a meter splitting drawn uniformly from a window.  The same triple feeds
both deterministic quadrature averages (Gauss-Legendre in cos theta and in
omega_m, equally spaced nodes in phi) and Monte Carlo averages.

RNG contract: counter-based Philox streams keyed by
(seed, stream_index, iteration), with a fixed variate order
(u_costheta, u_phi, u_omega) per iteration.  Parallel execution therefore
cannot change any drawn value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .models import (
    CouplingForm,
    CouplingSample,
    QubitSystem,
    SystemSpec,
    build_system,
)


class EmptySchemeError(ValueError):
    """Raised when an averaging scheme yields no nodes."""


@dataclass(frozen=True)
class RandomHaarAxis:
    """Coupling axis drawn uniformly on the sphere each iteration."""


@dataclass(frozen=True)
class FixedAxis:
    theta: float
    phi: float


@dataclass(frozen=True)
class FormCoupling:
    """Use one of the fixed qubit coupling forms instead of an axis."""

    form: CouplingForm


AxisMode = RandomHaarAxis | FixedAxis | FormCoupling


@dataclass(frozen=True)
class QuadratureScheme:
    """Deterministic averaging nodes: Gauss-Legendre x uniform x Gauss-Legendre."""

    n_cos_theta: int = 16
    n_phi: int = 16
    n_omega: int = 32

    def __post_init__(self):
        if min(self.n_cos_theta, self.n_phi, self.n_omega) < 1:
            raise EmptySchemeError("quadrature node counts must be >= 1")


@dataclass(frozen=True)
class MonteCarloScheme:
    n_samples: int
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise EmptySchemeError("need at least one Monte Carlo sample")


AveragingScheme = QuadratureScheme | MonteCarloScheme


@dataclass(frozen=True)
class ProtocolConfig:
    """All knobs of one cooling protocol run.

    ``omega_window`` is the closed interval the meter splitting is drawn
    from; a zero-width window pins omega_m.  ``record_substeps`` > 0
    additionally records intra-interval energies at evenly spaced times
    within each iteration.
    """

    gamma: float
    t_m: float
    omega_window: tuple[float, float]
    axis_mode: AxisMode = field(default_factory=RandomHaarAxis)
    meter_beta: float = math.inf
    n_iterations: int = 1
    seed: int = 0
    record_substeps: int = 0
    averaging: AveragingScheme = field(default_factory=QuadratureScheme)

    def __post_init__(self):
        lo, hi = self.omega_window
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.t_m <= 0:
            raise ValueError("t_m must be positive")
        if self.n_iterations < 1:
            raise ValueError("need at least one iteration")
        if not (hi >= lo >= 0):
            raise ValueError(f"invalid omega window [{lo}, {hi}]")
        if self.record_substeps < 0:
            raise ValueError("record_substeps must be >= 0")
        object.__setattr__(self, "omega_window", (float(lo), float(hi)))


def default_omega_window(spec: SystemSpec) -> tuple[float, float]:
    """Meter-splitting window requiring only the system's spectral radius.

    Qubit: [0.1 |omega_s|, 3 |omega_s|].  Chain: [0, 1.1 ||H_S||] with the
    spectral norm from exact diagonalization (cheap at the sizes handled
    here).
    """
    if isinstance(spec, QubitSystem):
        return (0.1 * abs(spec.omega_s), 3.0 * abs(spec.omega_s))
    h = build_system(spec).mat
    radius = float(np.abs(np.linalg.eigvalsh(h)).max())
    return (0.0, 1.1 * radius)


def iteration_rng(seed: int, stream_index: int, iteration: int) -> np.random.Generator:
    """Independent counter-based stream for one (trajectory, iteration)."""
    seq = np.random.SeedSequence(seed, spawn_key=(stream_index, iteration))
    return np.random.Generator(np.random.Philox(seq))


def _sample_from_uniforms(cfg: ProtocolConfig, u_cos: float, u_phi: float,
                          u_omega: float) -> CouplingSample:
    lo, hi = cfg.omega_window
    omega = lo + (hi - lo) * u_omega
    mode = cfg.axis_mode
    if isinstance(mode, RandomHaarAxis):
        theta = math.acos(2.0 * u_cos - 1.0)
        phi = 2.0 * math.pi * u_phi
        return CouplingSample(cfg.gamma, omega, ((theta, phi),))
    if isinstance(mode, FixedAxis):
        return CouplingSample(cfg.gamma, omega, ((mode.theta, mode.phi),))
    return CouplingSample(cfg.gamma, omega, ((math.nan, math.nan),), form=mode.form)


def draw_sample(cfg: ProtocolConfig, rng: np.random.Generator) -> CouplingSample:
    """Draw one iteration's coupling; always consumes exactly three variates."""
    u = rng.random(3)
    return _sample_from_uniforms(cfg, u[0], u[1], u[2])


def _gauss_legendre(n: int, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [lo, hi], weights normalized to sum to one."""
    if hi == lo:
        return np.array([lo]), np.array([1.0])
    x, w = np.polynomial.legendre.leggauss(n)
    return (hi - lo) / 2 * x + (hi + lo) / 2, w / 2


def averaging_nodes(cfg: ProtocolConfig) -> list[tuple[float, CouplingSample]]:
    """Weighted coupling samples realizing the configured average.

    Quadrature: Gauss-Legendre in cos(theta), equally spaced nodes in phi
    (spectrally accurate for periodic integrands) and Gauss-Legendre in
    omega_m; weights multiply and sum to one.  Fixed-axis and fixed-form
    modes collapse the axis factor to a single node.  Monte Carlo: equal
    weights 1/n with samples drawn from streams keyed by
    (scheme seed, sample index), so the node list is a deterministic
    function of the configuration.
    """
    scheme = cfg.averaging
    if isinstance(scheme, MonteCarloScheme):
        nodes = []
        for i in range(scheme.n_samples):
            rng = iteration_rng(scheme.seed, i, 0)
            nodes.append((1.0 / scheme.n_samples, draw_sample(cfg, rng)))
        return nodes

    lo, hi = cfg.omega_window
    om_nodes, om_weights = _gauss_legendre(scheme.n_omega, lo, hi)

    mode = cfg.axis_mode
    if isinstance(mode, RandomHaarAxis):
        cos_nodes, cos_weights = _gauss_legendre(scheme.n_cos_theta, -1.0, 1.0)
        axis_nodes = [
            (wc / scheme.n_phi, math.acos(c), 2.0 * math.pi * j / scheme.n_phi)
            for c, wc in zip(cos_nodes, cos_weights)
            for j in range(scheme.n_phi)
        ]
        samples = [
            (wa * wo, CouplingSample(cfg.gamma, om, ((th, ph),)))
            for (wa, th, ph) in axis_nodes
            for om, wo in zip(om_nodes, om_weights)
        ]
    elif isinstance(mode, FixedAxis):
        samples = [
            (wo, CouplingSample(cfg.gamma, om, ((mode.theta, mode.phi),)))
            for om, wo in zip(om_nodes, om_weights)
        ]
    else:
        samples = [
            (wo, CouplingSample(cfg.gamma, om, ((math.nan, math.nan),), form=mode.form))
            for om, wo in zip(om_nodes, om_weights)
        ]
    if not samples:
        raise EmptySchemeError("averaging scheme produced no nodes")
    return samples
