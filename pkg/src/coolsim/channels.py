"""Exact one-iteration CPTP maps, superoperators and configuration averages.

Vectorization convention
------------------------
Density matrices are vectorized by column stacking: ``vec(rho)[x*D + a] =
rho[a, x]`` (``numpy`` reshape with ``order="F"``).  With this convention
the superoperator of a Kraus set {K} is ``sum_k conj(K_k) (x) K_k`` and
the (unnormalized) Choi matrix is ``sum_k vec(K_k) vec(K_k)^dag``; a
channel is trace preserving iff ``S^dag vec(I) = vec(I)``.

One protocol iteration
----------------------
The meters start in a product state, the joint system evolves unitarily
for ``t_m`` and the meters are discarded.  For ground-state meters the
Kraus operators are the blocks ``K_i = <i| U(t_m) |down...down>``; thermal
meters enter through weighted Kraus sets ``K_{i,j} = sqrt(p_j) <i|U|j>``
over meter eigenstates, which keeps the superoperator at D^2 x D^2.

Averaging
---------
``average_channel`` forms the convex combination of member superoperators
over the coupling-axis and meter-splitting nodes.  The floating-point
reduction is an index-ordered pairwise tree, so results are bit-stable
under any chunking or worker count.  For rotation-invariant systems two
exact shortcuts are used (and cross-checked against the generic path in
the test suite):

- if H_S commutes with global z rotations (qubit quantized along z, any
  Heisenberg chain), the phi average is performed analytically through
  the total-Sz selection-rule mask it imposes on superoperator entries;
- for Heisenberg chains, members at different polar angles are exactly
  unitarily equivalent, so only the omega_m nodes require new
  eigendecompositions and the theta average becomes a cheap conjugation
  average.  This is what makes the five-site sweeps affordable.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .models import (
    CouplingForm,
    CouplingSample,
    EigenOperatorSet,
    HeisenbergChain,
    MeterSpec,
    QubitSystem,
    SystemSpec,
    build_joint,
    build_system,
    eigenoperator_decomp,
)
from .operators import Operator, eigh
from .protocol import (
    FixedAxis,
    ProtocolConfig,
    QuadratureScheme,
    RandomHaarAxis,
    averaging_nodes,
    _gauss_legendre,
)

__all__ = [
    "Channel",
    "ChannelDiagnostics",
    "vec",
    "unvec",
    "apply_superop",
    "kraus_to_superop",
    "kraus_to_choi",
    "superop_to_choi",
    "channel_from_joint",
    "average_channel",
    "averaged_superops",
    "dyson_channel",
    "dyson_bath_channel",
    "validate_channel",
]


def vec(mat: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return mat.reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    d = math.isqrt(v.size)
    return v.reshape((d, d), order="F")


def apply_superop(superop: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return unvec(superop @ vec(rho))


def kraus_to_superop(kraus: np.ndarray) -> np.ndarray:
    """sum_k conj(K_k) (x) K_k for a stack of Kraus operators (k, D, D)."""
    kraus = np.asarray(kraus)
    d = kraus.shape[-1]
    flat = kraus.reshape(len(kraus), d * d)
    s = flat.conj().T @ flat  # [(x,y),(a,b)]
    return s.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d * d, d * d)


def kraus_to_choi(kraus: np.ndarray) -> np.ndarray:
    """Unnormalized Choi matrix sum_k vec(K_k) vec(K_k)^dag (trace D if TP)."""
    kraus = np.asarray(kraus)
    d = kraus.shape[-1]
    vecs = kraus.transpose(0, 2, 1).reshape(len(kraus), d * d)  # vec_c per Kraus
    return vecs.T @ vecs.conj()


def superop_to_choi(superop: np.ndarray) -> np.ndarray:
    """Reshuffle a column-stacking superoperator into its Choi matrix."""
    d = math.isqrt(superop.shape[0])
    return superop.reshape(d, d, d, d).transpose(3, 1, 2, 0).reshape(d * d, d * d)


def tp_residual(superop: np.ndarray) -> float:
    d = math.isqrt(superop.shape[0])
    vec_id = vec(np.eye(d, dtype=complex))
    return float(np.abs(superop.conj().T @ vec_id - vec_id).max())


@dataclass(frozen=True)
class Channel:
    """A quantum channel on a D-dimensional system.

    ``superop`` acts on column-vectorized density matrices.  ``kraus`` is
    present for channels built directly from a joint unitary.  A channel
    flagged ``renormalizing`` is a truncated expansion whose application
    divides by the output trace (used by the first-order constructions);
    it is not trace preserving as a linear map.
    """

    dim: int
    superop: np.ndarray
    kraus: tuple[np.ndarray, ...] | None = None
    renormalizing: bool = False

    def apply(self, rho: np.ndarray) -> np.ndarray:
        if self.kraus is not None:
            out = np.einsum("kab,by,kxy->ax", self.kraus, rho, np.conj(self.kraus))
        else:
            out = apply_superop(self.superop, rho)
        if self.renormalizing:
            out = out / np.trace(out).real
        return out


@dataclass(frozen=True)
class ChannelDiagnostics:
    tp_residual: float
    choi_min_eigenvalue: float
    spectral_radius: float


def validate_channel(ch: Channel) -> ChannelDiagnostics:
    """Trace-preservation residual, Choi minimum eigenvalue, spectral radius."""
    if ch.kraus is not None:
        ks = np.asarray(ch.kraus)
        comp = np.einsum("kxa,kxb->ab", ks.conj(), ks)
        residual = float(np.abs(comp - np.eye(ch.dim)).max())
        choi = kraus_to_choi(ks)
    else:
        residual = tp_residual(ch.superop)
        choi = superop_to_choi(ch.superop)
    choi = (choi + choi.conj().T) / 2
    min_eig = float(np.linalg.eigvalsh(choi)[0])
    radius = float(np.abs(np.linalg.eigvals(ch.superop)).max())
    return ChannelDiagnostics(residual, min_eig, radius)


# ---------------------------------------------------------------------------
# joint-evolution channels
# ---------------------------------------------------------------------------

def _meter_populations(spec: SystemSpec, meter_beta: float, omega_m: float) -> np.ndarray:
    """Product thermal populations over the meter register, basis-ordered."""
    n_meters = 1 if isinstance(spec, QubitSystem) else spec.n_sites
    if math.isinf(meter_beta):
        p_single = np.array([0.0, 1.0])
    else:
        n_m = 1.0 / (1.0 + math.exp(meter_beta * omega_m))
        p_single = np.array([n_m, 1.0 - n_m])
    p = np.array([1.0])
    for _ in range(n_meters):
        p = np.kron(p, p_single)
    return p


def _kraus_from_eigh(w: np.ndarray, v: np.ndarray, t: float, d_sys: int,
                     populations: np.ndarray) -> np.ndarray:
    """Kraus stack of one iteration from the joint eigendecomposition.

    ``populations`` are the meter-register weights p_j; zero-weight input
    states are skipped, so ground-state meters cost one block column.
    """
    d_m = populations.size
    phases = np.exp(-1j * w * t)
    occupied = np.flatnonzero(populations > 0.0)
    kraus = []
    for j in occupied:
        basis_cols = np.zeros((d_sys * d_m, d_sys), dtype=complex)
        basis_cols[np.arange(d_sys) * d_m + j, np.arange(d_sys)] = 1.0
        cols = v @ (phases[:, None] * (v.conj().T @ basis_cols))
        blocks = cols.reshape(d_sys, d_m, d_sys).transpose(1, 0, 2)
        kraus.append(math.sqrt(populations[j]) * blocks)
    return np.concatenate(kraus, axis=0)


def channel_from_joint(spec: SystemSpec, sample: CouplingSample, t_m: float,
                       meter: MeterSpec | None = None) -> Channel:
    """Exact CPTP map of one iteration (joint evolution, meters traced out).

    ``meter`` selects the meter preparation; the default is the ground
    state at the sampled splitting.  If given, its splitting must agree
    with the sample's.
    """
    if t_m <= 0:
        raise ValueError("interaction time must be positive")
    beta = math.inf
    if meter is not None:
        if abs(meter.omega_m - sample.omega_m) > 1e-12:
            raise ValueError("meter splitting disagrees with the sampled omega_m")
        beta = meter.beta_m
    h = build_joint(spec, sample)
    d_sys = 2 if isinstance(spec, QubitSystem) else 2 ** spec.n_sites
    w, v = eigh(h.mat)
    populations = _meter_populations(spec, beta, sample.omega_m)
    kraus = _kraus_from_eigh(w, v, t_m, d_sys, populations)
    return Channel(d_sys, kraus_to_superop(kraus), kraus=tuple(kraus))


# ---------------------------------------------------------------------------
# deterministic reduction
# ---------------------------------------------------------------------------

class PairwiseSum:
    """Index-ordered pairwise-tree accumulator (binary-counter technique).

    The reduction tree depends only on the sequence of ``add`` calls, not
    on chunking or worker count, so parallel sweeps are bit-stable.
    """

    def __init__(self):
        self._stack: list[tuple[int, np.ndarray]] = []

    def add(self, arr: np.ndarray):
        level = 0
        while self._stack and self._stack[-1][0] == level:
            _, prev = self._stack.pop()
            arr = prev + arr
            level += 1
        self._stack.append((level, arr))

    def total(self) -> np.ndarray:
        if not self._stack:
            raise ValueError("empty reduction")
        acc = None
        for _, arr in reversed(self._stack):
            acc = arr if acc is None else acc + arr
        return acc


# ---------------------------------------------------------------------------
# configuration-averaged channels
# ---------------------------------------------------------------------------

def _coupling_basis(spec: SystemSpec) -> tuple[np.ndarray, np.ndarray, list[np.ndarray], float]:
    """Static parts of the joint Hamiltonian for batched assembly.

    Returns (H_0, meter Zeeman operator, [C_x, C_y, C_z], coupling
    prefactor) such that the joint Hamiltonian of an axis sample is
    H_0 + omega_m * Mz + prefactor * (ax C_x + ay C_y + az C_z).
    """
    from .operators import SIGMA_X, SIGMA_Y, SIGMA_Z, site_operator

    if isinstance(spec, QubitSystem):
        h_s = build_system(spec).mat
        h0 = np.kron(h_s, np.eye(2))
        mz = np.kron(np.eye(2), SIGMA_Z.mat / 2)
        cxyz = [np.kron(p.mat, SIGMA_X.mat) for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
        return h0, mz, cxyz, 1.0

    n = spec.n_sites
    d_m = 2 ** n
    h_s = build_system(spec).mat
    h0 = np.kron(h_s, np.eye(d_m))
    mz = np.kron(np.eye(2 ** n),
                 sum(site_operator(SIGMA_Z.mat / 2, i, n) for i in range(n)))
    cxyz = []
    for p in (SIGMA_X, SIGMA_Y, SIGMA_Z):
        c = np.zeros_like(h0)
        for i in range(n):
            c += np.kron(site_operator(p.mat, i, n), site_operator(SIGMA_X.mat, i, n))
        cxyz.append(c)
    return h0, mz, cxyz, 0.5


def _member_superops_chunk(spec: SystemSpec, samples: list[CouplingSample],
                           t_list: list[float], meter_beta: float,
                           static) -> list[np.ndarray]:
    """Superoperators of a chunk of members, one stack per evolution time."""
    h0, mz, cxyz, pref = static
    d_joint = h0.shape[0]
    d_sys = 2 if isinstance(spec, QubitSystem) else 2 ** spec.n_sites
    n = len(samples)

    axis_forms = all(
        s.form is CouplingForm.AXIS_TAU_X and len(s.axes) == 1 for s in samples
    )
    if axis_forms:
        th = np.array([s.axes[0][0] for s in samples])
        ph = np.array([s.axes[0][1] for s in samples])
        om = np.array([s.omega_m for s in samples])
        g = np.array([s.gamma for s in samples])
        h = (h0[None]
             + om[:, None, None] * mz[None]
             + (pref * g * np.sin(th) * np.cos(ph))[:, None, None] * cxyz[0][None]
             + (pref * g * np.sin(th) * np.sin(ph))[:, None, None] * cxyz[1][None]
             + (pref * g * np.cos(th))[:, None, None] * cxyz[2][None])
    else:
        h = np.stack([build_joint(spec, s).mat for s in samples])

    if d_joint >= 512:
        ws, vs = [], []
        for i in range(n):
            w_i, v_i = eigh(h[i])
            ws.append(w_i)
            vs.append(v_i)
        w, v = np.stack(ws), np.stack(vs)
    else:
        w, v = np.linalg.eigh(h)

    outs = []
    for t in t_list:
        supers = np.empty((n, d_sys * d_sys, d_sys * d_sys), dtype=complex)
        for i in range(n):
            pops = _meter_populations(spec, meter_beta, samples[i].omega_m)
            kraus = _kraus_from_eigh(w[i], v[i], t, d_sys, pops)
            supers[i] = kraus_to_superop(kraus)
        outs.append(supers)
    return outs


def _chunked(seq, size):
    for i in range(0, len(seq), size):
        yield seq[i:i + size]


def _sum_weighted_members(spec: SystemSpec, nodes, t_list, meter_beta,
                          workers: int | None) -> list[np.ndarray]:
    """Weighted index-ordered pairwise-tree sum of member superoperators."""
    static = _coupling_basis(spec)
    d_joint = static[0].shape[0]
    chunk = max(1, min(4096, (1 << 22) // (d_joint * d_joint)))
    accumulators = [PairwiseSum() for _ in t_list]
    weights = [wgt for wgt, _ in nodes]
    chunks = list(_chunked([s for _, s in nodes], chunk))
    weight_chunks = list(_chunked(weights, chunk))

    def work(args):
        samples, _ = args
        return _member_superops_chunk(spec, samples, t_list, meter_beta, static)

    jobs = list(zip(chunks, range(len(chunks))))
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = pool.map(work, jobs)
            for (w_chunk, per_t) in zip(weight_chunks, results):
                for acc, supers in zip(accumulators, per_t):
                    for wgt, s in zip(w_chunk, supers):
                        acc.add(wgt * s)
    else:
        for w_chunk, job in zip(weight_chunks, jobs):
            per_t = work(job)
            for acc, supers in zip(accumulators, per_t):
                for wgt, s in zip(w_chunk, supers):
                    acc.add(wgt * s)
    return [acc.total() for acc in accumulators]


def _twice_sz(d_sys: int) -> np.ndarray:
    """2 * total-Sz eigenvalue per computational basis state."""
    n = d_sys.bit_length() - 1
    states = np.arange(d_sys)
    ones = np.array([bin(s).count("1") for s in states])
    return n - 2 * ones


def _phi_mask(d_sys: int) -> np.ndarray:
    """Selection-rule mask realizing the exact phi (z-rotation) average.

    vec index i = x*D + a picks up phase exp(-i phi (m_a - m_x)) under a
    global z rotation; averaging keeps entries whose row and column phase
    gradients agree.
    """
    tm = _twice_sz(d_sys)
    dm_vec = (tm[None, :] - tm[:, None]).reshape(-1)  # index x*D+a -> 2(m_a - m_x)
    return dm_vec[:, None] == dm_vec[None, :]


def _rotation_matrix_y(spec: HeisenbergChain, theta: float) -> np.ndarray:
    """Global spin rotation about y: one single-qubit ry on every site."""
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    r2 = np.array([[c, -s], [s, c]], dtype=complex)
    r = np.array([[1.0 + 0j]])
    for _ in range(spec.n_sites):
        r = np.kron(r, r2)
    return r


def _averaged_superops_rotation(spec: HeisenbergChain, cfg: ProtocolConfig,
                                t_list: list[float]) -> list[np.ndarray]:
    """Axis average via exact unitary covariance of the Heisenberg chain.

    Members at axis (theta, phi) equal the z-axis member conjugated by the
    global spin rotation, so only the omega_m nodes need
    eigendecompositions; the theta average becomes a conjugation average
    over Gauss-Legendre nodes and the phi average is the selection-rule
    mask.
    """
    scheme = cfg.averaging
    assert isinstance(scheme, QuadratureScheme)
    z_cfg = ProtocolConfig(
        gamma=cfg.gamma, t_m=cfg.t_m, omega_window=cfg.omega_window,
        axis_mode=FixedAxis(0.0, 0.0), meter_beta=cfg.meter_beta, seed=cfg.seed,
        averaging=QuadratureScheme(1, 1, scheme.n_omega),
    )
    z_nodes = averaging_nodes(z_cfg)
    z_superops = _sum_weighted_members(spec, z_nodes, t_list, cfg.meter_beta, None)

    d_sys = 2 ** spec.n_sites
    cos_nodes, cos_weights = np.polynomial.legendre.leggauss(scheme.n_cos_theta)
    mask = _phi_mask(d_sys)
    outs = []
    for s_z in z_superops:
        acc = PairwiseSum()
        for c, wc in zip(cos_nodes, cos_weights / 2):
            r = _rotation_matrix_y(spec, math.acos(c))
            conj_r = np.kron(r.conj(), r)
            acc.add(wc * (conj_r @ s_z @ conj_r.conj().T))
        outs.append(np.where(mask, acc.total(), 0.0))
    return outs


def _phimask_applicable(spec: SystemSpec, cfg: ProtocolConfig) -> bool:
    if not isinstance(cfg.axis_mode, RandomHaarAxis):
        return False
    if not isinstance(cfg.averaging, QuadratureScheme):
        return False
    if isinstance(spec, HeisenbergChain):
        return True
    return spec.axis == (0.0, 0.0)


def _averaged_superops_phimask(spec: SystemSpec, cfg: ProtocolConfig,
                               t_list: list[float],
                               workers: int | None) -> list[np.ndarray]:
    """Explicit (cos theta, omega) nodes at phi = 0 plus the exact phi mask."""
    scheme = cfg.averaging
    lo, hi = cfg.omega_window
    om_nodes, om_weights = _gauss_legendre(scheme.n_omega, lo, hi)
    cos_nodes, cos_weights = _gauss_legendre(scheme.n_cos_theta, -1.0, 1.0)
    nodes = [
        (wc * wo, CouplingSample(cfg.gamma, om, ((math.acos(c), 0.0),)))
        for c, wc in zip(cos_nodes, cos_weights)
        for om, wo in zip(om_nodes, om_weights)
    ]
    totals = _sum_weighted_members(spec, nodes, t_list, cfg.meter_beta, workers)
    d_sys = 2 if isinstance(spec, QubitSystem) else 2 ** spec.n_sites
    mask = _phi_mask(d_sys)
    return [np.where(mask, s, 0.0) for s in totals]


def averaged_superops(spec: SystemSpec, cfg: ProtocolConfig,
                      t_list: list[float], *, workers: int | None = None,
                      method: str = "auto") -> list[np.ndarray]:
    """Averaged-channel superoperators for several interaction times.

    All times share one eigendecomposition pass over the averaging nodes,
    which dominates the cost.  ``method`` is one of ``auto``, ``nodes``
    (generic node summation), ``phimask`` or ``rotation`` (the exact
    shortcuts described in the module docstring).
    """
    if method == "auto":
        if (isinstance(spec, HeisenbergChain)
                and isinstance(cfg.axis_mode, RandomHaarAxis)
                and isinstance(cfg.averaging, QuadratureScheme)
                and math.isinf(cfg.meter_beta)):
            method = "rotation"
        elif _phimask_applicable(spec, cfg):
            method = "phimask"
        else:
            method = "nodes"
    if method == "rotation":
        if not isinstance(spec, HeisenbergChain):
            raise ValueError("rotation averaging applies to Heisenberg chains only")
        return _averaged_superops_rotation(spec, cfg, t_list)
    if method == "phimask":
        if not _phimask_applicable(spec, cfg):
            raise ValueError("phi-mask averaging requires a z-quantized system "
                             "and Haar axis quadrature")
        return _averaged_superops_phimask(spec, cfg, t_list, workers)
    nodes = averaging_nodes(cfg)
    return _sum_weighted_members(spec, nodes, t_list, cfg.meter_beta, workers)


def average_channel(spec: SystemSpec, cfg: ProtocolConfig, *,
                    workers: int | None = None, method: str = "auto") -> Channel:
    """Stochastically averaged one-iteration map (convex superop average)."""
    superop = averaged_superops(spec, cfg, [cfg.t_m], workers=workers,
                                method=method)[0]
    d_sys = 2 if isinstance(spec, QubitSystem) else 2 ** spec.n_sites
    return Channel(d_sys, superop)


# ---------------------------------------------------------------------------
# first-order (Dyson) channels
# ---------------------------------------------------------------------------

def _sinc(x: np.ndarray | float) -> np.ndarray | float:
    """Unnormalized sinc, sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)


def _jump_amplitude(eig_ops: EigenOperatorSet, gamma: float, t: float,
                    omega_m: float) -> np.ndarray:
    """First-order excitation block U_10 in the interaction picture."""
    first = next(iter(eig_ops.operators.values()))
    u10 = np.zeros((first.dim, first.dim), dtype=complex)
    for w in eig_ops.frequencies:
        if w <= 0.0:
            continue
        a_w = eig_ops.operators[w].mat
        minus = (w - omega_m) * t / 2
        plus = (w + omega_m) * t / 2
        u10 += a_w * np.exp(-1j * minus) * _sinc(minus)
        u10 += a_w.conj().T * np.exp(1j * plus) * _sinc(plus)
    return -1j * gamma * t * u10


def dyson_channel(spec: SystemSpec, a: Operator, gamma: float, t_m: float,
                  omega_window: tuple[float, float], n_omega: int = 32) -> Channel:
    """First-order interaction-picture map, averaged over the meter window.

    The map is identity plus the averaged jump term built from the
    eigenoperator amplitudes with sinc((w -+ omega_m) t/2) factors; its
    application renormalizes the state (the truncation is not trace
    preserving), which leaves the ground space exactly steady up to the
    retained order.
    """
    h_s = build_system(spec)
    radius = float(np.abs(np.linalg.eigvalsh(h_s.mat)).max())
    if gamma > 0.1 * radius:
        warnings.warn(
            f"coupling {gamma} is not small against the spectral radius {radius}; "
            "the first-order map is unreliable here", stacklevel=2)
    eig_ops = eigenoperator_decomp(h_s, a)
    om_nodes, om_weights = _gauss_legendre(n_omega, *omega_window)
    d = h_s.dim
    acc = PairwiseSum()
    acc.add(np.eye(d * d, dtype=complex))
    for om, wgt in zip(om_nodes, om_weights):
        u10 = _jump_amplitude(eig_ops, gamma, t_m, om)
        acc.add(wgt * np.kron(u10.conj(), u10))
    return Channel(d, acc.total(), renormalizing=True)


def dyson_bath_channel(spec: SystemSpec, a: Operator, gamma: float, t_m: float,
                       omega_window: tuple[float, float], n_modes: int = 32) -> Channel:
    """First-order map of one system coupled to a bank of meters at once.

    Each discretized bath mode carries coupling gamma * sqrt(w_q); the
    excitation blocks U_{e_q, 0} are accumulated mode by mode.  Formally
    this reproduces the omega-averaged single-meter construction; the two
    code paths are compared verbatim in the tests.
    """
    h_s = build_system(spec)
    eig_ops = eigenoperator_decomp(h_s, a)
    om_nodes, om_weights = _gauss_legendre(n_modes, *omega_window)
    d = h_s.dim
    jump_total = PairwiseSum()
    jump_total.add(np.eye(d * d, dtype=complex))
    for om, wgt in zip(om_nodes, om_weights):
        u_mode = _jump_amplitude(eig_ops, gamma * math.sqrt(wgt), t_m, om)
        jump_total.add(np.kron(u_mode.conj(), u_mode))
    return Channel(d, jump_total.total(), renormalizing=True)
