"""Dense complex operator algebra on small tensor-product Hilbert spaces.

Conventions used throughout the package:

- hbar = 1, so times carry units of inverse energy.
- Matrices are dense ``numpy`` arrays in row-major layout; an ``Operator``
  additionally carries the ordered list of subsystem dimensions so that
  partial traces need no side channel.
- Qubit basis ordering is (|up>, |down>), i.e. ``sigma_z = diag(1, -1)``.
- Propagators are computed exclusively through the Hermitian
  eigendecomposition ``U = V exp(-i L t) V^dag``.  All generators in this
  package are Hermitian, and one decomposition is reused for every
  evolution time, which dominates the cost profile of the sweeps.

Numeric tolerances (Hermiticity, unitarity, positivity slack, ...) are
collected in a single :class:`NumericPolicy` record instead of being
scattered through the call sites.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg


class NotHermitianError(ValueError):
    """Raised when an operation requires a Hermitian input and the check fails."""


class DimMismatchError(ValueError):
    """Raised when two operators act on spaces of different dimension."""


class BadSubsystemSpecError(ValueError):
    """Raised for an invalid subsystem selection in a partial trace."""


@dataclass(frozen=True)
class NumericPolicy:
    """Global numeric tolerances, configurable in one place."""

    hermiticity_atol: float = 1e-10
    unitarity_atol: float = 1e-10
    trace_atol: float = 1e-10
    psd_slack: float = 1e-10
    dm_hermiticity_atol: float = 1e-12
    degeneracy_rtol: float = 1e-9


DEFAULT_POLICY = NumericPolicy()

# scipy's 'evr' driver is noticeably faster than the default for large
# single matrices; batched stacks go through numpy's gufunc instead.
_SCIPY_EIGH_MIN_DIM = 128


def eigh(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Hermitian eigendecomposition of one matrix or a stack of matrices."""
    if mat.ndim == 2 and mat.shape[0] >= _SCIPY_EIGH_MIN_DIM:
        return scipy.linalg.eigh(mat, driver="evr")
    return np.linalg.eigh(mat)


@dataclass(frozen=True)
class Operator:
    """A dense complex square matrix with subsystem bookkeeping.

    ``dims`` is the ordered tuple of subsystem dimensions; their product
    must equal the matrix dimension.  Instances are immutable (the wrapped
    array is marked read-only) and safe to share across workers.
    """

    mat: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {mat.shape}")
        if not np.isfinite(mat).all():
            raise ValueError("operator entries must be finite")
        dims = tuple(int(d) for d in self.dims)
        if any(d <= 0 for d in dims) or math.prod(dims) != mat.shape[0]:
            raise BadSubsystemSpecError(
                f"subsystem dims {dims} do not multiply to dimension {mat.shape[0]}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.mat.conj().T, self.dims)

    def trace(self) -> complex:
        return complex(np.trace(self.mat))

    def is_hermitian(self, atol: float | None = None) -> bool:
        atol = DEFAULT_POLICY.hermiticity_atol if atol is None else atol
        return bool(np.abs(self.mat - self.mat.conj().T).max() <= atol)

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.mat + other.mat, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.mat - other.mat, self.dims)

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.mat @ other.mat, self.dims)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.mat * scalar, self.dims)

    __rmul__ = __mul__

    def __neg__(self) -> "Operator":
        return Operator(-self.mat, self.dims)

    def _check_same_space(self, other: "Operator"):
        if not isinstance(other, Operator):
            raise TypeError(f"expected Operator, got {type(other).__name__}")
        if self.dim != other.dim:
            raise DimMismatchError(f"dimension mismatch: {self.dim} vs {other.dim}")


def operator(mat: np.ndarray, dims: tuple[int, ...] | None = None) -> Operator:
    """Wrap a matrix, defaulting to a single subsystem of full dimension."""
    mat = np.asarray(mat, dtype=complex)
    if dims is None:
        dims = (mat.shape[0],)
    return Operator(mat, tuple(dims))


# Pauli matrices and ladder operators in the (|up>, |down>) basis.
SIGMA_X = operator([[0, 1], [1, 0]])
SIGMA_Y = operator([[0, -1j], [1j, 0]])
SIGMA_Z = operator([[1, 0], [0, -1]])
SIGMA_PLUS = operator([[0, 1], [0, 0]])   # |up><down|
SIGMA_MINUS = operator([[0, 0], [1, 0]])  # |down><up|


def identity(dim: int, dims: tuple[int, ...] | None = None) -> Operator:
    return operator(np.eye(dim), dims if dims is not None else (dim,))


def pauli_axis(theta: float, phi: float) -> Operator:
    """Pauli matrix quantized along the Bloch-sphere direction (theta, phi).

    Returns sin(theta)cos(phi) sigma_x + sin(theta)sin(phi) sigma_y
    + cos(theta) sigma_z; Hermitian, involutory and traceless.
    """
    st, ct = math.sin(theta), math.cos(theta)
    return operator(
        st * math.cos(phi) * SIGMA_X.mat
        + st * math.sin(phi) * SIGMA_Y.mat
        + ct * SIGMA_Z.mat
    )


def kron(a: Operator, b: Operator) -> Operator:
    """Tensor product; subsystem dims are concatenated."""
    return Operator(np.kron(a.mat, b.mat), a.dims + b.dims)


def site_operator(op2: np.ndarray, site: int, n_sites: int) -> np.ndarray:
    """Embed a single-qubit matrix at ``site`` in an ``n_sites`` register."""
    out = np.array([[1.0 + 0j]])
    for k in range(n_sites):
        out = np.kron(out, op2 if k == site else np.eye(2))
    return out


@dataclass(frozen=True)
class Spectrum:
    """Ascending real eigenvalues and the unitary of eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: Operator

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        ev.flags.writeable = False
        object.__setattr__(self, "eigenvalues", ev)


def eig_hermitian(h: Operator, policy: NumericPolicy = DEFAULT_POLICY) -> Spectrum:
    """Eigendecomposition with an explicit Hermiticity check."""
    if not h.is_hermitian(policy.hermiticity_atol):
        raise NotHermitianError(
            f"matrix deviates from Hermiticity by "
            f"{np.abs(h.mat - h.mat.conj().T).max():.3e}"
        )
    w, v = eigh(h.mat)
    return Spectrum(w, Operator(v, h.dims))


def expm_hermitian_prop(h: Operator, t: float,
                        policy: NumericPolicy = DEFAULT_POLICY) -> Operator:
    """Unitary propagator exp(-i h t) via eigendecomposition."""
    spec = eig_hermitian(h, policy)
    v = spec.eigenvectors.mat
    u = (v * np.exp(-1j * spec.eigenvalues * t)) @ v.conj().T
    return Operator(u, h.dims)


def prop_from_spectrum(spec: Spectrum, t: float) -> Operator:
    """exp(-i h t) from a precomputed spectrum; reused across times t."""
    v = spec.eigenvectors.mat
    u = (v * np.exp(-1j * spec.eigenvalues * t)) @ v.conj().T
    return Operator(u, spec.eigenvectors.dims)


@dataclass(frozen=True)
class DensityMatrix:
    """A Hermitian, positive-semidefinite, unit-trace operator.

    Validation happens on construction: Hermiticity to 1e-12, trace within
    1e-10 of one and smallest eigenvalue above the PSD slack.
    """

    op: Operator

    def __post_init__(self):
        policy = DEFAULT_POLICY
        mat = self.op.mat
        herm = np.abs(mat - mat.conj().T).max()
        if herm > policy.dm_hermiticity_atol:
            raise NotHermitianError(f"density matrix non-Hermitian by {herm:.3e}")
        tr = np.trace(mat).real
        if abs(tr - 1.0) > policy.trace_atol:
            raise ValueError(f"density matrix trace {tr} deviates from 1")
        min_eig = float(np.linalg.eigvalsh(mat)[0])
        if min_eig < -policy.psd_slack:
            raise ValueError(f"density matrix not PSD: min eigenvalue {min_eig:.3e}")

    @property
    def mat(self) -> np.ndarray:
        return self.op.mat

    @property
    def dims(self) -> tuple[int, ...]:
        return self.op.dims

    @property
    def dim(self) -> int:
        return self.op.dim

    @staticmethod
    def from_matrix(mat: np.ndarray, dims: tuple[int, ...] | None = None) -> "DensityMatrix":
        return DensityMatrix(operator(mat, dims))

    @staticmethod
    def pure(psi: np.ndarray, dims: tuple[int, ...] | None = None) -> "DensityMatrix":
        psi = np.asarray(psi, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return DensityMatrix.from_matrix(np.outer(psi, psi.conj()), dims)

    @staticmethod
    def maximally_mixed(dim: int, dims: tuple[int, ...] | None = None) -> "DensityMatrix":
        return DensityMatrix.from_matrix(np.eye(dim) / dim, dims)


def partial_trace_mat(mat: np.ndarray, dims: tuple[int, ...],
                      keep: tuple[int, ...]) -> np.ndarray:
    """Partial trace on a raw matrix, keeping the listed subsystems in order."""
    n = len(dims)
    keep = tuple(sorted(set(int(k) for k in keep)))
    if not keep or any(k < 0 or k >= n for k in keep):
        raise BadSubsystemSpecError(f"invalid keep set {keep} for {n} subsystems")
    tensor = mat.reshape(dims + dims)
    row_idx = list(range(n))
    col_idx = [i + n if i in keep else i for i in range(n)]
    out_idx = [i for i in keep] + [i + n for i in keep]
    return np.einsum(tensor, row_idx + col_idx, out_idx).reshape(
        math.prod(dims[k] for k in keep), -1
    )


def partial_trace(rho: DensityMatrix, keep: tuple[int, ...]) -> DensityMatrix:
    """Trace out every subsystem not in ``keep``; trace is preserved."""
    keep = tuple(sorted(set(int(k) for k in keep)))
    reduced = partial_trace_mat(rho.mat, rho.dims, keep)
    return DensityMatrix.from_matrix(reduced, tuple(rho.dims[k] for k in keep))


def expect(obs: Operator, rho: DensityMatrix,
           policy: NumericPolicy = DEFAULT_POLICY) -> float:
    """Real part of tr(obs rho) for a Hermitian observable."""
    if obs.dim != rho.dim:
        raise DimMismatchError(f"observable dim {obs.dim} vs state dim {rho.dim}")
    if not obs.is_hermitian(policy.hermiticity_atol):
        raise NotHermitianError("observable must be Hermitian")
    val = complex(np.einsum("ij,ji->", obs.mat, rho.mat))
    if abs(val.imag) > 1e-10:
        warnings.warn(f"expectation has imaginary residual {val.imag:.3e}",
                      stacklevel=2)
    return float(val.real)
