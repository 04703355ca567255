"""Dense complex linear algebra and quantum-state primitives.

Everything here works on plain numpy arrays with ``complex128`` dtype.
States live in the computational basis of ``n`` qubits with qubit 0 the
leftmost tensor factor; by convention the classification qubit is qubit 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Single tolerance for all structural state/operator validation.
ATOL = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_I, PAULI_X, PAULI_Y, PAULI_Z)

KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
KET_PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS = np.array([1, -1], dtype=complex) / np.sqrt(2)
KET_PLUS_I = np.array([1, 1j], dtype=complex) / np.sqrt(2)
KET_MINUS_I = np.array([1, -1j], dtype=complex) / np.sqrt(2)

PROJ0 = np.outer(KET0, KET0.conj())
PROJ1 = np.outer(KET1, KET1.conj())
PROJ_PLUS = np.outer(KET_PLUS, KET_PLUS.conj())
PROJ_MINUS = np.outer(KET_MINUS, KET_MINUS.conj())
PROJ_PLUS_I = np.outer(KET_PLUS_I, KET_PLUS_I.conj())
PROJ_MINUS_I = np.outer(KET_MINUS_I, KET_MINUS_I.conj())


class QuantumValueError(ValueError):
    """Raised when a matrix or vector violates a quantum-state invariant."""


def _as_complex(matrix) -> np.ndarray:
    arr = np.asarray(matrix, dtype=complex)
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


def n_qubits_of(dim: int) -> int:
    """Number of qubits for a Hilbert-space dimension, rejecting non powers of 2."""
    n = int(dim).bit_length() - 1
    if dim <= 0 or 2**n != dim:
        raise QuantumValueError(f"dimension {dim} is not a power of 2")
    return n


def is_hermitian(matrix: np.ndarray, atol: float = ATOL) -> bool:
    return bool(np.allclose(matrix, matrix.conj().T, atol=atol, rtol=0))


def is_unitary(matrix: np.ndarray, atol: float = ATOL) -> bool:
    eye = np.eye(matrix.shape[0])
    return bool(np.allclose(matrix.conj().T @ matrix, eye, atol=atol, rtol=0))


@dataclass(frozen=True)
class DensityMatrix:
    """A valid n-qubit density operator: unit trace, Hermitian, PSD.

    The wrapped array is made read-only; all operations return new values.
    """

    matrix: np.ndarray
    n_qubits: int = field(default=-1)

    def __post_init__(self):
        mat = _as_complex(self.matrix)
        object.__setattr__(self, "matrix", mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise QuantumValueError(f"density matrix must be square, got {mat.shape}")
        n = n_qubits_of(mat.shape[0])
        if self.n_qubits == -1:
            object.__setattr__(self, "n_qubits", n)
        elif self.n_qubits != n:
            raise QuantumValueError(
                f"n_qubits={self.n_qubits} inconsistent with dimension {mat.shape[0]}"
            )
        if abs(np.trace(mat) - 1.0) > ATOL:
            raise QuantumValueError(f"trace {np.trace(mat)} is not 1")
        if not is_hermitian(mat):
            raise QuantumValueError("matrix is not Hermitian")
        eigs = np.linalg.eigvalsh(mat)
        if eigs.min() < -ATOL:
            raise QuantumValueError(f"negative eigenvalue {eigs.min()}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "DensityMatrix":
        """Outer product |psi><psi| of a normalized amplitude vector."""
        vec = np.asarray(amplitudes, dtype=complex).ravel()
        return cls(np.outer(vec, vec.conj()))

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        d = 2**n_qubits
        return cls(np.eye(d, dtype=complex) / d)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))


@dataclass(frozen=True)
class PureState:
    """A normalized n-qubit state vector."""

    amplitudes: np.ndarray
    n_qubits: int = field(default=-1)

    def __post_init__(self):
        vec = _as_complex(self.amplitudes).ravel()
        object.__setattr__(self, "amplitudes", vec)
        n = n_qubits_of(vec.shape[0])
        if self.n_qubits == -1:
            object.__setattr__(self, "n_qubits", n)
        elif self.n_qubits != n:
            raise QuantumValueError("n_qubits inconsistent with vector length")
        norm_sq = float(np.vdot(vec, vec).real)
        if abs(norm_sq - 1.0) > ATOL:
            raise QuantumValueError(f"squared norm {norm_sq} is not 1")

    def density(self) -> DensityMatrix:
        return DensityMatrix.from_amplitudes(self.amplitudes)


@dataclass(frozen=True)
class Observable:
    """A Hermitian operator on n qubits."""

    matrix: np.ndarray
    n_qubits: int = field(default=-1)

    def __post_init__(self):
        mat = _as_complex(self.matrix)
        object.__setattr__(self, "matrix", mat)
        n = n_qubits_of(mat.shape[0])
        if self.n_qubits == -1:
            object.__setattr__(self, "n_qubits", n)
        elif self.n_qubits != n:
            raise QuantumValueError("n_qubits inconsistent with dimension")
        if not is_hermitian(mat):
            raise QuantumValueError("observable is not Hermitian")


def tensor(*factors) -> np.ndarray:
    """Kronecker product of matrices (or vectors), left factor = qubit 0."""
    out = np.asarray(factors[0], dtype=complex)
    for f in factors[1:]:
        out = np.kron(out, np.asarray(f, dtype=complex))
    return out


def _matrix_of(x) -> np.ndarray:
    if isinstance(x, (DensityMatrix, Observable)):
        return x.matrix
    return np.asarray(x, dtype=complex)


def expectation(rho, obs) -> float:
    """Tr[obs * rho]; the imaginary part must vanish and is discarded."""
    rmat, omat = _matrix_of(rho), _matrix_of(obs)
    if rmat.shape != omat.shape:
        raise QuantumValueError(
            f"dimension mismatch: state {rmat.shape} vs observable {omat.shape}"
        )
    tr = np.trace(omat @ rmat)
    if abs(tr.imag) >= ATOL:
        raise QuantumValueError(f"expectation has imaginary part {tr.imag}")
    return float(tr.real)


def sqrtm_psd(matrix: np.ndarray) -> np.ndarray:
    """Matrix square root of a Hermitian PSD matrix via eigendecomposition.

    Eigenvalues are clipped at zero so near-singular density matrices stay safe.
    """
    mat = _matrix_of(matrix)
    if not is_hermitian(mat):
        raise QuantumValueError("matrix square root requires a Hermitian input")
    eigs, vecs = np.linalg.eigh(mat)
    if eigs.min() < -1e-8:
        raise QuantumValueError(f"matrix is not PSD (eigenvalue {eigs.min()})")
    return (vecs * np.sqrt(np.clip(eigs, 0.0, None))) @ vecs.conj().T


def _top_eigenpair(mat: np.ndarray) -> tuple[float, np.ndarray]:
    eigs, vecs = np.linalg.eigh(mat)
    return float(eigs[-1]), vecs[:, -1]


def fidelity(tau, omega) -> float:
    """Uhlmann fidelity F(tau, omega) = (Tr sqrt(sqrt(tau) omega sqrt(tau)))^2.

    A rank-1 input is dispatched to the exact overlap <psi|omega|psi>, which
    avoids the square-root noise of nearly singular matrices. The result is
    clipped into [0, 1].
    """
    tmat, wmat = _matrix_of(tau), _matrix_of(omega)
    if tmat.shape != wmat.shape:
        raise QuantumValueError("fidelity requires equal dimensions")
    top_t, vec_t = _top_eigenpair(tmat)
    if top_t >= 1.0 - 1e-10:  # tau is pure
        val = float(np.real(vec_t.conj() @ wmat @ vec_t))
        return min(max(val, 0.0), 1.0)
    top_w, vec_w = _top_eigenpair(wmat)
    if top_w >= 1.0 - 1e-10:  # omega is pure
        val = float(np.real(vec_w.conj() @ tmat @ vec_w))
        return min(max(val, 0.0), 1.0)
    s = sqrtm_psd(tmat)
    val = float(np.trace(sqrtm_psd(s @ wmat @ s)).real ** 2)
    return min(max(val, 0.0), 1.0)


def trace_distance(tau, omega) -> float:
    """Trace norm ||tau - omega||_1: sum of absolute eigenvalues of the difference."""
    diff = _matrix_of(tau) - _matrix_of(omega)
    return float(np.abs(np.linalg.eigvalsh(diff)).sum())


def partial_trace(rho: DensityMatrix, keep) -> DensityMatrix:
    """Reduced density matrix over the kept qubit indices (ascending order)."""
    keep = sorted(set(int(k) for k in keep))
    n = rho.n_qubits
    if not keep:
        raise QuantumValueError("keep must be a nonempty set of qubit indices")
    if keep[0] < 0 or keep[-1] >= n:
        raise QuantumValueError(f"qubit index out of range for {n} qubits: {keep}")
    tensor_form = rho.matrix.reshape([2] * (2 * n))
    traced = tensor_form
    # Trace out the complement from the highest index down so that axis
    # positions of untraced qubits stay valid.
    removed = 0
    for q in reversed(range(n)):
        if q in keep:
            continue
        nq = n - removed  # qubits currently remaining
        traced = np.trace(traced, axis1=q, axis2=q + nq)
        removed += 1
    d = 2 ** len(keep)
    return DensityMatrix(traced.reshape(d, d))


def projector_prob_via_elements(a: np.ndarray, u: np.ndarray) -> tuple[float, float]:
    """(Tr[P0 U A U^dag], Tr[P1 U A U^dag]) from closed-form matrix elements.

    Valid for 2x2 Hermitian ``a`` and 2x2 unitary ``u``; the first probability
    is |U00|^2 A00 + 2 Re[U00* U01 A10] + |U01|^2 A11, the second its
    P1 analogue.
    """
    amat, umat = _matrix_of(a), _matrix_of(u)
    if amat.shape != (2, 2) or umat.shape != (2, 2):
        raise QuantumValueError("closed forms are defined for 2x2 inputs")
    if not is_hermitian(amat):
        raise QuantumValueError("A must be Hermitian")
    if not is_unitary(umat):
        raise QuantumValueError("U must be unitary")
    p0 = (
        abs(umat[0, 0]) ** 2 * amat[0, 0].real
        + 2 * (umat[0, 0].conj() * umat[0, 1] * amat[1, 0]).real
        + abs(umat[0, 1]) ** 2 * amat[1, 1].real
    )
    p1 = (
        abs(umat[1, 0]) ** 2 * amat[0, 0].real
        + 2 * (umat[1, 1].conj() * umat[1, 0] * amat[0, 1]).real
        + abs(umat[1, 1]) ** 2 * amat[1, 1].real
    )
    return float(p0), float(p1)


def random_unitary(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary on n qubits (QR of a complex Ginibre matrix)."""
    d = 2**n_qubits
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> PureState:
    d = 2**n_qubits
    vec = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(vec / np.linalg.norm(vec))


def random_density_matrix(n_qubits: int, rng: np.random.Generator) -> DensityMatrix:
    """Random full-rank mixed state G G^dag / Tr[G G^dag]."""
    d = 2**n_qubits
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    mat = g @ g.conj().T
    return DensityMatrix(mat / np.trace(mat))
