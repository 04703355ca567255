"""Quantum noise channels in Kraus form, plus channel fixed points.

A channel acts as rho -> sum_k E_k rho E_k^dag with completeness
sum_k E_k^dag E_k = I. Readout (assignment) noise is not a Kraus channel;
it is modeled in the classifier module through the POVM transformation
described by :class:`AssignmentMatrix`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .qcore import (
    ATOL,
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PAULIS,
    DensityMatrix,
    QuantumValueError,
    n_qubits_of,
    tensor,
)

FIXED_POINT_TOL = 1e-8


@dataclass(frozen=True)
class KrausChannel:
    """A CPTP map given by its Kraus operators on n qubits.

    ``config`` holds the serialized {kind, params} form for channels built by
    the named factories; hand-rolled Kraus sets leave it None.
    """

    kraus_ops: tuple
    label: str = ""
    n_qubits: int = -1
    config: dict | None = None

    def __post_init__(self):
        ops = tuple(np.asarray(op, dtype=complex) for op in self.kraus_ops)
        for op in ops:
            op.flags.writeable = False
        object.__setattr__(self, "kraus_ops", ops)
        if not ops:
            raise QuantumValueError("a channel needs at least one Kraus operator")
        d = ops[0].shape[0]
        n = n_qubits_of(d)
        if self.n_qubits == -1:
            object.__setattr__(self, "n_qubits", n)
        elif self.n_qubits != n:
            raise QuantumValueError("n_qubits inconsistent with operator dimension")
        total = sum(op.conj().T @ op for op in ops)
        if not np.allclose(total, np.eye(d), atol=ATOL, rtol=0):
            raise QuantumValueError(
                f"Kraus operators violate completeness for channel {self.label!r}"
            )

    @property
    def dim(self) -> int:
        return self.kraus_ops[0].shape[0]


def _check_prob(p: float, name: str) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise QuantumValueError(f"{name} must be in [0, 1], got {p}")
    return p


def identity_channel(n_qubits: int = 1) -> KrausChannel:
    return KrausChannel(
        (np.eye(2**n_qubits),),
        label=f"identity(n={n_qubits})",
        config={"kind": "identity", "params": {"n_qubits": int(n_qubits)}},
    )


def pauli_channel(p_i: float, p_x: float, p_y: float, p_z: float) -> KrausChannel:
    """Mixture of Pauli conjugations with the given probabilities."""
    probs = [_check_prob(p, n) for p, n in zip((p_i, p_x, p_y, p_z), "IXYZ")]
    if abs(sum(probs) - 1.0) > 1e-12:
        raise QuantumValueError(f"Pauli probabilities sum to {sum(probs)}, not 1")
    ops = tuple(np.sqrt(p) * sigma for p, sigma in zip(probs, PAULIS) if p > 0.0)
    cfg = {"kind": "pauli", "params": {"p_i": probs[0], "p_x": probs[1], "p_y": probs[2], "p_z": probs[3]}}
    return KrausChannel(ops, label=f"pauli({p_i},{p_x},{p_y},{p_z})", config=cfg)


def bit_flip(p: float) -> KrausChannel:
    """(1-p) rho + p X rho X."""
    p = _check_prob(p, "p")
    ops = (np.sqrt(1 - p) * PAULI_I, np.sqrt(p) * PAULI_X)
    return KrausChannel(ops, label=f"bit_flip({p})", config={"kind": "bit_flip", "params": {"p": p}})


def dephasing(p: float) -> KrausChannel:
    """Phase flip: (1-p) rho + p Z rho Z."""
    p = _check_prob(p, "p")
    ops = (np.sqrt(1 - p) * PAULI_I, np.sqrt(p) * PAULI_Z)
    return KrausChannel(ops, label=f"dephasing({p})", config={"kind": "dephasing", "params": {"p": p}})


def depolarizing(p: float) -> KrausChannel:
    """Single-qubit depolarizing: (1-p) rho + p I/2.

    Realized as the Pauli channel with p_X = p_Y = p_Z = p/4 and
    p_I = 1 - 3p/4, which reproduces the convex form exactly.
    """
    p = _check_prob(p, "p")
    ch = pauli_channel(1 - 3 * p / 4, p / 4, p / 4, p / 4)
    return KrausChannel(
        ch.kraus_ops, label=f"depolarizing({p})", config={"kind": "depolarizing", "params": {"p": p}}
    )


def global_depolarizing(p: float, n_qubits: int = 1) -> KrausChannel:
    """n-qubit depolarizing: (1-p) rho + p I/d, as a mixed-unitary Pauli sum."""
    p = _check_prob(p, "p")
    n_qubits = int(n_qubits)
    if n_qubits < 1:
        raise QuantumValueError("n_qubits must be >= 1")
    dsq = 4**n_qubits
    ops = []
    for combo in itertools.product(PAULIS, repeat=n_qubits):
        string = tensor(*combo)
        weight = p / dsq
        if all(c is PAULI_I for c in combo):
            weight += 1 - p
        if weight > 0.0:
            ops.append(np.sqrt(weight) * string)
    return KrausChannel(
        tuple(ops),
        label=f"global_depolarizing({p},n={n_qubits})",
        config={"kind": "global_depolarizing", "params": {"p": p, "n_qubits": n_qubits}},
    )


def amplitude_damping(p: float) -> KrausChannel:
    """Decay |1> -> |0> with probability p (two standard Kraus operators)."""
    p = _check_prob(p, "p")
    k0 = np.array([[1, 0], [0, np.sqrt(1 - p)]], dtype=complex)
    k1 = np.array([[0, np.sqrt(p)], [0, 0]], dtype=complex)
    return KrausChannel(
        (k0, k1), label=f"amplitude_damping({p})", config={"kind": "amplitude_damping", "params": {"p": p}}
    )


_CHANNEL_KINDS = {
    "identity": (identity_channel, ("n_qubits",)),
    "pauli": (pauli_channel, ("p_i", "p_x", "p_y", "p_z")),
    "bit_flip": (bit_flip, ("p",)),
    "dephasing": (dephasing, ("p",)),
    "depolarizing": (depolarizing, ("p",)),
    "global_depolarizing": (global_depolarizing, ("p", "n_qubits")),
    "amplitude_damping": (amplitude_damping, ("p",)),
}


def make_channel(kind: str, params: dict | None = None) -> KrausChannel:
    """Build a channel from its serialized {kind, params} form."""
    if kind not in _CHANNEL_KINDS:
        raise QuantumValueError(
            f"unknown channel kind {kind!r}; expected one of {sorted(_CHANNEL_KINDS)}"
        )
    factory, names = _CHANNEL_KINDS[kind]
    params = dict(params or {})
    unknown = set(params) - set(names)
    if unknown:
        raise QuantumValueError(f"unknown parameters for channel {kind!r}: {sorted(unknown)}")
    return factory(**params)


def channel_to_config(ch: KrausChannel) -> dict:
    """Serialize a factory-built channel back to {kind, params}."""
    if ch.config is None:
        raise QuantumValueError(f"channel {ch.label!r} was not built by a named factory")
    return {"kind": ch.config["kind"], "params": dict(ch.config["params"])}


def apply(ch: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
    """Apply the operator sum rho -> sum_k E_k rho E_k^dag."""
    if ch.dim != rho.dim:
        raise QuantumValueError(
            f"dimension mismatch: channel on {ch.dim}, state on {rho.dim}"
        )
    return DensityMatrix(apply_matrix(ch, rho.matrix))


def apply_matrix(ch: KrausChannel, mat: np.ndarray) -> np.ndarray:
    out = np.zeros_like(mat, dtype=complex)
    for op in ch.kraus_ops:
        out += op @ mat @ op.conj().T
    return out


def apply_batch(ch: KrausChannel, rhos: np.ndarray) -> np.ndarray:
    """Vectorized operator sum over a stack of matrices, shape (M, d, d)."""
    out = np.zeros_like(rhos, dtype=complex)
    for op in ch.kraus_ops:
        out += np.einsum("ij,mjk,lk->mil", op, rhos, op.conj(), optimize=True)
    return out


def tensor_channel(left: KrausChannel, right: KrausChannel) -> KrausChannel:
    """Product channel with ``left`` on the leading qubits."""
    ops = tuple(tensor(a, b) for a in left.kraus_ops for b in right.kraus_ops)
    return KrausChannel(ops, label=f"({left.label})x({right.label})")


def apply_factorized(
    ch_rest: KrausChannel, ch_c: KrausChannel, rho: DensityMatrix
) -> DensityMatrix:
    """Apply ch_c on the classification qubit (qubit 0) and ch_rest on the rest."""
    composite = tensor_channel(ch_c, ch_rest)
    return apply(composite, rho)


def superoperator(ch: KrausChannel) -> np.ndarray:
    """Matrix of the channel on row-major vectorized states, sum_k E_k (x) conj(E_k)."""
    d = ch.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    for op in ch.kraus_ops:
        out += np.kron(op, op.conj())
    return out


@dataclass(frozen=True)
class FixedPointResult:
    """Eigenvalue-1 subspace of a channel plus one density-operator fixed point."""

    basis: tuple
    density_operator: DensityMatrix


def fixed_points(ch: KrausChannel) -> FixedPointResult:
    """Basis of matrices M with ch(M) = M, and a fixed density operator.

    The fixed subspace comes from the eigenvalue-1 eigenvectors of the
    superoperator. A density-operator fixed point (always existing for a
    trace-preserving channel) is extracted by spectrally projecting the
    maximally mixed state onto the fixed subspace, which preserves trace,
    Hermiticity, and positivity in the limit of channel iteration.
    """
    d = ch.dim
    s = superoperator(ch)
    evals, right = np.linalg.eig(s)
    mask = np.abs(evals - 1.0) <= FIXED_POINT_TOL
    if not mask.any():
        raise QuantumValueError("no eigenvalue-1 subspace found; channel not trace preserving?")
    r = right[:, mask]
    basis = tuple(r[:, j].reshape(d, d) for j in range(r.shape[1]))

    # Left eigenvectors for the same eigenvalue give the (oblique) spectral
    # projector P = R (L^dag R)^-1 L^dag; eigenvalue 1 of a CPTP map is
    # semisimple so the inversion is well posed.
    evals_left, left = np.linalg.eig(s.conj().T)
    lmask = np.abs(evals_left - 1.0) <= FIXED_POINT_TOL
    l = left[:, lmask]
    proj = r @ np.linalg.solve(l.conj().T @ r, l.conj().T)

    mixed = np.eye(d, dtype=complex).ravel() / d
    candidate = (proj @ mixed).reshape(d, d)
    candidate = (candidate + candidate.conj().T) / 2
    # Numerical cleanup: clip eigenvalue dust and renormalize the trace.
    eigs, vecs = np.linalg.eigh(candidate)
    eigs = np.clip(eigs, 0.0, None)
    candidate = (vecs * eigs) @ vecs.conj().T
    candidate /= np.trace(candidate).real
    rho_star = DensityMatrix(candidate)

    residual = np.abs(apply_matrix(ch, rho_star.matrix) - rho_star.matrix).max()
    if residual > FIXED_POINT_TOL:
        raise QuantumValueError(f"fixed-point extraction failed (residual {residual})")
    return FixedPointResult(basis, rho_star)


@dataclass(frozen=True)
class AssignmentMatrix:
    """Readout-noise assignment probabilities p_kl = P(outcome k | true l).

    Columns are normalized: p00 + p10 = 1 and p01 + p11 = 1.
    """

    p00: float
    p01: float
    p10: float
    p11: float

    def __post_init__(self):
        for name in ("p00", "p01", "p10", "p11"):
            _check_prob(getattr(self, name), name)
        if abs(self.p00 + self.p10 - 1.0) > 1e-12 or abs(self.p01 + self.p11 - 1.0) > 1e-12:
            raise QuantumValueError("assignment matrix columns must each sum to 1")

    @classmethod
    def identity(cls) -> "AssignmentMatrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def symmetric(cls, flip_prob: float) -> "AssignmentMatrix":
        """Both outcomes misread with the same probability."""
        q = _check_prob(flip_prob, "flip_prob")
        return cls(1 - q, q, q, 1 - q)
