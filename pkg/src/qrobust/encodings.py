"""Feature-vector to density-matrix encodings.

Each family maps a real feature vector to a pure n-qubit state:

* ``angle`` -- one feature per qubit, amplitudes (cos(theta*x), sin(theta*x)).
* ``dense_angle`` -- two features per qubit, a polar angle plus a relative
  phase: (cos(theta*x1), e^{i phi x2} sin(theta*x1)).
* ``superdense_angle`` -- two features per qubit combined linearly inside a
  single rotation angle: (cos(theta*x1 + phi*x2), sin(theta*x1 + phi*x2)).
* ``wavefunction`` -- features written directly as normalized amplitudes.
* ``generalized_wavefunction`` -- wavefunction with a theta-parameterized
  amplitude deformation (two features, one qubit).
* ``general_qubit`` -- caller-supplied amplitude functions (f, g) per qubit.

Hyperparameters are scalars shared by every qubit. Feature scaling is the
caller's job; the data module normalizes into the unit hypercube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .qcore import DensityMatrix, QuantumValueError

FAMILIES = (
    "angle",
    "dense_angle",
    "superdense_angle",
    "wavefunction",
    "generalized_wavefunction",
    "general_qubit",
)

# Hyperparameter defaults: dense/superdense use (theta, phi) = (pi, 2*pi),
# angle uses theta = 1, the generalized wavefunction deformation defaults off.
_DEFAULT_HYPERPARAMS = {
    "angle": (1.0,),
    "dense_angle": (math.pi, 2 * math.pi),
    "superdense_angle": (math.pi, 2 * math.pi),
    "wavefunction": (),
    "generalized_wavefunction": (0.0,),
    "general_qubit": (),
}

AmplitudeFn = Callable[[float, float], complex]


@dataclass(frozen=True)
class EncodingSpec:
    """An encoding family plus its hyperparameters.

    ``f`` and ``g`` are only used by the ``general_qubit`` family and must
    satisfy |f|^2 + |g|^2 = 1 on every encoded input.
    """

    family: str
    hyperparams: tuple[float, ...] = ()
    f: Optional[AmplitudeFn] = None
    g: Optional[AmplitudeFn] = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise QuantumValueError(f"unknown encoding family {self.family!r}")
        object.__setattr__(self, "hyperparams", tuple(float(h) for h in self.hyperparams))
        if self.family == "general_qubit" and (self.f is None or self.g is None):
            raise QuantumValueError("general_qubit encoding requires f and g")

    def resolved_hyperparams(self) -> tuple[float, ...]:
        if self.hyperparams:
            return self.hyperparams
        return _DEFAULT_HYPERPARAMS[self.family]

    def with_hyperparams(self, hyperparams) -> "EncodingSpec":
        return EncodingSpec(self.family, tuple(hyperparams), self.f, self.g)


def angle_encoding(theta: float = 1.0) -> EncodingSpec:
    return EncodingSpec("angle", (theta,))


def dense_angle(theta: float = math.pi, phi: float = 2 * math.pi) -> EncodingSpec:
    return EncodingSpec("dense_angle", (theta, phi))


def superdense_angle(theta: float = math.pi, phi: float = 2 * math.pi) -> EncodingSpec:
    return EncodingSpec("superdense_angle", (theta, phi))


def wavefunction() -> EncodingSpec:
    return EncodingSpec("wavefunction")


def generalized_wavefunction(theta: float = 0.0) -> EncodingSpec:
    return EncodingSpec("generalized_wavefunction", (theta,))


def general_qubit(f: AmplitudeFn, g: AmplitudeFn) -> EncodingSpec:
    return EncodingSpec("general_qubit", (), f, g)


def n_qubits_for(spec: EncodingSpec, n_features: int) -> int:
    """Number of qubits the family needs for an n_features input."""
    if n_features < 1:
        raise QuantumValueError("feature vector must be nonempty")
    if spec.family == "angle":
        return n_features
    if spec.family in ("dense_angle", "superdense_angle", "general_qubit"):
        return (n_features + 1) // 2
    # wavefunction-type encodings need a power-of-2 feature count
    n = int(n_features).bit_length() - 1
    if 2**n != n_features:
        raise QuantumValueError(
            f"{spec.family} encoding requires a power-of-2 feature count, got {n_features}"
        )
    if spec.family == "generalized_wavefunction" and n_features != 2:
        raise QuantumValueError(
            "generalized_wavefunction is defined for two features (one qubit)"
        )
    return max(n, 1)


def _pair_features(x: np.ndarray) -> np.ndarray:
    """Group features two per qubit, zero-padding an odd tail."""
    if x.size % 2:
        x = np.concatenate([x, [0.0]])
    return x.reshape(-1, 2)


def amplitudes(x, spec: EncodingSpec) -> np.ndarray:
    """Pure-state amplitude vector for the encoded feature vector."""
    vec = np.asarray(x, dtype=float).ravel()
    if vec.size == 0:
        raise QuantumValueError("feature vector must be nonempty")
    if not np.all(np.isfinite(vec)):
        raise QuantumValueError("feature vector has non-finite entries")
    family = spec.family
    hp = spec.resolved_hyperparams()

    if family == "angle":
        (theta,) = hp
        out = np.array([1.0], dtype=complex)
        for xi in vec:
            out = np.kron(out, [math.cos(theta * xi), math.sin(theta * xi)])
        return out

    if family == "dense_angle":
        theta, phi = hp
        out = np.array([1.0], dtype=complex)
        for x1, x2 in _pair_features(vec):
            qubit = [math.cos(theta * x1), np.exp(1j * phi * x2) * math.sin(theta * x1)]
            out = np.kron(out, qubit)
        return out

    if family == "superdense_angle":
        theta, phi = hp
        out = np.array([1.0], dtype=complex)
        for x1, x2 in _pair_features(vec):
            a = theta * x1 + phi * x2
            out = np.kron(out, [math.cos(a), math.sin(a)])
        return out

    if family == "wavefunction":
        n_qubits_for(spec, vec.size)
        norm = np.linalg.norm(vec)
        if norm == 0.0:
            raise QuantumValueError("wavefunction encoding of the zero vector")
        return (vec / norm).astype(complex)

    if family == "generalized_wavefunction":
        n_qubits_for(spec, vec.size)
        (theta,) = hp
        x1, x2 = vec
        norm = math.hypot(x1, x2)
        if norm == 0.0:
            raise QuantumValueError("generalized_wavefunction encoding of the zero vector")
        up = 1.0 + theta * x2 * x2
        down = 1.0 - theta * x1 * x1
        if up < 0.0 or down < 0.0:
            raise QuantumValueError(
                f"generalized_wavefunction domain violation: negative value under "
                f"square root for theta={theta}, x={tuple(vec)}"
            )
        return np.array([x1 * math.sqrt(up), x2 * math.sqrt(down)], dtype=complex) / norm

    # general_qubit
    out = np.array([1.0], dtype=complex)
    for x1, x2 in _pair_features(vec):
        fv = complex(spec.f(x1, x2))
        gv = complex(spec.g(x1, x2))
        norm_sq = abs(fv) ** 2 + abs(gv) ** 2
        if abs(norm_sq - 1.0) > 1e-9:
            raise QuantumValueError(
                f"general_qubit amplitudes not normalized: |f|^2+|g|^2 = {norm_sq}"
            )
        out = np.kron(out, [fv, gv])
    return out


def encode(x, spec: EncodingSpec) -> DensityMatrix:
    """Encode a feature vector as the pure density matrix |x><x|."""
    return DensityMatrix.from_amplitudes(amplitudes(x, spec))


def encode_batch(points: np.ndarray, spec: EncodingSpec) -> np.ndarray:
    """Amplitude vectors for a batch of feature vectors, shape (M, 2^n).

    Vectorized for the two-feature trigonometric families; other families
    fall back to a per-point loop.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise QuantumValueError("points must be a 2-D array (M, N)")
    family = spec.family
    hp = spec.resolved_hyperparams()
    m, nfeat = pts.shape

    if family in ("dense_angle", "superdense_angle") and nfeat == 2:
        theta, phi = hp
        if family == "dense_angle":
            a0 = np.cos(theta * pts[:, 0]).astype(complex)
            a1 = np.exp(1j * phi * pts[:, 1]) * np.sin(theta * pts[:, 0])
        else:
            ang = theta * pts[:, 0] + phi * pts[:, 1]
            a0 = np.cos(ang).astype(complex)
            a1 = np.sin(ang).astype(complex)
        return np.stack([a0, a1], axis=1)

    if family == "wavefunction":
        n_qubits_for(spec, nfeat)
        norms = np.linalg.norm(pts, axis=1)
        if np.any(norms == 0.0):
            raise QuantumValueError("wavefunction encoding of the zero vector")
        return (pts / norms[:, None]).astype(complex)

    return np.stack([amplitudes(p, spec) for p in pts])


def density_matrix_closed_form_dae(
    x, theta: float = math.pi, phi: float = 2 * math.pi
) -> DensityMatrix:
    """Explicit 2x2 density matrix of the single-qubit dense angle encoding.

    Entries are cos^2(theta*x1), e^{-i phi x2} cos(theta*x1) sin(theta*x1)
    (and conjugate), sin^2(theta*x1); agrees with :func:`encode` to 1e-12.
    """
    x1, x2 = np.asarray(x, dtype=float).ravel()
    c, s = math.cos(theta * x1), math.sin(theta * x1)
    off = np.exp(-1j * phi * x2) * c * s
    return DensityMatrix(np.array([[c * c, off], [off.conjugate(), s * s]]))
