"""Ansatz unitaries, decision rules, prediction pipelines, and cost functions.

The prediction pipeline is

    encode -> (noise after encoding) -> ansatz stages, with optional channels
    interleaved before stages -> (noise after evolution) -> measure

and the score is Tr[P rho] for the decision-rule projector P on the
classification qubit (qubit 0 by convention). Scores are exact density-matrix
traces by default; shot sampling is opt-in through :func:`sample_label`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import channels as ch_mod
from . import encodings as enc_mod
from .channels import AssignmentMatrix, KrausChannel
from .encodings import EncodingSpec
from .qcore import (
    PAULI_I,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    PROJ0,
    PROJ1,
    PROJ_MINUS,
    PROJ_MINUS_I,
    PROJ_PLUS,
    PROJ_PLUS_I,
    DensityMatrix,
    QuantumValueError,
    tensor,
)


@dataclass(frozen=True)
class AnsatzParams:
    """Trainable rotation angles: 3 for one qubit, 12 for two qubits.

    Angles are stored unreduced (no modular wrapping).
    """

    angles: tuple[float, ...]

    def __post_init__(self):
        angles = tuple(float(a) for a in self.angles)
        object.__setattr__(self, "angles", angles)
        if len(angles) not in (3, 12):
            raise QuantumValueError(
                f"ansatz takes 3 (one-qubit) or 12 (two-qubit) angles, got {len(angles)}"
            )
        if not all(math.isfinite(a) for a in angles):
            raise QuantumValueError("ansatz angles must be finite")

    @property
    def n_qubits(self) -> int:
        return 1 if len(self.angles) == 3 else 2

    @classmethod
    def zeros(cls, n_qubits: int) -> "AnsatzParams":
        return cls((0.0,) * (3 if n_qubits == 1 else 12))


def one_qubit_unitary(a1: float, a2: float, a3: float) -> np.ndarray:
    """Rz(2 a1) Ry(2 a2) Rz(2 a3) written out entrywise (det 1)."""
    c, s = math.cos(a2), math.sin(a2)
    return np.array(
        [
            [np.exp(1j * (-a1 - a3)) * c, -np.exp(1j * (-a1 + a3)) * s],
            [np.exp(1j * (a1 - a3)) * s, np.exp(1j * (a1 + a3)) * c],
        ]
    )


def _two_qubit_core(g1: float, g2: float, g3: float) -> np.ndarray:
    """exp(i (g1 XX + g2 YY + g3 ZZ) / 2), the entangling class representative."""
    out = np.eye(4, dtype=complex)
    for g, sigma in ((g1, PAULI_X), (g2, PAULI_Y), (g3, PAULI_Z)):
        pp = tensor(sigma, sigma)
        out = (math.cos(g / 2) * np.eye(4) + 1j * math.sin(g / 2) * pp) @ out
    return out


def unitary_stages(params: AnsatzParams) -> list[np.ndarray]:
    """Ordered unitary factors of the ansatz (first applied first).

    One qubit: a single arbitrary rotation. Two qubits: independent rotations
    on both qubits, the entangling core with angles (2 a7 + pi, 2 a8, 2 a9),
    then a final rotation on the classification qubit only (12 parameters).
    """
    a = params.angles
    if params.n_qubits == 1:
        return [one_qubit_unitary(*a)]
    first = tensor(one_qubit_unitary(*a[0:3]), one_qubit_unitary(*a[3:6]))
    core = _two_qubit_core(2 * a[6] + math.pi, 2 * a[7], 2 * a[8])
    last = tensor(one_qubit_unitary(*a[9:12]), PAULI_I)
    return [first, core, last]


def unitary_from_params(params: AnsatzParams) -> np.ndarray:
    """Full ansatz unitary, the product of its stages."""
    stages = unitary_stages(params)
    out = stages[0]
    for stage in stages[1:]:
        out = stage @ out
    return out


_BASIS_PROJECTORS = {
    "z": (PROJ0, PROJ1),
    "x": (PROJ_PLUS, PROJ_MINUS),
    "y": (PROJ_PLUS_I, PROJ_MINUS_I),
}


@dataclass(frozen=True)
class DecisionRule:
    """Threshold rule on a single-qubit projector probability.

    The predicted label is 0 iff Tr[P0 rho] >= threshold, ties going to 0.
    """

    basis: str = "z"
    threshold: float = 0.5

    def __post_init__(self):
        if self.basis not in _BASIS_PROJECTORS:
            raise QuantumValueError(f"basis must be one of 'z', 'x', 'y', got {self.basis!r}")
        if not 0.0 < self.threshold < 1.0:
            raise QuantumValueError(f"threshold must lie in (0, 1), got {self.threshold}")

    def projectors(self) -> tuple[np.ndarray, np.ndarray]:
        return _BASIS_PROJECTORS[self.basis]


def classification_projectors(
    n_qubits: int, rule: DecisionRule, classification_qubit: int = 0
) -> tuple[np.ndarray, np.ndarray]:
    """Full-space (P0, P1) with the rule's projectors on the classification qubit."""
    if not 0 <= classification_qubit < n_qubits:
        raise QuantumValueError("classification qubit index out of range")
    p0q, p1q = rule.projectors()
    left = np.eye(2**classification_qubit)
    right = np.eye(2 ** (n_qubits - 1 - classification_qubit))
    return tensor(left, p0q, right), tensor(left, p1q, right)


@dataclass(frozen=True)
class NoisePlacement:
    """Where channels act in the pipeline.

    ``interleaved`` holds (stage_index, channel) pairs; each channel is
    applied immediately before the given ansatz stage, supporting layered
    global depolarizing noise.
    """

    after_encoding: KrausChannel | None = None
    after_evolution: KrausChannel | None = None
    interleaved: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "interleaved", tuple(self.interleaved))
        for entry in self.interleaved:
            idx, ch = entry
            if int(idx) < 0 or not isinstance(ch, KrausChannel):
                raise QuantumValueError("interleaved entries are (stage_index, KrausChannel)")

    @property
    def is_noiseless(self) -> bool:
        return (
            self.after_encoding is None
            and self.after_evolution is None
            and not self.interleaved
        )


NO_NOISE = NoisePlacement()


@dataclass(frozen=True)
class ClassifierModel:
    """Encoding plus ansatz plus decision rule."""

    encoding: EncodingSpec
    ansatz: AnsatzParams
    rule: DecisionRule = field(default_factory=DecisionRule)
    classification_qubit: int = 0

    def with_ansatz(self, params: AnsatzParams) -> "ClassifierModel":
        return ClassifierModel(self.encoding, params, self.rule, self.classification_qubit)

    def with_encoding(self, spec: EncodingSpec) -> "ClassifierModel":
        return ClassifierModel(spec, self.ansatz, self.rule, self.classification_qubit)


def _check_model_dims(model: ClassifierModel, n_features: int) -> int:
    n = enc_mod.n_qubits_for(model.encoding, n_features)
    if n != model.ansatz.n_qubits:
        raise QuantumValueError(
            f"encoding produces {n} qubits but ansatz acts on {model.ansatz.n_qubits}"
        )
    return n


def evolve_states(
    rhos: np.ndarray, stages: Sequence[np.ndarray], noise: NoisePlacement = NO_NOISE
) -> np.ndarray:
    """Run a batch of density matrices (M, d, d) through the noisy pipeline.

    Channels in ``noise.interleaved`` fire before their stage; the
    after-encoding channel fires before everything, the after-evolution
    channel after the last stage.
    """
    d = rhos.shape[-1]
    by_stage: dict[int, list[KrausChannel]] = {}
    for idx, ch in noise.interleaved:
        idx = int(idx)
        if idx >= len(stages):
            raise QuantumValueError(
                f"interleaved stage index {idx} out of range for {len(stages)} stages"
            )
        by_stage.setdefault(idx, []).append(ch)

    def _apply(channel: KrausChannel, states: np.ndarray) -> np.ndarray:
        if channel.dim != d:
            raise QuantumValueError(
                f"channel dimension {channel.dim} does not match state dimension {d}"
            )
        return ch_mod.apply_batch(channel, states)

    out = rhos
    if noise.after_encoding is not None:
        out = _apply(noise.after_encoding, out)
    for i, stage in enumerate(stages):
        for ch in by_stage.get(i, ()):
            out = _apply(ch, out)
        out = np.einsum("ij,mjk,lk->mil", stage, out, stage.conj(), optimize=True)
    if noise.after_evolution is not None:
        out = _apply(noise.after_evolution, out)
    return out


def final_states(model: ClassifierModel, points, noise: NoisePlacement = NO_NOISE) -> np.ndarray:
    """Batch of evolved density matrices for the dataset points, shape (M, d, d)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    _check_model_dims(model, pts.shape[1])
    amps = enc_mod.encode_batch(pts, model.encoding)
    rhos = np.einsum("mi,mj->mij", amps, amps.conj())
    return evolve_states(rhos, unitary_stages(model.ansatz), noise)


def dataset_scores(model: ClassifierModel, points, noise: NoisePlacement = NO_NOISE) -> np.ndarray:
    """Exact decision-rule scores Tr[P0 rho] for each point."""
    rhos = final_states(model, points, noise)
    n = model.ansatz.n_qubits
    p0, _ = classification_projectors(n, model.rule, model.classification_qubit)
    return np.einsum("ij,mji->m", p0, rhos, optimize=True).real


def labels_from_scores(scores: np.ndarray, rule: DecisionRule) -> np.ndarray:
    """Label 0 where score >= threshold (ties to class 0), else 1."""
    return np.where(np.asarray(scores) >= rule.threshold, 0, 1)


def predict(
    model: ClassifierModel, x, noise: NoisePlacement = NO_NOISE
) -> tuple[int, float]:
    """(label, score) for a single feature vector."""
    score = float(dataset_scores(model, [np.asarray(x, dtype=float)], noise)[0])
    return (0 if score >= model.rule.threshold else 1), score


def predict_with_measurement_noise(
    model: ClassifierModel,
    x,
    assign: AssignmentMatrix,
    noise: NoisePlacement = NO_NOISE,
) -> tuple[int, float]:
    """Prediction under readout noise: score = Tr[(p00 P0 + p01 P1) rho]."""
    rho = final_states(model, [np.asarray(x, dtype=float)], noise)[0]
    n = model.ansatz.n_qubits
    p0, p1 = classification_projectors(n, model.rule, model.classification_qubit)
    noisy_p0 = assign.p00 * p0 + assign.p01 * p1
    score = float(np.trace(noisy_p0 @ rho).real)
    return (0 if score >= model.rule.threshold else 1), score


def sample_label(
    model: ClassifierModel,
    x,
    noise: NoisePlacement = NO_NOISE,
    shots: int = 1,
    seed: int = 0,
) -> tuple[int, int]:
    """Majority-vote label from ``shots`` Bernoulli measurements of the score.

    Returns (label, zero_count); label 0 iff zero_count >= shots / 2.
    Deterministic for a fixed seed.
    """
    if shots < 1:
        raise QuantumValueError("shots must be >= 1")
    _, score = predict(model, x, noise)
    rng = np.random.default_rng(seed)
    zero_count = int(rng.binomial(shots, min(max(score, 0.0), 1.0)))
    return (0 if zero_count >= shots / 2 else 1), zero_count


def cost_indicator(model: ClassifierModel, dataset, noise: NoisePlacement = NO_NOISE) -> float:
    """Fraction of points whose exact-score prediction differs from the true label."""
    if len(dataset.labels) == 0:
        raise QuantumValueError("dataset must be nonempty")
    scores = dataset_scores(model, dataset.points, noise)
    predicted = labels_from_scores(scores, model.rule)
    return float(np.mean(predicted != np.asarray(dataset.labels)))


def _label_observable(rule: DecisionRule) -> np.ndarray:
    """The +1/-1 observable of the rule basis (Z for the computational basis)."""
    p0, p1 = rule.projectors()
    return p0 - p1


def embedded_mixed_state(
    model: ClassifierModel, dataset, noise: NoisePlacement = NO_NOISE
) -> DensityMatrix:
    """Dataset mixed state (1/M) sum_i rho_i (x) |y_i><y_i| after evolution.

    Noise acts on the data subsystem only; true labels are noise invariant.
    """
    if len(dataset.labels) == 0:
        raise QuantumValueError("dataset must be nonempty")
    rhos = final_states(model, dataset.points, noise)
    m, d = rhos.shape[0], rhos.shape[1]
    label_projs = np.array([PROJ0, PROJ1])[np.asarray(dataset.labels, dtype=int)]
    blocks = np.einsum("mij,mkl->mikjl", rhos, label_projs).reshape(m, 2 * d, 2 * d)
    return DensityMatrix(blocks.mean(axis=0))


def cost_embedded(model: ClassifierModel, dataset, noise: NoisePlacement = NO_NOISE) -> float:
    """Expectation Tr[D sigma] with D the rule observable on the classification
    qubit times Z on the label qubit; +1 means perfect classification."""
    sigma = embedded_mixed_state(model, dataset, noise)
    n = model.ansatz.n_qubits
    c = model.classification_qubit
    d_obs = tensor(
        np.eye(2**c), _label_observable(model.rule), np.eye(2 ** (n - 1 - c)), PAULI_Z
    )
    return float(np.trace(d_obs @ sigma.matrix).real)


def cost_embedded_error(
    model: ClassifierModel, dataset, noise: NoisePlacement = NO_NOISE
) -> float:
    """Affine-rescaled error (1 - Tr[D sigma]) / 2, in [0, 1] with 0 perfect."""
    return (1.0 - cost_embedded(model, dataset, noise)) / 2.0


def boundary_residual(model: ClassifierModel, x) -> float:
    """Score minus threshold; the zero set is the decision boundary."""
    _, score = predict(model, x)
    return score - model.rule.threshold


def model_to_config(model: ClassifierModel) -> dict:
    """Serializable form of a model; bit-exact round trip through JSON."""
    if model.encoding.family == "general_qubit":
        raise QuantumValueError("general_qubit encodings with callables cannot be serialized")
    return {
        "schema_version": 1,
        "encoding": {
            "family": model.encoding.family,
            "hyperparams": list(model.encoding.hyperparams),
        },
        "ansatz": {"angles": list(model.ansatz.angles)},
        "rule": {"basis": model.rule.basis, "threshold": model.rule.threshold},
        "classification_qubit": model.classification_qubit,
    }


def model_from_config(config: dict) -> ClassifierModel:
    enc = config["encoding"]
    return ClassifierModel(
        encoding=EncodingSpec(enc["family"], tuple(enc["hyperparams"])),
        ansatz=AnsatzParams(tuple(config["ansatz"]["angles"])),
        rule=DecisionRule(config["rule"]["basis"], config["rule"]["threshold"]),
        classification_qubit=int(config.get("classification_qubit", 0)),
    )
