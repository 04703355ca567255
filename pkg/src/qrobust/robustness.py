"""Robust-point testing, robust sets, analytic conditions, and fidelity bounds.

A point is robust when its predicted label is unchanged by the noise
placement. Robustness always uses exact scores (never shots); ties at the
threshold go to class 0 on both sides of the comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import classifier as clf
from .channels import AssignmentMatrix
from .classifier import NO_NOISE, ClassifierModel, NoisePlacement
from .qcore import QuantumValueError, fidelity, projector_prob_via_elements

# Scores this close to the threshold are numerically ill-posed for
# analytic-vs-simulation agreement and are excluded from such checks.
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class RobustnessReport:
    """Per-point robustness flags and the derived summary quantities."""

    flags: tuple[bool, ...]
    delta: float
    changed_count: int
    noisy_cost: float
    noiseless_cost: float
    delta_cost: float

    @property
    def is_completely_robust(self) -> bool:
        return self.delta == 1.0

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "delta": self.delta,
            "changed_count": self.changed_count,
            "noisy_cost": self.noisy_cost,
            "noiseless_cost": self.noiseless_cost,
            "delta_cost": self.delta_cost,
            "completely_robust": self.is_completely_robust,
            "flags": [bool(f) for f in self.flags],
        }


def is_robust_point(model: ClassifierModel, x, noise: NoisePlacement) -> bool:
    """True iff the noisy and noiseless predicted labels agree (exact scores)."""
    clean, _ = clf.predict(model, x, NO_NOISE)
    noisy, _ = clf.predict(model, x, noise)
    return clean == noisy


def robust_set(model: ClassifierModel, dataset, noise: NoisePlacement) -> RobustnessReport:
    """Compare noisy against noiseless labels for every dataset point."""
    if len(dataset) == 0:
        raise QuantumValueError("dataset must be nonempty")
    labels = np.asarray(dataset.labels)
    clean_scores = clf.dataset_scores(model, dataset.points, NO_NOISE)
    noisy_scores = clf.dataset_scores(model, dataset.points, noise)
    clean_labels = clf.labels_from_scores(clean_scores, model.rule)
    noisy_labels = clf.labels_from_scores(noisy_scores, model.rule)
    flags = clean_labels == noisy_labels
    m = labels.size
    noiseless_cost = float(np.mean(clean_labels != labels))
    noisy_cost = float(np.mean(noisy_labels != labels))
    return RobustnessReport(
        flags=tuple(bool(f) for f in flags),
        delta=float(flags.sum()) / m,
        changed_count=int(m - flags.sum()),
        noisy_cost=noisy_cost,
        noiseless_cost=noiseless_cost,
        delta_cost=abs(noisy_cost - noiseless_cost),
    )


def robustness_mask_rows(model: ClassifierModel, dataset, noise: NoisePlacement) -> list[tuple]:
    """Per-point rows (x..., label_true, label_noiseless, label_noisy, robust)."""
    clean_scores = clf.dataset_scores(model, dataset.points, NO_NOISE)
    noisy_scores = clf.dataset_scores(model, dataset.points, noise)
    clean_labels = clf.labels_from_scores(clean_scores, model.rule)
    noisy_labels = clf.labels_from_scores(noisy_scores, model.rule)
    rows = []
    for point, yt, yc, yn in zip(dataset.points, dataset.labels, clean_labels, noisy_labels):
        rows.append(tuple(point) + (int(yt), int(yc), int(yn), int(yc == yn)))
    return rows


def check_pauli_condition(p_i: float, p_x: float, p_y: float, p_z: float, basis: str = "z") -> bool:
    """Complete-robustness condition of a Pauli channel for the given basis.

    Z basis: p_x + p_y <= 1/2; X basis: p_y + p_z <= 1/2; Y basis:
    p_x + p_z <= 1/2. When satisfied, every encoding is completely robust.
    """
    for name, p in (("p_i", p_i), ("p_x", p_x), ("p_y", p_y), ("p_z", p_z)):
        if not 0.0 <= p <= 1.0:
            raise QuantumValueError(f"{name} must be in [0, 1], got {p}")
    if abs(p_i + p_x + p_y + p_z - 1.0) > 1e-12:
        raise QuantumValueError("Pauli probabilities must sum to 1")
    if basis == "z":
        return p_x + p_y <= 0.5
    if basis == "x":
        return p_y + p_z <= 0.5
    if basis == "y":
        return p_x + p_z <= 0.5
    raise QuantumValueError(f"basis must be one of 'z', 'x', 'y', got {basis!r}")


def check_ampdamp_point_condition(model: ClassifierModel, x, p: float) -> bool:
    """Analytic robustness test of a point under amplitude damping of strength p.

    Points with noiseless label 0 are always robust. For label 1, robustness
    holds iff Tr[P1 U rho U^dag] > (1 - threshold) / (1 - p), evaluated via
    the closed-form matrix elements rather than by applying the channel.
    At p = 1 the label-1 condition is unsatisfiable.
    """
    if model.ansatz.n_qubits != 1:
        raise QuantumValueError("the analytic condition covers single-qubit models")
    if model.rule.basis != "z":
        raise QuantumValueError("the analytic condition is stated for the z-basis rule")
    if not 0.0 <= p <= 1.0:
        raise QuantumValueError(f"p must be in [0, 1], got {p}")
    label, _ = clf.predict(model, x, NO_NOISE)
    if label == 0:
        return True
    if p == 1.0:
        return False
    from . import encodings as enc_mod

    rho_x = enc_mod.encode(x, model.encoding)
    u = clf.unitary_from_params(model.ansatz)
    _, tr_pi1 = projector_prob_via_elements(rho_x.matrix, u)
    return tr_pi1 > (1.0 - model.rule.threshold) / (1.0 - p)


def check_measurement_noise_condition(assign: AssignmentMatrix) -> bool:
    """True iff p00 > p01 and p11 > p10 (strict), guaranteeing complete robustness."""
    return assign.p00 > assign.p01 and assign.p11 > assign.p10


def delta_cost_embedded(model: ClassifierModel, dataset, noise: NoisePlacement) -> float:
    """|C_noisy - C| for the embedded expectation cost."""
    clean = clf.cost_embedded(model, dataset, NO_NOISE)
    noisy = clf.cost_embedded(model, dataset, noise)
    return abs(noisy - clean)


def bound_delta_cost_mixed(model: ClassifierModel, dataset, noise: NoisePlacement) -> float:
    """2 sqrt(1 - F(sigma_noisy, sigma_ideal)) on the label-augmented mixed state.

    Always at least the embedded-cost change :func:`delta_cost_embedded`.
    """
    ideal = clf.embedded_mixed_state(model, dataset, NO_NOISE)
    noisy = clf.embedded_mixed_state(model, dataset, noise)
    return 2.0 * math.sqrt(max(0.0, 1.0 - fidelity(noisy, ideal)))


def _per_point_fidelities(model: ClassifierModel, dataset, noise: NoisePlacement) -> np.ndarray:
    ideal = clf.final_states(model, dataset.points, NO_NOISE)
    noisy = clf.final_states(model, dataset.points, noise)
    return np.array([fidelity(a, b) for a, b in zip(noisy, ideal)])


def bound_delta_cost_average(model: ClassifierModel, dataset, noise: NoisePlacement) -> float:
    """(2/M) sum_i sqrt(1 - F(rho_noisy_i, rho_ideal_i)); also >= the cost change."""
    fids = _per_point_fidelities(model, dataset, noise)
    return float(2.0 * np.mean(np.sqrt(np.clip(1.0 - fids, 0.0, None))))


@dataclass(frozen=True)
class RobustSetSizeBound:
    """Fidelity-sum bound with both count readings of the cost change.

    ``changed_count`` is the exhaustive number of label flips and
    ``robust_count`` its complement; the bound is asserted against the
    changed count.
    """

    bound: float
    changed_count: int
    robust_count: int


def robust_set_size_bound(
    model: ClassifierModel, dataset, noise: NoisePlacement
) -> RobustSetSizeBound:
    """2 sum_i sqrt(1 - F_i) alongside the exhaustive flip counts."""
    m = len(dataset)
    bound = m * bound_delta_cost_average(model, dataset, noise)
    report = robust_set(model, dataset, noise)
    return RobustSetSizeBound(
        bound=bound,
        changed_count=report.changed_count,
        robust_count=m - report.changed_count,
    )


@dataclass(frozen=True)
class FidelityBoundReport:
    """All fidelity-bound quantities for one (model, noise) configuration."""

    fidelity_mixed: float
    fidelity_average: float
    bound_mixed: float
    bound_average: float
    delta_cost_embedded: float
    changed_count: int
    delta: float


def fidelity_bound_report(
    model: ClassifierModel, dataset, noise: NoisePlacement
) -> FidelityBoundReport:
    ideal_sigma = clf.embedded_mixed_state(model, dataset, NO_NOISE)
    noisy_sigma = clf.embedded_mixed_state(model, dataset, noise)
    f_mixed = fidelity(noisy_sigma, ideal_sigma)
    fids = _per_point_fidelities(model, dataset, noise)
    report = robust_set(model, dataset, noise)
    return FidelityBoundReport(
        fidelity_mixed=f_mixed,
        fidelity_average=float(np.mean(fids)),
        bound_mixed=2.0 * math.sqrt(max(0.0, 1.0 - f_mixed)),
        bound_average=float(2.0 * np.mean(np.sqrt(np.clip(1.0 - fids, 0.0, None)))),
        delta_cost_embedded=delta_cost_embedded(model, dataset, noise),
        changed_count=report.changed_count,
        delta=report.delta,
    )
