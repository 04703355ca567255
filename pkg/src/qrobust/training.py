"""Derivative-free optimization of ansatz parameters against a dataset cost.

The indicator cost is piecewise constant in the angles, so it is only paired
with Nelder-Mead; the smooth surrogate is the rescaled expectation cost
(see :func:`qrobust.classifier.cost_embedded_error`), which shares its argmin
with the raw expectation form under the affine rescale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from . import classifier as clf
from .classifier import NO_NOISE, AnsatzParams, ClassifierModel, NoisePlacement
from .qcore import QuantumValueError

COST_KINDS = ("indicator", "embedded")


@dataclass(frozen=True)
class TrainConfig:
    optimizer: str = "nelder_mead"  # or "finite_difference_gradient"
    max_iters: int = 500
    restarts: int = 10
    init: str = "seeded_uniform"  # or "zeros" / "model"
    tolerance: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.optimizer not in ("nelder_mead", "finite_difference_gradient"):
            raise QuantumValueError(f"unknown optimizer {self.optimizer!r}")
        if self.init not in ("seeded_uniform", "zeros", "model"):
            raise QuantumValueError(f"unknown init {self.init!r}")
        if self.max_iters < 1 or self.restarts < 1 or self.tolerance <= 0:
            raise QuantumValueError("need max_iters >= 1, restarts >= 1, tolerance > 0")


@dataclass(frozen=True)
class TrainResult:
    best_params: AnsatzParams
    best_cost: float
    history: tuple[tuple[int, float], ...]
    restart_index: int


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    cost: float
    per_point: tuple[tuple[int, int, float], ...]  # (label_true, label_pred, score)


def _indicator_from_scores(scores: np.ndarray, labels: np.ndarray, rule) -> float:
    predicted = clf.labels_from_scores(scores, rule)
    return float(np.mean(predicted != labels))


def _smooth_error_from_scores(scores: np.ndarray, labels: np.ndarray) -> float:
    # Mean probability weight on the wrong label; equals (1 - Tr[D sigma]) / 2.
    return float(np.mean(np.where(labels == 0, 1.0 - scores, scores)))


def make_objective(model: ClassifierModel, dataset, cost_kind: str, noise: NoisePlacement):
    """Cost as a function of the flat angle vector, with encodings precomputed."""
    if cost_kind not in COST_KINDS:
        raise QuantumValueError(f"cost_kind must be one of {COST_KINDS}")
    from . import encodings as enc_mod

    amps = enc_mod.encode_batch(dataset.points, model.encoding)
    rhos0 = np.einsum("mi,mj->mij", amps, amps.conj())
    labels = np.asarray(dataset.labels)
    n = model.ansatz.n_qubits
    p0, _ = clf.classification_projectors(n, model.rule, model.classification_qubit)

    def objective(angles: np.ndarray) -> float:
        params = AnsatzParams(tuple(angles))
        rhos = clf.evolve_states(rhos0, clf.unitary_stages(params), noise)
        scores = np.einsum("ij,mji->m", p0, rhos, optimize=True).real
        if cost_kind == "indicator":
            return _indicator_from_scores(scores, labels, model.rule)
        return _smooth_error_from_scores(scores, labels)

    return objective


def _minimize(objective, x0: np.ndarray, cfg: TrainConfig, recorder):
    def wrapped(x):
        value = objective(x)
        recorder(value)
        return value

    if cfg.optimizer == "nelder_mead":
        return minimize(
            wrapped,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": cfg.max_iters,
                "fatol": cfg.tolerance,
                "xatol": cfg.tolerance,
            },
        )
    # Finite-difference gradients through scipy's default 2-point scheme.
    return minimize(wrapped, x0, method="BFGS", options={"maxiter": cfg.max_iters})


def train(
    model: ClassifierModel,
    dataset,
    cost_kind: str = "embedded",
    noise: NoisePlacement = NO_NOISE,
    cfg: TrainConfig = TrainConfig(),
) -> TrainResult:
    """Optimize the ansatz angles over seeded restarts; the model is not mutated.

    Deterministic for fixed (seed, config, dataset). Every cost evaluation is
    appended to the history as (evaluation_index, cost). With init="zeros" or
    init="model" the first restart starts at the origin or at the model's
    current angles respectively; the remaining restarts draw seeded uniform
    angles in [0, 2 pi). Starting from init="model" with restarts=1 refines
    an already trained parameter set, e.g. an indicator-cost polish after a
    smooth-surrogate fit.
    """
    if len(dataset) == 0:
        raise QuantumValueError("dataset must be nonempty")
    if cost_kind == "indicator" and cfg.optimizer != "nelder_mead":
        raise QuantumValueError("the indicator cost is non-differentiable; use nelder_mead")
    objective = make_objective(model, dataset, cost_kind, noise)
    n_angles = len(model.ansatz.angles)

    history: list[tuple[int, float]] = []
    counter = [0]

    def recorder(value: float) -> None:
        history.append((counter[0], float(value)))
        counter[0] += 1

    best_cost = math.inf
    best_x = np.asarray(model.ansatz.angles, dtype=float)
    best_restart = 0
    for restart in range(cfg.restarts):
        if restart == 0 and cfg.init == "zeros":
            x0 = np.zeros(n_angles)
        elif restart == 0 and cfg.init == "model":
            x0 = np.asarray(model.ansatz.angles, dtype=float)
        else:
            rng = np.random.default_rng([cfg.seed, restart])
            x0 = rng.uniform(0.0, 2 * math.pi, size=n_angles)
        recorder(objective(x0))  # cost at the starting point, before any step
        start_best = history[-1][1]
        if start_best < best_cost:
            best_cost, best_x, best_restart = start_best, x0.copy(), restart
        result = _minimize(objective, x0, cfg, recorder)
        if result.fun < best_cost:
            best_cost, best_x, best_restart = float(result.fun), result.x.copy(), restart
    return TrainResult(
        best_params=AnsatzParams(tuple(best_x)),
        best_cost=float(best_cost),
        history=tuple(history),
        restart_index=best_restart,
    )


def train_refined(
    model: ClassifierModel,
    dataset,
    noise: NoisePlacement = NO_NOISE,
    cfg: TrainConfig = TrainConfig(),
    polish_iters: int = 400,
) -> TrainResult:
    """Smooth-surrogate restarts followed by an indicator-cost refinement.

    The smooth phase explores; the polish phase descends the misclassification
    count from the smooth winner (never worse than it, since Nelder-Mead
    keeps its starting vertex). The returned result reports indicator cost.
    """
    fit = train(model, dataset, "embedded", noise, cfg)
    if polish_iters <= 0:
        return fit
    polish_cfg = TrainConfig(
        "nelder_mead", polish_iters, 1, "model", cfg.tolerance, cfg.seed
    )
    return train(model.with_ansatz(fit.best_params), dataset, "indicator", noise, polish_cfg)


def evaluate(
    model: ClassifierModel,
    params: AnsatzParams,
    dataset,
    noise: NoisePlacement = NO_NOISE,
) -> EvalResult:
    """Accuracy, indicator cost, and per-point records for a parameter set."""
    if len(dataset) == 0:
        raise QuantumValueError("dataset must be nonempty")
    fitted = model.with_ansatz(params)
    scores = clf.dataset_scores(fitted, dataset.points, noise)
    predicted = clf.labels_from_scores(scores, fitted.rule)
    labels = np.asarray(dataset.labels)
    cost = float(np.mean(predicted != labels))
    per_point = tuple(
        (int(t), int(p), float(s)) for t, p, s in zip(labels, predicted, scores)
    )
    return EvalResult(accuracy=1.0 - cost, cost=cost, per_point=per_point)
