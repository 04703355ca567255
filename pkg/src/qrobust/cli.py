"""Experiment harness: train, scan, and export plot-ready CSV/JSON artifacts.

Subcommands: train, evaluate, robustness-scan, boundary-grid, qela, bounds,
gen-data. Every run is driven by a single JSON config document; the output
directory and top-level seed can be overridden by the QROBUST_OUT and
QROBUST_SEED environment variables or the --out / --seed flags (flags win).
All emitted files are schema stable and bit-identical across runs with the
same seed. Exit code 0 means every requested artifact was written; config
or validation problems exit with code 2 and a message naming the field.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import classifier as clf
from . import encoding_learning as eln
from . import robustness as rob
from . import training as train_mod
from .channels import AssignmentMatrix, KrausChannel, make_channel, tensor_channel
from .classifier import (
    NO_NOISE,
    AnsatzParams,
    ClassifierModel,
    DecisionRule,
    NoisePlacement,
    model_from_config,
    model_to_config,
)
from .data import Dataset, SplitConfig, gen_synthetic, load_csv, load_iris, save_csv, split
from .encodings import EncodingSpec, n_qubits_for
from .qcore import QuantumValueError
from .training import TrainConfig

SCHEMA_VERSION = 1


class ConfigError(Exception):
    """A config or validation failure, carrying the offending field path."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


def _require(cfg: dict, field: str, context: str = ""):
    if field not in cfg:
        raise ConfigError(f"{context}{field}", "missing required field")
    return cfg[field]


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ConfigError("--config", f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("--config", f"invalid JSON: {exc}") from None


def _build_dataset(cfg: dict, default_seed: int) -> Dataset:
    kind = _require(cfg, "kind", "dataset.")
    seed = int(cfg.get("seed", default_seed))
    try:
        if kind in ("vertical", "diagonal", "moons"):
            return gen_synthetic(
                kind,
                int(cfg.get("n_points", 500)),
                noise_level=float(cfg.get("noise_level", 0.05)),
                seed=seed,
            )
        if kind == "iris":
            path = _require(cfg, "path", "dataset.")
            classes = tuple(cfg.get("classes", (0, 2)))
            return load_iris(path, classes)
        if kind == "csv":
            return load_csv(_require(cfg, "path", "dataset."))
    except FileNotFoundError as exc:
        raise ConfigError("dataset.path", str(exc)) from None
    except QuantumValueError as exc:
        raise ConfigError("dataset", str(exc)) from None
    raise ConfigError("dataset.kind", f"unknown dataset kind {kind!r}")


def _build_split(cfg: dict, default_seed: int) -> SplitConfig:
    split_cfg = cfg.get("split", {})
    try:
        return SplitConfig(
            train_fraction=float(split_cfg.get("train_fraction", 0.8)),
            seed=int(split_cfg.get("seed", default_seed)),
        )
    except QuantumValueError as exc:
        raise ConfigError("dataset.split", str(exc)) from None


def _build_encoding(cfg: dict) -> EncodingSpec:
    family = _require(cfg, "family", "encoding.")
    try:
        return EncodingSpec(family, tuple(cfg.get("hyperparams", ())))
    except QuantumValueError as exc:
        raise ConfigError("encoding", str(exc)) from None


def _build_rule(cfg: dict) -> DecisionRule:
    try:
        return DecisionRule(cfg.get("basis", "z"), float(cfg.get("threshold", 0.5)))
    except QuantumValueError as exc:
        raise ConfigError("rule", str(exc)) from None


def _build_channel(cfg: dict, field: str) -> KrausChannel:
    kind = _require(cfg, "kind", field + ".")
    try:
        return make_channel(kind, cfg.get("params", {}))
    except (QuantumValueError, TypeError) as exc:
        raise ConfigError(field, str(exc)) from None


def _build_noise(cfg: dict | None) -> NoisePlacement:
    if not cfg:
        return NO_NOISE
    after_enc = cfg.get("after_encoding")
    after_evo = cfg.get("after_evolution")
    interleaved = []
    for i, entry in enumerate(cfg.get("interleaved", ())):
        try:
            idx, ch_cfg = entry
        except (TypeError, ValueError):
            raise ConfigError(
                f"noise.interleaved[{i}]", "expected [stage_index, channel]"
            ) from None
        interleaved.append((int(idx), _build_channel(ch_cfg, f"noise.interleaved[{i}]")))
    return NoisePlacement(
        after_encoding=_build_channel(after_enc, "noise.after_encoding") if after_enc else None,
        after_evolution=_build_channel(after_evo, "noise.after_evolution") if after_evo else None,
        interleaved=tuple(interleaved),
    )


def _build_train(cfg: dict, default_seed: int) -> tuple[TrainConfig, str, bool, int]:
    try:
        tc = TrainConfig(
            optimizer=cfg.get("optimizer", "nelder_mead"),
            max_iters=int(cfg.get("max_iters", 500)),
            restarts=int(cfg.get("restarts", 10)),
            init=cfg.get("init", "seeded_uniform"),
            tolerance=float(cfg.get("tolerance", 1e-6)),
            seed=int(cfg.get("seed", default_seed)),
        )
    except QuantumValueError as exc:
        raise ConfigError("train", str(exc)) from None
    cost = cfg.get("cost", "embedded")
    if cost not in train_mod.COST_KINDS:
        raise ConfigError("train.cost", f"must be one of {train_mod.COST_KINDS}")
    polish = int(cfg.get("polish_iters", 400 if cost == "embedded" else 0))
    return tc, cost, bool(cfg.get("with_noise", False)), polish


def _initial_model(encoding: EncodingSpec, rule: DecisionRule, dataset: Dataset, cfg: dict):
    try:
        n = n_qubits_for(encoding, dataset.n_features)
    except QuantumValueError as exc:
        raise ConfigError("encoding.family", str(exc)) from None
    arity = int(cfg.get("ansatz", {}).get("arity", n))
    if arity != n:
        raise ConfigError(
            "ansatz.arity", f"encoding produces {n} qubits but config declares {arity}"
        )
    if n not in (1, 2):
        raise ConfigError("encoding", f"no ansatz available for {n} qubits")
    return ClassifierModel(encoding, AnsatzParams.zeros(n), rule)


def _json_dump(obj: dict, path: Path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _csv_dump(header: list[str], rows, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [f"{v:.17g}" if isinstance(v, float) else v for v in row]
            )


def _map_cells(fn, cells, workers: int):
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, cells))
    return [fn(cell) for cell in cells]


def _load_model(cfg: dict, out_dir: Path) -> ClassifierModel:
    path = cfg.get("model_path", str(out_dir / "model.json"))
    try:
        with open(path) as fh:
            return model_from_config(json.load(fh))
    except FileNotFoundError:
        raise ConfigError("model_path", f"trained model not found at {path}") from None
    except (KeyError, json.JSONDecodeError) as exc:
        raise ConfigError("model_path", f"malformed model file: {exc}") from None


def _train_pipeline(cfg: dict, seed: int):
    dataset = _build_dataset(_require(cfg, "dataset"), seed)
    split_cfg = _build_split(cfg.get("dataset", {}), seed)
    train_ds, test_ds = split(dataset, split_cfg)
    encoding = _build_encoding(_require(cfg, "encoding"))
    rule = _build_rule(cfg.get("rule", {}))
    model = _initial_model(encoding, rule, dataset, cfg)
    noise = _build_noise(cfg.get("noise"))
    tc, cost_kind, with_noise, polish = _build_train(cfg.get("train", {}), seed)
    train_noise = noise if with_noise else NO_NOISE
    if cost_kind == "embedded" and polish > 0:
        fit = train_mod.train_refined(model, train_ds, train_noise, tc, polish)
    else:
        fit = train_mod.train(model, train_ds, cost_kind=cost_kind, noise=train_noise, cfg=tc)
    return dataset, train_ds, test_ds, model.with_ansatz(fit.best_params), fit, noise


def cmd_train(cfg: dict, out_dir: Path, seed: int, workers: int) -> int:
    _, train_ds, test_ds, fitted, fit, noise = _train_pipeline(cfg, seed)
    train_eval = train_mod.evaluate(fitted, fitted.ansatz, train_ds)
    test_eval = train_mod.evaluate(fitted, fitted.ansatz, test_ds)
    _json_dump(model_to_config(fitted), out_dir / "model.json")
    _json_dump(
        {
            "schema_version": SCHEMA_VERSION,
            "train_accuracy": train_eval.accuracy,
            "test_accuracy": test_eval.accuracy,
            "train_cost": train_eval.cost,
            "test_cost": test_eval.cost,
            "best_training_cost": fit.best_cost,
            "restart_index": fit.restart_index,
        },
        out_dir / "metrics.json",
    )
    _csv_dump(["iteration", "cost"], [(i, float(c)) for i, c in fit.history], out_dir / "history.csv")
    return 0


def cmd_evaluate(cfg: dict, out_dir: Path, seed: int, workers: int) -> int:
    dataset = _build_dataset(_require(cfg, "dataset"), seed)
    model = _load_model(cfg, out_dir)
    noise = _build_noise(cfg.get("noise"))
    result = train_mod.evaluate(model, model.ansatz, dataset, noise)
    _json_dump(
        {
            "schema_version": SCHEMA_VERSION,
            "accuracy": result.accuracy,
            "cost": result.cost,
        },
        out_dir / "eval.json",
    )
    _csv_dump(
        ["label_true", "label_pred", "score"],
        [(t, p, float(s)) for t, p, s in result.per_point],
        out_dir / "per_point.csv",
    )
    return 0


def cmd_gen_data(cfg: dict, out_dir: Path, seed: int, workers: int) -> int:
    dataset = _build_dataset(_require(cfg, "dataset"), seed)
    save_csv(dataset, out_dir / "dataset.csv")
    return 0


def _strength_channel(kind: str, strength: float, n_qubits: int) -> KrausChannel:
    """Channel of the given strength; single-qubit kinds act i.i.d. per qubit."""
    if kind == "pauli":
        raise ConfigError("scan.channels", "use bit_flip/dephasing or the pauli_grid sweep")
    if kind == "global_depolarizing":
        return make_channel(kind, {"p": strength, "n_qubits": n_qubits})
    single = make_channel(kind, {"p": strength})
    out = single
    for _ in range(n_qubits - 1):
        out = tensor_channel(out, single)
    return out


def cmd_robustness_scan(cfg: dict, out_dir: Path, seed: int, workers: int) -> int:
    dataset = _build_dataset(_require(cfg, "dataset"), seed)
    model = _load_model(cfg, out_dir)
    noise = _build_noise(cfg.get("noise"))
    scan = cfg.get("scan", {})
    n = model.ansatz.n_qubits

    if not noise.is_noiseless:
        rows = rob.robustness_mask_rows(model, dataset, noise)
        header = [f"x{i + 1}" for i in range(dataset.n_features)]
        header += ["label_true", "label_noiseless", "label_noisy", "robust"]
        _csv_dump(header, rows, out_dir / "robust_mask.csv")

    kinds = scan.get("channels", [])
    strengths = [float(s) for s in scan.get("strengths", [])]
    if kinds and strengths:
        cells = [(k, s) for k in kinds for s in strengths]

        def run_cell(cell):
            kind, strength = cell
            ch = _strength_channel(kind, strength, n)
            report = rob.robust_set(model, dataset, NoisePlacement(after_evolution=ch))
            return (
                kind,
                float(strength),
                float(report.delta),
                report.changed_count,
                float(report.noisy_cost),
                float(report.noiseless_cost),
            )

        rows = _map_cells(run_cell, cells, workers)
        _csv_dump(
            ["channel", "strength", "delta", "changed_count", "noisy_cost", "noiseless_cost"],
            rows,
            out_dir / "delta_vs_strength.csv",
        )

    pauli_grid = scan.get("pauli_grid")
    if pauli_grid:
        res = int(pauli_grid.get("resolution", 21))
        values = np.linspace(0.0, 1.0, res)
        cells = [(px, py) for px in values for py in values if px + py <= 1.0 + 1e-12]

        def run_pauli(cell):
            px, py = cell
            ch = make_channel(
                "pauli", {"p_i": max(1.0 - px - py, 0.0), "p_x": px, "p_y": py, "p_z": 0.0}
            )
            report = rob.robust_set(model, dataset, NoisePlacement(after_evolution=ch))
            return (float(px), float(py), float(1.0 - report.delta))

        rows = _map_cells(run_pauli, cells, workers)
        _csv_dump(["p_x", "p_y", "misclassified_fraction"], rows, out_dir / "pauli_grid.csv")

    meas_grid = scan.get("measurement_grid")
    if meas_grid:
        res = int(meas_grid.get("resolution", 21))
        values = np.linspace(0.0, 1.0, res)
        clean_scores = clf.dataset_scores(model, dataset.points, NO_NOISE)
        clean_labels = clf.labels_from_scores(clean_scores, model.rule)

        def run_meas(cell):
            p00, p11 = cell
            assign = AssignmentMatrix(p00, 1.0 - p11, 1.0 - p00, p11)
            noisy_scores = (assign.p00 - assign.p01) * clean_scores + assign.p01
            noisy_labels = clf.labels_from_scores(noisy_scores, model.rule)
            return (float(p00), float(p11), float(np.mean(noisy_labels != clean_labels)))

        cells = [(p00, p11) for p00 in values for p11 in values]
        rows = _map_cells(run_meas, cells, workers)
        _csv_dump(
            ["p00", "p11", "misclassified_fraction"], rows, out_dir / "measurement_grid.csv"
        )
    return 0


def cmd_boundary_grid(cfg: dict, out_dir: Path, seed: int, workers: int) -> int:
    model = _load_model(cfg, out_dir)
    res = int(cfg.get("grid", {}).get("resolution", 200))
    if res < 2:
        raise ConfigError("grid.resolution", "must be >= 2")
    noise = _build_noise(cfg.get("noise"))
    axis = np.linspace(0.0, 1.0, res)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    points = np.stack([xx.ravel(), yy.ravel()], axis=1)
    if model.encoding.family in ("wavefunction", "generalized_wavefunction"):
        points = points[(points**2).sum(axis=1) > 0]  # origin is unencodable
    scores = clf.dataset_scores(model, points, noise)
    labels = clf.labels_from_scores(scores, model.rule)
    rows = [
        (float(p[0]), float(p[1]), float(s), int(l))
        for p, s, l in zip(points, scores, labels)
    ]
    _csv_dump(["x1", "x2", "score", "label"], rows, out_dir / "grid.csv")
    return 0


def cmd_qela(cfg: dict, out_dir: Path, seed: int, workers: int) -> int:
    dataset = _build_dataset(_require(cfg, "dataset"), seed)
    qcfg = cfg.get("qela", {})
    families_cfg = qcfg.get("families", None)
    if families_cfg is not None and not families_cfg:
        raise ConfigError("qela.families", "family list must be nonempty")
    if families_cfg is None:
        families = eln.default_family_set()
    else:
        families = []
        for i, fam in enumerate(families_cfg):
            name = _require(fam, "family", f"qela.families[{i}].")
            bounds = fam.get("bounds")
            if bounds is None:
                matching = [t for t in eln.default_family_set() if t.family == name]
                if not matching:
                    raise ConfigError(
                        f"qela.families[{i}].bounds", f"no default bounds for {name!r}"
                    )
                families.append(matching[0])
                continue
            try:
                families.append(eln.FamilyTemplate(name, tuple(tuple(b) for b in bounds)))
            except QuantumValueError as exc:
                raise ConfigError(f"qela.families[{i}]", str(exc)) from None
    noise = _build_noise(cfg.get("noise"))
    if noise.is_noiseless:
        raise ConfigError("noise", "qela requires a noise placement to adapt to")
    alpha_tc, alpha_cost, _, _ = _build_train(qcfg.get("alpha_train", cfg.get("train", {})), seed)
    hyper_tc, _, _, _ = _build_train(qcfg.get("hyper_train", {"restarts": 1}), seed)
    lcfg = eln.LearnConfig(
        noise=noise,
        subset_size=qcfg.get("subset_size"),
        alpha_train=alpha_tc,
        hyper_train=hyper_tc,
        alpha_cost_kind=qcfg.get("alpha_cost", alpha_cost),
        hyper_cost_kind=qcfg.get("hyper_cost", "indicator"),
        seed=seed,
        rule=_build_rule(cfg.get("rule", {})),
    )
    try:
        result = eln.learn_encoding(dataset, families, lcfg)
    except QuantumValueError as exc:
        raise ConfigError("qela", str(exc)) from None
    _json_dump(result.to_dict(), out_dir / "qela_results.json")
    return 0


def cmd_bounds(cfg: dict, out_dir: Path, seed: int, workers: int) -> int:
    dataset = _build_dataset(_require(cfg, "dataset"), seed)
    split_cfg = _build_split(cfg.get("dataset", {}), seed)
    train_ds, _ = split(dataset, split_cfg)
    bounds_cfg = _require(cfg, "bounds")
    enc_list = _require(bounds_cfg, "encodings", "bounds.")
    kinds = _require(bounds_cfg, "channels", "bounds.")
    strengths = [float(s) for s in _require(bounds_cfg, "strengths", "bounds.")]
    rule = _build_rule(cfg.get("rule", {}))
    tc, cost_kind, _, polish = _build_train(cfg.get("train", {}), seed)

    rows = []
    for enc_cfg in enc_list:
        encoding = _build_encoding(enc_cfg)
        model = _initial_model(encoding, rule, dataset, cfg)
        if cost_kind == "embedded" and polish > 0:
            fit = train_mod.train_refined(model, train_ds, cfg=tc, polish_iters=polish)
        else:
            fit = train_mod.train(model, train_ds, cost_kind=cost_kind, cfg=tc)
        fitted = model.with_ansatz(fit.best_params)
        n = fitted.ansatz.n_qubits

        def run_cell(cell, fitted=fitted, n=n, family=encoding.family):
            kind, strength = cell
            ch = _strength_channel(kind, strength, n)
            report = rob.fidelity_bound_report(
                fitted, dataset, NoisePlacement(after_evolution=ch)
            )
            return (
                family,
                kind,
                float(strength),
                float(report.fidelity_mixed),
                float(report.fidelity_average),
                float(report.bound_mixed),
                float(report.bound_average),
                float(report.delta_cost_embedded),
                report.changed_count,
            )

        cells = [(k, s) for k in kinds for s in strengths]
        rows.extend(_map_cells(run_cell, cells, workers))
    _csv_dump(
        [
            "encoding",
            "channel",
            "strength",
            "fidelity_mixed",
            "fidelity_average",
            "bound_mixed",
            "bound_average",
            "delta_cost",
            "changed_count",
        ],
        rows,
        out_dir / "bounds.csv",
    )
    return 0


_COMMANDS = {
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "robustness-scan": cmd_robustness_scan,
    "boundary-grid": cmd_boundary_grid,
    "qela": cmd_qela,
    "bounds": cmd_bounds,
    "gen-data": cmd_gen_data,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qrobust",
        description="Quantum classifier noise-robustness experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON config document")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None, help="top-level seed override")
        p.add_argument("--workers", type=int, default=1, help="concurrent sweep workers")
    args = parser.parse_args(argv)

    try:
        cfg = _load_config(args.config)
        out = args.out or os.environ.get("QROBUST_OUT") or cfg.get("output_dir", ".")
        env_seed = os.environ.get("QROBUST_SEED")
        if args.seed is not None:
            seed = args.seed
        elif env_seed is not None:
            seed = int(env_seed)
        else:
            seed = int(cfg.get("seed", 0))
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        return _COMMANDS[args.command](cfg, out_dir, seed, max(1, args.workers))
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except QuantumValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
