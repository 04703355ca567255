"""Dataset generation, ingestion, normalization, and splitting.

Synthetic generators place points in the unit square with zero label noise:
``vertical`` labels by x1 >= 0.5, ``diagonal`` by x2 >= x1 (class 0 is the
complement side in both). ``moons`` builds two interleaving half circles,
rotates them by 90 degrees, and min-max normalizes into the unit square.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .qcore import QuantumValueError


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    labels: np.ndarray
    name: str = ""
    split_seed: int | None = None

    def __post_init__(self):
        pts = np.atleast_2d(np.array(self.points, dtype=float))
        labels = np.array(self.labels, dtype=int)
        if pts.shape[0] != labels.shape[0]:
            raise QuantumValueError("points and labels must have equal length")
        if labels.size and not set(np.unique(labels)) <= {0, 1}:
            raise QuantumValueError("labels must be binary (0 or 1)")
        if not np.all(np.isfinite(pts)):
            raise QuantumValueError("dataset has non-finite features")
        pts.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.labels.shape[0]

    @property
    def n_features(self) -> int:
        return self.points.shape[1]

    def subset(self, indices, name: str | None = None) -> "Dataset":
        idx = np.asarray(indices, dtype=int)
        return Dataset(self.points[idx], self.labels[idx], name or self.name, self.split_seed)


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise QuantumValueError("train_fraction must lie in (0, 1)")


def gen_synthetic(kind: str, n_points: int, noise_level: float = 0.05, seed: int = 0) -> Dataset:
    """Deterministic synthetic dataset of the given kind."""
    if n_points < 2:
        raise QuantumValueError("n_points must be >= 2")
    if noise_level < 0:
        raise QuantumValueError("noise_level must be >= 0")
    rng = np.random.default_rng(seed)

    if kind == "vertical":
        pts = rng.uniform(0.0, 1.0, size=(n_points, 2))
        labels = (pts[:, 0] >= 0.5).astype(int)
        return Dataset(pts, labels, name="vertical")

    if kind == "diagonal":
        pts = rng.uniform(0.0, 1.0, size=(n_points, 2))
        labels = (pts[:, 1] >= pts[:, 0]).astype(int)
        return Dataset(pts, labels, name="diagonal")

    if kind == "moons":
        n_a = n_points // 2 + n_points % 2
        n_b = n_points // 2
        t_a = np.linspace(0.0, np.pi, n_a)
        t_b = np.linspace(0.0, np.pi, n_b)
        # Upper arc at the origin, lower arc offset by (0.5, -0.25), radius 1.
        arc_a = np.stack([np.cos(t_a), np.sin(t_a)], axis=1)
        arc_b = np.stack([0.5 + np.cos(t_b), -0.25 - np.sin(t_b)], axis=1)
        pts = np.concatenate([arc_a, arc_b])
        labels = np.concatenate([np.zeros(n_a, dtype=int), np.ones(n_b, dtype=int)])
        pts = pts + rng.normal(0.0, noise_level, size=pts.shape) if noise_level > 0 else pts
        # Rotate 90 degrees, then min-max normalize into the unit square.
        pts = np.stack([-pts[:, 1], pts[:, 0]], axis=1)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pts = (pts - lo) / (hi - lo)
        return Dataset(pts, labels, name="moons")

    raise QuantumValueError(f"unknown synthetic dataset kind {kind!r}")


_IRIS_SPECIES = {"iris-setosa": 0, "iris-versicolor": 1, "iris-virginica": 2}


def _parse_iris_class(token: str) -> int:
    token = token.strip()
    if token.lower() in _IRIS_SPECIES:
        return _IRIS_SPECIES[token.lower()]
    try:
        return int(float(token))
    except ValueError:
        raise QuantumValueError(f"unrecognized iris class label {token!r}") from None


def load_iris(source, classes: tuple[int, int] = (0, 2)) -> Dataset:
    """Load the 4-feature iris CSV and keep two classes, min-max scaled.

    Expects rows of sepal length/width, petal length/width, class (species
    name or integer id); a header row is skipped if present. Labels map to
    0/1 in the order given by ``classes``.
    """
    if classes[0] == classes[1]:
        raise QuantumValueError("classes must be two distinct ids")
    rows = []
    with open(source, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh)):
            row = [cell for cell in row if cell.strip()]
            if not row:
                continue
            if len(row) != 5:
                raise QuantumValueError(
                    f"iris CSV must have 4 feature columns + class, got {len(row)} "
                    f"columns at line {lineno + 1}"
                )
            try:
                feats = [float(cell) for cell in row[:4]]
            except ValueError:
                if lineno == 0:
                    continue  # header row
                raise QuantumValueError(f"non-numeric feature at line {lineno + 1}") from None
            rows.append((feats, _parse_iris_class(row[4])))
    if not rows:
        raise QuantumValueError("iris CSV contains no data rows")

    class_map = {classes[0]: 0, classes[1]: 1}
    pts, labels = [], []
    for feats, cls in rows:
        if cls in class_map:
            pts.append(feats)
            labels.append(class_map[cls])
    for cls in classes:
        if cls not in [c for _, c in rows]:
            raise QuantumValueError(f"class {cls} not present in iris CSV")
    pts = np.asarray(pts, dtype=float)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    pts = (pts - lo) / span
    return Dataset(pts, np.asarray(labels), name=f"iris{classes}")


def split(ds: Dataset, cfg: SplitConfig) -> tuple[Dataset, Dataset]:
    """Seeded, label-stratified train/test partition."""
    rng = np.random.default_rng(cfg.seed)
    train_idx, test_idx = [], []
    for cls in (0, 1):
        idx = np.flatnonzero(ds.labels == cls)
        idx = idx[rng.permutation(idx.size)]
        n_train = int(round(cfg.train_fraction * idx.size))
        train_idx.extend(idx[:n_train])
        test_idx.extend(idx[n_train:])
    if not train_idx or not test_idx:
        raise QuantumValueError("split produced an empty train or test side")
    train_idx.sort()
    test_idx.sort()
    train = Dataset(ds.points[train_idx], ds.labels[train_idx], ds.name + "/train", cfg.seed)
    test = Dataset(ds.points[test_idx], ds.labels[test_idx], ds.name + "/test", cfg.seed)
    return train, test


def save_csv(ds: Dataset, path) -> None:
    """Write the dataset with header x1..xN,label at 17 significant digits."""
    header = [f"x{i + 1}" for i in range(ds.n_features)] + ["label"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for point, label in zip(ds.points, ds.labels):
            writer.writerow([f"{v:.17g}" for v in point] + [int(label)])


def load_csv(path, name: str = "") -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[-1] != "label" or not header[0].startswith("x"):
            raise QuantumValueError(f"unexpected dataset CSV header {header}")
        pts, labels = [], []
        for row in reader:
            if not row:
                continue
            pts.append([float(v) for v in row[:-1]])
            labels.append(int(row[-1]))
    return Dataset(np.asarray(pts, dtype=float), np.asarray(labels), name=name)
