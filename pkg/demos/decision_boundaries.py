"""Decision boundaries learnable by different data encodings.

A single-qubit classifier thresholds Tr[P0 U rho_x U^dag] at 1/2, so the
decision boundary in feature space is fixed by the encoding family: the
wavefunction encoding can only draw straight lines through the origin,
the dense angle encoding draws sinusoids, and the superdense angle
encoding tiles the square with stripes.

Run:  python demos/decision_boundaries.py
Writes one grid CSV per encoding into demos/out/.
"""

from pathlib import Path

import numpy as np

from qrobust import (
    AnsatzParams,
    ClassifierModel,
    dense_angle,
    superdense_angle,
    wavefunction,
)
from qrobust.classifier import dataset_scores, labels_from_scores

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

rng = np.random.default_rng(1)
angles = AnsatzParams(tuple(rng.uniform(0, 2 * np.pi, 3)))
print(f"random single-qubit ansatz angles: {np.round(angles.angles, 3)}")

# A 200 x 200 lattice over the unit square (skipping the origin, which the
# wavefunction encoding cannot represent).
axis = np.linspace(0.0, 1.0, 200)
xx, yy = np.meshgrid(axis, axis, indexing="ij")
grid = np.stack([xx.ravel(), yy.ravel()], axis=1)
grid = grid[(grid**2).sum(axis=1) > 0]

for name, spec in [
    ("dense_angle", dense_angle()),
    ("wavefunction", wavefunction()),
    ("superdense_angle", superdense_angle()),
]:
    model = ClassifierModel(spec, angles)
    scores = dataset_scores(model, grid)
    labels = labels_from_scores(scores, model.rule)
    path = OUT / f"boundary_{name}.csv"
    np.savetxt(
        path,
        np.column_stack([grid, scores, labels]),
        delimiter=",",
        header="x1,x2,score,label",
        comments="",
        fmt="%.10g",
    )
    # Count label stripes along a generic vertical line of the square.
    line = np.stack([np.full_like(axis, 0.3), axis], axis=1)
    line_labels = labels_from_scores(dataset_scores(model, line), model.rule)
    transitions = int((np.diff(line_labels) != 0).sum())
    print(
        f"{name:18s} class balance {labels.mean():.2f}, "
        f"label transitions along x1 = 0.3: {transitions}  -> {path.name}"
    )

print("\nContour the score column at 0.5 to see each boundary family.")
