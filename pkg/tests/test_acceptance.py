"""Acceptance suite: one test per criterion, printing one PASS/FAIL line each.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Tolerances are pinned here and nowhere else.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from qrobust import channels as ch
from qrobust import classifier as clf
from qrobust import qcore
from qrobust.channels import (
    AssignmentMatrix,
    KrausChannel,
    amplitude_damping,
    bit_flip,
    dephasing,
    depolarizing,
    global_depolarizing,
    pauli_channel,
)
from qrobust.classifier import (
    NO_NOISE,
    AnsatzParams,
    ClassifierModel,
    NoisePlacement,
    evolve_states,
    sample_label,
    unitary_from_params,
)
from qrobust.data import SplitConfig, gen_synthetic, load_iris, split
from qrobust.encoding_learning import (
    LearnConfig,
    default_family_set,
    learn_encoding,
    sweep_encoding_hyperparams,
)
from qrobust.encodings import dense_angle, encode_batch, superdense_angle, wavefunction
from qrobust.robustness import (
    check_ampdamp_point_condition,
    fidelity_bound_report,
    robust_set,
)
from qrobust.training import TrainConfig, evaluate, train, train_refined


@contextmanager
def criterion(number: int, name: str):
    start = time.monotonic()
    try:
        yield
    except Exception:
        print(f"\nACCEPTANCE {number} [{name}]: FAIL ({time.monotonic() - start:.1f}s)")
        raise
    print(f"\nACCEPTANCE {number} [{name}]: PASS ({time.monotonic() - start:.1f}s)")


def _labels_agree(clean, noisy, threshold=0.5):
    return (clean >= threshold) == (noisy >= threshold)


def _random_processed_state(rng, n_qubits=1):
    psi = qcore.random_pure_state(n_qubits, rng)
    u = qcore.random_unitary(n_qubits, rng)
    return u @ psi.density().matrix @ u.conj().T


def _score(mat, proj):
    return float(np.trace(proj @ mat).real)


def _random_kraus_set(dim, k, rng):
    blocks = [
        rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        for _ in range(k)
    ]
    gram = sum(b.conj().T @ b for b in blocks)
    eigs, vecs = np.linalg.eigh(gram)
    inv_sqrt = (vecs / np.sqrt(eigs)) @ vecs.conj().T
    return tuple(b @ inv_sqrt for b in blocks)


# ---------------------------------------------------------------------------
# Shared experiment fixtures (module scope: trained once, reused).
# ---------------------------------------------------------------------------

IRIS_TRAIN_CFG = TrainConfig(max_iters=600, restarts=10, seed=7)
VERTICAL_TRAIN_CFG = TrainConfig(max_iters=400, restarts=10, seed=3)


@pytest.fixture(scope="module")
def iris_models(iris_csv):
    """Three trained two-qubit iris classifiers plus the training wall time."""
    dataset = load_iris(iris_csv, (0, 2))
    train_ds, test_ds = split(dataset, SplitConfig(0.8, seed=5))
    specs = {
        # Def.-2 hyperparameters wrap the polar angle on unit-scaled features,
        # which provably caps iris accuracy below the reproduction target;
        # theta = pi/2 keeps the embedding injective (see decisions ledger).
        "dense_angle": dense_angle(math.pi / 2, 2 * math.pi),
        "wavefunction": wavefunction(),
        "superdense_angle": superdense_angle(),
    }
    start = time.monotonic()
    fitted = {}
    for name, spec in specs.items():
        model = ClassifierModel(spec, AnsatzParams.zeros(2))
        fit = train_refined(model, train_ds, cfg=IRIS_TRAIN_CFG, polish_iters=600)
        fitted[name] = model.with_ansatz(fit.best_params)
    elapsed = time.monotonic() - start
    return {
        "dataset": dataset,
        "train": train_ds,
        "test": test_ds,
        "models": fitted,
        "elapsed": elapsed,
    }


@pytest.fixture(scope="module")
def vertical_models():
    """Trained dense-angle and wavefunction classifiers on the vertical set."""
    dataset = gen_synthetic("vertical", 500, seed=3)
    train_ds, test_ds = split(dataset, SplitConfig(0.8, seed=7))
    dae = ClassifierModel(dense_angle(2.9, 2.9), AnsatzParams.zeros(1))
    dae_fit = train_refined(dae, train_ds, cfg=VERTICAL_TRAIN_CFG)
    wf = ClassifierModel(wavefunction(), AnsatzParams.zeros(1))
    wf_fit = train(
        wf,
        train_ds,
        cost_kind="indicator",
        cfg=TrainConfig(max_iters=400, restarts=10, seed=11),
    )
    return {
        "dataset": dataset,
        "train": train_ds,
        "test": test_ds,
        "dae": dae.with_ansatz(dae_fit.best_params),
        "wf": wf.with_ansatz(wf_fit.best_params),
    }


# ---------------------------------------------------------------------------
# Criterion 1: theorem suite, 1000 randomized trials each, zero violations.
# ---------------------------------------------------------------------------


def test_criterion_1_theorem_suite():
    rng = np.random.default_rng(101)
    trials = 1000
    with criterion(1, "theorem suite, 1000 exact-score trials each"):
        start = time.monotonic()

        # Pauli channel, z basis, p_x + p_y <= 1/2.
        done = 0
        while done < trials:
            probs = rng.dirichlet(np.ones(4))
            if probs[1] + probs[2] > 0.5:
                continue
            done += 1
            rho = _random_processed_state(rng)
            noisy = ch.apply_matrix(pauli_channel(*probs), rho)
            assert _labels_agree(_score(rho, qcore.PROJ0), _score(noisy, qcore.PROJ0))

        # Corollary: x basis, p_y + p_z <= 1/2.
        done = 0
        while done < trials:
            probs = rng.dirichlet(np.ones(4))
            if probs[2] + probs[3] > 0.5:
                continue
            done += 1
            rho = _random_processed_state(rng)
            noisy = ch.apply_matrix(pauli_channel(*probs), rho)
            assert _labels_agree(
                _score(rho, qcore.PROJ_PLUS), _score(noisy, qcore.PROJ_PLUS)
            )

        # Dephasing: complete robustness at any strength.
        for _ in range(trials):
            rho = _random_processed_state(rng)
            noisy = ch.apply_matrix(dephasing(rng.uniform(0, 1)), rho)
            assert _labels_agree(_score(rho, qcore.PROJ0), _score(noisy, qcore.PROJ0))

        # Bit flip with the x-basis rule.
        for _ in range(trials):
            rho = _random_processed_state(rng)
            noisy = ch.apply_matrix(bit_flip(rng.uniform(0, 1)), rho)
            assert _labels_agree(
                _score(rho, qcore.PROJ_PLUS), _score(noisy, qcore.PROJ_PLUS)
            )

        # Depolarizing in all three bases.
        projs = (qcore.PROJ0, qcore.PROJ_PLUS, qcore.PROJ_PLUS_I)
        for i in range(trials):
            rho = _random_processed_state(rng)
            noisy = ch.apply_matrix(depolarizing(rng.uniform(0, 1)), rho)
            proj = projs[i % 3]
            assert _labels_agree(_score(rho, proj), _score(noisy, proj))

        # Interleaved global depolarizing, 1-2 qubits, up to 4 stages.
        for i in range(trials):
            n = 1 + (i % 2)
            proj = qcore.PROJ0 if n == 1 else np.kron(qcore.PROJ0, np.eye(2))
            m = int(rng.integers(1, 5))
            stages = [qcore.random_unitary(n, rng) for _ in range(m)]
            noise = NoisePlacement(
                interleaved=tuple(
                    (j, global_depolarizing(rng.uniform(0, 1), n)) for j in range(m)
                )
            )
            rho0 = qcore.random_pure_state(n, rng).density().matrix[None]
            clean = evolve_states(rho0, stages)[0]
            noisy = evolve_states(rho0, stages, noise)[0]
            assert _labels_agree(_score(clean, proj), _score(noisy, proj))

        # Measurement (assignment) noise. The robustness proof fixes the
        # threshold via p00 + p01 = 1, i.e. a doubly stochastic assignment;
        # asymmetric column-normalized matrices can flip near-threshold
        # states even with dominant diagonals (see decisions ledger).
        for _ in range(trials):
            q = rng.uniform(np.nextafter(0.5, 1), 1)
            assign = AssignmentMatrix.symmetric(1 - q)
            score = _score(_random_processed_state(rng), qcore.PROJ0)
            noisy_score = (assign.p00 - assign.p01) * score + assign.p01
            assert _labels_agree(score, noisy_score)

        # Factorizable noise: a label-preserving channel on the
        # classification qubit extends to the product channel.
        preserving = (
            lambda: dephasing(rng.uniform(0, 1)),
            lambda: depolarizing(rng.uniform(0, 1)),
        )
        for i in range(trials):
            rho = qcore.DensityMatrix(_random_processed_state(rng, n_qubits=2))
            ch_c = preserving[i % 2]()
            ch_rest = KrausChannel(_random_kraus_set(2, int(rng.integers(1, 5)), rng))
            out = ch.apply_factorized(ch_rest, ch_c, rho)
            proj = np.kron(qcore.PROJ0, np.eye(2))
            assert _labels_agree(_score(rho.matrix, proj), _score(out.matrix, proj))

        elapsed = time.monotonic() - start
        assert elapsed < 60.0, f"theorem suite took {elapsed:.1f}s"


# ---------------------------------------------------------------------------
# Criterion 2: layered global depolarizing closed form to 1e-12.
# ---------------------------------------------------------------------------


def test_criterion_2_depolarizing_lemma_closed_form():
    rng = np.random.default_rng(202)
    with criterion(2, "interleaved depolarizing closed form, 1e-12"):
        for i in range(1000):
            n = 1 + (i % 2)
            d = 2**n
            m = int(rng.integers(1, 5))
            stages = [qcore.random_unitary(n, rng) for _ in range(m)]
            retention = rng.uniform(0, 1, size=m)
            noise = NoisePlacement(
                interleaved=tuple(
                    (j, global_depolarizing(1.0 - retention[j], n)) for j in range(m)
                )
            )
            rho = qcore.random_density_matrix(n, rng)
            out = evolve_states(rho.matrix[None], stages, noise)[0]
            product = np.eye(d)
            for stage in stages:
                product = stage @ product
            expected = retention.prod() * (product @ rho.matrix @ product.conj().T)
            expected += (1.0 - retention.prod()) * np.eye(d) / d
            assert np.abs(out - expected).max() < 1e-12


# ---------------------------------------------------------------------------
# Criterion 3: amplitude-damping analytic condition vs simulation.
# ---------------------------------------------------------------------------


def test_criterion_3_ampdamp_condition_grid():
    axis = np.linspace(0.0, 1.0, 100)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    grid = np.stack([xx.ravel(), yy.ravel()], axis=1)
    with criterion(3, "amplitude-damping analytic condition, 100x100 grid"):
        for model_seed in range(10):
            train_ds = gen_synthetic("vertical", 120, seed=50 + model_seed)
            model = ClassifierModel(dense_angle(2.9, 2.9), AnsatzParams.zeros(1))
            fit = train_refined(
                model,
                train_ds,
                cfg=TrainConfig(max_iters=150, restarts=3, seed=model_seed),
                polish_iters=150,
            )
            fitted = model.with_ansatz(fit.best_params)
            u = unitary_from_params(fitted.ansatz)
            amps = encode_batch(grid, fitted.encoding)
            a00 = np.abs(amps[:, 0]) ** 2
            a01 = amps[:, 0] * amps[:, 1].conj()
            a11 = np.abs(amps[:, 1]) ** 2
            tr_pi1 = (
                abs(u[1, 0]) ** 2 * a00
                + 2 * np.real(u[1, 1].conjugate() * u[1, 0] * a01)
                + abs(u[1, 1]) ** 2 * a11
            )
            clean = clf.dataset_scores(fitted, grid)
            for p in (0.1, 0.3, 0.5, 0.9):
                noise = NoisePlacement(after_evolution=amplitude_damping(p))
                noisy = clf.dataset_scores(fitted, grid, noise)
                keep = (np.abs(clean - 0.5) >= 1e-9) & (np.abs(noisy - 0.5) >= 1e-9)
                simulated = (clean >= 0.5) == (noisy >= 0.5)
                analytic = (clean >= 0.5) | (tr_pi1 > 1.0 / (2.0 * (1.0 - p)))
                assert (analytic[keep] == simulated[keep]).all()
            # Spot-check the batched closed form against the public per-point API.
            rng = np.random.default_rng(model_seed)
            for idx in rng.integers(0, len(grid), size=25):
                got = check_ampdamp_point_condition(fitted, grid[idx], 0.3)
                expected = clean[idx] >= 0.5 or tr_pi1[idx] > 1.0 / (2.0 * 0.7)
                assert got == expected


# ---------------------------------------------------------------------------
# Criterion 4: iris reproduction inside the accuracy bands, under 5 minutes.
# ---------------------------------------------------------------------------


def test_criterion_4_iris_reproduction(iris_models):
    with criterion(4, "iris accuracy bands (DAE/WF >= 95%, SDAE in [65, 88]%)"):
        test_ds = iris_models["test"]
        accuracy = {
            name: evaluate(model, model.ansatz, test_ds).accuracy
            for name, model in iris_models["models"].items()
        }
        print(f"\n  iris test accuracy: {accuracy}")
        assert accuracy["dense_angle"] >= 0.95
        assert accuracy["wavefunction"] >= 0.95
        assert 0.65 <= accuracy["superdense_angle"] <= 0.88
        assert iris_models["elapsed"] < 300.0


# ---------------------------------------------------------------------------
# Criterion 5: vertical-boundary partial robustness bands and mask location.
# ---------------------------------------------------------------------------


def test_criterion_5_vertical_partial_robustness(vertical_models):
    with criterion(5, "vertical-boundary accuracy bands and robust-set location"):
        test_ds = vertical_models["test"]
        dae, wf = vertical_models["dae"], vertical_models["wf"]

        damp04 = NoisePlacement(after_evolution=amplitude_damping(0.4))
        damp02 = NoisePlacement(after_evolution=amplitude_damping(0.2))

        dae_clean = evaluate(dae, dae.ansatz, test_ds).accuracy
        dae_noisy = evaluate(dae, dae.ansatz, test_ds, damp04).accuracy
        # The channel strength is quoted both as 0.4 and 0.2 in the source
        # figures; the band is asserted at 0.4 and the 0.2 run is recorded.
        dae_noisy_02 = evaluate(dae, dae.ansatz, test_ds, damp02).accuracy
        print(
            f"\n  DAE test accuracy: clean {dae_clean:.3f}, p=0.4 {dae_noisy:.3f}, "
            f"p=0.2 {dae_noisy_02:.3f} (recorded)"
        )
        assert dae_clean >= 0.95
        assert 0.65 <= dae_noisy <= 0.90

        wf_clean = evaluate(wf, wf.ansatz, test_ds).accuracy
        wf_noisy = evaluate(wf, wf.ansatz, test_ds, damp02).accuracy
        print(f"  WF  test accuracy: clean {wf_clean:.3f}, p=0.2 {wf_noisy:.3f}")
        assert 0.72 <= wf_clean <= 0.90
        assert 0.50 <= wf_noisy <= 0.72

        # Robust set concentrates at the left/right extremes of the square.
        dataset = vertical_models["dataset"]
        report = robust_set(dae, dataset, damp04)
        flags = np.array(report.flags)
        assert 0 < flags.sum() < len(flags)
        x1 = dataset.points[:, 0]
        robust_spread = np.abs(x1[flags] - 0.5).mean()
        fragile_spread = np.abs(x1[~flags] - 0.5).mean()
        print(f"  mean |x1 - 0.5|: robust {robust_spread:.3f} > other {fragile_spread:.3f}")
        assert robust_spread > fragile_spread


# ---------------------------------------------------------------------------
# Criterion 6: fidelity bounds dominate the cost change on iris sweeps.
# ---------------------------------------------------------------------------


def _iid_two_qubit(factory):
    """Single-qubit channel applied independently to both qubits."""
    return lambda p: ch.tensor_channel(factory(p), factory(p))


def test_criterion_6_fidelity_bounds_iris(iris_models):
    strengths = np.round(np.arange(0.0, 0.501, 0.05), 2)
    channels = {
        "bit_flip": _iid_two_qubit(bit_flip),
        "amplitude_damping": _iid_two_qubit(amplitude_damping),
        "dephasing": _iid_two_qubit(dephasing),
        "global_depolarizing": lambda p: global_depolarizing(p, 2),
    }
    with criterion(6, "fidelity bounds >= embedded cost change on iris"):
        dataset = iris_models["dataset"]
        for name, model in iris_models["models"].items():
            for ch_name, factory in channels.items():
                for p in strengths:
                    noise = NoisePlacement(after_evolution=factory(float(p)))
                    report = fidelity_bound_report(model, dataset, noise)
                    assert report.bound_mixed >= report.delta_cost_embedded - 1e-9, (
                        name, ch_name, p,
                    )
                    assert report.bound_average >= report.delta_cost_embedded - 1e-9
                    if ch_name == "global_depolarizing":
                        assert report.changed_count == 0
                        if p > 0:
                            assert report.fidelity_mixed < 1.0


# ---------------------------------------------------------------------------
# Criterion 7: closed-form decision boundaries for WF and DAE encodings.
# ---------------------------------------------------------------------------


def _boundary_points(model, fixed_values, scan, along="x2"):
    """Boundary points found by bracketing sign changes and vector bisection.

    ``along="x2"`` scans vertical lines (one per fixed x1); ``along="x1"``
    scans horizontal lines. Bisection runs 50 batched halvings (interval
    width ~1e-16), so boundary coordinates are exact to float precision.
    """

    def stack(fixed, moving):
        cols = (fixed, moving) if along == "x2" else (moving, fixed)
        return np.stack(cols, axis=-1)

    pts = np.array([[f, s] for f in fixed_values for s in scan])
    coords = stack(pts[:, 0], pts[:, 1])
    scores = (clf.dataset_scores(model, coords) - 0.5).reshape(len(fixed_values), -1)
    fixed, lo, hi, flo = [], [], [], []
    for f, row in zip(fixed_values, scores):
        for i in np.flatnonzero(np.sign(row[:-1]) != np.sign(row[1:])):
            fixed.append(f)
            lo.append(scan[i])
            hi.append(scan[i + 1])
            flo.append(row[i])
    if not fixed:
        return np.empty((0, 2))
    fixed, lo, hi, flo = map(np.asarray, (fixed, lo, hi, flo))
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        fmid = clf.dataset_scores(model, stack(fixed, mid)) - 0.5
        toward_hi = flo * fmid <= 0
        hi = np.where(toward_hi, mid, hi)
        lo = np.where(toward_hi, lo, mid)
        flo = np.where(toward_hi, flo, fmid)
    return stack(fixed, 0.5 * (lo + hi))


def test_criterion_7_boundary_closed_forms():
    rng = np.random.default_rng(707)
    with criterion(7, "closed-form boundaries (WF line, DAE sinusoid) to 1e-3"):
        # Wavefunction: boundary points lie on a straight line.
        for _ in range(5):
            psi = rng.uniform(0.25, 1.3)
            model = ClassifierModel(wavefunction(), AnsatzParams((0.0, psi, 0.0)))
            grid = np.linspace(0.02, 1.0, 60)
            scan = np.linspace(1e-6, 1.0, 40)
            points = np.concatenate(
                [
                    _boundary_points(model, grid, scan, along="x2"),
                    _boundary_points(model, grid, scan, along="x1"),
                ]
            )
            assert len(points) >= 20
            centered = points - points.mean(axis=0)
            _, _, vt = np.linalg.svd(centered, full_matrices=False)
            residuals = centered @ vt[1]  # distance along the line normal
            assert np.abs(residuals).max() < 1e-3

        # Dense angle: boundary points satisfy the derived sinusoid relation
        #   cos(2 pi x2) = (1 - 2a^2 + (2a^2 - 2b^2) sin^2(pi x1))
        #                  / (2 a b sin(2 pi x1)),
        # rechecked from the score expansion; the source prints the relation
        # without the factor 2 in the denominator (see decisions ledger).
        for _ in range(5):
            psi = rng.uniform(0.3, 1.2)
            model = ClassifierModel(dense_angle(), AnsatzParams((0.0, psi, 0.0)))
            u = unitary_from_params(model.ansatz)
            a, b = u[0, 0].real, u[0, 1].real
            x1_grid = np.concatenate(
                [np.linspace(0.05, 0.45, 25), np.linspace(0.55, 0.95, 25)]
            )
            points = _boundary_points(model, x1_grid, np.linspace(0.0, 1.0, 60))
            assert len(points) >= 10
            x1s, x2s = points[:, 0], points[:, 1]
            rhs = (1.0 - 2 * a**2 + (2 * a**2 - 2 * b**2) * np.sin(np.pi * x1s) ** 2) / (
                2 * a * b * np.sin(2 * np.pi * x1s)
            )
            assert np.abs(np.cos(2 * np.pi * x2s) - rhs).max() < 1e-3


# ---------------------------------------------------------------------------
# Criterion 8: encoding learning on the vertical dataset plus the sweep table.
# ---------------------------------------------------------------------------


def test_criterion_8_encoding_learning(vertical_models):
    with criterion(8, "encoding learning costs and hyperparameter sweep table"):
        dataset = vertical_models["dataset"]
        noise = NoisePlacement(after_evolution=amplitude_damping(0.3))
        cfg = LearnConfig(
            noise=noise,
            alpha_train=TrainConfig(max_iters=400, restarts=10, seed=3),
            hyper_train=TrainConfig(max_iters=300, restarts=1, seed=3),
            seed=17,
        )
        result = learn_encoding(dataset, default_family_set(), cfg)
        by_family = {f.family: f for f in result.families}
        dae = by_family["dense_angle"]
        sdae = by_family["superdense_angle"]
        print(
            f"\n  post-learning costs: dae {dae.cost:.3f} "
            f"(fixed clean {dae.noiseless_fixed_cost:.3f} / noisy {dae.noisy_fixed_cost:.3f}), "
            f"sdae {sdae.cost:.3f}"
        )
        assert dae.cost <= dae.noisy_fixed_cost
        assert dae.cost <= dae.noiseless_fixed_cost + 0.02
        assert sdae.cost >= 0.4

        # Hyperparameter sweep: the robustness-maximal cell sits at the
        # channel fixed point [theta, phi] = [0, 0] with delta = 1 and
        # chance-level accuracy.
        train_ds, test_ds = vertical_models["train"], vertical_models["test"]
        cells = sweep_encoding_hyperparams(
            train_ds,
            test_ds,
            noise,
            theta_values=np.linspace(0.0, 2 * math.pi, 9),
            phi_values=np.linspace(0.0, 2 * math.pi, 5),
            alpha_train=TrainConfig(restarts=3, max_iters=300, seed=5),
        )
        zero = next(c for c in cells if c.theta == 0.0 and c.phi == 0.0)
        max_delta = max(c.delta for c in cells)
        print(f"  sweep cell [0,0]: delta {zero.delta:.2f}, accuracy {zero.accuracy:.2f}")
        assert zero.delta == 1.0
        assert zero.delta == max_delta
        assert 0.33 <= zero.accuracy <= 0.53


# ---------------------------------------------------------------------------
# Criterion 9: exact-score robustness vs finite-shot disagreement.
# ---------------------------------------------------------------------------


def test_criterion_9_shot_noise_separation(vertical_models):
    with criterion(9, "global depolarizing: exact robustness vs shot noise"):
        dataset = vertical_models["dataset"]
        model = vertical_models["dae"]
        noise = NoisePlacement(after_evolution=global_depolarizing(0.3, 1))

        report = robust_set(model, dataset, noise)
        assert report.delta == 1.0  # exact scores never flip

        noisy_scores = clf.dataset_scores(model, dataset.points, noise)
        near = np.flatnonzero(np.abs(noisy_scores - 0.5) < 0.05)
        assert near.size >= 5, "expected near-threshold points on the vertical set"
        exact_labels = clf.labels_from_scores(noisy_scores, model.rule)
        trials = disagreements = 0
        for idx in near:
            for seed_index in range(20):
                label, _ = sample_label(
                    model,
                    dataset.points[idx],
                    noise,
                    shots=100,
                    seed=[909, int(idx), seed_index],
                )
                trials += 1
                disagreements += label != exact_labels[idx]
        rate = disagreements / trials
        print(f"\n  sampled-label disagreement rate near threshold: {rate:.3f}")
        assert rate >= 0.01
