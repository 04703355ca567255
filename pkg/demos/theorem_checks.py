"""Numerical spot checks of the robustness guarantees.

Each block draws random processed states and verifies that the predicted
label survives the channel whenever the corresponding condition holds:

* Pauli channel with p_x + p_y <= 1/2 (computational basis),
* dephasing and depolarizing at any strength,
* bit flip under the x-basis decision rule,
* global depolarizing layered anywhere in the circuit,
* symmetric readout noise with dominant diagonal,
* amplitude damping exactly on the analytic partial-robustness condition.

Run:  python demos/theorem_checks.py
"""

import numpy as np

from qrobust import (
    AnsatzParams,
    ClassifierModel,
    NoisePlacement,
    amplitude_damping,
    bit_flip,
    check_ampdamp_point_condition,
    check_pauli_condition,
    dense_angle,
    dephasing,
    depolarizing,
    global_depolarizing,
    is_robust_point,
    pauli_channel,
)
from qrobust.channels import apply_matrix
from qrobust.classifier import evolve_states
from qrobust.qcore import PROJ0, PROJ_PLUS, random_pure_state, random_unitary

rng = np.random.default_rng(0)
TRIALS = 400


def processed_state(n=1):
    psi = random_pure_state(n, rng)
    u = random_unitary(n, rng)
    return u @ psi.density().matrix @ u.conj().T


def agree(clean, noisy):
    return (clean >= 0.5) == (noisy >= 0.5)


def run(name, flips):
    status = "ok" if flips == 0 else f"{flips} FLIPS"
    print(f"{name:52s} {status}")


# Pauli channel within the robust region of parameter space.
flips = 0
for _ in range(TRIALS):
    probs = rng.dirichlet(np.ones(4))
    if probs[1] + probs[2] > 0.5:
        probs[[0, 1]], probs[[2, 3]] = probs[[1, 0]], probs[[3, 2]]
    assert check_pauli_condition(*probs, basis="z")
    rho = processed_state()
    noisy = apply_matrix(pauli_channel(*probs), rho)
    flips += not agree(np.trace(PROJ0 @ rho).real, np.trace(PROJ0 @ noisy).real)
run(f"pauli with p_x + p_y <= 1/2 ({TRIALS} states)", flips)

# Channels that are label-preserving at every strength.
for name, factory, proj in [
    ("dephasing, any strength", dephasing, PROJ0),
    ("depolarizing, any strength", depolarizing, PROJ0),
    ("bit flip with x-basis rule", bit_flip, PROJ_PLUS),
]:
    flips = 0
    for _ in range(TRIALS):
        rho = processed_state()
        noisy = apply_matrix(factory(rng.uniform(0, 1)), rho)
        flips += not agree(np.trace(proj @ rho).real, np.trace(proj @ noisy).real)
    run(f"{name} ({TRIALS} states)", flips)

# Global depolarizing interleaved between up to four circuit stages.
flips = 0
for _ in range(TRIALS):
    m = int(rng.integers(1, 5))
    stages = [random_unitary(2, rng) for _ in range(m)]
    noise = NoisePlacement(
        interleaved=tuple((i, global_depolarizing(rng.uniform(0, 1), 2)) for i in range(m))
    )
    rho = random_pure_state(2, rng).density().matrix[None]
    proj = np.kron(PROJ0, np.eye(2))
    clean = np.trace(proj @ evolve_states(rho, stages)[0]).real
    noisy = np.trace(proj @ evolve_states(rho, stages, noise)[0]).real
    flips += not agree(clean, noisy)
run(f"layered global depolarizing, 2 qubits ({TRIALS} runs)", flips)

# Symmetric readout noise with dominant diagonal fixes the threshold.
flips = 0
for _ in range(TRIALS):
    q = rng.uniform(0.501, 1.0)
    score = np.trace(PROJ0 @ processed_state()).real
    flips += not agree(score, (2 * q - 1) * score + (1 - q))
run(f"symmetric readout noise, q > 1/2 ({TRIALS} states)", flips)

# Amplitude damping: the analytic condition reproduces simulation flags.
model = ClassifierModel(dense_angle(2.9, 2.9), AnsatzParams(tuple(rng.uniform(0, 6, 3))))
p = 0.3
noise = NoisePlacement(after_evolution=amplitude_damping(p))
mismatches = 0
for _ in range(TRIALS):
    x = rng.uniform(0, 1, 2)
    mismatches += check_ampdamp_point_condition(model, x, p) != is_robust_point(
        model, x, noise
    )
print(f"{'amplitude damping analytic vs simulated flags':52s} "
      f"{'ok' if mismatches == 0 else f'{mismatches} MISMATCHES'}")
