"""Simulation and robustness analysis of binary quantum classifiers under noise."""

from .qcore import (
    ATOL,
    DensityMatrix,
    Observable,
    PureState,
    QuantumValueError,
    expectation,
    fidelity,
    partial_trace,
    projector_prob_via_elements,
    tensor,
    trace_distance,
)
from .encodings import (
    EncodingSpec,
    angle_encoding,
    dense_angle,
    density_matrix_closed_form_dae,
    encode,
    general_qubit,
    generalized_wavefunction,
    superdense_angle,
    wavefunction,
)
from .channels import (
    AssignmentMatrix,
    KrausChannel,
    amplitude_damping,
    apply,
    apply_factorized,
    bit_flip,
    dephasing,
    depolarizing,
    fixed_points,
    global_depolarizing,
    identity_channel,
    make_channel,
    pauli_channel,
    tensor_channel,
)
from .classifier import (
    NO_NOISE,
    AnsatzParams,
    ClassifierModel,
    DecisionRule,
    NoisePlacement,
    boundary_residual,
    cost_embedded,
    cost_embedded_error,
    cost_indicator,
    model_from_config,
    model_to_config,
    predict,
    predict_with_measurement_noise,
    sample_label,
    unitary_from_params,
)
from .training import EvalResult, TrainConfig, TrainResult, evaluate, train, train_refined
from .robustness import (
    RobustnessReport,
    RobustSetSizeBound,
    bound_delta_cost_average,
    bound_delta_cost_mixed,
    check_ampdamp_point_condition,
    check_measurement_noise_condition,
    check_pauli_condition,
    fidelity_bound_report,
    is_robust_point,
    robust_set,
    robust_set_size_bound,
)
from .encoding_learning import (
    EncodingLearningResult,
    FamilyTemplate,
    LearnConfig,
    default_family_set,
    learn_encoding,
    sweep_encoding_hyperparams,
    tune_hyperparams,
)
from .data import Dataset, SplitConfig, gen_synthetic, load_iris, split

__version__ = "0.1.0"
