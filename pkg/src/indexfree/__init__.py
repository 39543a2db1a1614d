"""Index-free minimization of convex finite sums.

Variance reduction normally needs to know *which* individual function each
oracle answer came from.  This package implements the alternative: treat the
oracle's answers as a categorical random variable, recover the exact category
counts by quantized (integer-rounded) counters, and rebuild exact full
gradients -- or whole objective functions -- with high probability.  On top of
that sit Q-SVRG, its Catalyst-accelerated variant, quantized gradient descent,
and the naive-averaging baselines whose noise floor shows why the rounding
step is essential.
"""

from .categorical import (
    CategoryTable,
    bias_demo,
    payload_key,
    required_samples,
    rnd,
    simulate_recovery,
    weighted_payload_mean,
)
from .global_solver import (
    Reconstruction,
    SingularReconstructionError,
    minimize_reconstructed,
    recover_finite_sum,
)
from .grad_estimators import (
    GradientEstimate,
    naive_full_gradient,
    quantized_full_gradient,
    quantized_full_gradients_batch,
)
from .oracles import FirstOrderResponse, OracleKind, OracleSession, OracleUsageError
from .problems import (
    FiniteSumProblem,
    MissingOptimumError,
    QuadraticIndividual,
    add_proximal_term,
    make_counterexample,
    make_random_quadratic_sum,
    problem_from_dict,
    problem_to_dict,
    quadratic_sum_from_individuals,
    suboptimality,
)
from .solvers import (
    RunRecord,
    SolverConfig,
    TrajectoryPoint,
    catalyst_beta,
    default_qsvrg_config,
    naive_plateau_level,
    naive_sgd_expected_gap,
    naive_sgd_gap_samples,
    naive_svrg_effective_step,
    naive_svrg_inner_average,
    run_catalyst_qsvrg,
    run_gd_naive,
    run_gd_quantized,
    run_naive_sgd,
    run_naive_svrg,
    run_qsvrg,
    svrg_contraction_factor,
)

__version__ = "0.1.0"
