"""
ssreg: 稳态增益的数据驱动辨识与在线梯度调节
"""

from .control import (
    ClosedLoopRecord,
    CostModel,
    QuadraticCost,
    StepSizeCertificate,
    controller_step,
    lyapunov_diagnostic,
    optimizer,
    run_closed_loop,
    run_static_loop,
    step_size_certificate,
    verify_pl_and_lipschitz,
)
from .disturbance import make_disturbance
from .excitation import (
    HankelMatrix,
    PeCertificate,
    build_hankel,
    fundamental_lemma_rank_check,
    min_samples,
    persistency_certificate,
    random_pe_input,
    trajectory_membership,
)
from .identify import (
    DifferencedData,
    GainEstimate,
    WindowEstimate,
    difference_signals,
    estimate_gain_constant_noise,
    estimate_gain_noise_free,
    rolling_estimate,
)
from .lti import (
    LtiSystem,
    SteadyStateGains,
    Trajectory,
    has_full_column_rank,
    is_controllable,
    is_schur_stable,
    random_admissible_system,
    scalar_example_system,
    simulate,
    solve_discrete_lyapunov,
    steady_state_gains,
)

__version__ = "0.1.0"
