"""wps: a seed-reproducible warehouse picking simulator and benchmark harness.

A single robot picks single-line orders in a small grid warehouse under a
tabular Q-learning policy. Calibrated stochastic channels (perception
accuracy, hardware faults, environmental severity) turn deterministic
episodes into benchmark runs whose aggregate statistics reproduce the
published reference figures. See README.md for the CLI pipeline.
"""

from .warehouse import (
    Action,
    CellKind,
    Order,
    StateId,
    StepOutcome,
    WarehouseState,
    WorldError,
    build_warehouse,
    conservation_total,
    push_order,
    shelf_contents,
    state_id,
    state_space_size,
    transition,
)
from .qlearning import (
    LearningCurve,
    QParams,
    QTable,
    Transition,
    bellman_residual,
    export_q_surface,
    greedy_policy,
    load_qtable,
    q_update,
    save_qtable,
    select_action,
    train,
)
from .perception import (
    BUILTIN_SPECS,
    ClassifierInstance,
    ClassifierSpec,
    builtin_spec,
    classify,
    instantiate,
)
from .engine import (
    BUILTIN_SYSTEMS,
    DEFAULT_REWARDS,
    EpisodeLog,
    FaultModel,
    PickingEnv,
    RewardSchedule,
    SeverityModel,
    SeverityTable,
    SimConfig,
    enumerate_model,
    generate_orders,
    measure_run,
    run_episode,
    severity_model,
    training_env,
)
from .stats import (
    ComparisonRow,
    Histogram,
    REFERENCE,
    RegressionFit,
    RunRecord,
    SummaryStats,
    compare_to_reference,
    histogram,
    ols_fit,
    sign_test_p,
    summarize,
)

__version__ = "0.1.0"
