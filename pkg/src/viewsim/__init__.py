"""View-aware bandwidth adaptation simulator for multi-camera rooms.

Layers, innermost first:

- :mod:`viewsim.adapt` -- reduction ladder, adaptation heuristics, exact solver
- :mod:`viewsim.priority` -- FOV geometry, priority classes, scene classification
- :mod:`viewsim.world` -- placement, clustering, facing, random-walk mobility
- :mod:`viewsim.experiments` -- budget sweeps, metrics, CSV, scaling bench
- :mod:`viewsim.service` -- HTTP/WebSocket session server for the companion UI
"""

from .adapt import (
    SQRT2,
    AdaptationPlan,
    AdaptedStream,
    InfeasibleBudget,
    InstanceTooLarge,
    ReductionLadder,
    StreamDescriptor,
    aggressive,
    build_ladder,
    compromise,
    exact_oracle,
    minimum_budget,
    round_robin,
)
from .priority import (
    CameraMount,
    Coverage,
    Participant,
    PriorityClass,
    PriorityTriple,
    ViewerState,
    classify_scene,
    first_level,
    global_priority,
    participant_normal,
    second_level,
)
from .world import (
    GmmState,
    MobilityConfig,
    Room,
    apply_facing,
    gmm_fit,
    make_room,
    place_pairs,
    place_uniform,
    step_mobility,
)
from .experiments import (
    ExperimentConfig,
    MetricsReport,
    adaptation_ratio,
    run_scaling_bench,
    run_sweep,
    total_quality,
)

__version__ = "0.1.0"
