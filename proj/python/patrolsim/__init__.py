"""Multi-agent patrol simulator: constrained RL with cycling duals and
one-bit gossip over stochastic communication graphs."""

from patrolsim._core import (
    FloorPlan,
    PatrolConfigError,
    PatrolUsageError,
    dual_update,
    nbinom_cdf,
    norm_bound,
    oracle_actions,
    reward,
    run_oracle,
    step,
    feasibility_margin,
    verify_dissemination,
)

__all__ = [
    "FloorPlan",
    "PatrolConfigError",
    "PatrolUsageError",
    "dual_update",
    "nbinom_cdf",
    "norm_bound",
    "oracle_actions",
    "reward",
    "run_oracle",
    "step",
    "feasibility_margin",
    "verify_dissemination",
]
