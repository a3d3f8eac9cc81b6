"""Fair contextual pricing with strategic buyers."""

from ._fairprice import (
    ConfigError,
    DemandParams,
    Environment,
    Group,
    PricePair,
    SingularFitError,
    calibrate,
    grid_oracle_prices,
    loglog_slope,
    optimal_fair_prices,
    report_group,
    simulate,
    simulation_environment,
    theorem1_environment,
    theorem3_environment,
    theorem3_optimal_price,
    verify_properties,
)

__all__ = [
    "ConfigError",
    "DemandParams",
    "Environment",
    "Group",
    "PricePair",
    "SingularFitError",
    "calibrate",
    "grid_oracle_prices",
    "loglog_slope",
    "optimal_fair_prices",
    "report_group",
    "simulate",
    "simulation_environment",
    "theorem1_environment",
    "theorem3_environment",
    "theorem3_optimal_price",
    "verify_properties",
]
