"""Optimal stopping with bagged Delta-split trees (Python front end)."""

from ._optstop import (
    ConfigError,
    DimensionError,
    Error,
    ParameterError,
    Tree,
    UnsupportedError,
    config_hash,
    config_keys,
    delta_split,
    european_call_price,
    european_put_price,
    grow,
    oracle,
    resolve_config,
    reward,
    run_experiment,
    simulate,
    v_max,
)

__all__ = [
    "ConfigError",
    "DimensionError",
    "Error",
    "ParameterError",
    "Tree",
    "UnsupportedError",
    "config_hash",
    "config_keys",
    "delta_split",
    "european_call_price",
    "european_put_price",
    "grow",
    "oracle",
    "resolve_config",
    "reward",
    "run_experiment",
    "simulate",
    "v_max",
]
