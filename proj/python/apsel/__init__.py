"""Python access to the apsel simulator core."""

from ._apsel import (
    ConfigError,
    InvalidInput,
    enumerate,
    frame_tx_time,
    path_loss,
    preset_names,
    required_airtime,
    resolve_config,
    run,
    run_preset,
    select_rates,
)

__all__ = [
    "ConfigError",
    "InvalidInput",
    "enumerate",
    "frame_tx_time",
    "path_loss",
    "preset_names",
    "required_airtime",
    "resolve_config",
    "run",
    "run_preset",
    "select_rates",
]
