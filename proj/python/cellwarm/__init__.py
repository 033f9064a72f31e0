"""Cell preheating toolkit: coupled cell/thermal simulation, safety
supervision, and heating-policy evaluation."""

from ._core import (
    ConfigError,
    DomainError,
    Policy,
    PreheatEnv,
    PtcParameters,
    RunConfig,
    SolverError,
    curie_temperature,
    ptc_power,
    ptc_resistance,
    pulse_waveform,
    report_from_trace,
    reward,
    run_scenario,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Policy",
    "PreheatEnv",
    "PtcParameters",
    "RunConfig",
    "SolverError",
    "curie_temperature",
    "ptc_power",
    "ptc_resistance",
    "pulse_waveform",
    "report_from_trace",
    "reward",
    "run_scenario",
]
