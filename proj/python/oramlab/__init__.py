"""Deterministic ORAM simulation lab."""

from ._core import (
    ConfigError,
    ContractViolation,
    LivelockError,
    PathOram,
    RangeError,
    RecursiveOram,
    bogus_length,
    cli_main,
    generate_trace,
    periodic_ticks,
    praxen_alloc,
    termination_leakage,
    timing_leakage,
    truncation_test,
)

__all__ = [
    "ConfigError",
    "ContractViolation",
    "LivelockError",
    "PathOram",
    "RangeError",
    "RecursiveOram",
    "bogus_length",
    "cli_main",
    "generate_trace",
    "periodic_ticks",
    "praxen_alloc",
    "termination_leakage",
    "timing_leakage",
    "truncation_test",
]
