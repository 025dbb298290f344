"""Run configuration, output writers and the command workflows."""

from .config import ConfigError, RunConfig, load_run_config
from .commands import (
    COMMANDS,
    CommandResult,
    cmd_continue,
    cmd_equilibria,
    cmd_ring,
    cmd_scan,
    cmd_verify,
)

__all__ = [
    'ConfigError',
    'RunConfig',
    'load_run_config',
    'COMMANDS',
    'CommandResult',
    'cmd_continue',
    'cmd_equilibria',
    'cmd_ring',
    'cmd_scan',
    'cmd_verify',
]
