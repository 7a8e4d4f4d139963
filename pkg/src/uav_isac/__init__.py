"""Sensing-SINR optimization for UAV-based cell-free massive-MIMO ISAC networks.

Modules, bottom-up: ``geometry`` (positions, angles, steering vectors),
``channels`` (seeded channel draws), ``sinr`` (SINR metrics and Monte-Carlo
oracles), ``precoders`` (ZF/MMSE), ``conic`` and ``cccp`` (precoder
optimization), ``pso`` (UAV placement), ``config`` and ``scenario``
(pipelines, sweeps, CSV) and ``cli``.
"""

from .cccp import (
    CccpConfig,
    CccpState,
    InfeasibleInstanceError,
    initialize_feasible,
    optimize_precoders_mobile,
    optimize_precoders_tethered,
)
from .channels import ArrayShape, ChannelRealization, PropagationParams, realize_channels
from .config import ScenarioConfig, build_config, load_config
from .geometry import NetworkLayout
from .pso import SwarmConfig, optimize_positions
from .scenario import RunResult, SweepResult, emit_csv, read_csv, run_fixed, run_mobile, run_sweep, run_tethered
from .sinr import PrecoderSolution, SinrReport, check_feasibility, sensing_sinr

__version__ = "0.1.0"

__all__ = [
    "ArrayShape", "CccpConfig", "CccpState", "ChannelRealization", "InfeasibleInstanceError", "NetworkLayout",
    "PrecoderSolution", "PropagationParams", "RunResult", "ScenarioConfig", "SinrReport", "SwarmConfig",
    "SweepResult", "build_config", "check_feasibility", "emit_csv", "initialize_feasible", "load_config",
    "optimize_positions", "optimize_precoders_mobile", "optimize_precoders_tethered", "read_csv",
    "realize_channels", "run_fixed", "run_mobile", "run_sweep", "run_tethered", "sensing_sinr",
]
