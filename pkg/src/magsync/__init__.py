"""Gaussian simulation of two squeezed magnon modes in a two-site cavity-magnomechanical array."""

__version__ = "0.1.0"

from .physpar import (  # noqa: E402
    TWO_PI, ConfigError, DriveSpec, SystemConfig, baseline_config, describe,
    dump_config, load_config, loads_config, rabi_frequency, spin_count, thermal_occupation,
)
from .meanfield import OperatingPoint, effective_coupling, solve_operating_point  # noqa: E402
from .lindyn import (  # noqa: E402
    LinearModel, assemble_diffusion, assemble_drift, build_model,
    evolve_covariance, physicality_check, stability, steady_covariance,
)
from .measures import (  # noqa: E402
    MeasureSet, complete_sync, extract_two_mode, log_negativity, measure_all,
    phase_sync, purity,
)
from .sweep import SweepSpec, figure_preset, run_sweep  # noqa: E402
