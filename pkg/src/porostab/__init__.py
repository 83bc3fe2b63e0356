"""Linear and monotone-energy stability of Poiseuille flow in a Brinkman porous channel."""

__version__ = "0.1.0"

from .baseflow import (BaseFlow, DimensionalParams, FlowParams, derive_flow_params,  # noqa: E402
                       eval_profile, profile_table)
from .energystab import (Energy3DProblem, OrrEnergyProblem, critical_point_energy_spanwise,  # noqa: E402
                         energy3d_max, orr_energy_eigen, rayleigh_quotient, verify_squire_energy)
from .evolve import EvolveConfig, energy_trace, growth_rate_bound  # noqa: E402
from .linstab import CriticalPoint, OSProblem, critical_point_linear, neutral_Re, os_spectrum  # noqa: E402
from .spectral import apply_bc, build_grid  # noqa: E402

__all__ = [
    "BaseFlow", "DimensionalParams", "FlowParams", "derive_flow_params", "eval_profile",
    "profile_table", "Energy3DProblem", "OrrEnergyProblem", "critical_point_energy_spanwise",
    "energy3d_max", "orr_energy_eigen", "rayleigh_quotient", "verify_squire_energy",
    "EvolveConfig", "energy_trace", "growth_rate_bound", "CriticalPoint", "OSProblem",
    "critical_point_linear", "neutral_Re", "os_spectrum", "apply_bc", "build_grid",
]
