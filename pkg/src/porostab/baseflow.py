"""Base flow of the Brinkman channel and its dimensionless parameters.

The profile is normalized by the centerline velocity, so ``U(0) = 1`` and
``U(+-1) = 0``.  Three evaluation branches are used:

* ``M < SMALL_M``: series in M (Poiseuille limit plus the M^2 correction);
* ``M <= LARGE_M``: product-of-sinh form, free of the 0/0 cancellation in
  ``cosh M - 1``;
* ``M > LARGE_M``: ratios of exponentials that cannot overflow.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, UsageError

SMALL_M = 1e-4
LARGE_M = 50.0


@dataclass(frozen=True)
class DimensionalParams:
    density: float
    viscosity: float
    velocity: float
    half_width: float
    porosity: float
    permeability: float

    def __post_init__(self):
        for name in ("density", "viscosity", "velocity", "half_width",
                     "porosity", "permeability"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")
        if self.porosity > 1:
            raise DomainError(f"porosity must lie in (0, 1], got {self.porosity!r}")

    @property
    def darcy(self) -> float:
        return self.permeability / self.half_width**2


@dataclass(frozen=True)
class FlowParams:
    reynolds: float
    M: float

    def __post_init__(self):
        if not self.reynolds > 0:
            raise DomainError(f"reynolds must be positive, got {self.reynolds!r}")
        if not self.M >= 0:
            raise DomainError(f"M must be non-negative, got {self.M!r}")


def derive_flow_params(p: DimensionalParams) -> FlowParams:
    """R = rho V L / mu and M = sqrt(phi) L / sqrt(K)."""
    R = p.density * p.velocity * p.half_width / p.viscosity
    M = math.sqrt(p.porosity) * p.half_width / math.sqrt(p.permeability)
    return FlowParams(reynolds=R, M=M)


def _check_M(M):
    if not (M >= 0 and math.isfinite(M)):
        raise DomainError(f"M must be finite and non-negative, got {M!r}")


def eval_profile(M: float, z):
    """Return ``(U, dU, d2U)`` at ``z`` (scalar or array) for porous parameter M."""
    M = float(M)
    _check_M(M)
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 1) or not np.all(np.isfinite(z)):
        raise DomainError("z must lie in [-1, 1]")
    if M < SMALL_M:
        m2 = M * M / 12.0
        z2 = z * z
        U = (1 - z2) * (1 + m2 * z2)
        dU = -2 * z + m2 * (2 * z - 4 * z2 * z)
        d2U = -2 + m2 * (2 - 12 * z2)
    elif M <= LARGE_M:
        s = math.sinh(M / 2)
        den = s * s
        U = np.sinh(M * (1 + z) / 2) * np.sinh(M * (1 - z) / 2) / den
        dU = -M * np.sinh(M * z) / (2 * den)
        d2U = -M * M * np.cosh(M * z) / (2 * den)
    else:
        az = np.abs(z)
        e2m = math.exp(-2 * M)
        # cosh(Mz)/cosh(M) and sinh(M|z|)/cosh(M)
        ratio_c = np.exp(M * (az - 1)) * (1 + np.exp(-2 * M * az)) / (1 + e2m)
        ratio_s = np.exp(M * (az - 1)) * (1 - np.exp(-2 * M * az)) / (1 + e2m)
        sech = math.exp(-M) * 2 / (1 + e2m)
        scale = 1 - sech
        U = (1 - ratio_c) / scale
        dU = -M * np.sign(z) * ratio_s / scale
        d2U = -M * M * ratio_c / scale
    # rounding can push the centreline a hair past 1
    U = np.clip(U, 0.0, 1.0)
    if U.ndim == 0:
        return float(U), float(dU), float(d2U)
    return U, dU, d2U


@dataclass(frozen=True)
class BaseFlow:
    """Profile evaluator bound to one value of M."""

    M: float

    def __post_init__(self):
        _check_M(self.M)

    def __call__(self, z):
        return eval_profile(self.M, z)

    def U(self, z):
        return eval_profile(self.M, z)[0]

    def dU(self, z):
        return eval_profile(self.M, z)[1]

    def d2U(self, z):
        return eval_profile(self.M, z)[2]

    def max_shear(self) -> float:
        """max |U'| on [-1, 1], attained at the walls."""
        return abs(eval_profile(self.M, 1.0)[1])


def profile_table(M: float, nodes) -> np.ndarray:
    """Rows ``(z, U, U', U'')``, one per node."""
    nodes = np.atleast_1d(np.asarray(nodes, dtype=float))
    if nodes.size == 0:
        raise UsageError("profile_table needs at least one node")
    U, dU, d2U = eval_profile(M, nodes)
    return np.column_stack([nodes, U, dU, d2U])


def write_profile_csv(table: np.ndarray, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["z", "U", "dU", "d2U"])
        for row in table:
            writer.writerow([format(float(v), ".17g") for v in row])
    return path
