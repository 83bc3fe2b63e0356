"""Linear (modal) stability: the Orr-Sommerfeld problem with Brinkman drag.

Normal modes ``psi = phi(z) exp(i a (x - c t))`` of the streamfunction of a
two-dimensional spanwise disturbance satisfy

    i a R [(U - c)(D^2 - a^2) - U''] phi = (D^2 - a^2)^2 phi - M^2 (D^2 - a^2) phi

with ``phi = phi' = 0`` at the walls.  ``Im(c) > 0`` means growth.  An oblique
wave (a, b) has the same equation with ``a^2 -> k^2 = a^2 + b^2`` inside the
Laplacians while the advective factor keeps ``a``.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq, minimize_scalar

from .baseflow import BaseFlow, eval_profile
from .errors import DiagnosticError, DomainError, NumericalError, UsageError
from .spectral import apply_bc, build_grid

STABLE = math.inf
"""Sentinel returned by :func:`neutral_Re` when no neutral point exists below the cap."""

R_CAP = 1e7
RESIDUAL_TOL = 1e-8
PERSISTENCE_TOL = 1e-4
CRITICAL_KINDS = ("linear", "energy-spanwise", "energy-3d", "energy-streamwise-restricted")


def default_order(M: float) -> int:
    """Grid order giving |R_c(N) - R_c(N+8)| / R_c < 1e-6 across M in [0, 10]."""
    if M <= 2:
        return 64
    if M <= 5:
        return 96
    return 160


@dataclass(frozen=True)
class OSProblem:
    M: float
    R: float
    a: float
    N: int | None = None
    b: float = 0.0

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"wavenumber a must be positive, got {self.a!r}")
        if not self.R > 0:
            raise DomainError(f"Reynolds number must be positive, got {self.R!r}")
        if not self.M >= 0:
            raise DomainError(f"M must be non-negative, got {self.M!r}")

    @property
    def order(self) -> int:
        return self.N if self.N is not None else default_order(self.M)


@dataclass
class EigenSolution:
    """Eigenvalues with optional eigenvectors (columns, full grid)."""

    values: np.ndarray
    N: int
    residuals: np.ndarray
    vectors: np.ndarray | None = None
    n_discarded: int = 0

    def __len__(self):
        return len(self.values)

    @property
    def leading(self):
        return self.values[0]


@dataclass
class CriticalPoint:
    kind: str
    M: float
    a_c: float
    R_c: float
    N: int
    convergence: float
    b_c: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def converged(self) -> bool:
        return bool(self.convergence < 1e-6)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["converged"] = self.converged
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "CriticalPoint":
        d = dict(d)
        d.pop("converged", None)
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _profile(M, z, flow):
    if flow is None:
        return eval_profile(M, z)
    return flow(z)


def os_operators(M, a, R, N, b=0.0, flow=None):
    """Matrices (A, B) of the pencil ``A phi = c B phi`` on clamped interior values."""
    rec = apply_bc(build_grid(N), "clamped")
    U, _, d2U = _profile(M, rec.z, flow)
    k2 = a * a + b * b
    I = np.eye(rec.size)
    lap = rec.D2 - k2 * I
    diss = rec.D4 - 2 * k2 * rec.D2 + k2 * k2 * I - M * M * lap
    A = U[:, None] * lap - np.diag(d2U) - diss / (1j * a * R)
    return A, lap


def _relative_residuals(A, B, vals, vecs):
    nA = np.linalg.norm(A, 1)
    nB = np.linalg.norm(B, 1)
    r = A @ vecs - (B @ vecs) * vals[None, :]
    return np.linalg.norm(r, axis=0) / ((nA + np.abs(vals) * nB) * np.linalg.norm(vecs, axis=0))


def _solve_os(M, a, R, N, b, flow, vectors):
    A, B = os_operators(M, a, R, N, b, flow)
    try:
        vals, vecs = sla.eig(np.linalg.solve(B, A))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Orr-Sommerfeld pencil failed (N={N}, a={a}, R={R}, M={M}): {exc}") from exc
    res = _relative_residuals(A, B, vals, vecs)
    return vals, vecs, res


def os_spectrum(p: OSProblem, vectors: bool = False, check_persistence: bool = False,
                flow=None) -> EigenSolution:
    """Wave speeds c sorted by descending Im(c).

    Modes with relative residual above 1e-8 are discarded; with
    ``check_persistence`` so are modes that move by more than 1e-4 when the
    grid order increases by 8.
    """
    N = p.order
    vals, vecs, res = _solve_os(p.M, p.a, p.R, N, p.b, flow, vectors)
    keep = np.isfinite(vals) & (res < RESIDUAL_TOL)
    if check_persistence:
        finer = _solve_os(p.M, p.a, p.R, N + 8, p.b, flow, False)[0]
        dist = np.min(np.abs(vals[:, None] - finer[None, :]), axis=1)
        keep &= dist <= PERSISTENCE_TOL
    if not keep.any():
        raise DiagnosticError(f"all Orr-Sommerfeld modes filtered (N={N}, a={p.a}, R={p.R}, M={p.M})",
                              spectrum=vals)
    order = np.argsort(-vals[keep].imag)
    rec = apply_bc(build_grid(N), "clamped")
    sol = EigenSolution(values=vals[keep][order], N=N, residuals=res[keep][order],
                        n_discarded=int((~keep).sum()))
    if vectors:
        sol.vectors = rec.reconstruct(vecs[:, keep][:, order])
    return sol


@lru_cache(maxsize=4096)
def _leading_ci(M, a, R, N, b):
    vals, _, res = _solve_os(M, a, R, N, b, None, False)
    vals = vals[np.isfinite(vals) & (res < RESIDUAL_TOL)]
    if vals.size == 0:
        raise DiagnosticError(f"no admissible mode (N={N}, a={a}, R={R}, M={M})")
    return float(vals.imag.max())


def growth_rate(M: float, a: float, R: float, N: int | None = None, b: float = 0.0) -> float:
    """Temporal growth rate a·max Im(c) of the least stable mode."""
    N = N or default_order(M)
    return a * _leading_ci(float(M), float(a), float(R), int(N), float(b))


def neutral_Re(M: float, a: float, N: int | None = None, b: float = 0.0, *,
               R_lo: float = 500.0, R_cap: float = R_CAP, n_scan: int = 32,
               guess: float | None = None, rtol: float = 1e-8) -> float:
    """Lowest R at which the leading mode at wavenumber ``a`` is neutral.

    A log-spaced scan on ``[R_lo, R_cap]`` brackets the first stable->unstable
    crossing, which is then refined by Brent's method.  Returns :data:`STABLE`
    when the wavenumber is stable throughout the scan.  ``guess`` short-cuts
    the scan with a tight bracket around a nearby known root.
    """
    if not a > 0:
        raise DomainError(f"wavenumber a must be positive, got {a!r}")
    N = N or default_order(M)

    def g(R):
        return _leading_ci(float(M), float(a), float(R), int(N), float(b))

    bracket = None
    if guess is not None and math.isfinite(guess):
        lo, hi = guess / 1.05, guess * 1.05
        if g(lo) < 0 < g(hi):
            bracket = (lo, hi)
    if bracket is None:
        Rs = np.geomspace(R_lo, R_cap, n_scan)
        prev = g(Rs[0])
        if prev > 0:
            raise DiagnosticError(f"unstable already at R_lo={R_lo} (M={M}, a={a}); lower R_lo")
        for R0, R1 in zip(Rs[:-1], Rs[1:]):
            cur = g(R1)
            if prev < 0 <= cur:
                bracket = (R0, R1)
                break
            prev = cur
    if bracket is None:
        return STABLE
    return float(brentq(g, *bracket, xtol=1e-12, rtol=rtol, maxiter=200))


def _golden_minimize(f, grid, values, tol):
    """Refine the minimum of a coarse scan by golden-section search."""
    i = int(np.nanargmin(values))
    if i == 0 or i == len(grid) - 1:
        raise DiagnosticError(f"minimum at the edge of the wavenumber scan (a={grid[i]:.4g}); widen the range")
    res = minimize_scalar(f, bracket=(grid[i - 1], grid[i], grid[i + 1]), method="golden",
                          tol=tol / grid[i])
    return float(res.x), float(res.fun)


def critical_point_linear(M: float, N: int | None = None, a_range=(0.3, 4.0), n_scan: int = 14,
                          a_tol: float = 1e-6) -> CriticalPoint:
    """Minimum over a of the neutral Reynolds number (two-dimensional modes only)."""
    if M > 10:
        warnings.warn(f"M={M} > 10: boundary layers are thin, check convergence with a larger N",
                      stacklevel=2)
    N = N or default_order(M)
    a_lo, a_hi = a_range
    if not (0 < a_lo < a_hi) or n_scan < 3:
        raise UsageError(f"invalid wavenumber range {a_range!r} / n_scan={n_scan}")
    grid = np.geomspace(a_lo, a_hi, n_scan)
    coarse = np.array([neutral_Re(M, a, N) for a in grid])
    if not np.isfinite(coarse).any():
        raise DiagnosticError(f"no linear instability found below R={R_CAP:g} for M={M}")
    state = {"guess": coarse[np.nanargmin(coarse)]}

    def f(a):
        r = neutral_Re(M, a, N, guess=state["guess"])
        if math.isfinite(r):
            state["guess"] = r
        return r

    a_c, R_c = _golden_minimize(f, grid, coarse, a_tol)
    R_fine = neutral_Re(M, a_c, N + 8, guess=R_c)
    return CriticalPoint("linear", float(M), a_c, R_c, int(N), abs(R_fine - R_c) / R_c)


def neutral_curve(M: float, a_values, N: int | None = None) -> np.ndarray:
    """Rows ``(M, a, Re_neutral)``; Re_neutral is inf where no neutral point exists."""
    return np.array([(M, a, neutral_Re(M, a, N)) for a in a_values], dtype=float)


def squire_equivalent_Re(M: float, a: float, b: float, N: int | None = None) -> float:
    """Neutral R of an oblique wave predicted from the 2D problem at k = |(a, b)|.

    The oblique equation is the 2D one at wavenumber k with ``a R -> k R_2D``.
    """
    k = math.hypot(a, b)
    r2 = neutral_Re(M, k, N)
    return r2 * k / a
