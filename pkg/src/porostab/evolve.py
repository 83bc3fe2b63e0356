"""Linearized evolution of two-dimensional spanwise disturbances.

The streamfunction amplitude ``phi`` of a mode ``exp(i a x)`` obeys

    R d/dt (D^2 - a^2) phi = -i a R [U (D^2 - a^2) - U''] phi
                             + (D^2 - a^2)^2 phi - M^2 (D^2 - a^2) phi

on the clamped basis.  Time stepping is Crank-Nicolson for the dissipative
part and second-order Adams-Bashforth for advection (the first step uses
forward Euler for advection).  Energy is ``E = 1/2 (||u||^2 + ||w||^2)`` per
unit length, evaluated with exact Gram matrices; the nonlinear terms drop
out of the energy identity, so the same bound applies to the nonlinear
problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .baseflow import eval_profile
from .energystab import critical_point_energy_spanwise, energy_forms
from .errors import DomainError, NumericalError, UsageError
from .spectral import apply_bc, build_grid

IC_KINDS = ("optimal", "random", "user")
POINCARE = math.pi**2 / 2


@dataclass(frozen=True)
class EvolveConfig:
    M: float
    R: float
    a: float
    N: int = 48
    dt: float = 2.5e-4
    T: float = 5.0
    ic: str = "optimal"
    seed: int = 0
    sample_every: int = 10
    field: tuple | None = None  # interior values for ic="user"

    def __post_init__(self):
        if not self.dt > 0:
            raise UsageError(f"dt must be positive, got {self.dt!r}")
        if not self.T > self.dt:
            raise UsageError(f"horizon T must exceed dt, got T={self.T!r}, dt={self.dt!r}")
        if not (self.R > 0 and self.a > 0 and self.M >= 0):
            raise DomainError("need R > 0, a > 0, M >= 0")
        if self.ic not in IC_KINDS:
            raise UsageError(f"unknown initial condition {self.ic!r}; expected one of {IC_KINDS}")
        if self.ic == "user" and self.field is None:
            raise UsageError("ic='user' requires field")
        if self.sample_every < 1:
            raise UsageError("sample_every must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))


@dataclass(frozen=True)
class DecayBound:
    rate: float
    valid: bool

    def envelope(self, E0, t):
        return E0 * np.exp(-self.rate * np.asarray(t))


def decay_bound(M: float, R: float, R_E: float) -> DecayBound:
    """alpha = (1/R - 1/R_E)(pi^2/2 + 2 M^2); valid when R < R_E."""
    rate = (1.0 / R - 1.0 / R_E) * (POINCARE + 2 * M * M)
    return DecayBound(rate, R < R_E)


@dataclass
class EnergyTrace:
    t: np.ndarray
    E: np.ndarray
    R_E: float
    bound: DecayBound
    envelope: np.ndarray | None = None
    note: str = ""
    config: EvolveConfig | None = field(default=None, repr=False)

    @property
    def monotone(self) -> bool:
        dE = np.diff(self.E)
        return bool(np.all(dE <= 1e-10 * self.E[:-1]))

    @property
    def under_envelope(self) -> bool | None:
        if self.envelope is None:
            return None
        return bool(np.all(self.E <= self.envelope * (1 + 1e-8)))

    @property
    def max_amplification(self) -> float:
        return float(self.E.max() / self.E[0])


class SpanwiseOperator:
    """Discrete operators of the linearized spanwise problem at fixed (M, R, a, N)."""

    def __init__(self, M, R, a, N, flow=None):
        self.M, self.R, self.a, self.N = M, R, a, N
        self.recipe = rec = apply_bc(build_grid(N), "clamped")
        U, _, d2U = eval_profile(M, rec.z) if flow is None else flow(rec.z)
        I = np.eye(rec.size)
        self.lap = rec.D2 - a * a * I
        self.diss = rec.D4 - 2 * a * a * rec.D2 + a**4 * I - M * M * self.lap
        self.adv = -1j * a * (U[:, None] * self.lap - np.diag(d2U))
        self.forms = energy_forms(M, a, N, flow=flow)

    @property
    def generator(self) -> np.ndarray:
        """A in d(phi)/dt = A phi."""
        return np.linalg.solve(self.lap, self.adv + self.diss / self.R)

    def energy(self, phi) -> float:
        return 0.5 * float(np.real(np.conj(phi) @ self.forms.kinetic @ phi))

    def dt_max(self) -> float:
        """Advective step limit 1 / rho(lap^-1 adv) for the explicit part."""
        rho = np.abs(np.linalg.eigvals(np.linalg.solve(self.lap, self.adv))).max()
        return 1.0 / rho if rho > 0 else math.inf


class Stepper:
    """Crank-Nicolson / Adams-Bashforth-2 integrator."""

    def __init__(self, op: SpanwiseOperator, dt: float):
        if dt > op.dt_max():
            raise UsageError(f"dt={dt} exceeds the advective limit {op.dt_max():.3g}")
        self.op, self.dt = op, dt
        h = dt / (2 * op.R)
        self._lhs = sla.lu_factor(op.lap - h * op.diss)
        self._rhs = op.lap + h * op.diss

    def step(self, phi, adv_prev=None):
        """Advance one step; returns (phi_next, advective term at phi)."""
        adv_now = self.op.adv @ phi
        explicit = adv_now if adv_prev is None else 1.5 * adv_now - 0.5 * adv_prev
        nxt = sla.lu_solve(self._lhs, self._rhs @ phi + self.dt * explicit)
        return nxt, adv_now


def step_linearized(config: EvolveConfig, state, previous=None):
    """One step from ``state`` (interior values); ``previous`` enables AB2."""
    op = SpanwiseOperator(config.M, config.R, config.a, config.N)
    st = Stepper(op, config.dt)
    adv_prev = None if previous is None else op.adv @ np.asarray(previous)
    return st.step(np.asarray(state, dtype=complex), adv_prev)[0]


def growth_rate_mode(M: float, R: float, a: float, N: int = 48, flow=None):
    """Largest instantaneous energy growth rate dE/dt / E and its field.

    From the energy identity dE/dt = prod - diss / R with E = ||u||^2 / 2 the
    rate is the top eigenvalue of ``2 (P - D/R) c = s K c``.
    """
    forms = energy_forms(M, a, N, flow=flow)
    try:
        s, vec = sla.eigh(2 * (forms.production - forms.dissipation / R), forms.kinetic,
                          subset_by_index=[forms.kinetic.shape[0] - 1] * 2)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"growth-rate eigenproblem failed (M={M}, R={R}, a={a}): {exc}") from exc
    return float(s[-1]), vec[:, -1]


def growth_rate_bound(M: float, R: float, a: float, N: int = 48, flow=None) -> float:
    return growth_rate_mode(M, R, a, N, flow)[0]


def numerical_abscissa(A: np.ndarray, K: np.ndarray) -> float:
    """max d/dt log(x^H K x) / 2-free rate for dx/dt = A x in the K-norm.

    Returns the largest eigenvalue of ``(K A + A^H K) x = s K x``, i.e. the
    supremum of (d/dt E) / E with E = x^H K x / 2.
    """
    H = K @ A
    return float(sla.eigh(H + H.conj().T, K, eigvals_only=True)[-1])


def initial_condition(config: EvolveConfig, op: SpanwiseOperator):
    n = op.recipe.size
    if config.ic == "optimal":
        _, phi = growth_rate_mode(config.M, config.R, config.a, config.N)
    elif config.ic == "random":
        # smooth random field: decaying Chebyshev-like spectrum on (1 - z^2)^2 T_k
        rng = np.random.default_rng(config.seed)
        k = np.arange(8)
        coef = (rng.standard_normal(8) + 1j * rng.standard_normal(8)) / (1 + k) ** 2
        z = op.recipe.z
        phi = (1 - z**2) ** 2 * np.polynomial.chebyshev.chebval(z, coef)
    else:
        phi = np.asarray(config.field, dtype=complex)
        if phi.shape != (n,):
            raise UsageError(f"user field must have {n} interior values, got shape {phi.shape}")
    E0 = op.energy(phi)
    if not E0 > 0:
        raise DomainError("initial field has zero energy")
    return phi / math.sqrt(2 * E0)


_RE_CACHE: dict = {}


def energy_threshold(M: float) -> float:
    """Spanwise critical R_E(M), memoized per process."""
    key = float(M)
    if key not in _RE_CACHE:
        _RE_CACHE[key] = critical_point_energy_spanwise(key).R_c
    return _RE_CACHE[key]


def energy_trace(config: EvolveConfig, R_E: float | None = None, flow=None) -> EnergyTrace:
    """Integrate to T and sample E(t); attach the exponential envelope when R < R_E."""
    if R_E is None:
        R_E = energy_threshold(config.M)
    op = SpanwiseOperator(config.M, config.R, config.a, config.N, flow=flow)
    stepper = Stepper(op, config.dt)
    phi = initial_condition(config, op)
    ts, Es = [0.0], [op.energy(phi)]
    adv = None
    E_prev = Es[0]
    for n in range(1, config.n_steps + 1):
        phi, adv = stepper.step(phi, adv)
        E = op.energy(phi)
        if not math.isfinite(E) or E > 10 * E_prev:
            raise NumericalError(f"energy jumped from {E_prev:.3e} to {E:.3e} at step {n}; reduce dt")
        E_prev = E
        if n % config.sample_every == 0 or n == config.n_steps:
            ts.append(n * config.dt)
            Es.append(E)
    t = np.array(ts)
    E = np.array(Es)
    bound = decay_bound(config.M, config.R, R_E)
    if bound.valid:
        env, note = bound.envelope(E[0], t), ""
    else:
        env, note = None, f"R={config.R:g} >= R_E={R_E:g}: no monotone decay bound applies"
    return EnergyTrace(t, E, R_E, bound, env, note, config)
