"""Monotone energy stability of the Brinkman channel.

The energy of a disturbance decays monotonically for every admissible field
when ``1/R`` exceeds

    m = max  -(U' w, u) / (||grad u||^2 + M^2 ||u||^2)

over solenoidal, no-slip, periodic fields.  Three solvers are provided:

* :func:`orr_energy_eigen`, the generalized Orr equation for 2D spanwise
  fields, collocated on the clamped streamfunction basis;
* :func:`orr_energy_ritz`, the same maximum as a Hermitian-definite
  Rayleigh-Ritz pencil on the same trial space (cross-check route);
* :func:`energy3d_solve`, the full Euler-Lagrange system for a wave (a, b)
  in primitive variables with the multiplier kept as an unknown.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .baseflow import BaseFlow, eval_profile
from .errors import DiagnosticError, DomainError, NumericalError, UsageError
from .linstab import CriticalPoint, EigenSolution, _golden_minimize
from .spectral import apply_bc, bary_diff, build_grid, gauss_rule

REAL_TOL = 1e-8
INF_CAP = 1e12


def default_order(M: float) -> int:
    if M <= 5:
        return 64
    return 96


def production_bound(M: float) -> float:
    """A priori bound on m: max|U'| / (2 (pi^2/4 + M^2)).

    Follows from |(U'w, u)| <= max|U'| (||u||^2 + ||w||^2) / 2 and the
    Dirichlet Poincare inequality.  Eigenvalues above it are spurious.
    """
    return BaseFlow(M).max_shear() / (2 * (math.pi**2 / 4 + M * M))


@dataclass(frozen=True)
class OrrEnergyProblem:
    M: float
    a: float
    N: int | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise DomainError(f"wavenumber a must be positive, got {self.a!r}")
        if not self.M >= 0:
            raise DomainError(f"M must be non-negative, got {self.M!r}")

    @property
    def order(self):
        return self.N if self.N is not None else default_order(self.M)


@dataclass(frozen=True)
class Energy3DProblem:
    M: float
    a: float
    b: float
    N: int | None = None

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
            raise DomainError(f"need (a, b) != (0, 0) with a, b >= 0, got ({self.a}, {self.b})")
        if not self.M >= 0:
            raise DomainError(f"M must be non-negative, got {self.M!r}")

    @property
    def order(self):
        return self.N if self.N is not None else default_order(self.M)


@dataclass(frozen=True)
class RayleighQuotient:
    numerator: float
    denominator: float

    @property
    def value(self) -> float:
        return self.numerator / self.denominator


# --------------------------------------------------------------------------
# two-dimensional spanwise problem

def orr_energy_operators(M, a, N):
    """Collocation pair (L, P) with ``P phi = m L phi``.

    L is the dissipation ``(D^2-a^2)^2 - M^2 (D^2-a^2)`` and
    P the production ``-(i a / 2)(U'' + 2 U' D)``.
    """
    rec = apply_bc(build_grid(N), "clamped")
    _, dU, d2U = eval_profile(M, rec.z)
    I = np.eye(rec.size)
    lap = rec.D2 - a * a * I
    L = rec.D4 - 2 * a * a * rec.D2 + a**4 * I - M * M * lap
    P = -0.5j * a * (np.diag(d2U) + 2 * dU[:, None] * rec.D1)
    return L, P


@dataclass(frozen=True, eq=False)
class EnergyForms:
    """Hermitian Gram matrices on clamped interior values of the streamfunction.

    ``c^H K c`` is ||u||^2, ``c^H D c`` the dissipation and ``c^H P c`` the
    production -(U'w, u), all per unit length in x, up to the common factor 1/2
    from averaging over a period.
    """

    kinetic: np.ndarray
    dissipation: np.ndarray
    production: np.ndarray


def energy_forms(M, a, N, flow=None, nquad=None) -> EnergyForms:
    rec = apply_bc(build_grid(N), "clamped")
    zq, wq = gauss_rule(nquad or 2 * N + 8)
    f0, f1, f2 = rec.eval_matrices(zq, 2)
    if flow is None:
        _, dU, _ = eval_profile(M, zq)
    else:
        _, dU, _ = flow(zq)
    g00 = f0.T @ (wq[:, None] * f0)
    g11 = f1.T @ (wq[:, None] * f1)
    g22 = f2.T @ (wq[:, None] * f2)
    K = g11 + a * a * g00
    D = g22 + 2 * a * a * g11 + a**4 * g00 + M * M * K
    H = 1j * a * (f1.T @ ((wq * dU)[:, None] * f0))
    P = 0.5 * (H + H.conj().T)
    return EnergyForms(K, D, P)


def _real_filter(m, bound):
    return np.isfinite(m) & (np.abs(m.imag) <= REAL_TOL * np.abs(m)) & (np.abs(m) > 0) \
        & (np.abs(m.real) <= bound * (1 + 1e-6))


def orr_energy_eigen(p: OrrEnergyProblem, vectors: bool = False) -> EigenSolution:
    """Energy Reynolds numbers R_E = 1/m of the generalized Orr equation.

    Direct pencil, post-hoc realness filter.  Values are sorted by |R_E| and
    come in +- pairs.
    """
    N = p.order
    L, P = orr_energy_operators(p.M, p.a, N)
    try:
        m, vecs = sla.eig(np.linalg.solve(L, P))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"Orr energy pencil failed (N={N}, a={p.a}, M={p.M}): {exc}") from exc
    keep = _real_filter(m, production_bound(p.M))
    if not np.any(keep & (m.real > 0)):
        raise DiagnosticError(f"no positive real energy eigenvalue (N={N}, a={p.a}, M={p.M})", spectrum=m)
    mk = m[keep]
    RE = 1.0 / mk.real
    order = np.argsort(np.abs(RE), kind="stable")
    sol = EigenSolution(values=RE[order], N=N, residuals=np.abs(mk.imag[order]) / np.abs(mk[order]),
                        n_discarded=int((~keep).sum()))
    if vectors:
        rec = apply_bc(build_grid(N), "clamped")
        sol.vectors = rec.reconstruct(vecs[:, keep][:, order])
    return sol


def orr_energy_ritz(p: OrrEnergyProblem) -> EigenSolution:
    """Symmetric route: Hermitian-definite pencil ``P c = m D c`` on exact Gram matrices."""
    N = p.order
    forms = energy_forms(p.M, p.a, N)
    m = sla.eigh(forms.production, forms.dissipation, eigvals_only=True)
    keep = np.abs(m) > 1e-14 * np.abs(m).max()
    RE = 1.0 / m[keep]
    order = np.argsort(np.abs(RE), kind="stable")
    return EigenSolution(values=RE[order], N=N, residuals=np.zeros(order.size),
                         n_discarded=int((~keep).sum()))


def smallest_positive(sol: EigenSolution) -> float:
    pos = sol.values[sol.values > 0]
    if pos.size == 0:
        raise DiagnosticError("no positive eigenvalue", spectrum=sol.values)
    return float(pos.min())


def energy_RE(M: float, a: float, N: int | None = None, route: str = "collocation") -> float:
    """Smallest positive R_E at wavenumber a."""
    p = OrrEnergyProblem(M, a, N)
    if route == "collocation":
        return smallest_positive(orr_energy_eigen(p))
    if route == "ritz":
        return smallest_positive(orr_energy_ritz(p))
    raise UsageError(f"unknown route {route!r}")


def default_a_range(M: float) -> tuple:
    # the critical wavenumber grows like M once the drag dominates
    return (0.05, max(6.0, 2 * M + 2))


def critical_point_energy_spanwise(M: float, N: int | None = None, a_range=None,
                                   n_scan: int = 40, a_tol: float = 1e-6,
                                   route: str = "collocation") -> CriticalPoint:
    """Minimum over a of the spanwise energy threshold R_E(a)."""
    a_lo, a_hi = a_range if a_range is not None else default_a_range(M)
    if not (0 < a_lo < a_hi) or n_scan < 3:
        raise UsageError(f"empty or invalid wavenumber range {a_range!r} (n_scan={n_scan})")
    N = N or default_order(M)
    grid = np.geomspace(a_lo, a_hi, n_scan)
    coarse = np.array([energy_RE(M, a, N, route) for a in grid])
    a_c, R_c = _golden_minimize(lambda a: energy_RE(M, a, N, route), grid, coarse, a_tol)
    R_fine = energy_RE(M, a_c, N + 8, route)
    return CriticalPoint("energy-spanwise", float(M), a_c, R_c, int(N), abs(R_fine - R_c) / R_c,
                         extra={"route": route})


def spanwise_fields(recipe, phi_full, a):
    """(u, v, w) amplitudes on the grid nodes of the streamfunction mode ``phi``."""
    phi_int = np.asarray(phi_full)[1:-1]
    _, f1 = recipe.eval_matrices(recipe.grid.z, 1)
    u = f1 @ phi_int
    w = -1j * a * np.asarray(phi_full)
    return u, np.zeros_like(u), w


# --------------------------------------------------------------------------
# three-dimensional Euler-Lagrange problem

@dataclass
class Energy3DResult:
    m: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    p: np.ndarray
    residual: float
    n_discarded: int = 0


def energy3d_operators(M, a, b, N):
    """Pencil (A, B) in the unknowns (u, v, w, lambda) on interior nodes.

    Rows are the three momentum-like equations

        -U' w - i a lambda = m S u,   -i b lambda = m S v,   -U' u - D lambda = m S w

    with ``S = 2(M^2 - D^2 + k^2)``, and continuity ``i a u + i b v + D w = 0``
    (zero row of B).  The multiplier lives on the interior nodes, i.e. one
    polynomial degree below the velocity.
    """
    g = build_grid(N)
    rec = apply_bc(g, "dirichlet")
    n = rec.size
    _, dU, _ = eval_profile(M, rec.z)
    k2 = a * a + b * b
    I = np.eye(n)
    Z = np.zeros((n, n))
    S = 2 * (M * M * I - rec.D2 + k2 * I)
    Dp = bary_diff(rec.z)
    Us = np.diag(dU)
    A = np.block([[Z, Z, -Us, -1j * a * I],
                  [Z, Z, Z, -1j * b * I],
                  [-Us, Z, Z, -Dp],
                  [1j * a * I, 1j * b * I, rec.D1, Z]])
    B = np.block([[S, Z, Z, Z], [Z, S, Z, Z], [Z, Z, S, Z], [Z, Z, Z, Z]])
    return A, B


def energy3d_solve(p: Energy3DProblem) -> Energy3DResult:
    """Largest finite real m of the constrained pencil together with its field."""
    N = p.order
    A, B = energy3d_operators(p.M, p.a, p.b, N)
    try:
        w_, vr = sla.eig(A, B, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalError(f"3D energy pencil failed (N={N}, a={p.a}, b={p.b}, M={p.M}): {exc}") from exc
    with np.errstate(invalid="ignore"):
        finite = np.isfinite(w_) & (np.abs(w_) < INF_CAP)
    w_ = np.where(finite, w_, 0)
    keep = finite & _real_filter(w_, production_bound(p.M))
    nA = np.linalg.norm(A, 1)
    nB = np.linalg.norm(B, 1)
    cand = np.flatnonzero(keep & (w_.real > 0))
    best, best_res = None, None
    for j in cand[np.argsort(-w_.real[cand])]:
        x = vr[:, j]
        res = np.linalg.norm(A @ x - w_[j] * (B @ x)) / ((nA + abs(w_[j]) * nB) * np.linalg.norm(x))
        if res < 1e-8:
            best, best_res = j, res
            break
    if best is None:
        raise DiagnosticError(f"no admissible 3D energy eigenvalue (N={N}, a={p.a}, b={p.b}, M={p.M})",
                              spectrum=w_)
    n = N - 2
    x = vr[:, best]
    x = x / x[np.argmax(np.abs(x[: 3 * n]))]
    rec = apply_bc(build_grid(N), "dirichlet")
    u, v, w = (rec.reconstruct(x[i * n:(i + 1) * n]) for i in range(3))
    return Energy3DResult(float(w_[best].real), u, v, w, x[3 * n:], float(best_res),
                          n_discarded=int((~keep).sum()))


def energy3d_max(p: Energy3DProblem) -> float:
    return energy3d_solve(p).m


@dataclass
class SquireReport:
    M: float
    table: list  # rows (a, b, m)
    passed: bool
    offending: list = field(default_factory=list)
    best: tuple | None = None
    rtol: float = 1e-6

    @property
    def status(self) -> str:
        return "PASSED" if self.passed else "FAILED"

    def rows(self):
        return [(self.M, a, b, m) for a, b, m in self.table]


def verify_squire_energy(M: float, a_grid, b_grid, N: int | None = None, rtol: float = 1e-6,
                         workers: int | None = None) -> SquireReport:
    """Tabulate the 3D maximum over an (a, b) grid and test that b = 0 wins.

    Passes when no b != 0 entry exceeds the largest b = 0 entry by more than
    ``rtol`` relative.  The full table is kept for audit either way.
    """
    a_grid = [float(a) for a in a_grid]
    b_grid = [float(b) for b in b_grid]
    if not a_grid or not b_grid:
        raise UsageError("a_grid and b_grid must be non-empty")
    if 0.0 not in b_grid:
        raise UsageError("b_grid must include 0")
    pairs = [(a, b) for a in a_grid for b in b_grid]

    def one(ab):
        return energy3d_max(Energy3DProblem(M, ab[0], ab[1], N))

    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            ms = list(pool.map(one, pairs))
    else:
        ms = [one(ab) for ab in pairs]
    table = [(a, b, m) for (a, b), m in zip(pairs, ms)]
    span = max(m for a, b, m in table if b == 0.0)
    offending = [(a, b, m) for a, b, m in table if b != 0.0 and m > span * (1 + rtol)]
    best = max(table, key=lambda r: r[2])
    return SquireReport(float(M), table, not offending, offending, best, rtol)


def critical_point_energy_3d(M: float, a_grid, b_grid, N: int | None = None) -> CriticalPoint:
    """Largest 3D maximum m over an (a, b) grid, reported as R_E = 1/m (grid resolution only)."""
    rep = verify_squire_energy(M, a_grid, b_grid, N)
    a, b, m = rep.best
    N = N or default_order(M)
    m_fine = energy3d_max(Energy3DProblem(M, a, b, N + 8))
    return CriticalPoint("energy-3d", float(M), a, 1.0 / m, int(N), abs(m_fine - m) / m, b_c=b)


# --------------------------------------------------------------------------

def rayleigh_quotient(grid, M: float, u, v, w, a: float, b: float = 0.0, flow=None) -> RayleighQuotient:
    """Energy production over dissipation for a normal-mode field.

    ``u, v, w`` are complex amplitudes on the grid nodes of a mode
    ``exp(i(a x + b y))``.  Integrals use Clenshaw-Curtis quadrature and
    derivatives the grid's D1.
    """
    fields = [np.asarray(f, dtype=complex) for f in (u, v, w)]
    scale = max(np.abs(f).max() for f in fields)
    if scale == 0:
        raise DomainError("field is identically zero")
    for f in fields:
        if max(abs(f[0]), abs(f[-1])) > 1e-8 * scale:
            raise DomainError("field violates the no-slip condition at the walls")
    U = eval_profile(M, grid.z) if flow is None else flow(grid.z)
    k2 = a * a + b * b
    u, v, w = fields
    num = -np.real(grid.integrate(U[1] * w * np.conj(u)))
    den = 0.0
    for f in fields:
        df = grid.D1 @ f
        den += np.real(grid.integrate(np.abs(df) ** 2 + (k2 + M * M) * np.abs(f) ** 2))
    if not den > 0:
        raise DomainError("non-positive dissipation; field not admissible")
    return RayleighQuotient(float(num), float(den))
