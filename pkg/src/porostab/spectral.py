"""Chebyshev-Gauss-Lobatto collocation on [-1, 1].

Node ordering is fixed: ``z[0] = 1`` down to ``z[N-1] = -1``.

Two boundary recipes act on the interior unknowns ``f[1:-1]``:

``dirichlet``
    f(+-1) = 0.  Boundary rows and columns are dropped.
``clamped``
    f(+-1) = f'(+-1) = 0.  Trial functions are ``f = (1 - z^2) q`` with q the
    degree N-1 interpolant through the nodes and ``q(+-1) = 0``, so every
    reconstructed function has double roots at both walls.  Derivative
    matrices of f act through q and the product rule; D4 is assembled from
    them directly rather than as D2 @ D2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import legendre

from .errors import UsageError

MIN_ORDER = 8
BC_KINDS = ("dirichlet", "clamped")


def cheb_nodes(N: int) -> np.ndarray:
    # sine form: exactly antisymmetric, exact zero at the centre for odd N
    return np.sin(np.pi * (N - 1 - 2 * np.arange(N)) / (2 * (N - 1)))


def cheb_diff(N: int) -> np.ndarray:
    """First-derivative collocation matrix (negative-sum diagonal)."""
    z = cheb_nodes(N)
    c = np.ones(N)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(N)
    dz = z[:, None] - z[None, :]
    D = np.outer(c, 1.0 / c) / (dz + np.eye(N))
    D -= np.diag(D.sum(axis=1))
    return D


def bary_diff(x) -> np.ndarray:
    """Differentiation matrix of the interpolant through arbitrary distinct nodes."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    dx = x[:, None] - x[None, :]
    np.fill_diagonal(dx, 1.0)
    # log-scaled weights keep the products finite for large n
    logw = -np.log(np.abs(dx)).sum(axis=1)
    sign = np.prod(np.sign(dx), axis=1)
    w = sign * np.exp(logw - logw.max())
    D = (w[None, :] / w[:, None]) / dx
    np.fill_diagonal(D, 0.0)
    D -= np.diag(D.sum(axis=1))
    return D


def clenshaw_curtis(N: int) -> np.ndarray:
    """Clenshaw-Curtis weights on the N Gauss-Lobatto nodes."""
    n = N - 1
    theta = np.pi * np.arange(N) / n
    w = np.zeros(N)
    v = np.ones(n - 1)
    inner = slice(1, n)
    if n % 2 == 0:
        w[0] = w[n] = 1.0 / (n * n - 1)
        for k in range(1, n // 2):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
        v -= np.cos(n * theta[inner]) / (n * n - 1)
    else:
        w[0] = w[n] = 1.0 / (n * n)
        for k in range(1, (n - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * theta[inner]) / (4 * k * k - 1)
    w[inner] = 2 * v / n
    return w


@dataclass(frozen=True, eq=False)
class SpectralGrid:
    N: int
    z: np.ndarray
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray
    D4: np.ndarray
    weights: np.ndarray

    def integrate(self, f) -> complex:
        return self.weights @ np.asarray(f)


@lru_cache(maxsize=32)
def build_grid(N: int) -> SpectralGrid:
    if int(N) != N or N < MIN_ORDER:
        raise UsageError(f"grid order must be an integer >= {MIN_ORDER}, got {N!r}")
    N = int(N)
    D1 = cheb_diff(N)
    D2 = D1 @ D1
    D3 = D2 @ D1
    D4 = D2 @ D2
    arrays = [cheb_nodes(N), D1, D2, D3, D4, clenshaw_curtis(N)]
    for arr in arrays:
        arr.setflags(write=False)
    return SpectralGrid(N, *arrays)


@dataclass(frozen=True, eq=False)
class BCRecipe:
    """Reduced operators acting on interior nodal values.

    ``D1 .. D4`` map interior values of f to interior values of its
    derivatives.  ``reconstruct`` scatters interior values onto the full grid.
    """

    kind: str
    grid: SpectralGrid
    D1: np.ndarray
    D2: np.ndarray
    D3: np.ndarray
    D4: np.ndarray
    _vinv: np.ndarray = field(repr=False)

    @property
    def z(self) -> np.ndarray:
        return self.grid.z[1:-1]

    @property
    def size(self) -> int:
        return self.grid.N - 2

    def reconstruct(self, f_int) -> np.ndarray:
        f_int = np.asarray(f_int)
        full = np.zeros((self.grid.N,) + f_int.shape[1:], dtype=f_int.dtype)
        full[1:-1] = f_int
        return full

    def eval_matrices(self, points, nder: int = 2) -> list[np.ndarray]:
        """Matrices taking interior values to f, f', ..., f^(nder) at ``points``.

        Exact for the polynomial trial space, so Gram matrices built on a
        sufficiently fine Gauss grid integrate without quadrature error.
        """
        points = np.asarray(points, dtype=float)
        N = self.grid.N
        T = C.chebvander(points, N - 1)
        eye = np.eye(N)
        # k-th derivative of the interpolant through all N nodal values
        q = []
        for k in range(nder + 1):
            ck = np.vstack([C.chebder(eye, k), np.zeros((k, N))]) if k else eye
            q.append(T @ ck @ self._vinv)
        if self.kind == "dirichlet":
            return [m[:, 1:-1] for m in q]
        s = np.zeros(N)
        zi = self.grid.z[1:-1]
        s[1:-1] = 1.0 / (1.0 - zi**2)
        q = [m * s[None, :] for m in q]
        g = [1 - points**2, -2 * points, -2 + 0 * points]
        out = []
        for k in range(nder + 1):
            # Leibniz rule for (1 - z^2) q, which has at most two non-zero terms
            acc = np.zeros_like(q[0])
            for j in range(min(k, 2) + 1):
                acc += _binom(k, j) * g[j][:, None] * q[k - j]
            out.append(acc[:, 1:-1])
        return out


def _binom(n, k):
    from math import comb
    return comb(n, k)


@lru_cache(maxsize=64)
def apply_bc(grid: SpectralGrid, kind: str) -> BCRecipe:
    if kind not in BC_KINDS:
        raise UsageError(f"unknown boundary recipe {kind!r}; expected one of {BC_KINDS}")
    N = grid.N
    inner = slice(1, -1)
    vinv = np.linalg.inv(C.chebvander(grid.z, N - 1))
    if kind == "dirichlet":
        ops = [grid.D1, grid.D2, grid.D3, grid.D4]
        ops = [D[inner, inner].copy() for D in ops]
        return BCRecipe(kind, grid, *ops, _vinv=vinv)
    z = grid.z
    s = np.zeros(N)
    s[1:-1] = 1.0 / (1.0 - z[1:-1] ** 2)
    S = np.diag(s)
    one_m = np.diag(1 - z**2)
    Z = np.diag(z)
    I = np.eye(N)
    D1, D2, D3, D4 = grid.D1, grid.D2, grid.D3, grid.D4
    P1 = (one_m @ D1 - 2 * Z) @ S
    P2 = (one_m @ D2 - 4 * Z @ D1 - 2 * I) @ S
    P3 = (one_m @ D3 - 6 * Z @ D2 - 6 * D1) @ S
    P4 = (one_m @ D4 - 8 * Z @ D3 - 12 * D2) @ S
    ops = [P[inner, inner].copy() for P in (P1, P2, P3, P4)]
    return BCRecipe(kind, grid, *ops, _vinv=vinv)


def gauss_rule(n: int):
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    return legendre.leggauss(n)
