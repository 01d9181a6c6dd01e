"""Quadrature rules, the Beta function and a fixed-step RK4 integrator."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import QuadratureNonConvergence

DEFAULT_QUAD_N = 64


def default_quad_n() -> int:
    """Quadrature order, overridable through ``HEISMOD_QUAD_N``."""
    raw = os.environ.get("HEISMOD_QUAD_N")
    if raw is None:
        return DEFAULT_QUAD_N
    n = int(raw)
    if n < 2:
        raise ValueError("HEISMOD_QUAD_N must be >= 2")
    return n


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def mapped(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights affinely moved from [-1, 1] to [lo, hi]."""
        half = 0.5 * (hi - lo)
        return lo + half * (self.nodes + 1.0), half * self.weights


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> QuadratureRule:
    nodes, weights = np.polynomial.legendre.leggauss(n)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadratureRule(nodes, weights, n)


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle (u0, u1) x (v0, v1)."""

    u0: float
    u1: float
    v0: float
    v1: float

    @property
    def area(self) -> float:
        return (self.u1 - self.u0) * (self.v1 - self.v0)

    def contains(self, u, v):
        return (u > self.u0) & (u < self.u1) & (v > self.v0) & (v < self.v1)

    def split_u(self, um: float) -> tuple["Rect", "Rect"]:
        return Rect(self.u0, um, self.v0, self.v1), Rect(um, self.u1, self.v0, self.v1)

    def grid(self, n: int, inclusive: bool = False):
        """Uniform n x n grid; interior midpoints unless ``inclusive``."""
        if inclusive:
            us = np.linspace(self.u0, self.u1, n)
            vs = np.linspace(self.v0, self.v1, n)
        else:
            us = self.u0 + (np.arange(n) + 0.5) * (self.u1 - self.u0) / n
            vs = self.v0 + (np.arange(n) + 0.5) * (self.v1 - self.v0) / n
        return np.meshgrid(us, vs, indexing="ij")


def _tensor_sum(fn, rect: Rect, n: int) -> float:
    rule = gauss_legendre(n)
    u, wu = rule.mapped(rect.u0, rect.u1)
    v, wv = rule.mapped(rect.v0, rect.v1)
    U, V = np.meshgrid(u, v, indexing="ij")
    vals = np.asarray(fn(U, V), dtype=float)
    return float(wu @ np.broadcast_to(vals, U.shape) @ wv)


def gauss_rect(fn: Callable, rect: Rect, n: int | None = None, rtol: float = 1e-6,
               atol: float = 1e-12, check: bool = True) -> float:
    """Tensor Gauss-Legendre integral of ``fn(U, V)`` over ``rect``.

    The integrand is evaluated on whole node grids, so it must accept arrays.
    With ``check`` the n-point value is compared against the 2n-point one and
    :class:`QuadratureNonConvergence` is raised when they disagree by more than
    ``rtol * |Q_2n| + atol``.  The 2n-point value is returned.
    """
    n = n or default_quad_n()
    if rect.area == 0.0:
        return 0.0
    if not check:
        return _tensor_sum(fn, rect, n)
    q_n = _tensor_sum(fn, rect, n)
    q_2n = _tensor_sum(fn, rect, 2 * n)
    if not np.isfinite(q_2n) or abs(q_n - q_2n) > rtol * abs(q_2n) + atol:
        raise QuadratureNonConvergence(
            f"tensor Gauss-Legendre: Q_{n}={q_n!r} vs Q_{2 * n}={q_2n!r}")
    return q_2n


def graded_nodes(lo: float, hi: float, n: int, power: int = 3):
    """Nodes/weights on (lo, hi) clustered at both ends.

    Each half is mapped by ``s = 1 - u**power`` so that integrable endpoint
    singularities of type (distance)^(-1 + 1/power) become smooth in ``u``.
    """
    rule = gauss_legendre(n)
    u, wu = rule.mapped(0.0, 1.0)
    half = 0.5 * (hi - lo)
    # distance from the endpoint, as a fraction of the half-width
    gap = u**power
    jac = power * u ** (power - 1) * half * wu
    right = hi - half * gap
    left = lo + half * gap
    nodes = np.concatenate([left, right])
    weights = np.concatenate([jac, jac])
    order = np.argsort(nodes)
    return nodes[order], weights[order]


def graded_integral(fn: Callable, lo: float, hi: float, n: int | None = None,
                    power: int = 3) -> float:
    """Integral over (lo, hi) of an integrand with mild endpoint singularities."""
    n = n or default_quad_n()
    x, w = graded_nodes(lo, hi, n, power)
    return float(np.dot(w, fn(x)))


def graded_rect(fn: Callable, rect: Rect, n: int | None = None, rtol: float = 1e-6,
                atol: float = 1e-12, power: int = 3) -> float:
    """Tensor version of :func:`graded_nodes`, for integrands singular on the rectangle's edges.

    Same n against 2n check as :func:`gauss_rect`; the 2n value is returned.
    """
    n = n or default_quad_n()
    if rect.area == 0.0:
        return 0.0

    def q(m):
        u, wu = graded_nodes(rect.u0, rect.u1, m, power)
        v, wv = graded_nodes(rect.v0, rect.v1, m, power)
        U, V = np.meshgrid(u, v, indexing="ij")
        return float(wu @ np.broadcast_to(np.asarray(fn(U, V), dtype=float), U.shape) @ wv)

    q_n, q_2n = q(n), q(2 * n)
    if not np.isfinite(q_2n) or abs(q_n - q_2n) > rtol * abs(q_2n) + atol:
        raise QuadratureNonConvergence(f"graded rule: Q_{n}={q_n!r} vs Q_{2 * n}={q_2n!r}")
    return q_2n


# -- singular psi-integrals -------------------------------------------------

def tail_cutoff(tol: float) -> float:
    """Smallest Z with 2 * int_Z^inf z^(-4/3) dz = 6 Z^(-1/3) <= tol."""
    return (6.0 / tol) ** 3


def line_integral_graded(g: Callable, zmax: float, scale: float = 1.0,
                         n: int = 24) -> float:
    """int_{-zmax}^{zmax} g(z) dz on geometrically graded panels.

    Panels are [0, scale] followed by doubling panels up to ``zmax`` on each
    side; ``g`` only needs to be smooth relative to panel size.
    """
    rule = gauss_legendre(n)
    edges = [0.0, scale]
    while edges[-1] < zmax:
        edges.append(min(2.0 * edges[-1], zmax))
    edges = np.asarray(edges)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    z = lo + half * (rule.nodes[None, :] + 1.0)
    w = half * rule.weights[None, :]
    return float(np.sum(w * (g(z) + g(-z))))


def tan_substitution_integral(k: float, tol: float = 1e-10) -> float:
    """int_R dz / (k^2 + z^2)^(2/3), truncated where the tail bound drops below tol.

    This is the psi-integral of the leaf-distortion of the radial stretch after
    z = tan(psi); analytically it equals k^(-1/3) B(1/2, 1/6).
    """
    if k <= 0:
        raise ValueError("k must be positive")
    zmax = tail_cutoff(tol)
    return line_integral_graded(lambda z: (k * k + z * z) ** (-2.0 / 3.0), zmax,
                                scale=min(k, 1.0))


# -- special functions ------------------------------------------------------

def beta_fn(x: float, y: float) -> float:
    """B(x, y) = exp(lgamma(x) + lgamma(y) - lgamma(x + y))."""
    if x <= 0 or y <= 0:
        raise ValueError("beta_fn needs positive arguments")
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


# -- ODE stepping -------------------------------------------------------------

def rk4_step(field: Callable, state: Sequence[float], h: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of an autonomous field."""
    y = np.asarray(state, dtype=float)
    k1 = np.asarray(field(y), dtype=float)
    k2 = np.asarray(field(y + 0.5 * h * k1), dtype=float)
    k3 = np.asarray(field(y + 0.5 * h * k2), dtype=float)
    k4 = np.asarray(field(y + h * k3), dtype=float)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
