"""Parametrized surfaces in H: horizontal normals, induced contact form,
horizontal flow and horizontal area.

A surface patch maps a parameter rectangle into H.  Partials come from an
analytic oracle when one is supplied and from central differences otherwise.
All patch evaluations are vectorized over numpy arrays of (u, v).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import CharacteristicPoint, DerivOracleFailure
from .heis import HVec, Point
from .logchart import LogPoint, phi, phi_partials
from .numerics import Rect, gauss_rect, graded_rect, rk4_step

PartialsFn = Callable[[object, object], tuple]


@dataclass(frozen=True)
class SurfacePatch:
    """A C^2 patch ``sigma(u, v) -> Point`` over an open rectangle.

    ``partials`` returns cartesian (x, y, t) components of sigma_u and sigma_v
    as two arrays of leading size 3.  Injectivity and regularity are the
    caller's business.
    """

    sigma: Callable[[object, object], Point]
    domain: Rect
    partials: Optional[PartialsFn] = None
    fd_step: Optional[float] = None
    scale: float = 1.0
    name: str = "patch"

    def __call__(self, u, v) -> Point:
        return self.sigma(u, v)

    def derivatives(self, u, v):
        if self.partials is not None:
            su, sv = self.partials(u, v)
        else:
            su, sv = self._fd_partials(u, v)
        su = np.asarray(su, dtype=float)
        sv = np.asarray(sv, dtype=float)
        if not (np.all(np.isfinite(su)) and np.all(np.isfinite(sv))):
            raise DerivOracleFailure(f"non-finite partials on {self.name}")
        return su, sv

    def _fd_partials(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        h = self.fd_step if self.fd_step is not None else 1e-5 * (1.0 + np.abs(u) + np.abs(v))
        pu = self.sigma(u + h, v).as_array() - self.sigma(u - h, v).as_array()
        pv = self.sigma(u, v + h).as_array() - self.sigma(u, v - h).as_array()
        return pu / (2 * h), pv / (2 * h)

    def with_fd(self, step: Optional[float] = None) -> "SurfacePatch":
        """Same patch with the analytic oracle dropped."""
        return SurfacePatch(self.sigma, self.domain, None, step, self.scale, self.name + "/fd")

    @property
    def char_eps(self) -> float:
        return 1e-10 * (1.0 + self.scale)


@dataclass(frozen=True)
class NormalData:
    n_h: HVec
    norm: object
    is_characteristic: object


def _normal_components(p: Point, su, sv):
    x, y = p.x, p.y
    jxy = su[0] * sv[1] - sv[0] * su[1]
    jyt = su[1] * sv[2] - sv[1] * su[2]
    jtx = su[2] * sv[0] - sv[2] * su[0]
    return jyt + 2.0 * y * jxy, jtx - 2.0 * x * jxy


def horizontal_normal(s: SurfacePatch, u, v, eps: Optional[float] = None) -> NormalData:
    """Horizontal part of sigma_u ^H sigma_v, in the frame {X, Y}."""
    su, sv = s.derivatives(u, v)
    n1, n2 = _normal_components(s(u, v), su, sv)
    nh = HVec(n1, n2)
    norm = nh.norm()
    eps = s.char_eps if eps is None else eps
    return NormalData(nh, norm, norm < eps)


def characteristic_test(s: SurfacePatch, u, v, eps: Optional[float] = None):
    return horizontal_normal(s, u, v, eps).is_characteristic


def _induced(p: Point, su, sv):
    x, y = p.x, p.y
    wu = su[2] + 2.0 * x * su[1] - 2.0 * y * su[0]
    wv = sv[2] + 2.0 * x * sv[1] - 2.0 * y * sv[0]
    return wu, wv


def induced_form(s: SurfacePatch, u, v):
    """Coefficients (omega_u, omega_v) of the pulled-back contact form."""
    su, sv = s.derivatives(u, v)
    return _induced(s(u, v), su, sv)


def horizontal_flow_field(s: SurfacePatch, u, v):
    """(beta, -alpha): the parameter-space field pushing forward to J nu.

    Raises :class:`CharacteristicPoint` where the horizontal normal vanishes.
    """
    su, sv = s.derivatives(u, v)
    p = s(u, v)
    n1, n2 = _normal_components(p, su, sv)
    norm = np.hypot(n1, n2)
    if np.any(norm < s.char_eps):
        raise CharacteristicPoint(f"characteristic point on {s.name} at ({u}, {v})")
    wu, wv = _induced(p, su, sv)
    return wv / norm, -wu / norm


def flow_pushforward(s: SurfacePatch, u, v) -> HVec:
    """sigma_*(flow vector) in frame components; horizontal and of unit length."""
    beta, malpha = horizontal_flow_field(s, u, v)
    su, sv = s.derivatives(u, v)
    vec = beta * su + malpha * sv
    return HVec(vec[0], vec[1])


@dataclass
class FlowLine:
    points: np.ndarray
    stopped: Optional[str] = None
    meta: dict = field(default_factory=dict)


def integrate_flow(s: SurfacePatch, start, n_steps: int, h: float = 1e-3) -> FlowLine:
    """Fixed-step RK4 along the horizontal flow starting at ``start``.

    The line ends early with ``stopped`` set to ``"characteristic"`` or
    ``"boundary"``; a characteristic start point raises instead.
    """
    u0, v0 = float(start[0]), float(start[1])
    horizontal_flow_field(s, u0, v0)

    def fld(y):
        return np.array(horizontal_flow_field(s, y[0], y[1]), dtype=float)

    pts = [(u0, v0)]
    y = np.array([u0, v0])
    for _ in range(n_steps):
        try:
            y_new = rk4_step(fld, y, h)
        except CharacteristicPoint:
            return FlowLine(np.array(pts), "characteristic")
        if not s.domain.contains(y_new[0], y_new[1]):
            return FlowLine(np.array(pts), "boundary")
        y = y_new
        pts.append((y[0], y[1]))
    return FlowLine(np.array(pts))


def is_horizontal_curve(s: SurfacePatch, samples, tol: float = 1e-8) -> bool:
    """True iff omega_S(du, dv) vanishes (within tol) at every ((u, v), (du, dv))."""
    for (u, v), (du, dv) in samples:
        wu, wv = induced_form(s, u, v)
        if abs(wu * du + wv * dv) > tol:
            return False
    return True


def horizontal_area(s: SurfacePatch, region: Optional[Rect] = None,
                    n: Optional[int] = None, rtol: float = 1e-8, graded: bool = False) -> float:
    """Integral of ||N^h|| over ``region`` (the whole domain by default).

    ``graded`` clusters nodes at the edges, for normals that degenerate there.
    """
    region = region or s.domain
    rule = graded_rect if graded else gauss_rect
    return rule(lambda u, v: horizontal_normal(s, u, v).norm, region, n, rtol=rtol)


def horizontal_area_integral(rho, s: SurfacePatch, region: Optional[Rect] = None,
                             n: Optional[int] = None, rtol: float = 1e-8,
                             graded: bool = False) -> float:
    """Integral of rho(sigma) ||N^h|| du dv over ``region``."""
    region = region or s.domain

    def integrand(u, v):
        return rho(s(u, v)) * horizontal_normal(s, u, v).norm

    rule = graded_rect if graded else gauss_rect
    return rule(integrand, region, n, rtol=rtol)


# -- built-in patches ---------------------------------------------------------

def plane_t0(domain: Rect = Rect(-1.0, 1.0, -1.0, 1.0)) -> SurfacePatch:
    """sigma(u, v) = (u + iv, 0); characteristic exactly at the origin."""

    def sigma(u, v):
        return Point(u + 1j * v, np.zeros_like(np.asarray(u, dtype=float)))

    def partials(u, v):
        one, zero = np.ones_like(u, dtype=float), np.zeros_like(u, dtype=float)
        return np.array([one, zero, zero]), np.array([zero, one, zero])

    return SurfacePatch(sigma, domain, partials, name="plane-t0")


def vertical_plane_y0(domain: Rect = Rect(-1.0, 1.0, -1.0, 1.0)) -> SurfacePatch:
    """sigma(u, v) = (u, v): the plane y = 0 with coordinate t = v."""

    def sigma(u, v):
        return Point(np.asarray(u, dtype=float) + 0j, np.asarray(v, dtype=float))

    def partials(u, v):
        one, zero = np.ones_like(u, dtype=float), np.zeros_like(u, dtype=float)
        return np.array([one, zero, zero]), np.array([zero, zero, one])

    return SurfacePatch(sigma, domain, partials, name="plane-y0")


def log_graph_patch(psifun: Callable, domain: Rect, name: str = "graph-psi") -> SurfacePatch:
    """sigma(xi, eta) = Phi(xi, psi(xi, eta), eta).

    ``psifun(xi, eta)`` returns the triple (psi, psi_xi, psi_eta).
    """

    def sigma(xi, eta):
        psi = psifun(xi, eta)[0]
        return phi(LogPoint(xi, psi, eta))

    def partials(xi, eta):
        psi, p_xi, p_eta = psifun(xi, eta)
        D = phi_partials(LogPoint(xi, psi, eta))
        return D[:, 0] + D[:, 1] * p_xi, D[:, 2] + D[:, 1] * p_eta

    scale = float(np.exp(0.5 * max(abs(domain.u0), abs(domain.u1))))
    return SurfacePatch(sigma, domain, partials, scale=scale, name=name)


def cone_patch(psi: float, domain: Rect) -> SurfacePatch:
    """The Heisenberg cone t = -tan(psi)|z|^2 as the leaf psi = const."""

    def psifun(xi, eta):
        zero = np.zeros_like(np.asarray(xi, dtype=float))
        return zero + psi, zero, zero

    return log_graph_patch(psifun, domain, name=f"cone[{psi:g}]")


def gauge_sphere_patch(xi0: float, eta_range=(-2 * np.pi / 3, 2 * np.pi / 3)) -> SurfacePatch:
    """sigma(psi, eta) = Phi(xi0, psi, eta): the gauge sphere of radius e^(xi0/2)."""
    domain = Rect(-np.pi / 2, np.pi / 2, *eta_range)

    def sigma(psi, eta):
        return phi(LogPoint(np.full_like(np.asarray(psi, dtype=float), xi0), psi, eta))

    def partials(psi, eta):
        D = phi_partials(LogPoint(np.full_like(np.asarray(psi, dtype=float), xi0), psi, eta))
        return D[:, 1], D[:, 2]

    return SurfacePatch(sigma, domain, partials, scale=float(np.exp(0.5 * abs(xi0))),
                        name=f"gauge-sphere[{xi0:g}]")
