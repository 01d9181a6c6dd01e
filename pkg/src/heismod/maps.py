"""Contact maps of H: horizontal derivatives, contact residuals, Beltrami
data and the way such maps act on horizontal normals of surfaces.

A :class:`ContactMap` always has a forward evaluation.  Derivatives come from
an analytic cartesian Jacobian when one is attached; otherwise they are
central differences along the group flows p * (+-h, 0), p * (+-ih, 0) and
p * (0, +-h), which differentiate along the left-invariant fields X, Y, T.
Maps that preserve the vertical axis may also carry their expression in
logarithmic coordinates, with or without an analytic Jacobian.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import CharacteristicPoint, DegenerateDerivative, DerivOracleFailure
from .heis import HVec, Point, group_mul
from .logchart import LogPoint, phi
from .numerics import Rect
from .surfaces import NormalData, SurfacePatch, _induced, horizontal_normal


@dataclass(frozen=True)
class ContactMap:
    name: str
    fwd: Callable[[Point], Point]
    jac: Optional[Callable[[Point], np.ndarray]] = None
    log_fwd: Optional[Callable[[LogPoint], LogPoint]] = None
    log_jac: Optional[Callable[[LogPoint], np.ndarray]] = None
    fd_step: float = 1e-5

    def __call__(self, p: Point) -> Point:
        return self.fwd(p)

    def with_fd(self, step: Optional[float] = None) -> "ContactMap":
        """Copy without analytic oracles, so every derivative is a finite difference."""
        return replace(self, name=self.name + "/fd", jac=None, log_jac=None,
                       fd_step=self.fd_step if step is None else step)

    def jacobian(self, p: Point) -> np.ndarray:
        """Cartesian Jacobian d(x', y', t')/d(x, y, t), shape (..., 3, 3)."""
        if self.jac is not None:
            J = np.asarray(self.jac(p), dtype=float)
        else:
            h = self.fd_step
            base = p.as_array()
            cols = []
            for i in range(3):
                e = np.zeros((3,) + (1,) * (base.ndim - 1))
                e[i] = h
                fp = self.fwd(Point.from_array(base + e)).as_array()
                fm = self.fwd(Point.from_array(base - e)).as_array()
                cols.append((fp - fm) / (2 * h))
            J = np.moveaxis(np.stack(cols, axis=1), (0, 1), (-2, -1))
        if not np.all(np.isfinite(J)):
            raise DerivOracleFailure(f"non-finite Jacobian for {self.name}")
        return J


@dataclass(frozen=True)
class Jet:
    """Derivatives of f_I (complex) and f_3 (real) along X, Y and T."""

    XfI: object
    YfI: object
    TfI: object
    Xf3: object
    Yf3: object
    Tf3: object

    @property
    def ZfI(self):
        return 0.5 * (self.XfI - 1j * self.YfI)

    @property
    def ZbfI(self):
        return 0.5 * (self.XfI + 1j * self.YfI)

    @property
    def Zf3(self):
        return 0.5 * (self.Xf3 - 1j * self.Yf3)

    @property
    def Zbf3(self):
        return 0.5 * (self.Xf3 + 1j * self.Yf3)


def jet(f: ContactMap, p: Point) -> Jet:
    if f.jac is not None:
        J = f.jacobian(p)
        x, y = p.x, p.y
        frame = [(1.0, 0.0, 2.0 * y), (0.0, 1.0, -2.0 * x), (0.0, 0.0, 1.0)]
        out = []
        for v in frame:
            d = sum(J[..., :, i] * np.asarray(v[i])[..., None] for i in range(3))
            out.append((d[..., 0] + 1j * d[..., 1], d[..., 2]))
    else:
        h = f.fd_step
        steps = [Point(h + 0j, 0.0), Point(1j * h, 0.0), Point(0j, h)]
        out = []
        for s in steps:
            fp = f(group_mul(p, s))
            fm = f(group_mul(p, Point(-s.z, -s.t)))
            out.append(((fp.z - fm.z) / (2 * h), np.real(fp.t - fm.t) / (2 * h)))
    vals = [v for pair in out for v in pair]
    if not all(np.all(np.isfinite(v)) for v in vals):
        raise DerivOracleFailure(f"non-finite derivatives for {f.name}")
    (XfI, Xf3), (YfI, Yf3), (TfI, Tf3) = out
    return Jet(XfI, YfI, TfI, Xf3, Yf3, Tf3)


def horiz_derivatives(f: ContactMap, p: Point):
    """(Z f_I, Zbar f_I) at p."""
    j = jet(f, p)
    return j.ZfI, j.ZbfI


def contact_residuals(f: ContactMap, p: Point):
    """Left-hand sides of the three contact equations.

    r1 = conj(f_I) Z f_I - f_I Z conj(f_I) + i Z f_3
    r2 = f_I Zbar conj(f_I) - conj(f_I) Zbar f_I - i Zbar f_3
    lam = -i (conj(f_I) T f_I - f_I T conj(f_I) + i T f_3)
    """
    j = jet(f, p)
    fI = f(p).z
    Z_conj = np.conj(j.ZbfI)  # Z applied to conj(f_I)
    Zb_conj = np.conj(j.ZfI)
    r1 = np.conj(fI) * j.ZfI - fI * Z_conj + 1j * j.Zf3
    r2 = fI * Zb_conj - np.conj(fI) * j.ZbfI - 1j * j.Zbf3
    lam = -1j * (np.conj(fI) * j.TfI - fI * np.conj(j.TfI) + 1j * j.Tf3)
    return r1, r2, np.real(lam)


@dataclass(frozen=True)
class BeltramiData:
    mu: object
    K: object
    lam: object
    jac: object


def beltrami(f: ContactMap, p: Point) -> BeltramiData:
    zf, zbf = horiz_derivatives(f, p)
    scale = 1.0 + np.abs(f(p).z)
    if np.any(np.abs(zf) <= 1e-12 * scale):
        raise DegenerateDerivative(f"Z f_I vanishes for {f.name}")
    mu = zbf / zf
    amu = np.abs(mu)
    if np.any(amu >= 1.0):
        raise DegenerateDerivative(f"|mu| >= 1 for {f.name}: not orientation preserving")
    lam = np.abs(zf) ** 2 - np.abs(zbf) ** 2
    return BeltramiData(mu, (1.0 + amu) / (1.0 - amu), lam, lam * lam)


# -- maps acting on surfaces ---------------------------------------------------

def compose_patch(f: ContactMap, s: SurfacePatch) -> SurfacePatch:
    """The patch f o sigma; partials by the chain rule through f's Jacobian."""

    def sigma(u, v):
        return f(s(u, v))

    def partials(u, v):
        su, sv = s.derivatives(u, v)
        J = f.jacobian(s(u, v))
        fu = np.einsum("...ij,j...->i...", J, su)
        fv = np.einsum("...ij,j...->i...", J, sv)
        return fu, fv

    return SurfacePatch(sigma, s.domain, partials, scale=s.scale, name=f"{f.name}o{s.name}")


def pushforward_normal(f: ContactMap, s: SurfacePatch, u, v) -> NormalData:
    """N^h of f o sigma from the horizontal derivatives of f alone:

    lam ((n1 Y f2 - n2 X f2) X + (n2 X f1 - n1 Y f1) Y),  lam = Xf1 Yf2 - Yf1 Xf2.
    """
    nd = horizontal_normal(s, u, v)
    j = jet(f, s(u, v))
    Xf1, Xf2 = np.real(j.XfI), np.imag(j.XfI)
    Yf1, Yf2 = np.real(j.YfI), np.imag(j.YfI)
    lam = Xf1 * Yf2 - Yf1 * Xf2
    n1, n2 = nd.n_h.a, nd.n_h.b
    out = HVec(lam * (n1 * Yf2 - n2 * Xf2), lam * (n2 * Xf1 - n1 * Yf1))
    norm = out.norm()
    return NormalData(out, norm, norm < s.char_eps)


def normal_sandwich(f: ContactMap, s: SurfacePatch, u, v):
    """(lower, value, upper) with value = ||N^h_{f o sigma}|| computed directly.

    lower = lam (|Z f_I| - |Zbar f_I|) ||N^h_sigma||, upper uses the sum.
    """
    nd = horizontal_normal(s, u, v)
    if np.any(nd.is_characteristic):
        raise CharacteristicPoint(f"characteristic point on {s.name}")
    zf, zbf = horiz_derivatives(f, s(u, v))
    lam = np.abs(zf) ** 2 - np.abs(zbf) ** 2
    value = horizontal_normal(compose_patch(f, s), u, v).norm
    lower = lam * (np.abs(zf) - np.abs(zbf)) * nd.norm
    upper = lam * (np.abs(zf) + np.abs(zbf)) * nd.norm
    return lower, value, upper


class MSP(enum.Enum):
    MINIMAL = "Minimal"
    MAXIMAL = "Maximal"
    INTERIOR = "Interior"
    CONFORMAL = "Conformal"


def msp_quantity(f: ContactMap, s: SurfacePatch, u, v):
    """(mu e^{-2i arg m}, |mu|) where m = n1 + i n2 is the horizontal normal."""
    nd = horizontal_normal(s, u, v)
    if np.any(nd.is_characteristic):
        raise CharacteristicPoint(f"characteristic point on {s.name}")
    mu = beltrami(f, s(u, v)).mu
    return mu * np.exp(-2j * np.angle(nd.n_h.m)), np.abs(mu)


def msp_check(f: ContactMap, s: SurfacePatch, u: float, v: float, tol: float = 1e-8) -> MSP:
    """Where f sits in the sandwich at one surface point.

    Minimal when mu e^{-2i arg m} is a positive real (lower bound attained),
    Maximal when it is a negative real (upper bound attained).
    """
    q, amu = msp_quantity(f, s, u, v)
    if amu <= tol:
        return MSP.CONFORMAL
    c = float(np.real(q))
    if c >= amu - tol:
        return MSP.MINIMAL
    if c <= -amu + tol:
        return MSP.MAXIMAL
    return MSP.INTERIOR


@dataclass(frozen=True)
class ContactoResidual:
    max_defect: float
    lambda_min: float
    lambda_max: float
    n_points: int


def surface_contacto_residual(f: ContactMap, s: SurfacePatch, n: int = 12,
                              region: Optional[Rect] = None) -> ContactoResidual:
    """How far omega_{f o sigma} is from a pointwise multiple of omega_sigma.

    At every non-characteristic node of an n x n grid the multiplier is fitted
    by least squares over the two coefficients and the residual recorded.
    """
    region = region or s.domain
    U, V = region.grid(n)
    su, sv = s.derivatives(U, V)
    p = s(U, V)
    n1, n2 = horizontal_normal(s, U, V).n_h.a, horizontal_normal(s, U, V).n_h.b
    keep = np.hypot(n1, n2) >= s.char_eps
    b = np.array(_induced(p, su, sv))
    fs = compose_patch(f, s)
    fu, fv = fs.derivatives(U, V)
    a = np.array(_induced(fs(U, V), fu, fv))
    lam = np.sum(a * b, axis=0) / np.sum(b * b, axis=0)
    defect = np.hypot(*(a - lam * b))
    lam_k = lam[keep]
    return ContactoResidual(float(np.max(defect[keep])), float(lam_k.min()),
                            float(lam_k.max()), int(keep.sum()))


# -- logarithmic coordinates ---------------------------------------------------

def log_partials(f: ContactMap, q: LogPoint, h: float = 1e-6) -> np.ndarray:
    """d(Xi, Psi, H)/d(xi, psi, eta) with shape (..., 3, 3)."""
    if f.log_fwd is None:
        raise DerivOracleFailure(f"{f.name} has no logarithmic form")
    if f.log_jac is not None:
        return np.asarray(f.log_jac(q), dtype=float)
    base = np.stack(np.broadcast_arrays(q.xi, q.psi, q.eta)).astype(float)
    cols = []
    for i in range(3):
        e = np.zeros((3,) + (1,) * (base.ndim - 1))
        e[i] = h
        qp = f.log_fwd(LogPoint(*(base + e)))
        qm = f.log_fwd(LogPoint(*(base - e)))
        cols.append((np.stack([qp.xi, qp.psi, qp.eta]) - np.stack([qm.xi, qm.psi, qm.eta])) / (2 * h))
    J = np.moveaxis(np.stack(cols, axis=1), (0, 1), (-2, -1))
    if not np.all(np.isfinite(J)):
        raise DerivOracleFailure(f"non-finite log derivatives for {f.name}")
    return J


def log_contact_residuals(f: ContactMap, q: LogPoint):
    """(r1, r1_alt, r2) for the contact conditions in logarithmic coordinates.

    r1     = H_psi + (1/3) Psi Xi_psi
    r1_alt = H_psi + (1/3) tan(Psi) Xi_psi
    r2     = W H + (1/3) tan(Psi) W Xi,  W = d_xi - (tan psi / 3) d_eta
    """
    J = log_partials(f, q)
    Psi = f.log_fwd(q).psi
    tan_in = np.tan(q.psi)
    Xi_psi, H_psi = J[..., 0, 1], J[..., 2, 1]
    W_Xi = J[..., 0, 0] - tan_in / 3.0 * J[..., 0, 2]
    W_H = J[..., 2, 0] - tan_in / 3.0 * J[..., 2, 2]
    r1 = H_psi + Psi * Xi_psi / 3.0
    r1_alt = H_psi + np.tan(Psi) * Xi_psi / 3.0
    r2 = W_H + np.tan(Psi) * W_Xi / 3.0
    return r1, r1_alt, r2


def log_beltrami(f: ContactMap, q: LogPoint):
    """-e^{3i(psi - eta)} Wbar(Xi + i Psi) / W(Xi + i Psi), W = W_{xi,eta} - i d_psi."""
    J = log_partials(f, q)
    tan_in = np.tan(q.psi)
    W_re = (J[..., 0, 0] - tan_in / 3.0 * J[..., 0, 2]) + 1j * (J[..., 1, 0] - tan_in / 3.0 * J[..., 1, 2])
    d_psi = J[..., 0, 1] + 1j * J[..., 1, 1]
    num = W_re + 1j * d_psi
    den = W_re - 1j * d_psi
    if np.any(np.abs(den) <= 1e-14 * (1.0 + np.abs(num))):
        raise DegenerateDerivative(f"W(Xi + i Psi) vanishes for {f.name}")
    return -np.exp(3j * (q.psi - q.eta)) * num / den


def distortion_at(f: ContactMap, q: LogPoint):
    """K_f at Phi(q).

    Uses the logarithmic Beltrami formula when f has an analytic logarithmic
    Jacobian (accurate right up to the vertical axis), the cartesian one
    otherwise.
    """
    if f.log_fwd is not None and f.log_jac is not None:
        amu = np.abs(log_beltrami(f, q))
        return (1.0 + amu) / (1.0 - amu)
    return beltrami(f, phi(q)).K
