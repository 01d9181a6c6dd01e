"""Logarithmic coordinates (xi, psi, eta) on H minus the vertical axis.

    Phi(xi, psi, eta) = (i cos(psi)^(1/2) exp((xi + i(psi - 3 eta)) / 2),
                         -sin(psi) exp(xi))

``psi`` lives in the open interval (-pi/2, pi/2).  Phi is 4*pi/3-periodic in
``eta``; :func:`phi_inv` returns the representative in (-2pi/3, 2pi/3].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OnVerticalAxis, PsiOutOfRange
from .heis import HVec, Point, frame_convert

ETA_PERIOD = 4.0 * np.pi / 3.0
ETA_MAX = 2.0 * np.pi / 3.0


@dataclass(frozen=True)
class LogPoint:
    xi: object
    psi: object
    eta: object

    def __post_init__(self):
        if not np.all(np.abs(self.psi) < np.pi / 2):
            raise PsiOutOfRange("psi must lie in (-pi/2, pi/2)")

    def in_band(self) -> bool:
        eta = np.asarray(self.eta)
        return bool(np.all((eta > -ETA_MAX) & (eta <= ETA_MAX)))


def wrap_eta(eta):
    """Representative of eta modulo 4pi/3 in (-2pi/3, 2pi/3]."""
    return eta - ETA_PERIOD * np.ceil((eta - ETA_MAX) / ETA_PERIOD)


def phi(q: LogPoint) -> Point:
    xi, psi, eta = q.xi, q.psi, q.eta
    z = 1j * np.sqrt(np.cos(psi)) * np.exp(0.5 * (xi + 1j * (psi - 3.0 * eta)))
    t = -np.sin(psi) * np.exp(xi)
    return Point(z, t)


def phi_inv(p: Point) -> LogPoint:
    r2 = np.abs(p.z) ** 2
    if np.any(r2 == 0):
        raise OnVerticalAxis("logarithmic coordinates exclude the vertical axis")
    t = np.real(p.t)
    xi = 0.5 * np.log(r2 * r2 + t * t)
    psi = np.arctan2(-t, r2)
    eta = wrap_eta((psi - 2.0 * np.angle(p.z) + np.pi) / 3.0)
    return LogPoint(xi, psi, eta)


def phi_partials(q: LogPoint):
    """Cartesian partials of Phi: three arrays (dx, dy, dt), one per log variable.

    Returned as an array of shape (3, 3, ...) indexed [cartesian, log].
    """
    z = phi(q).z
    tan = np.tan(q.psi)
    ex = np.exp(q.xi)
    dz_dxi = 0.5 * z
    dz_dpsi = 0.5 * z * (1j - tan)
    dz_deta = -1.5j * z
    dt_dxi = -np.sin(q.psi) * ex
    dt_dpsi = -np.cos(q.psi) * ex
    dt_deta = np.zeros_like(dt_dxi)
    dz = [dz_dxi, dz_dpsi, dz_deta]
    return np.array([
        [np.real(c) for c in dz],
        [np.imag(c) for c in dz],
        [dt_dxi, dt_dpsi, dt_deta],
    ])


def jacobian_phi(q: LogPoint):
    """det DPhi = -(3/4) e^(2 xi); its modulus is the Lebesgue weight."""
    if not np.all(np.abs(q.psi) < np.pi / 2):
        raise PsiOutOfRange("psi must lie in (-pi/2, pi/2)")
    return -0.75 * np.exp(2.0 * q.xi)


def lebesgue_weight(xi):
    return 0.75 * np.exp(2.0 * xi)


def w_fields(q: LogPoint) -> tuple[HVec, HVec]:
    """Push-forwards of W = d_xi - (tan psi / 3) d_eta and of d_psi.

    Both are horizontal; their frame components are returned as ``HVec``.
    """
    D = phi_partials(q)
    tan = np.tan(q.psi)
    w_cart = D[:, 0] - (tan / 3.0) * D[:, 2]
    p = phi(q)
    w = frame_convert(p, w_cart).horizontal
    d_psi = frame_convert(p, D[:, 1]).horizontal
    return w, d_psi
