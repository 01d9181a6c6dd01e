"""The radial stretch f_k and its closed-form data.

In logarithmic coordinates f_k is (xi, psi, eta) -> (k xi, arctan(tan(psi)/k), eta):
it scales the gauge by a power and tilts every Heisenberg cone onto another
cone while fixing eta.
"""

from __future__ import annotations

import numpy as np

from .errors import OnVerticalAxis
from .heis import Point
from .logchart import LogPoint, phi, phi_inv, phi_partials
from .maps import ContactMap


def stretch_log(k: float, q: LogPoint) -> LogPoint:
    return LogPoint(k * q.xi, np.arctan(np.tan(q.psi) / k), q.eta)


def stretch_log_jacobian(k: float, q: LogPoint) -> np.ndarray:
    """d(Xi, Psi, H)/d(xi, psi, eta); diagonal with Psi_psi = k sec^2 / (k^2 + tan^2)."""
    tan2 = np.tan(q.psi) ** 2
    psi_psi = k * (1.0 + tan2) / (k * k + tan2)
    shape = np.shape(psi_psi)
    J = np.zeros(shape + (3, 3))
    J[..., 0, 0] = k
    J[..., 1, 1] = psi_psi
    J[..., 2, 2] = 1.0
    return J


def stretch_cart(k: float, p: Point) -> Point:
    """Cartesian form with w = |z|^2 - it:

        z' = k^(1/2) z (conj(w) / (k|z|^2 + it))^(1/2) |w|^((k-1)/2)
        t' = t |w|^k / |k|z|^2 + it|
    """
    r2 = np.abs(p.z) ** 2
    if np.any(r2 == 0):
        raise OnVerticalAxis("the cartesian stretch needs z != 0")
    t = np.real(p.t)
    w = r2 - 1j * t
    d = k * r2 + 1j * t
    aw = np.abs(w)
    z_new = np.sqrt(k) * p.z * np.sqrt(np.conj(w) / d) * aw ** ((k - 1.0) / 2.0)
    t_new = t * aw**k / np.abs(d)
    return Point(z_new, t_new)


def stretch_beltrami(k: float, q: LogPoint):
    """Beltrami coefficient of f_k at Phi(q):

        -e^{3i(psi - eta)} (k^2 - 1) / (k^2 + 1 + 2 tan^2 psi)

    This is the value of the logarithmic Beltrami quotient for the stretch and
    agrees with finite differences of the cartesian map.
    """
    tan2 = np.tan(q.psi) ** 2
    return -np.exp(3j * (q.psi - q.eta)) * (k * k - 1.0) / (k * k + 1.0 + 2.0 * tan2)


def stretch_beltrami_printed(k: float, q: LogPoint):
    """The variant -e^{3i(psi - eta)} (k^2 - 1) / (k^2 + 1 + tan^2 psi).

    Only agrees with :func:`stretch_beltrami` on psi = 0; kept for comparison.
    """
    tan2 = np.tan(q.psi) ** 2
    return -np.exp(3j * (q.psi - q.eta)) * (k * k - 1.0) / (k * k + 1.0 + tan2)


def stretch_distortion(k: float, psi):
    """K_{f_k} on the cone psi = const.

    For k <= 1 this is (1 + tan^2 psi) / (k^2 + tan^2 psi); for k > 1 that
    ratio drops below 1 and K is its reciprocal.
    """
    psi = np.asarray(psi, dtype=float)
    if not np.all(np.abs(psi) < np.pi / 2):
        raise ValueError("psi must lie in (-pi/2, pi/2)")
    tan2 = np.tan(psi) ** 2
    ratio = (1.0 + tan2) / (k * k + tan2)
    return ratio if k <= 1.0 else 1.0 / ratio


def _stretch_jac(k: float):
    def jac(p: Point) -> np.ndarray:
        q = phi_inv(p)
        D_in = np.moveaxis(phi_partials(q), (0, 1), (-2, -1))
        D_out = np.moveaxis(phi_partials(stretch_log(k, q)), (0, 1), (-2, -1))
        return D_out @ stretch_log_jacobian(k, q) @ np.linalg.inv(D_in)

    return jac


def stretch_map(k: float) -> ContactMap:
    """f_k as a :class:`ContactMap` with analytic cartesian and log Jacobians.

    The cartesian Jacobian is DPhi(f~(q)) Df~(q) DPhi(q)^-1, exact up to rounding.
    """
    if k <= 0:
        raise ValueError("stretch factor must be positive")
    return ContactMap(
        name=f"stretch:{k:g}",
        fwd=lambda p: stretch_cart(k, p),
        jac=_stretch_jac(k),
        log_fwd=lambda q: stretch_log(k, q),
        log_jac=lambda q: stretch_log_jacobian(k, q),
    )


def stretch_via_chart(k: float, p: Point) -> Point:
    """Phi o f~_k o Phi^-1; an independent route to :func:`stretch_cart`."""
    return phi(stretch_log(k, phi_inv(p)))
