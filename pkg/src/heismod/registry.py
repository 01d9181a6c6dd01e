"""Named contact maps.

Accepted names::

    identity
    rotation:THETA
    dilation:DELTA
    translation:ZETA,S        ZETA as a Python complex literal, e.g. 0.5+1j
    inversion
    stretch:K
    compose:A|B               A o B (B applied first)
    A|compose|B               same as compose:A|B
"""

from __future__ import annotations

import numpy as np

from .errors import UnknownMap
from .heis import Point, dilate, invert, rotate, translate
from .logchart import LogPoint
from .maps import ContactMap
from .stretch import stretch_map


def _eye(shape):
    return np.broadcast_to(np.eye(3), tuple(shape) + (3, 3)).copy()


def identity_map() -> ContactMap:
    return ContactMap(
        "identity",
        fwd=lambda p: p,
        jac=lambda p: _eye(np.shape(p.z)),
        log_fwd=lambda q: q,
        log_jac=lambda q: _eye(np.shape(q.xi)),
    )


def rotation_map(theta: float) -> ContactMap:
    c, s = np.cos(theta), np.sin(theta)
    J = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
    return ContactMap(
        f"rotation:{theta:g}",
        fwd=lambda p: rotate(p, theta),
        jac=lambda p: np.broadcast_to(J, np.shape(p.z) + (3, 3)).copy(),
        # arg z grows by theta, so eta drops by 2 theta / 3
        log_fwd=lambda q: LogPoint(q.xi, q.psi, q.eta - 2.0 * theta / 3.0),
        log_jac=lambda q: _eye(np.shape(q.xi)),
    )


def dilation_map(delta: float) -> ContactMap:
    if delta <= 0:
        raise ValueError("dilation factor must be positive")
    J = np.diag([delta, delta, delta**2])
    return ContactMap(
        f"dilation:{delta:g}",
        fwd=lambda p: dilate(p, delta),
        jac=lambda p: np.broadcast_to(J, np.shape(p.z) + (3, 3)).copy(),
        log_fwd=lambda q: LogPoint(q.xi + 2.0 * np.log(delta), q.psi, q.eta),
        log_jac=lambda q: _eye(np.shape(q.xi)),
    )


def translation_map(zeta: complex, s: float) -> ContactMap:
    a, b = np.real(zeta), np.imag(zeta)
    J = np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [2.0 * b, -2.0 * a, 1.0]])
    return ContactMap(
        f"translation:{zeta},{s:g}",
        fwd=lambda p: translate(p, zeta, s),
        jac=lambda p: np.broadcast_to(J, np.shape(p.z) + (3, 3)).copy(),
    )


def _inversion_jac(p: Point) -> np.ndarray:
    z = np.asarray(p.z, dtype=complex)
    t = np.real(p.t)
    x, y = np.real(z), np.imag(z)
    w = np.abs(z) ** 2 - 1j * t
    R = np.abs(w) ** 2
    # z' = -z / w
    dz = [-(w - 2 * x * z) / w**2, -(1j * w - 2 * y * z) / w**2, -1j * z / w**2]
    r2 = np.abs(z) ** 2
    dt = [4 * x * r2 * t / R**2, 4 * y * r2 * t / R**2, -(r2 * r2 - t * t) / R**2]
    J = np.empty(np.shape(z) + (3, 3))
    for i in range(3):
        J[..., 0, i] = np.real(dz[i])
        J[..., 1, i] = np.imag(dz[i])
        J[..., 2, i] = dt[i]
    return J


def inversion_map() -> ContactMap:
    return ContactMap("inversion", fwd=invert, jac=_inversion_jac)


def compose(a: ContactMap, b: ContactMap) -> ContactMap:
    """a o b."""
    jac = None
    if a.jac is not None and b.jac is not None:
        def jac(p):
            return a.jac(b(p)) @ b.jac(p)
    log_fwd = log_jac = None
    if a.log_fwd is not None and b.log_fwd is not None:
        def log_fwd(q):
            return a.log_fwd(b.log_fwd(q))
        if a.log_jac is not None and b.log_jac is not None:
            def log_jac(q):
                return a.log_jac(b.log_fwd(q)) @ b.log_jac(q)
    return ContactMap(f"{a.name}|compose|{b.name}", lambda p: a(b(p)), jac, log_fwd, log_jac,
                      fd_step=min(a.fd_step, b.fd_step))


def _num(text: str, name: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UnknownMap(f"bad numeric parameter in {name!r}") from None


def make_map(name: str) -> ContactMap:
    """Build a registered map from its textual name."""
    name = name.strip()
    if "|compose|" in name:
        left, right = name.split("|compose|", 1)
        return compose(make_map(left), make_map(right))
    if name.startswith("compose:"):
        body = name[len("compose:"):]
        if "|" not in body:
            raise UnknownMap(f"compose needs two maps: {name!r}")
        left, right = body.split("|", 1)
        return compose(make_map(left), make_map(right))
    head, _, arg = name.partition(":")
    if head == "identity" and not arg:
        return identity_map()
    if head == "inversion" and not arg:
        return inversion_map()
    if head == "rotation" and arg:
        return rotation_map(_num(arg, name))
    if head == "dilation" and arg:
        return dilation_map(_num(arg, name))
    if head == "stretch" and arg:
        return stretch_map(_num(arg, name))
    if head == "translation" and arg:
        zeta_s, _, s = arg.rpartition(",")
        try:
            zeta = complex(zeta_s.replace(" ", ""))
        except ValueError:
            raise UnknownMap(f"bad translation parameter in {name!r}") from None
        return translation_map(zeta, _num(s, name))
    raise UnknownMap(f"unknown map {name!r}")


REGISTERED = ("identity", "rotation:THETA", "dilation:DELTA", "translation:ZETA,S",
              "inversion", "stretch:K", "compose:A|B")
