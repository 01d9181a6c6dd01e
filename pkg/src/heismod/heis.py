"""Arithmetic of the first Heisenberg group H = C x R.

Points carry a complex horizontal coordinate ``z`` and a real vertical
coordinate ``t``.  Both may be numpy arrays of a common shape, in which case
every function below acts elementwise.  Tangent vectors are stored by their
components in the left-invariant frame

    X = d/dx + 2y d/dt,   Y = d/dy - 2x d/dt,   T = d/dt.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import InversionAtOrigin

ArrayLike = Union[float, complex, np.ndarray]


@dataclass(frozen=True)
class Point:
    z: ArrayLike
    t: ArrayLike

    @property
    def x(self):
        return np.real(self.z)

    @property
    def y(self):
        return np.imag(self.z)

    @property
    def w(self):
        """The complex quantity |z|^2 - it."""
        return np.abs(self.z) ** 2 - 1j * self.t

    def __mul__(self, other: "Point") -> "Point":
        return group_mul(self, other)

    def as_array(self) -> np.ndarray:
        """Stack cartesian coordinates (x, y, t) along a leading axis."""
        return np.stack(np.broadcast_arrays(self.x, self.y, np.real(self.t)))

    @classmethod
    def from_array(cls, xyt) -> "Point":
        xyt = np.asarray(xyt, dtype=float)
        return cls(xyt[0] + 1j * xyt[1], xyt[2])


ORIGIN = Point(0j, 0.0)


@dataclass(frozen=True)
class TangentVec:
    """Components (a, b, c) of aX + bY + cT at some base point."""

    a: ArrayLike
    b: ArrayLike
    c: ArrayLike

    @property
    def horizontal(self) -> "HVec":
        return HVec(self.a, self.b)


@dataclass(frozen=True)
class HVec:
    """Horizontal vector aX + bY; ``m`` is its complex alias a + ib."""

    a: ArrayLike
    b: ArrayLike

    @property
    def m(self):
        return self.a + 1j * self.b

    def norm(self):
        return np.hypot(self.a, self.b)

    def dot(self, other: "HVec"):
        return self.a * other.a + self.b * other.b

    def __neg__(self) -> "HVec":
        return HVec(-self.a, -self.b)


def group_mul(p: Point, q: Point) -> Point:
    """(z, t) * (w, s) = (z + w, t + s + 2 Im(conj(w) z))."""
    return Point(p.z + q.z, p.t + q.t + 2.0 * np.imag(np.conj(q.z) * p.z))


def group_inv(p: Point) -> Point:
    return Point(-p.z, -p.t)


def gauge(p: Point):
    """Koranyi gauge ||z|^2 - it|^(1/2)."""
    return np.sqrt(np.abs(p.w))


def dist(p: Point, q: Point):
    """Left-invariant Heisenberg distance ||p^-1 * q||."""
    return gauge(group_mul(group_inv(p), q))


# -- similarities ------------------------------------------------------------

def translate(p: Point, zeta: complex, s: float) -> Point:
    """Left translation by (zeta, s)."""
    return group_mul(Point(zeta, s), p)


def rotate(p: Point, theta: float) -> Point:
    """Rotation about the vertical axis."""
    return Point(p.z * np.exp(1j * theta), p.t)


def dilate(p: Point, delta: float) -> Point:
    return Point(delta * p.z, delta**2 * p.t)


def invert(p: Point) -> Point:
    """Inversion in the unit Heisenberg sphere.

    I(z, t) = (-z / w, -t / |w|^2) with w = |z|^2 - it.
    """
    w = p.w
    if np.any(np.abs(w) == 0):
        raise InversionAtOrigin("inversion is undefined at the origin")
    return Point(-p.z / w, -np.real(p.t) / np.abs(w) ** 2)


def apply_similarity(kind: str, p: Point, *params) -> Point:
    """Evaluate a named similarity.

    ``kind`` is one of ``"translation"`` (params zeta, s), ``"rotation"``
    (theta), ``"dilation"`` (delta) or ``"inversion"`` (no params).
    """
    if kind == "translation":
        return translate(p, *params)
    if kind == "rotation":
        return rotate(p, *params)
    if kind == "dilation":
        return dilate(p, *params)
    if kind == "inversion":
        return invert(p)
    raise ValueError(f"unknown similarity {kind!r}")


# -- frames and forms --------------------------------------------------------

def contact_form(p: Point, v_cart) -> np.ndarray:
    """omega = dt + 2x dy - 2y dx evaluated on cartesian components (vx, vy, vt)."""
    v1, v2, v3 = v_cart
    return v3 + 2.0 * p.x * v2 - 2.0 * p.y * v1


def frame_convert(p: Point, v_cart) -> TangentVec:
    """Cartesian components -> components in {X, Y, T}."""
    v1, v2, v3 = v_cart
    return TangentVec(v1, v2, v3 - 2.0 * p.y * v1 + 2.0 * p.x * v2)


def frame_to_cart(p: Point, v: TangentVec) -> tuple:
    """Inverse of :func:`frame_convert`."""
    return (v.a, v.b, v.c + 2.0 * p.y * v.a - 2.0 * p.x * v.b)


def heis_wedge(u: TangentVec, v: TangentVec) -> TangentVec:
    """Formal determinant with rows (X, Y, T), u, v.  Obeys X^Y = T, Y^T = X."""
    return TangentVec(
        u.b * v.c - u.c * v.b,
        u.c * v.a - u.a * v.c,
        u.a * v.b - u.b * v.a,
    )


def j_op(h: HVec) -> HVec:
    """Complex structure on the horizontal plane: JX = Y, JY = -X."""
    return HVec(-h.b, h.a)
