"""Densities, admissibility and moduli of surface families in spherical rings.

The central object is a foliation of a ring by surfaces, given by a leaf
parameter rectangle U, an index interval J, the leaves themselves and the
density of a measure on J.  For the cone foliation of S_{a,b}:

* the extremal density is rho0 = 1 / (|U| ||N^h||) on each leaf;
* Mod = |U|^(-1/3) times the total mass of the leaf measure;
* pushing forward by a map whose distortion is constant on leaves multiplies
  the leaf measure by K^(2/3).

Three-dimensional integrals run in logarithmic coordinates, where the
Lebesgue weight is (3/4) e^(2 xi) and every integrand used here is smooth in
xi and eta and has at worst a cos(psi)^(-2/3) endpoint singularity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .checks import Check
from .errors import (KOutOfRange, NotLeafConstant, OnVerticalAxis, PointNotOnFoliation,
                     PsiOutOfRange, QuadratureNonConvergence, ZeroDenominator)
from .heis import Point
from .logchart import ETA_MAX, LogPoint, lebesgue_weight, phi, phi_inv
from .maps import ContactMap, contact_residuals, distortion_at, msp_quantity
from .numerics import Rect, default_quad_n, gauss_legendre, graded_integral, graded_nodes, \
    tan_substitution_integral
from .stretch import stretch_distortion, stretch_map
from .surfaces import SurfacePatch, cone_patch, horizontal_area_integral, \
    horizontal_normal, log_graph_patch

HALF_PI = 0.5 * np.pi


@dataclass(frozen=True)
class SphericalRing:
    """S_{a,b} = {a^4 < |z|^4 + t^2 < b^4}."""

    a: float
    b: float

    def __post_init__(self):
        if not (0 < self.a < self.b):
            raise ValueError(f"need 0 < a < b, got a={self.a}, b={self.b}")

    @property
    def log_ratio(self) -> float:
        return float(np.log(self.b / self.a))

    @property
    def xi_range(self) -> tuple[float, float]:
        return 2.0 * np.log(self.a), 2.0 * np.log(self.b)

    def contains(self, p: Point):
        r2 = np.abs(p.z) ** 2
        g4 = r2 * r2 + np.real(p.t) ** 2
        return (g4 > self.a**4) & (g4 < self.b**4)

    def leaf_domain(self) -> Rect:
        return Rect(*self.xi_range, -ETA_MAX, ETA_MAX)


@dataclass(frozen=True)
class Density:
    """Nonnegative function on H, forced to zero outside ``support``."""

    fn: Callable[[Point], object]
    support: Optional[SphericalRing] = None
    name: str = "rho"

    def __call__(self, p: Point):
        if self.support is None:
            return np.asarray(self.fn(p), dtype=float)
        inside = self.support.contains(p)
        out = np.zeros(np.shape(inside))
        if np.any(inside):
            sub = Point(np.asarray(p.z)[inside], np.asarray(p.t, dtype=float)[inside]) \
                if np.ndim(inside) else p
            out[inside] = self.fn(sub)
        return out if np.ndim(out) else float(out)

    def scaled(self, c: float) -> "Density":
        return Density(lambda p: c * np.asarray(self.fn(p)), self.support, f"{c:g}*{self.name}")


def cone_density(ring: SphericalRing) -> Density:
    """Closed form of the extremal density for the cone foliation:

    1 / (4 pi log(b/a) |z| ||z|^2 - it|) on the ring.
    """
    L = ring.log_ratio

    def fn(p):
        r2 = np.abs(p.z) ** 2
        g2 = np.hypot(r2, np.real(p.t))
        with np.errstate(divide="ignore"):
            return 1.0 / (4.0 * np.pi * L * np.sqrt(r2) * g2)

    return Density(fn, ring, "rho0-cones")


def curve_density(ring: SphericalRing) -> Density:
    """|z| / (log(b/a) ||z|^2 - it|) on the ring; used with the exponent-4 mean distortion."""
    L = ring.log_ratio

    def fn(p):
        r2 = np.abs(p.z) ** 2
        return np.sqrt(r2) / (L * np.hypot(r2, np.real(p.t)))

    return Density(fn, ring, "rho0-curves")


# -- foliations ---------------------------------------------------------------

@dataclass(frozen=True)
class FoliationSpec:
    """Leaves sigma_tau over a common rectangle U, tau in J, with leaf measure mu_density(tau) dtau.

    ``locate`` sends a point of the foliated region to its (u, v, tau).
    """

    U: Rect
    J: tuple[float, float]
    leaf: Callable[[object], SurfacePatch]
    mu_density: Callable[[object], object]
    locate: Optional[Callable[[Point], tuple]] = None
    region: Optional[SphericalRing] = None
    name: str = "foliation"


def cone_leaf_measure(psi):
    """(1/2) (3/2)^(-1/3) cos(psi)^(-2/3)."""
    return 0.5 * 1.5 ** (-1.0 / 3.0) * np.cos(psi) ** (-2.0 / 3.0)


def cone_normal_norm(xi, psi):
    """(3/2) e^(3 xi / 2) cos(psi)^(1/2)."""
    return 1.5 * np.exp(1.5 * xi) * np.sqrt(np.cos(psi))


def cone_foliation(ring: SphericalRing) -> FoliationSpec:
    U = ring.leaf_domain()

    def leaf(psi):
        if np.ndim(psi) == 0:
            return cone_patch(float(psi), U)
        return log_graph_patch(lambda xi, eta: (psi + 0.0 * xi, 0.0 * xi, 0.0 * xi), U, "cones")

    def locate(p):
        q = phi_inv(p)
        return q.xi, q.eta, q.psi

    return FoliationSpec(U, (-HALF_PI, HALF_PI), leaf, cone_leaf_measure, locate, ring, "cones")


def extremal_density(spec: FoliationSpec) -> Density:
    """rho0 = (|U| ||N^h_{sigma_tau}(u, v)||)^(-1) on the leaves, 0 off the region.

    Points of the region that lie on no leaf raise :class:`PointNotOnFoliation`.
    """
    if spec.locate is None:
        raise PointNotOnFoliation(f"{spec.name} has no leaf locator")
    area = spec.U.area

    def fn(p):
        try:
            u, v, tau = spec.locate(p)
        except OnVerticalAxis as exc:
            raise PointNotOnFoliation(str(exc)) from None
        norm = horizontal_normal(spec.leaf(tau), u, v).norm
        return 1.0 / (area * norm)

    return Density(fn, spec.region, f"rho0[{spec.name}]")


def admissibility(rho: Density, surfaces: Sequence, n: Optional[int] = None,
                  rtol: float = 1e-8) -> float:
    """Smallest value of the integral of rho over the surfaces, dS^h measure.

    ``surfaces`` holds patches or (patch, rectangle) pairs.
    """
    vals = []
    for item in surfaces:
        s, region = (item, None) if isinstance(item, SurfacePatch) else item
        vals.append(horizontal_area_integral(rho, s, region, n=n, rtol=rtol))
    return float(min(vals))


# -- graph surfaces psi = psi(xi, eta) ------------------------------------------

def graph_psi_normal_norm(xi, psi, psi_xi, psi_eta):
    """(3/2) e^(3 xi/2) cos(psi)^(1/2) (1 + (psi_xi - tan(psi) psi_eta / 3)^2)^(1/2)."""
    slope = psi_xi - np.tan(psi) * psi_eta / 3.0
    return cone_normal_norm(xi, psi) * np.sqrt(1.0 + slope * slope)


def graph_psi_surface(ring: SphericalRing, psifun: Callable, check_n: int = 32) -> SurfacePatch:
    """sigma(xi, eta) = Phi(xi, psi(xi, eta), eta) over the cone leaf rectangle.

    ``psifun`` returns (psi, psi_xi, psi_eta).  Values are checked on a grid.
    """
    U = ring.leaf_domain()
    X, E = U.grid(check_n, inclusive=True)
    if not np.all(np.abs(psifun(X, E)[0]) < HALF_PI):
        raise PsiOutOfRange("graph surface leaves the psi range")
    return log_graph_patch(psifun, U, "graph-psi")


def psi_terms(psi0: float, terms: Sequence[dict]) -> Callable:
    """psi = psi0 + sum eps sin(p xi + q eta + phase), with its partials.

    Raises :class:`PsiOutOfRange` unless |psi0| + sum |eps| < pi/2.
    """
    terms = [(float(t["eps"]), float(t.get("p", 0.0)), float(t.get("q", 0.0)),
              float(t.get("phase", 0.0))) for t in terms]
    if abs(psi0) + sum(abs(e) for e, *_ in terms) >= HALF_PI:
        raise PsiOutOfRange("|psi0| + sum |eps| must stay below pi/2")

    def psifun(xi, eta):
        xi = np.asarray(xi, dtype=float)
        psi = np.full_like(xi, psi0) + 0.0 * np.asarray(eta)
        d_xi = np.zeros_like(psi)
        d_eta = np.zeros_like(psi)
        for e, p, q, ph in terms:
            arg = p * xi + q * eta + ph
            psi = psi + e * np.sin(arg)
            c = e * np.cos(arg)
            d_xi = d_xi + p * c
            d_eta = d_eta + q * c
        return psi, d_xi, d_eta

    return psifun


def random_graph_terms(rng: np.random.Generator, n_terms: int = 2, amplitude: float = 0.3):
    """Random psi0 and eta-periodic perturbation terms (q a multiple of 3/2)."""
    psi0 = rng.uniform(-0.8, 0.8)
    budget = min(amplitude, HALF_PI - abs(psi0) - 0.05)
    eps = rng.uniform(0.0, 1.0, n_terms)
    eps *= budget / max(eps.sum(), 1e-12)
    return psi0, [{"eps": float(e), "p": float(rng.uniform(-2.0, 2.0)),
                   "q": 1.5 * int(rng.integers(-2, 3)), "phase": float(rng.uniform(0, 2 * np.pi))}
                  for e in eps]


# -- moduli -------------------------------------------------------------------

def modulus_foliation(spec: FoliationSpec, n: Optional[int] = None) -> float:
    """|U|^(-1/3) times the leaf-measure mass of J."""
    return float(spec.U.area ** (-1.0 / 3.0) * _leaf_integral(spec.mu_density, spec.J, n))


def modulus_pushforward(spec: FoliationSpec, Kleaf: Callable, n: Optional[int] = None) -> float:
    """|U|^(-1/3) times the integral of K^(2/3) over J against the leaf measure."""
    return float(spec.U.area ** (-1.0 / 3.0)
                 * _leaf_integral(lambda t: Kleaf(t) ** (2.0 / 3.0) * spec.mu_density(t), spec.J, n))


def _leaf_integral(fn, J, n):
    n = n or default_quad_n()
    q_n = graded_integral(fn, J[0], J[1], n)
    q_2n = graded_integral(fn, J[0], J[1], 2 * n)
    if not np.isfinite(q_2n) or abs(q_n - q_2n) > 1e-9 * abs(q_2n):
        raise QuadratureNonConvergence(f"leaf integral: {q_n!r} vs {q_2n!r}")
    return q_2n


def modulus_cones_closed_form(ring: SphericalRing) -> float:
    """(2^5 pi log(b/a))^(-1/3) B(1/2, 1/6)."""
    from .numerics import beta_fn
    return (32.0 * np.pi * ring.log_ratio) ** (-1.0 / 3.0) * beta_fn(0.5, 1.0 / 6.0)


def stretch_pushforward_modulus(k: float, ring: SphericalRing, tol: float = 1e-11) -> float:
    """Mod(f_k Sigma_0) through z = tan(psi): the leaf integral becomes int dz / (k^2 + z^2)^(2/3)."""
    area = ring.leaf_domain().area
    return area ** (-1.0 / 3.0) * 0.5 * 1.5 ** (-1.0 / 3.0) * tan_substitution_integral(k, tol)


# -- three-dimensional integrals in log coordinates ----------------------------

def log_ring_integral(fn: Callable[[LogPoint], object], ring: SphericalRing,
                      n: Optional[int] = None, check: bool = True, rtol: float = 1e-6) -> float:
    """Lebesgue integral over S_{a,b} of fn(q), computed as
    the integral of fn(q) (3/4) e^(2 xi) dxi dpsi deta.

    Gauss-Legendre in xi and eta, end-graded nodes in psi.  With ``check`` the
    value at order n is compared against order n/2.
    """
    n = n or default_quad_n()

    def q_at(m):
        xg, xw = gauss_legendre(m).mapped(*ring.xi_range)
        eg, ew = gauss_legendre(m).mapped(-ETA_MAX, ETA_MAX)
        pg, pw = graded_nodes(-HALF_PI, HALF_PI, m)
        X, P, E = np.meshgrid(xg, pg, eg, indexing="ij")
        vals = np.asarray(fn(LogPoint(X, P, E)), dtype=float) * lebesgue_weight(X)
        return float(np.einsum("i,j,k,ijk->", xw, pw, ew, np.broadcast_to(vals, X.shape)))

    val = q_at(n)
    if check:
        coarse = q_at(max(n // 2, 4))
        if not np.isfinite(val) or abs(val - coarse) > rtol * abs(val) + 1e-300:
            raise QuadratureNonConvergence(f"ring integral: {coarse!r} vs {val!r}")
    return val


def density_integral(rho: Density, ring: SphericalRing, power: float,
                     n: Optional[int] = None) -> float:
    return log_ring_integral(lambda q: rho(phi(q)) ** power, ring, n)


def _mean_distortion(f: ContactMap, rho: Density, ring: SphericalRing, kp: float, rp: float,
                     n: Optional[int]) -> float:
    den = density_integral(rho, ring, rp, n)
    if not den > 0:
        raise ZeroDenominator(f"{rho.name} vanishes on the ring")
    num = log_ring_integral(lambda q: distortion_at(f, q) ** kp * rho(phi(q)) ** rp, ring, n)
    return num / den


def mean_distortion_23(f: ContactMap, rho: Density, ring: SphericalRing,
                       n: Optional[int] = None) -> float:
    """Average of K_f^(2/3) against rho^(4/3) dL^3 over the ring."""
    return _mean_distortion(f, rho, ring, 2.0 / 3.0, 4.0 / 3.0, n)


def mean_distortion_2(f: ContactMap, rho: Density, ring: SphericalRing,
                      n: Optional[int] = None) -> float:
    """Average of K_f^2 against rho^4 dL^3 over the ring."""
    return _mean_distortion(f, rho, ring, 2.0, 4.0, n)


# -- inequalities and the stretch verification ---------------------------------

def leaf_distortion(f: ContactMap, spec: FoliationSpec, taus, n_per_leaf: int = 100,
                    seed: int = 0, spread_tol: float = 1e-8) -> np.ndarray:
    """K_f on each leaf, after checking it is constant at ``n_per_leaf`` random points.

    Raises :class:`NotLeafConstant` when the spread on some leaf exceeds ``spread_tol``
    (relative).  Works for foliations whose leaves are psi = tau in log coordinates.
    """
    rng = np.random.default_rng(seed)
    U = spec.U
    out = []
    for tau in np.atleast_1d(taus):
        u = rng.uniform(U.u0, U.u1, n_per_leaf)
        v = rng.uniform(U.v0, U.v1, n_per_leaf)
        K = np.asarray(distortion_at(f, LogPoint(u, np.full_like(u, tau), v)))
        if np.ptp(K) > spread_tol * np.max(K):
            raise NotLeafConstant(f"{f.name}: spread {np.ptp(K):.3g} on leaf {tau:g}")
        out.append(float(np.mean(K)))
    return np.asarray(out)


@dataclass
class InequalityReport:
    mod_sigma: float
    mod_image: Optional[float]
    weighted: float
    K_max: float
    lower: float
    upper: float
    leaf_constant: bool
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def modulus_inequality_check(f: ContactMap, spec: FoliationSpec, rho: Density,
                             ring: SphericalRing, K_max: Optional[float] = None,
                             n: Optional[int] = None, rtol: float = 1e-6) -> InequalityReport:
    """Mod(f Sigma) against the K^(+-2/3) bracket and the weighted rho integral.

    Mod(f Sigma) is the leaf-measure formula when K_f is constant on leaves;
    otherwise only the bracket and the weighted integral are reported.
    ``K_max`` defaults to the largest distortion seen on a psi grid.
    """
    mod = modulus_foliation(spec, n)
    weighted = log_ring_integral(
        lambda q: distortion_at(f, q) ** (2.0 / 3.0) * rho(phi(q)) ** (4.0 / 3.0), ring, n, rtol=rtol)
    if K_max is None:
        taus = np.linspace(spec.J[0], spec.J[1], 203)[1:-1]
        xi, eta = np.meshgrid(np.linspace(spec.U.u0, spec.U.u1, 7)[1:-1],
                              np.linspace(spec.U.v0, spec.U.v1, 7)[1:-1], indexing="ij")
        K_max = max(float(np.max(distortion_at(f, LogPoint(xi, np.full_like(xi, t), eta))))
                    for t in taus)
    lower, upper = K_max ** (-2.0 / 3.0) * mod, K_max ** (2.0 / 3.0) * mod
    try:
        mod_image = modulus_pushforward(spec, lambda t: _leaf_K(f, spec, t), n)
        leaf_constant = True
        leaf_distortion(f, spec, np.linspace(spec.J[0], spec.J[1], 13)[1:-1])
    except NotLeafConstant:
        mod_image, leaf_constant = None, False
    checks = [Check.at_least("lower_bracket", lower, weighted if mod_image is None else mod_image,
                             rtol * mod)]
    if mod_image is not None:
        checks.append(Check.at_most("upper_bracket", upper, mod_image, rtol * mod))
        checks.append(Check.close("pushforward_equals_weighted", mod_image, weighted, rtol))
    return InequalityReport(mod, mod_image, weighted, K_max, lower, upper, leaf_constant, checks)


def _leaf_K(f: ContactMap, spec: FoliationSpec, tau):
    u0 = 0.5 * (spec.U.u0 + spec.U.u1) + 0.0 * np.asarray(tau)
    v0 = 0.0 * np.asarray(tau)
    return distortion_at(f, LogPoint(u0, tau, v0))


def ring_samples(ring: SphericalRing, n: int, seed: int, psi_frac: float = 0.95) -> LogPoint:
    """Seeded points of S_{a,b}, uniform in (xi, psi, eta) with |psi| < psi_frac pi/2."""
    rng = np.random.default_rng(seed)
    xi = rng.uniform(*ring.xi_range, n)
    psi = rng.uniform(-psi_frac * HALF_PI, psi_frac * HALF_PI, n)
    eta = rng.uniform(-ETA_MAX, ETA_MAX, n)
    return LogPoint(xi, psi, eta)


def contact_residual_max(f: ContactMap, ring: SphericalRing, n: int = 1000, seed: int = 0):
    """(max |r1|, max |r2|, min lam) over seeded ring samples."""
    p = phi(ring_samples(ring, n, seed))
    r1, r2, lam = contact_residuals(f, p)
    return float(np.max(np.abs(r1))), float(np.max(np.abs(r2))), float(np.min(lam))


def msp_min_on_cones(f: ContactMap, ring: SphericalRing, n_psi: int = 15, n_grid: int = 6) -> float:
    """min of Re(mu e^{-2i arg m}) over a grid of cone leaves."""
    U = ring.leaf_domain()
    XI, ETA = U.grid(n_grid)
    vals = []
    for psi in np.linspace(-HALF_PI, HALF_PI, n_psi + 2)[1:-1]:
        q, _ = msp_quantity(f, cone_patch(psi, U), XI, ETA)
        vals.append(np.min(np.real(q)))
    return float(min(vals))


@dataclass
class TheoremReport:
    k: float
    ring: SphericalRing
    values: dict
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def verify_main_theorem(k: float, ring: SphericalRing, n: Optional[int] = None,
                        samples: int = 1000, seed: int = 0) -> TheoremReport:
    """Every computable quantity of the extremality statement for f_k on S_{a,b}."""
    if not (0.0 < k < 1.0):
        raise KOutOfRange(f"k must lie in (0, 1), got {k}")
    spec = cone_foliation(ring)
    f = stretch_map(k)
    mod0 = modulus_foliation(spec, n)
    modf = modulus_pushforward(spec, lambda psi: stretch_distortion(k, psi), n)
    mean23 = mean_distortion_23(f, cone_density(ring), ring, n)
    psi_grid = np.linspace(-HALF_PI, HALF_PI, 2001)[1:-1]
    max_dist = float(np.max(stretch_distortion(k, psi_grid)))
    msp_min = msp_min_on_cones(f, ring)
    r1, r2, lam_min = contact_residual_max(f.with_fd(1e-5), ring, samples, seed)
    adm = admissibility(cone_density(ring),
                        [cone_patch(psi, spec.U) for psi in np.linspace(-1.4, 1.4, 9)], n)
    k_pow = k ** (-1.0 / 3.0)
    values = dict(mod_sigma0=mod0, mod_pushforward=modf, ratio=modf / mod0,
                  mean_dist_23=mean23, k_pow=k_pow, max_distortion=max_dist, msp_min=msp_min,
                  contact_residual_max=max(r1, r2), lambda_min=lam_min, admissibility_min=adm)
    checks = [
        Check.close("ratio", k_pow, modf / mod0, 1e-5),
        Check.close("mean_dist_23", k_pow, mean23, 1e-5),
        Check.absolute("max_distortion", k ** -2.0, max_dist, 1e-9),
        Check.at_least("msp_min", 0.0, msp_min) if msp_min > 0 else
        Check("msp_min", 0.0, msp_min, 0.0, False),
        Check.at_most("contact_residual_max", 1e-6, max(r1, r2)),
        Check.at_least("admissibility_min", 1.0, adm, 1e-9),
    ]
    return TheoremReport(k, ring, values, checks)
