"""Angular profile h_d of the limit distribution, its derivatives and density factor.

h_d(theta) integrates max(-Re rho, 0)/t^(d+1) along the ray of angle theta;
h_d' has its own integral representation (the boundary term vanishes on the
zero curve), and the angular density factor  d^2 h_d + h_d''  is what the
area density kappa is built from.

Everything is sampled by certified-tail adaptive quadrature at Chebyshev
angles and stored as Chebyshev coefficients.  The density factor behaves
like sqrt(theta) at the endpoints, which a global polynomial cannot resolve,
so a separate Chebyshev fit in u = sqrt(theta) covers the near-axis strips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.integrate import quad
from scipy.special import gammaln

from mzres.complexfn import _sqrt_1mz2, rho, sigma_radius

_QUAD_OPTS = dict(limit=300, epsrel=1e-13)


def e_const(d: int) -> float:
    """sqrt(pi) * Gamma((d-1)/2) / ((d-2)! * Gamma(1+d/2)), via log-gamma."""
    _check_dim(d)
    return float(
        np.sqrt(np.pi)
        * np.exp(gammaln((d - 1) / 2) - gammaln(1 + d / 2) - gammaln(d - 1))
    )


def _check_dim(d: int) -> None:
    if d < 3 or d % 2 == 0:
        raise ValueError(f"dimension must be odd and >= 3, got {d}")


def _tail_cut(d: int, tol: float, bound: float = 4.0) -> float:
    """Truncation point T with certified remainder <= tol/2.

    |Re rho(t e^{i theta})| <= bound * t for t >= 10 (crude but explicit from
    the sqrt(1-z^2) asymptotics), so the tail of the h_d integral beyond T is
    at most 4*bound / ((d-2)! (d-1) T^(d-1)).
    """
    return max(20.0, (8.0 * bound / (math.factorial(d - 2) * (d - 1) * tol)) ** (1.0 / (d - 1)))


def _ray_integral(f, lo: float, T: float, tol: float, extra_pts=()) -> float:
    """Adaptive integral of f over [lo, T], 1/t-substituted beyond t = 10.

    scipy.quad silently under-resolves slowly decaying tails on very long
    intervals; the substitution keeps every panel compact.
    """
    split = min(10.0, T)
    pts = sorted(p for p in extra_pts if lo < p < split)
    v1, _ = quad(f, lo, split, points=pts or None, epsabs=tol / 8, **_QUAD_OPTS)
    v2 = 0.0
    if T > split:
        v2, _ = quad(lambda u: f(1.0 / u) / (u * u), 1.0 / T, 1.0 / split,
                     epsabs=tol / 8, **_QUAD_OPTS)
    return v1 + v2


def h_direct(d: int, theta: float, tol: float = 1e-11) -> float:
    """h_d(theta) by direct quadrature along the ray (independent of any fit)."""
    _check_dim(d)
    r0 = sigma_radius(theta)
    c = 4.0 / math.factorial(d - 2)
    f = lambda t: -np.real(rho(t * np.exp(1j * theta))) / t ** (d + 1)
    return c * _ray_integral(f, r0, _tail_cut(d, tol), tol, (1.0, 2 * r0))


def h1_direct(d: int, theta: float, tol: float = 1e-11) -> float:
    """h_d'(theta): the differentiated-under-the-integral representation."""
    _check_dim(d)
    r0 = sigma_radius(theta)
    c = 4.0 / math.factorial(d - 2)
    f = lambda t: -np.imag(_sqrt_1mz2(np.asarray(t * np.exp(1j * theta)))) / t ** (d + 1)
    return c * _ray_integral(f, r0, _tail_cut(d, tol), tol, (1.0, 2 * r0))


def h2_direct(d: int, theta: float, tol: float = 1e-11) -> float:
    """h_d''(theta) by one more Leibniz differentiation.

    The moving lower limit now contributes, because the h_d' integrand does
    not vanish on the zero curve:  the boundary term is
    (Im w0)^2 / (Re w0 * r0^d) with w0 = sqrt(1-z0^2) at z0 = r0 e^{i theta}.
    """
    _check_dim(d)
    r0 = sigma_radius(theta)
    c = 4.0 / math.factorial(d - 2)
    w0 = complex(_sqrt_1mz2(np.asarray(r0 * np.exp(1j * theta))))
    boundary = c * w0.imag ** 2 / (w0.real * r0 ** d)

    def f(t):
        z = t * np.exp(1j * theta)
        return np.real(z * z / _sqrt_1mz2(np.asarray(z))) / t ** (d + 1)

    # the integrand has a 1/sqrt spike where |1-z^2| is small (t near 1 for
    # theta near the axis); open the first panel with t = r0 + u^2
    delta = min(1.0, r0)
    pts = [np.sqrt(1.0 - r0)] if r0 < 1.0 < r0 + delta else None
    v1, _ = quad(lambda u: 2 * u * f(r0 + u * u), 0.0, np.sqrt(delta),
                 points=pts, epsabs=tol / 8, **_QUAD_OPTS)
    v2 = _ray_integral(f, r0 + delta, _tail_cut(d, tol), tol, (1.0,))
    return c * (v1 + v2) + boundary


def density_direct(d: int, theta: float, tol: float = 1e-11) -> float:
    """Angular density factor d^2 h_d + h_d'' at one angle, by quadrature only."""
    return d * d * h_direct(d, theta, tol) + h2_direct(d, theta, tol)


def _cheb_nodes(n: int):
    j = np.arange(n)
    return np.cos((2 * j + 1) * np.pi / (2 * n))


def _cheb_coeffs(values: np.ndarray) -> np.ndarray:
    """Interpolation coefficients from samples at first-kind Chebyshev nodes."""
    n = len(values)
    x = _cheb_nodes(n)
    V = C.chebvander(x, n - 1)
    c = (2.0 / n) * V.T @ values
    c[0] *= 0.5
    return c


_EDGE_THETA = 0.12     # patch takes over this close to 0 or pi
_EDGE_UMAX = 0.40      # fit range in u = sqrt(theta), slightly past sqrt(0.12)


@dataclass(frozen=True)
class AngularProfile:
    """Certified Chebyshev interpolant of h_d on [0, pi] with derivative access."""

    d: int
    tol: float
    coeffs: np.ndarray = field(repr=False)
    dcoeffs: np.ndarray = field(repr=False)
    ddcoeffs: np.ndarray = field(repr=False)
    edge_coeffs: np.ndarray = field(repr=False)
    edge_theta: float = _EDGE_THETA

    def __post_init__(self):
        tol = max(self.tol, 1e-12)
        if abs(self.h(0.0)) > 10 * tol or abs(self.h(np.pi)) > 10 * tol:
            raise ValueError("h_d does not vanish at the endpoints within tolerance")
        grid = np.linspace(0.0, np.pi, 257)
        hv = self.h(grid)
        if np.min(hv) < -10 * tol:
            raise ValueError("h_d is not nonnegative within tolerance")
        if np.max(np.abs(hv - hv[::-1])) > 10 * tol:
            raise ValueError("h_d violates the pi/2 reflection symmetry")

    def _x(self, theta):
        return 2.0 * np.asarray(theta) / np.pi - 1.0

    def h(self, theta):
        out = C.chebval(self._x(theta), self.coeffs)
        return out if np.ndim(theta) else float(out)

    def h1(self, theta):
        out = C.chebval(self._x(theta), self.dcoeffs)
        return out if np.ndim(theta) else float(out)

    def h2(self, theta):
        """Second derivative; near-axis values come from the sqrt(theta) patch."""
        theta = np.asarray(theta, dtype=float)
        out = C.chebval(self._x(theta), self.ddcoeffs)
        near = np.minimum(theta, np.pi - theta)
        mask = near < self.edge_theta
        if np.any(mask):
            dens = self._edge_density(near[mask] if out.ndim else near)
            hd2 = dens - self.d ** 2 * self.h(theta[mask] if out.ndim else theta)
            if out.ndim:
                out[mask] = hd2
            else:
                out = hd2
        return out if np.ndim(theta) else float(out)

    def _edge_density(self, near):
        u = np.sqrt(np.asarray(near, dtype=float))
        return u * C.chebval(2.0 * u / _EDGE_UMAX - 1.0, self.edge_coeffs)

    def density(self, theta):
        """d^2 h_d + h_d'' >= 0, the polar density factor of the area measure."""
        theta = np.asarray(theta, dtype=float)
        out = self.d ** 2 * C.chebval(self._x(theta), self.coeffs) \
            + C.chebval(self._x(theta), self.ddcoeffs)
        near = np.minimum(theta, np.pi - theta)
        mask = near < self.edge_theta
        if np.any(mask):
            patched = self._edge_density(near[mask] if out.ndim else near)
            if out.ndim:
                out[mask] = patched
            else:
                out = patched
        return out if np.ndim(theta) else float(out)

    def integral_h(self, theta):
        """Antiderivative of h_d with integral_h(0) = 0."""
        icoeffs = C.chebint(self.coeffs) * (np.pi / 2.0)
        out = C.chebval(self._x(theta), icoeffs) - C.chebval(-1.0, icoeffs)
        return out if np.ndim(theta) else float(out)

    def integral_density(self, theta):
        """Antiderivative of the density factor, d^2 * int h + h', from 0."""
        out = self.d ** 2 * self.integral_h(theta) + self.h1(theta) - self.h1(0.0)
        return out if np.ndim(theta) else float(out)


#: number of profile builds performed (lets callers observe cache hits)
build_count = 0


def build_profile(d: int, tol: float = 1e-9, nnodes: int = 192) -> AngularProfile:
    """Sample h_d and h_d' at Chebyshev angles and fit the interpolants.

    h_d'' comes from spectral differentiation of the fitted h_d' away from the
    axis; the endpoint strips get a dedicated fit of the density factor in
    u = sqrt(theta), sampled by direct quadrature.
    """
    _check_dim(d)
    if not 0.0 < tol <= 1e-4:
        raise ValueError("tol must lie in (0, 1e-4]")
    global build_count
    build_count += 1

    qtol = min(tol * 1e-2, 1e-11)
    x = _cheb_nodes(nnodes)
    thetas = np.pi * (x + 1.0) / 2.0
    hv = np.array([h_direct(d, t, qtol) for t in thetas])
    h1v = np.array([h1_direct(d, t, qtol) for t in thetas])
    # reflection symmetry about pi/2 is exact; enforce it on the samples
    hv = 0.5 * (hv + hv[::-1])
    h1v = 0.5 * (h1v - h1v[::-1])
    coeffs = _cheb_coeffs(hv)
    dcoeffs = _cheb_coeffs(h1v)
    ddcoeffs = C.chebder(dcoeffs) * (2.0 / np.pi)

    un = _EDGE_UMAX * (_cheb_nodes(16) + 1.0) / 2.0
    gv = np.array([density_direct(d, u * u, qtol) / u for u in un])
    edge_coeffs = _cheb_coeffs(gv)

    return AngularProfile(d=d, tol=tol, coeffs=coeffs, dcoeffs=dcoeffs,
                          ddcoeffs=ddcoeffs, edge_coeffs=edge_coeffs)
