"""The limit distribution: density, potentials, sector/window masses, sampling.

The measure on the closed lower unit half-disc splits as

* an absolutely continuous part with polar density
  kappa(z) = (1/2 pi c_d) |z|^{d-2} [d^2 h_d(|theta|) + h_d''(|theta|)],
* a singular part on [-1, 1] with density e_d |x|^{d-1} / (2 pi c_d).

Everything here is driven by the AngularProfile Chebyshev interpolants; the
window-mass path reduces the 2-D integral to an exact radial power integral
along origin rays plus a 1-D adaptive angular quadrature.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from mzres.angular import (AngularProfile, build_profile, e_const, h_direct)
from mzres.complexfn import SigmaCurve, build_sigma
from mzres.windows import Window


def c_const(profile: AngularProfile) -> float:
    """(d / 2 pi) * integral of h_d over (0, pi), from the Chebyshev antiderivative."""
    return profile.d / (2.0 * np.pi) * profile.integral_h(np.pi)


def c_const_dual(d: int, tol: float = 1e-8) -> float:
    """The equivalent 2-D form, reduced to polar coordinates and evaluated by
    nested direct quadrature -- independent of any Chebyshev fit."""
    val, _ = quad(lambda th: h_direct(d, th, tol * 1e-2), 0.0, np.pi,
                  epsabs=tol, epsrel=1e-12, limit=200)
    return d / (2.0 * np.pi) * val


@dataclass(frozen=True)
class Sector:
    """Angular sector (theta1, theta2) of the lower unit half-disc, angles in [0, pi]."""

    theta1: float
    theta2: float

    def __post_init__(self):
        if not 0.0 <= self.theta1 < self.theta2 <= np.pi:
            raise ValueError("need 0 <= theta1 < theta2 <= pi")


@dataclass(frozen=True)
class MZDistribution:
    """Immutable bundle of everything needed to evaluate the limit measure."""

    d: int
    profile: AngularProfile = field(repr=False)
    sigma: SigmaCurve = field(repr=False)
    e_d: float
    c_d: float

    def __post_init__(self):
        tol = max(self.profile.tol, 1e-12)
        if abs(self.c_d - c_const(self.profile)) > 10 * tol:
            raise ValueError("c_d inconsistent with the angular profile")
        if abs(self.e_d - e_const(self.d)) > 1e-12 * self.e_d:
            raise ValueError("e_d does not match its closed form")
        # total mass 1: bulk from the density-factor antiderivative (spectral
        # endpoint derivatives), singular part from the exact e_d
        p = self.profile
        bulk = p.integral_density(np.pi) / (2.0 * np.pi * self.d * self.c_d)
        if abs(bulk + self.mu0_total - 1.0) > 1e-5:
            raise ValueError("total mass on the unit disc differs from 1")

    @classmethod
    def build(cls, d: int, tol: float = 1e-9) -> "MZDistribution":
        profile = build_profile(d, tol)
        return cls(d=d, profile=profile, sigma=build_sigma(),
                   e_d=e_const(d), c_d=c_const(profile))

    @property
    def mu0_total(self) -> float:
        """Mass of the singular real-axis part on [-1, 1]: e_d / (pi d c_d)."""
        return self.e_d / (np.pi * self.d * self.c_d)

    # thin method aliases for the module-level operations
    def kappa(self, z):
        return kappa(self, z)

    def mu0_density(self, x):
        return mu0_density(self, x)

    def sector_mass(self, s: Sector) -> float:
        return sector_mass(self, s)

    def corollary_coefficient(self, s: Sector) -> float:
        return corollary_coefficient(self, s)

    def window_mass(self, w: Window, tol: float = 1e-6) -> float:
        return window_mass(self, w, tol)

    def sample(self, n: int, seed: int) -> np.ndarray:
        return sample(self, n, seed)


def kappa(dist: MZDistribution, z):
    """Area density at z with Im z != 0, extended to C_+ by kappa(conj z)."""
    zz = np.asarray(z, dtype=complex)
    if np.any(np.imag(zz) == 0):
        raise ValueError("kappa is undefined on the real axis")
    theta = np.abs(np.angle(zz))
    out = (np.abs(zz) ** (dist.d - 2) * dist.profile.density(theta)
           / (2.0 * np.pi * dist.c_d))
    return out if np.ndim(z) else float(out)


def mu0_density(dist: MZDistribution, x):
    """Density of the singular real-axis part: e_d |x|^{d-1} / (2 pi c_d)."""
    out = dist.e_d * np.abs(np.asarray(x, float)) ** (dist.d - 1) / (2.0 * np.pi * dist.c_d)
    return out if np.ndim(x) else float(out)


def potential_HZ(dist: MZDistribution, z):
    """c_d^{-1} |z|^d h_d(|arg z|) on the closed lower half-plane, 0 above."""
    zz = np.asarray(z, dtype=complex)
    r = np.abs(zz)
    theta = np.abs(np.angle(np.where(r > 0, zz, 1.0)))
    vals = r ** dist.d * dist.profile.h(theta) / dist.c_d
    out = np.where((np.imag(zz) <= 0) & (r > 0), np.maximum(vals, 0.0), 0.0)
    return out if np.ndim(z) else float(out)


def potential_H(dist: MZDistribution, z):
    """c_d^{-1} |z|^d h_d(|arg z|) on all of C; equals H_Z(z) + H_Z(conj z)."""
    zz = np.asarray(z, dtype=complex)
    out = potential_HZ(dist, zz) + potential_HZ(dist, np.conj(zz))
    return out if np.ndim(z) else float(out)


def _angular_mass(dist: MZDistribution, s: Sector, end0: float, end_pi: float) -> float:
    p = dist.profile

    def h1(theta):
        if theta == 0.0:
            return end0
        if theta == np.pi:
            return end_pi
        return p.h1(theta)

    num = (h1(s.theta2) - h1(s.theta1)
           + dist.d ** 2 * (p.integral_h(s.theta2) - p.integral_h(s.theta1)))
    return num / (2.0 * np.pi * dist.d * dist.c_d)


def sector_mass(dist: MZDistribution, s: Sector) -> float:
    """Mass of the bulk part on the sector, with one-sided endpoint derivatives
    +-e_d when the sector touches the real axis."""
    return _angular_mass(dist, s, dist.e_d, -dist.e_d)


def corollary_coefficient(dist: MZDistribution, s: Sector) -> float:
    """Sector coefficient of the counting law: same formula but with the
    convention c(0) = c(pi) = 0, which folds the real-axis radius masses in."""
    return _angular_mass(dist, s, 0.0, 0.0)


def _mu0_segment(dist: MZDistribution, x1: float, x2: float) -> float:
    """Exact singular mass of [x1, x2] from the |x|^{d-1} antiderivative."""
    d = dist.d
    F = lambda x: np.sign(x) * abs(x) ** d / d
    return dist.e_d / (2.0 * np.pi * dist.c_d) * (F(x2) - F(x1))


def _ray_breakpoints(w: Window, n_scan: int = 1024) -> list[float]:
    """Angles where the ray/window intersection pattern changes (tangencies,
    corners): located by bisection on the interval-count signature."""
    def sig(theta):
        return len(w.ray_intervals(theta))

    thetas = np.linspace(0.0, np.pi, n_scan + 1)[1:-1]
    sigs = [sig(t) for t in thetas]
    pts = []
    for i in range(len(thetas) - 1):
        if sigs[i] != sigs[i + 1]:
            lo, hi = thetas[i], thetas[i + 1]
            slo = sigs[i]
            for _ in range(50):
                mid = 0.5 * (lo + hi)
                if sig(mid) == slo:
                    lo = mid
                else:
                    hi = mid
            pts.append(0.5 * (lo + hi))
    return pts


def window_mass(dist: MZDistribution, w: Window, tol: float = 1e-6) -> float:
    """Measure of the window: radial reduction of the kappa integral over
    W cap C_- plus exact singular masses of the real-axis segments.

    For each angle the window meets the ray {t e^{-i theta}} in finitely many
    intervals, and the radial integral of kappa * t is (b^d - a^d)/d times the
    angular density factor; one adaptive quadrature over theta remains.
    """
    if not isinstance(w, Window):
        raise TypeError("w must be a Window")
    d, p = dist.d, dist.profile

    def f(theta):
        radial = sum(b ** d - a ** d for a, b in w.ray_intervals(theta)) / d
        return p.density(theta) * radial

    pts = _ray_breakpoints(w)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        bulk, _ = quad(f, 0.0, np.pi, points=pts or None,
                       epsabs=tol / 2, epsrel=1e-10, limit=500)
    bulk /= 2.0 * np.pi * dist.c_d
    sing = sum(_mu0_segment(dist, x1, x2) for x1, x2 in w.real_segments())
    return bulk + sing


def sample(dist: MZDistribution, n: int, seed: int) -> np.ndarray:
    """n i.i.d. draws from the measure normalized on the lower half-disc.

    With probability e_d/(pi d c_d) the draw is on the real axis (|x| with CDF
    x^d, sign uniform); otherwise the angle follows the density factor by
    inverse CDF on a fine grid and the radius is an independent U^{1/d}.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    p = dist.profile

    grid = np.linspace(0.0, np.pi, 4097)
    F = p.integral_density(grid)
    F = np.maximum.accumulate(F) / F[-1]

    u = rng.random(n)
    on_axis = u < dist.mu0_total
    out = np.empty(n, dtype=complex)

    k = int(on_axis.sum())
    if k:
        x = rng.random(k) ** (1.0 / dist.d)
        signs = np.where(rng.random(k) < 0.5, -1.0, 1.0)
        out[on_axis] = signs * x
    m = n - k
    if m:
        theta = np.interp(rng.random(m), F, grid)
        r = rng.random(m) ** (1.0 / dist.d)
        out[~on_axis] = r * np.exp(-1j * theta)
    return out
