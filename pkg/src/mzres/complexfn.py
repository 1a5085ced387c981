"""Branch-correct evaluation of the phase function rho and its zero curve.

rho(z) = log((1 + sqrt(1-z^2)) / z) - sqrt(1-z^2) on the closed upper
half-plane minus the origin, with principal branches throughout.  The set
Sigma = {Re rho = 0} is a curve r = r0(theta) meeting the real line at +-1;
it is the lower integration limit of every angular-profile integral.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import brentq


def _check_upper(z: np.ndarray) -> None:
    if np.any(z == 0):
        raise ValueError("rho is undefined at z = 0")
    if np.any(np.imag(z) < 0):
        raise ValueError("rho is only defined on the closed upper half-plane")


def _sqrt_1mz2(z: np.ndarray) -> np.ndarray:
    """Principal sqrt(1 - z^2), with real |z| > 1 taken as a limit from above.

    For z in the open upper half-plane, z^2 misses [0, inf) so 1 - z^2 misses
    the branch cut and the principal square root is continuous.  On the real
    axis with |x| > 1 the limit from Im z > 0 gives -i*sign(x)*sqrt(x^2-1).
    """
    z = np.asarray(z, dtype=complex)
    w = np.sqrt(1.0 - z * z)
    x = np.real(z)
    boundary = (np.imag(z) == 0) & (np.abs(x) > 1.0)
    if np.any(boundary):
        xb = x[boundary] if w.ndim else x
        wb = -1j * np.sign(xb) * np.sqrt(xb * xb - 1.0)
        if w.ndim:
            w[boundary] = wb
        else:
            w = wb
    return w


def rho(z):
    """Evaluate rho on the closed upper half-plane (scalar or array)."""
    zz = np.asarray(z, dtype=complex)
    _check_upper(zz)
    w = _sqrt_1mz2(zz)
    # log((1+w)/z) as a difference of principal logs: Re(1+w) >= 1 keeps the
    # first term off the cut, and arg z in [0, pi] keeps the second continuous.
    out = np.log(1.0 + w) - np.log(zz) - w
    return out if np.ndim(z) else complex(out)


def rho_prime(z):
    """Derivative of rho: -sqrt(1-z^2)/z with the same branch."""
    zz = np.asarray(z, dtype=complex)
    _check_upper(zz)
    out = -_sqrt_1mz2(zz) / zz
    return out if np.ndim(z) else complex(out)


def _re_rho_ray(t: float, theta: float) -> float:
    return float(np.real(rho(t * np.exp(1j * theta))))


_HARD_CAP = 1e6


def sigma_radius(theta: float, tol: float = 1e-13) -> float:
    """Radius r0(theta) of the zero curve of Re rho along the ray of angle theta.

    Re rho is positive below the curve and negative above; the bracket starts
    at [1/2, R] with R grown geometrically until a sign change appears.
    """
    if not 0.0 < theta < np.pi:
        raise ValueError("theta must lie in (0, pi)")
    if tol <= 0:
        raise ValueError("tol must be positive")
    lo = 0.5
    flo = _re_rho_ray(lo, theta)
    if flo <= 0.0:
        raise RuntimeError("Re rho <= 0 at r = 1/2: branch inconsistency")
    hi = 2.0
    while _re_rho_ray(hi, theta) > 0.0:
        hi *= 2.0
        if hi > _HARD_CAP:
            raise RuntimeError("no sign change of Re rho up to the hard cap: branch bug")
    r = brentq(_re_rho_ray, lo, hi, args=(theta,), xtol=1e-15, rtol=8.9e-16)
    # scaled residual check: Re rho varies on scale ~|d/dr Re rho| near r
    slope = abs(np.real(np.exp(1j * theta) * rho_prime(r * np.exp(1j * theta))))
    resid = abs(_re_rho_ray(r, theta))
    if resid > tol * max(1.0, slope):
        raise RuntimeError(f"sigma_radius residual {resid:g} above tolerance at theta={theta:g}")
    return float(r)


@dataclass(frozen=True)
class SigmaCurve:
    """Chebyshev interpolant of r0(theta) on (0, pi) built from node samples."""

    thetas: np.ndarray
    radii: np.ndarray
    coeffs: np.ndarray = field(repr=False)
    tol: float = 1e-13

    def __post_init__(self):
        r = self.radii
        if np.any(r <= 0.5):
            raise ValueError("sigma curve nodes must satisfy r0 > 1/2")
        jumps = np.abs(np.diff(r))
        spacing = np.abs(np.diff(self.thetas))
        if np.any(jumps > 10.0 * np.maximum(spacing, 1e-12)):
            raise ValueError("sigma curve nodes are not continuous")

    def radius(self, theta) -> np.ndarray | float:
        x = 2.0 * np.asarray(theta) / np.pi - 1.0
        out = C.chebval(x, self.coeffs)
        return out if np.ndim(theta) else float(out)

    @property
    def nodes(self):
        return list(zip(self.thetas.tolist(), self.radii.tolist()))


def build_sigma(nnodes: int = 64, tol: float = 1e-13) -> SigmaCurve:
    """Sample r0 at Chebyshev-Gauss angles on (0, pi) and fit an interpolant.

    r0 extends to an analytic function in a neighbourhood of [0, pi], so the
    Chebyshev fit converges geometrically; values are symmetrized about pi/2,
    which the reflection z -> -conj(z) makes exact.
    """
    if nnodes < 16:
        raise ValueError("nnodes must be at least 16")
    j = np.arange(nnodes)
    x = np.cos((2 * j + 1) * np.pi / (2 * nnodes))  # first-kind nodes, no endpoints
    thetas = np.pi * (x + 1.0) / 2.0
    radii = np.array([sigma_radius(t, tol) for t in thetas])
    radii = 0.5 * (radii + radii[::-1])  # enforce the exact symmetry r0(pi - t) = r0(t)
    coeffs = C.chebfit(x, radii, nnodes - 1)
    order = np.argsort(thetas)
    return SigmaCurve(thetas=thetas[order], radii=radii[order], coeffs=coeffs, tol=tol)
