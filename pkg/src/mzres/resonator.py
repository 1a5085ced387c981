"""Resonances of compactly supported radial step potentials in odd dimensions.

After separation of variables, the channel of angular momentum l reduces to a
half-line Schrodinger problem of Bessel order nu = l + (d-2)/2 = n + 1/2 with
integer n, so all radial solutions are elementary.  The engine works with
rescaled entire versions of the spherical Bessel pair,

    P_n(x) = j_n(x) / x^n          (even entire, recessive; Miller recurrence)
    Q_n(x) = y_n(x) * x^(n+1)      (even entire, dominant; cylinder y_{n+1/2})
    Xi_n(x) = x^(n+1) h_n(x) e^{-ix}   (a polynomial; scaled cylinder H_{n+1/2})

Evenness in x makes every quantity a function of q^2 = k^2 - v, so the branch
of q never matters, and the Xi normalization clears both the exterior
essential factor e^{ika} and the k = 0 pole: the matching determinant

    D_l(k) = (u(a)/a) * [x^2 Xi_{n-1}(x) - n Xi_n(x)] - u'(a) * Xi_n(x),
    x = k a,

is analytic wherever the interior state (u, u') is, and its zeros in the lower
half-plane are exactly the channel's resonances.  Zeros cluster along the
Re rho(ka/nu) = 0 curve of the channel; the search tiles the band around that
curve with polar sectors (outside it the determinant is pure cancellation
noise at fixed precision), locates zeros by argument-principle winding over
adaptive subdivision, and polishes them by Newton iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq
from scipy.special import hankel1e, yv

from mzres.complexfn import rho

_ORIGIN_MARGIN = 5e-2
_MERGE_TOL = 1e-6
_MIN_BOX = 1e-6


class BoundaryZeroError(RuntimeError):
    """A determinant zero sits on (or too close to) a box contour."""


class WindingError(RuntimeError):
    """Phase tracking along a contour failed to stabilize."""


def harmonic_multiplicity(d: int, l: int) -> int:
    """Dimension of the degree-l spherical harmonics in d variables."""
    if d < 3 or d % 2 == 0:
        raise ValueError(f"dimension must be odd and >= 3, got {d}")
    if l < 0:
        raise ValueError("l must be >= 0")
    return (2 * l + d - 2) * math.factorial(l + d - 3) \
        // (math.factorial(l) * math.factorial(d - 2))


@dataclass(frozen=True)
class RadialPotential:
    """Piecewise-constant radial potential: value v_j on the j-th shell."""

    d: int
    shells: tuple[tuple[float, complex], ...]

    def __init__(self, d: int, shells):
        if d < 3 or d % 2 == 0:
            raise ValueError(f"dimension must be odd and >= 3, got {d}")
        shells = tuple((float(r), complex(v)) for r, v in shells)
        if not shells:
            raise ValueError("potential needs at least one shell")
        radii = [r for r, _ in shells]
        if radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("shell radii must be positive and strictly increasing")
        if shells[-1][1] == 0:
            raise ValueError("the outermost shell value must be nonzero")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "shells", shells)

    @property
    def a(self) -> float:
        return self.shells[-1][0]

    @property
    def max_value(self) -> float:
        return max(abs(v) for _, v in self.shells)

    @property
    def is_real(self) -> bool:
        return all(v.imag == 0 for _, v in self.shells)

    @property
    def label(self) -> str:
        return "steps(" + ";".join(f"{r:g}:{v.real:g}{v.imag:+g}i"
                                   for r, v in self.shells) + ")"


@dataclass(frozen=True)
class ResonanceEntry:
    lam: complex
    l: int
    order: int
    harmonic_mult: int
    residual: float

    @property
    def mult(self) -> int:
        return self.order * self.harmonic_mult


@dataclass(frozen=True)
class ResonanceSet:
    potential: RadialPotential
    entries: tuple[ResonanceEntry, ...]
    radius: float
    upper_entries: tuple[ResonanceEntry, ...] = ()
    channel_complete: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(abs(e.lam) > self.radius * (1 + 1e-12) for e in self.entries):
            raise ValueError("entry outside the search radius")
        lams = [abs(e.lam) for e in self.entries]
        if lams != sorted(lams):
            raise ValueError("entries must be sorted by modulus")


def _spherical_P(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(P_n, P_{n+1}) by the downward Miller recurrence, vectorized in x."""
    x = np.asarray(x, dtype=complex)
    x2 = x * x
    M = n + 30 + int(np.ceil(np.max(np.abs(x)))) if x.size else n + 30
    p_hi = np.zeros_like(x)       # trial P at index m+1
    p = np.ones_like(x)           # trial P at index m
    pn = pn1 = None
    for m in range(M, 0, -1):
        if m == n + 1:
            pn1 = p
        if m == n:
            pn = p
        p_hi, p = p, (2 * m + 1) * p - x2 * p_hi
        big = np.abs(p) > 1e250
        if np.any(big):
            # renormalize per element so long downward runs cannot overflow;
            # only ratios to the trial seed matter
            s = np.where(big, np.abs(p), 1.0)
            p, p_hi = p / s, p_hi / s
            if pn is not None:
                pn = pn / s
            if pn1 is not None:
                pn1 = pn1 / s
    # p is now the trial value at index 0, p_hi at index 1
    if n == 0:
        pn = p
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        e0 = np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1.0, x))
        e1 = np.where(x == 0, 1.0 / 3.0, (e0 - np.cos(x)) / np.where(x == 0, 1.0, x2))
    use0 = np.abs(p) >= np.abs(p_hi)
    norm = np.where(use0, e0 / np.where(p == 0, 1.0, p),
                    e1 / np.where(p_hi == 0, 1.0, p_hi))
    Pn, Pn1 = pn * norm, pn1 * norm
    if np.any(x == 0):
        zero = x == 0
        Pn = np.where(zero, 1.0 / _dfact(2 * n + 1), Pn)
        Pn1 = np.where(zero, 1.0 / _dfact(2 * n + 3), Pn1)
    return Pn, Pn1


def _dfact(m: int) -> float:
    out = 1.0
    while m > 1:
        out *= m
        m -= 2
    return out


def _spherical_Q(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Q_{n-1}, Q_n), i.e. y_m(x) x^{m+1} for m = n-1, n.

    The elementary upward recurrence is unstable through the transition zone
    m ~ |x| for complex x (relative error grows by a fixed factor per step
    while the y-solution dips), so for n >= 1 the values come from the
    half-integer Bessel Y instead.  The sqrt branch cuts of the two factors
    cancel, leaving the entire-in-x^2 function.
    """
    x = np.asarray(x, dtype=complex)
    with np.errstate(invalid="ignore", divide="ignore"):
        if n == 0:
            qm1 = np.where(x == 0, 1.0, np.sin(x) / np.where(x == 0, 1.0, x))
            return qm1, -np.cos(x)
        xs = np.where(x == 0, 1.0, x)
        c = np.sqrt(np.pi / (2.0 * xs))
        lo = c * yv(n - 0.5, xs) * xs ** n
        hi = c * yv(n + 0.5, xs) * xs ** (n + 1)
    if np.any(x == 0):
        zero = x == 0
        lo = np.where(zero, -_dfact(2 * n - 3), lo)
        hi = np.where(zero, -_dfact(2 * n - 1), hi)
    return lo, hi


def _xi(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(Xi_{n-1}, Xi_n) from the scaled half-integer Hankel function.

    Xi_n = x^{n+1} h_n(x) e^{-ix} is exactly sqrt(pi x / 2) H_{n+1/2}(x)
    e^{-ix} x^n; the e^{-ix} factor is the library's own exponential scaling,
    so every magnitude stays polynomial.  The naive upward recurrence on Xi
    is useless here: through the transition zone m ~ |x| its intermediate
    values sit many orders above the final answer near the zero curve of h_n,
    and the accumulated roundoff swamps exactly the region the zeros live in.
    The sqrt branch cuts of the two factors cancel (h_n is single-valued).
    """
    x = np.asarray(x, dtype=complex)
    if n == 0:
        return 1.0 / x, np.full_like(x, -1j)
    c = np.sqrt(np.pi / (2.0 * x)) * x ** n
    xi_lo = c * hankel1e(n - 0.5, x)
    xi_hi = c * hankel1e(n + 0.5, x) * x
    # the Fortran Hankel routine spuriously underflows to exact 0 for orders
    # around ~86 and up at moderately deep below-barrier arguments; patch the
    # few affected points with slow arbitrary-precision evaluations
    bad = (xi_lo == 0) | (xi_hi == 0) | ~np.isfinite(xi_lo) | ~np.isfinite(xi_hi)
    if np.any(bad):
        import mpmath as mp
        flat_lo, flat_hi = xi_lo.reshape(-1), xi_hi.reshape(-1)
        with mp.workdps(30):
            for i in np.flatnonzero(bad.reshape(-1)):
                xm = mp.mpc(complex(x.reshape(-1)[i]))
                s = mp.sqrt(mp.pi / (2 * xm)) * mp.e ** (-1j * xm)
                flat_lo[i] = complex(s * xm ** n * mp.hankel1(n - mp.mpf(1) / 2, xm))
                flat_hi[i] = complex(s * xm ** (n + 1) * mp.hankel1(n + mp.mpf(1) / 2, xm))
    return xi_lo, xi_hi


def _interior_state(V: RadialPotential, n: int, k: np.ndarray):
    """Regular interior solution (u, u') at r = a, renormalized per shell.

    Within each shell the basis is u1 = r^{n+1} P_n(qr), u2 = r^{-n} Q_n(qr)
    with unit Wronskian (q-branch irrelevant: both are even).  The positive
    per-shell normalization keeps magnitudes bounded without touching phases.
    """
    k = np.asarray(k, dtype=complex)
    q2 = k * k - V.shells[0][1]
    q = np.sqrt(q2)
    r1 = V.shells[0][0]
    x = q * r1
    Pn, Pn1 = _spherical_P(n, x)
    u = r1 ** (n + 1) * Pn
    up = r1 ** n * ((n + 1) * Pn - x * x * Pn1)
    s = np.maximum(np.maximum(np.abs(u), np.abs(up)), 1e-300)
    u, up = u / s, up / s

    for (r_in, _), (r_out, v) in zip(V.shells, V.shells[1:]):
        q = np.sqrt(k * k - v)
        xi_, xo = q * r_in, q * r_out
        Pi, Pi1 = _spherical_P(n, xi_)
        Qi_m1, Qi = _spherical_Q(n, xi_)
        u1_i = r_in ** (n + 1) * Pi
        u1p_i = r_in ** n * ((n + 1) * Pi - xi_ * xi_ * Pi1)
        u2_i = r_in ** (-n) * Qi
        u2p_i = r_in ** (-n - 1) * (-n * Qi + xi_ * xi_ * Qi_m1)
        alpha = u * u2p_i - up * u2_i
        beta = up * u1_i - u * u1p_i
        Po, Po1 = _spherical_P(n, xo)
        Qo_m1, Qo = _spherical_Q(n, xo)
        u = alpha * r_out ** (n + 1) * Po + beta * r_out ** (-n) * Qo
        up = alpha * r_out ** n * ((n + 1) * Po - xo * xo * Po1) \
            + beta * r_out ** (-n - 1) * (-n * Qo + xo * xo * Qo_m1)
        s = np.maximum(np.maximum(np.abs(u), np.abs(up)), 1e-300)
        u, up = u / s, up / s
    return u, up


def channel_det(V: RadialPotential, l: int, k) -> complex | np.ndarray:
    """Matching determinant D_l(k); its zeros in C_- are the channel resonances.

    Normalized by e^{-ika} (folded into Xi) and by the largest intermediate
    magnitude per shell, so |D_l| is scale-stable.  Raises OverflowError if the
    evaluation leaves the supported depth (|Im k| * a beyond roughly 50, or k
    far below the channel barrier where the dominant solutions overflow).
    """
    if l < 0:
        raise ValueError("l must be >= 0")
    kk = np.asarray(k, dtype=complex)
    if np.any(kk == 0):
        raise ValueError("channel_det is undefined at k = 0")
    n = l + (V.d - 3) // 2
    u, up = _interior_state(V, n, kk)
    x = kk * V.a
    Xi_m1, Xi = _xi(n, x)
    D = (u / V.a) * (x * x * Xi_m1 - n * Xi) - up * Xi
    if not np.all(np.isfinite(D)):
        raise OverflowError(
            "channel determinant overflow: |Im k|*a exceeds the supported "
            "search depth (~50) or k lies far below the channel barrier")
    return D if np.ndim(k) else complex(D)


# ---------------------------------------------------------------------------
# argument-principle zero search


# ---------------------------------------------------------------------------
# argument-principle zero search
#
# Contours are rectangles or annular sectors.  Sectors matter: below the
# semiclassical barrier curve {Re rho(k a / nu) = 0} the true determinant is
# smaller than its constituent terms by exp(-2 nu Re rho), so once that factor
# drops under machine precision the evaluated phase is cancellation noise and
# no contour through the region can be trusted.  Channel tilings therefore
# follow the curve: inner radii sit where 2 nu Re rho reaches _SAFE_EXPONENT,
# and all genuine zeros (which cluster on the curve itself) stay inside.

_SAFE_EXPONENT = 26.0


def _sector_points(shape, t):
    """Map arclength-like parameters t in [0, 4) to sector boundary points,
    positively oriented (z = r e^{-i phi}, phi the clockwise angle)."""
    _, r1, r2, p1, p2 = shape
    t = np.asarray(t, dtype=float)
    seg = np.floor(t).astype(int) % 4
    s = t - np.floor(t)
    r = np.where(seg == 0, r1 + s * (r2 - r1),
        np.where(seg == 1, r2,
        np.where(seg == 2, r2 + s * (r1 - r2), r1)))
    p = np.where(seg == 0, p2,
        np.where(seg == 1, p2 + s * (p1 - p2),
        np.where(seg == 2, p1, p1 + s * (p2 - p1))))
    return r * np.exp(-1j * p)


def _boundary_points(shape, a: float):
    """Initial positively-oriented boundary polyline of a contour shape."""
    step = 0.25 / a
    if shape[0] == "rect":
        _, x1, x2, y1, y2 = shape
        corners = [(x1, y1), (x2, y1), (x2, y2), (x1, y2)]
        pts = []
        for (ax, ay), (bx, by) in zip(corners, corners[1:] + corners[:1]):
            n = max(4, int(np.ceil(np.hypot(bx - ax, by - ay) / step)))
            s = np.linspace(0.0, 1.0, n, endpoint=False)
            pts.append((ax + s * (bx - ax)) + 1j * (ay + s * (by - ay)))
        out = np.concatenate(pts)
    else:
        _, r1, r2, p1, p2 = shape
        lens = [r2 - r1, r2 * (p2 - p1), r2 - r1, r1 * (p2 - p1)]
        pts = []
        for seg, ln in enumerate(lens):
            n = max(4, int(np.ceil(ln / step)))
            pts.append(seg + np.linspace(0.0, 1.0, n, endpoint=False))
        out = _sector_points(shape, np.concatenate(pts))
    return np.append(out, out[0])


def _shape_center(shape) -> complex:
    if shape[0] == "rect":
        _, x1, x2, y1, y2 = shape
        return complex(0.5 * (x1 + x2), 0.5 * (y1 + y2))
    _, r1, r2, p1, p2 = shape
    return 0.5 * (r1 + r2) * np.exp(-0.5j * (p1 + p2))


def _shape_size(shape) -> float:
    if shape[0] == "rect":
        _, x1, x2, y1, y2 = shape
        return max(x2 - x1, y2 - y1)
    _, r1, r2, p1, p2 = shape
    return max(r2 - r1, r2 * (p2 - p1))


def _shape_split(shape):
    """Binary split along the larger extent, slightly off-center so that
    subdivision lines never sit persistently on symmetry axes (the imaginary
    axis carries antibound-state zeros for real potentials)."""
    if shape[0] == "rect":
        _, x1, x2, y1, y2 = shape
        if x2 - x1 >= y2 - y1:
            xm = x1 + 0.513 * (x2 - x1)
            return [("rect", x1, xm, y1, y2), ("rect", xm, x2, y1, y2)]
        ym = y1 + 0.487 * (y2 - y1)
        return [("rect", x1, x2, y1, ym), ("rect", x1, x2, ym, y2)]
    _, r1, r2, p1, p2 = shape
    if r2 - r1 >= r2 * (p2 - p1):
        rm = r1 + 0.513 * (r2 - r1)
        return [("sect", r1, rm, p1, p2), ("sect", rm, r2, p1, p2)]
    pm = p1 + 0.487 * (p2 - p1)
    return [("sect", r1, r2, p1, pm), ("sect", r1, r2, pm, p2)]


def _shape_jitter(shape, amount: float):
    if shape[0] == "rect":
        _, x1, x2, y1, y2 = shape
        return ("rect", x1 - amount, x2 + amount, y1 - amount, y2 + amount)
    _, r1, r2, p1, p2 = shape
    da = amount / max(r1, amount)
    return ("sect", max(r1 - amount, amount), r2 + amount, p1 - da, p2 + da)


def _shape_contains(shape, z: complex, margin: float) -> bool:
    if shape[0] == "rect":
        _, x1, x2, y1, y2 = shape
        return (x1 - margin <= z.real <= x2 + margin
                and y1 - margin <= z.imag <= y2 + margin)
    _, r1, r2, p1, p2 = shape
    r = abs(z)
    if not r1 - margin <= r <= r2 + margin:
        return False
    phi = -np.angle(z)
    dp = margin / max(r1, margin)
    return p1 - dp <= phi <= p2 + dp


class _Contour:
    """Mutable search state of one contour: boundary samples and D values."""

    __slots__ = ("shape", "pts", "vals", "scale", "w", "boundary", "attempt")

    def __init__(self, shape, attempt: int = 0):
        self.shape = shape
        self.pts = None
        self.vals = None
        self.scale = 0.0
        self.w = None
        self.boundary = False
        self.attempt = attempt


def _batched_windings(V, l, states, max_depth: int = 26) -> None:
    """Winding numbers of D_l for many contours at once, by phase tracking.

    Points are inserted until consecutive phase increments stay below pi/2,
    which pins the continuous argument (the per-element normalization of
    channel_det is positive, so phases are unaffected by it).  All contours
    share one channel_det call per refinement generation.  Contours that run
    into a (near-)zero, or whose phase cannot be stabilized, are flagged
    `boundary` for the caller to jitter.
    """
    fresh = [s for s in states if s.vals is None]
    if fresh:
        arrs = [_boundary_points(s.shape, V.a) for s in fresh]
        allv = channel_det(V, l, np.concatenate(arrs))
        ofs = 0
        for s, arr in zip(fresh, arrs):
            s.pts, s.vals = arr, allv[ofs:ofs + len(arr)]
            ofs += len(arr)
    pending = list(states)
    for _ in range(max_depth):
        owners, mid_arrays, still = [], [], []
        for s in pending:
            absv = np.abs(s.vals)
            s.scale = float(absv.max())
            if absv.min() < 1e-12 * s.scale:
                s.boundary = True
                continue
            dphi = np.angle(s.vals[1:] / s.vals[:-1])
            bad = np.abs(dphi) >= np.pi / 2
            if not bad.any():
                w = dphi.sum() / (2 * np.pi)
                wi = int(np.rint(w))
                if abs(w - wi) > 0.25:
                    s.boundary = True       # unresolved phase: jitter and retry
                else:
                    s.w = wi
                continue
            idx = np.flatnonzero(bad)
            owners.append((s, idx))
            mid_arrays.append(0.5 * (s.pts[idx] + s.pts[idx + 1]))
            still.append(s)
        if not still:
            return
        allv = channel_det(V, l, np.concatenate(mid_arrays))
        ofs = 0
        for (s, idx), mids in zip(owners, mid_arrays):
            mv = allv[ofs:ofs + len(mids)]
            ofs += len(mids)
            s.pts = np.insert(s.pts, idx + 1, mids)
            s.vals = np.insert(s.vals, idx + 1, mv)
        pending = still
    for s in pending:
        # a phase jump that survives this much refinement is a zero hugging
        # the contour; flag it so the caller jitters the shape
        s.boundary = True


def _batched_newton(V, l, jobs, tol: float):
    """Newton polish of many candidate simple zeros in lockstep.

    jobs: list of (shape, z0, scale).  Returns per job (zero, residual) or
    None; the derivative is a central difference, steps are capped at the
    shape size, and iterates escaping the shape by more than one size fail.
    """
    if not jobs:
        return []
    m = len(jobs)
    z = np.array([j[1] for j in jobs], dtype=complex)
    shapes = [j[0] for j in jobs]
    diag = np.array([2.0 * _shape_size(sh) for sh in shapes])
    scale = np.maximum(np.array([j[2] for j in jobs], dtype=float), 1e-300)
    active = np.ones(m, dtype=bool)
    done = np.zeros(m, dtype=bool)
    resid = np.zeros(m)
    for _ in range(60):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        za = z[idx]
        h = 1e-7 * (1.0 + np.abs(za))
        vals = channel_det(V, l, np.concatenate([za, za + h, za - h]))
        f, fp, fm = vals[:idx.size], vals[idx.size:2 * idx.size], vals[2 * idx.size:]
        df = (fp - fm) / (2 * h)
        fail = df == 0
        step = np.where(fail, 0.0, -f / np.where(fail, 1.0, df))
        cap = np.abs(step) > diag[idx]
        step = np.where(cap, step * diag[idx] / np.maximum(np.abs(step), 1e-300), step)
        zn = za + step
        out = np.array([not _shape_contains(shapes[i], complex(zz), diag[i])
                        for i, zz in zip(idx, zn)])
        fail |= out
        conv = (np.abs(step) < 1e-12 * (1.0 + np.abs(zn))) & ~fail
        z[idx] = zn
        done[idx[conv]] = True
        active[idx[conv | fail]] = False
    idx = np.flatnonzero(done)
    if idx.size:
        r = np.abs(channel_det(V, l, z[idx])) / scale[idx]
        resid[idx] = r
        # a converged iterate that left its shape belongs to some other
        # contour's zero; reject it so the caller subdivides instead
        inside = np.array([_shape_contains(shapes[i], complex(z[i]), 10 * _MERGE_TOL)
                           for i in idx])
        done[idx] = (r <= tol) & inside
    return [(complex(z[i]), float(resid[i])) if done[i] else None for i in range(m)]


def _search_shapes(V, l, shapes, tol: float):
    """Zeros with orders over a batch of contours (union, possibly overlapping
    after jitter; callers merge duplicates)."""
    found: list[tuple[complex, int, float]] = []
    work = [_Contour(sh) for sh in shapes]
    for _ in range(400):
        if not work:
            return found
        _batched_windings(V, l, work)
        newton_states, next_work = [], []

        def subdivide(s):
            if _shape_size(s.shape) <= _MIN_BOX:
                zc = _shape_center(s.shape)
                res = float(np.abs(channel_det(V, l, np.array([zc]))[0])) / s.scale
                found.append((zc, s.w, res))
                return
            next_work.extend(_Contour(sh) for sh in _shape_split(s.shape))

        for s in work:
            if s.boundary:
                if s.attempt >= 8:
                    raise BoundaryZeroError(f"persistent contour zero near {s.shape}")
                amount = 1e-7 * 3 ** s.attempt * (1.0 + abs(_shape_center(s.shape)))
                next_work.append(_Contour(_shape_jitter(s.shape, amount),
                                          s.attempt + 1))
            elif s.w == 0:
                continue
            elif s.w == 1:
                newton_states.append(s)
            else:
                subdivide(s)
        results = _batched_newton(
            V, l, [(s.shape, _shape_center(s.shape), s.scale)
                   for s in newton_states], tol)
        for s, res in zip(newton_states, results):
            if res is not None:
                found.append((res[0], 1, res[1]))
            else:
                subdivide(s)
        work = next_work
    raise WindingError("contour subdivision failed to terminate")


def channel_zeros(V: RadialPotential, l: int, box, tol: float = 1e-9):
    """All zeros (with orders) of D_l in the half-open box (x1,x2) x (y1,y2).

    Boxes are subdivided until the winding number is 0 or 1; simple zeros are
    Newton-polished to normalized residual <= tol.  A zero detected on a
    contour triggers a deterministic outward jitter of that box; windings >= 2
    at the minimal box size are reported as multiple zeros of that order.
    """
    x1, x2, y1, y2 = box
    if not (x1 < x2 and y1 < y2):
        raise ValueError("empty box")
    if max(abs(x1), abs(x2)) < 10 * tol and max(abs(y1), abs(y2)) < 10 * tol:
        raise ValueError("box must avoid k = 0")
    found = _search_shapes(V, l, [("rect", *map(float, box))], tol)
    # keep zeros inside the requested (half-open) box, with a hair of margin
    # for Newton round-off on shared edges; duplicates from overlapping
    # jittered boxes are merged
    eps = 1e-9
    kept = [t for t in found
            if x1 - eps <= t[0].real < x2 + eps and y1 - eps <= t[0].imag < y2 + eps]
    return [(z, w) for z, w, _ in _merge_zeros(kept)]


def _merge_zeros(zeros):
    merged = []
    for t in sorted(zeros, key=lambda t: (t[0].real, t[0].imag)):
        if any(abs(t[0] - m[0]) < _MERGE_TOL for m in merged):
            continue
        merged.append(t)
    return merged


def _safe_radius(nu: float, a: float, phi: float) -> float:
    """Smallest |k| at angle -phi where the channel determinant is still
    numerically meaningful: 2 nu Re rho(k a / nu) <= _SAFE_EXPONENT.

    Re rho only depends on |phi| (conjugation symmetry), so upper-half-plane
    rays are handled by the same curve.
    """
    thresh = _SAFE_EXPONENT / (2.0 * nu)
    f = lambda t: float(np.real(rho(t * np.exp(1j * abs(phi))))) - thresh
    lo = 1e-12
    if f(lo) <= 0.0:            # threshold enormous: whole ray is safe
        return 0.0
    t = brentq(f, lo, 1.5, xtol=1e-9, rtol=1e-12)
    return nu * t / a


def _outer_radius(nu: float, a: float, phi: float, cap: float) -> float:
    """Largest useful |k| on the ray: beyond 2 nu Re rho = -_SAFE_EXPONENT the
    Bessel pair separates exponentially and the evaluated determinant drowns
    in the final cancellation -- and no zeros live out there (they cluster on
    Re rho = 0, which runs along the real axis for |k a / nu| > 1, so near the
    axis this cutoff recedes beyond any finite radius)."""
    thresh = -_SAFE_EXPONENT / (2.0 * nu)
    f = lambda t: float(np.real(rho(t * np.exp(1j * abs(phi))))) - thresh
    hi = 1.0
    t_cap = cap * a / nu + 1.0
    while f(hi) > 0.0:
        hi *= 2.0
        if hi > t_cap:
            return cap
    t = brentq(f, hi / 2.0 if hi > 1.0 else 1e-12, hi, xtol=1e-9, rtol=1e-12)
    return min(cap, nu * t / a)


def _channel_sectors(V: RadialPotential, nu: float, R: float, size: float = 3.0,
                     phi_lo: float = 0.0, phi_hi: float = np.pi):
    """Polar tiling of the channel's trustworthy band in one half-plane.

    Angular cells of outer arc <= size; each cell's rings run between the two
    level curves 2 nu Re rho(k a / nu) = +-_SAFE_EXPONENT (clipped to the
    search radius, never below _ORIGIN_MARGIN which also keeps contours off
    k = 0).  All channel zeros lie well inside that band: they concentrate
    near Re rho = 0.
    """
    a = V.a
    nphi = max(4, int(np.ceil(R * (phi_hi - phi_lo) / size)))
    phis = np.linspace(phi_lo, phi_hi, nphi + 1)
    shapes = []
    for p1, p2 in zip(phis, phis[1:]):
        samples = (p1, 0.5 * (p1 + p2), p2)
        r_in = max(_ORIGIN_MARGIN, min(_safe_radius(nu, a, p) for p in samples))
        r_out = min(R, max(_outer_radius(nu, a, p, R) for p in samples))
        if r_in >= r_out:
            continue
        nr = max(1, int(np.ceil((r_out - r_in) / size)))
        rs = np.linspace(r_in, r_out, nr + 1)
        shapes.extend(("sect", r1, r2, p1, p2) for r1, r2 in zip(rs, rs[1:]))
    return shapes


def resonances(V: RadialPotential, R: float, tol: float = 1e-9,
               l_stop: int = 6) -> ResonanceSet:
    """All resonances with |k| <= R, Im k < 0, with multiplicities.

    Channels are scanned from l = 0 up to the barrier heuristic
    l_max = ceil(e a R / 2) + 10, stopping early after `l_stop` consecutive
    empty channels; each channel is tiled in polar sectors from its safe
    curve outward.  Zeros in the closed upper half-plane (finitely many, and
    only present for channels that can trap: nu <~ a sqrt(max |v|)) are
    recorded apart.
    """
    if R <= 0:
        raise ValueError("R must be positive")
    a = V.a
    l_max = int(np.ceil(np.e * a * R / 2)) + 10
    entries: list[ResonanceEntry] = []
    upper: list[ResonanceEntry] = []
    complete: dict[int, bool] = {}
    r_up = min(R, np.sqrt(V.max_value) + 2.0)
    nu_up = 2.0 * a * np.sqrt(V.max_value) + 5.0
    empty_streak = 0
    for l in range(l_max + 1):
        nu = l + (V.d - 2) / 2.0
        hm = harmonic_multiplicity(V.d, l)
        sectors = _channel_sectors(V, nu, R)
        if not sectors:
            break
        lower_zeros = _search_shapes(V, l, sectors, tol)
        nzero = 0
        for z, w, resid in _merge_zeros(lower_zeros):
            if abs(z) > R or z.imag >= 1e-9:
                continue
            entries.append(ResonanceEntry(z, l, w, hm, resid))
            nzero += w
        if nu <= nu_up:
            upper_shapes = _channel_sectors(V, nu, r_up,
                                            phi_lo=-np.pi + 1e-3, phi_hi=-1e-3)
            for z, w, resid in _merge_zeros(_search_shapes(V, l, upper_shapes, tol)):
                if abs(z) <= r_up and z.imag > 0:
                    upper.append(ResonanceEntry(z, l, w, hm, resid))
        complete[l] = True
        empty_streak = empty_streak + 1 if nzero == 0 else 0
        if empty_streak >= l_stop:
            break
    entries.sort(key=lambda e: (abs(e.lam), e.lam.real, e.l))
    return ResonanceSet(potential=V, entries=tuple(entries), radius=R,
                        upper_entries=tuple(upper), channel_complete=complete)


def swave_oracle(a: float, v: complex, box, grid: int = 400):
    """Independent l = 0, d = 3 oracle: zeros of q cot(q a) - i k, q = sqrt(k^2 - v).

    Dense-grid minima of the (branch-free, even-in-q) closed form, polished by
    Newton on the scalar function.  Test helper only.
    """
    x1, x2, y1, y2 = box

    def f(k):
        q = np.sqrt(np.asarray(k, complex) ** 2 - v)
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            return q * np.cos(q * a) / np.sin(q * a) - 1j * k

    X, Y = np.meshgrid(np.linspace(x1, x2, grid), np.linspace(y1, y2, grid))
    K = X + 1j * Y
    A = np.abs(f(K))
    A = np.where(np.isfinite(A), A, np.inf)
    zeros = []
    for i in range(1, grid - 1):
        for j in range(1, grid - 1):
            w = A[i - 1:i + 2, j - 1:j + 2]
            if A[i, j] == w.min() and A[i, j] < np.median(A[np.isfinite(A)]):
                z = K[i, j]
                for _ in range(80):
                    h = 1e-7 * (1 + abs(z))
                    df = (f(z + h) - f(z - h)) / (2 * h)
                    if df == 0:
                        break
                    step = -f(z) / df
                    z = z + step
                    if abs(step) < 1e-13 * (1 + abs(z)):
                        break
                if x1 <= z.real <= x2 and y1 <= z.imag <= y2 \
                        and abs(f(z)) < 1e-6 * (1 + abs(z)):
                    if all(abs(z - zz) > _MERGE_TOL for zz in zeros):
                        zeros.append(complex(z))
    return sorted(zeros, key=lambda t: (t.real, t.imag))
