"""Window geometry: discs, polygons and sector-annuli with membership variants.

A window W enters the library three ways:

* measure evaluation -- mass of the limit distribution on W reduces to an
  exact radial integral along rays from the origin (`ray_intervals`) plus
  the real-axis segments carrying the singular part (`real_segments`);
* counting -- membership of resonance atoms under the four boundary
  conventions  W cap C_-,  W cap closed C_-,  interior, closure
  (`contains` with a variant);
* metric -- distance of support points to the window boundary
  (`boundary_distance`), which caps admissible test functions.

Angles of sector windows are measured clockwise from the positive real
axis into the lower half-plane: the sector (theta1, theta2) is
{ t e^{-i theta} : theta1 < theta < theta2 }.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import shapely
from shapely.geometry import LineString, Point
from shapely.geometry import Polygon as ShapelyPolygon

#: membership conventions: interior/closure, optionally cut to the lower half-plane
VARIANTS = ("lower-open", "lower-closed", "open", "closed")

_DISC_SEGMENTS = 1024


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown membership variant {variant!r}; use one of {VARIANTS}")


def _apply_half_plane(inside: np.ndarray, y: np.ndarray, variant: str) -> np.ndarray:
    if variant == "lower-open":
        return inside & (y < 0.0)
    if variant == "lower-closed":
        return inside & (y <= 0.0)
    return inside


class Window:
    """Common interface of all window shapes (origin-anchored dilations)."""

    def contains(self, z, variant: str = "closed"):
        raise NotImplementedError

    def scaled(self, factor: float) -> "Window":
        raise NotImplementedError

    def ray_intervals(self, theta: float) -> list[tuple[float, float]]:
        """Intersections (a, b) of {t e^{-i theta} : t > 0} with the window."""
        raise NotImplementedError

    def real_segments(self) -> list[tuple[float, float]]:
        """Intervals of positive length in W intersect R."""
        raise NotImplementedError

    def boundary_distance(self, z):
        raise NotImplementedError

    @property
    def circumradius(self) -> float:
        raise NotImplementedError

    @property
    def label(self) -> str:
        raise NotImplementedError

    def to_shapely(self) -> ShapelyPolygon:
        raise NotImplementedError


def _as_xy(z):
    z = np.asarray(z, dtype=complex)
    return np.real(z), np.imag(z)


@dataclass(frozen=True)
class Disc(Window):
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("disc radius must be positive")

    def contains(self, z, variant: str = "closed"):
        _check_variant(variant)
        x, y = _as_xy(z)
        rr = np.hypot(x - self.center.real, y - self.center.imag)
        inside = rr < self.radius if "open" in variant else rr <= self.radius
        out = _apply_half_plane(inside, y, variant)
        return out if np.ndim(z) else bool(out)

    def scaled(self, factor: float) -> "Disc":
        return Disc(self.center * factor, self.radius * abs(factor))

    def ray_intervals(self, theta: float) -> list[tuple[float, float]]:
        # |t e^{-i theta} - c|^2 = t^2 - 2 t Re(conj(c) e^{-i theta}) + |c|^2
        b = (np.conj(self.center) * np.exp(-1j * theta)).real
        disc = b * b - (abs(self.center) ** 2 - self.radius ** 2)
        if disc <= 0.0:
            return []
        s = np.sqrt(disc)
        a, bb = max(b - s, 0.0), b + s
        return [(a, bb)] if bb > a else []

    def real_segments(self) -> list[tuple[float, float]]:
        dy = abs(self.center.imag)
        if dy >= self.radius:
            return []
        half = np.sqrt(self.radius ** 2 - dy * dy)
        return [(self.center.real - half, self.center.real + half)]

    def boundary_distance(self, z):
        x, y = _as_xy(z)
        out = np.abs(self.radius - np.hypot(x - self.center.real, y - self.center.imag))
        return out if np.ndim(z) else float(out)

    @property
    def circumradius(self) -> float:
        return abs(self.center) + self.radius

    @property
    def label(self) -> str:
        return f"disc({self.center.real:g}{self.center.imag:+g}i;{self.radius:g})"

    def to_shapely(self) -> ShapelyPolygon:
        return Point(self.center.real, self.center.imag).buffer(
            self.radius, quad_segs=_DISC_SEGMENTS // 4)


@dataclass(frozen=True)
class Polygon(Window):
    vertices: tuple[complex, ...]

    def __init__(self, vertices):
        object.__setattr__(self, "vertices", tuple(complex(v) for v in vertices))
        if len(self.vertices) < 3:
            raise ValueError("polygon needs at least 3 vertices")
        if not self.to_shapely().is_valid:
            raise ValueError("polygon boundary is self-intersecting")

    @cached_property
    def _shape(self) -> ShapelyPolygon:
        return ShapelyPolygon([(v.real, v.imag) for v in self.vertices])

    def to_shapely(self) -> ShapelyPolygon:
        return self._shape

    def contains(self, z, variant: str = "closed"):
        _check_variant(variant)
        x, y = _as_xy(z)
        pts = shapely.points(np.ravel(x), np.ravel(y))
        if "open" in variant:
            inside = shapely.contains(self._shape, pts)
        else:
            inside = shapely.covers(self._shape, pts)
        inside = inside.reshape(np.shape(x))
        out = _apply_half_plane(inside, y, variant)
        return out if np.ndim(z) else bool(out)

    def scaled(self, factor: float) -> "Polygon":
        return Polygon([v * factor for v in self.vertices])

    def _line_cut(self, line: LineString) -> list[tuple[float, float]]:
        inter = self._shape.intersection(line)
        segs = []
        parts = getattr(inter, "geoms", [inter])
        for g in parts:
            if g.is_empty or g.geom_type != "LineString":
                continue
            ts = [np.hypot(px, py) for px, py in g.coords]
            lo, hi = min(ts), max(ts)
            if hi > lo:
                segs.append((lo, hi))
        return sorted(segs)

    def ray_intervals(self, theta: float) -> list[tuple[float, float]]:
        L = self.circumradius * 1.001 + 1e-9
        ray = LineString([(0.0, 0.0), (L * np.cos(theta), -L * np.sin(theta))])
        return self._line_cut(ray)

    def real_segments(self) -> list[tuple[float, float]]:
        L = self.circumradius * 1.001 + 1e-9
        axis = LineString([(-L, 0.0), (L, 0.0)])
        inter = self._shape.intersection(axis)
        segs = []
        for g in getattr(inter, "geoms", [inter]):
            if g.is_empty or g.geom_type != "LineString":
                continue
            xs = [px for px, _ in g.coords]
            lo, hi = min(xs), max(xs)
            if hi > lo:
                segs.append((lo, hi))
        return sorted(segs)

    def boundary_distance(self, z):
        x, y = _as_xy(z)
        pts = shapely.points(np.ravel(x), np.ravel(y))
        out = shapely.distance(self._shape.exterior, pts).reshape(np.shape(x))
        return out if np.ndim(z) else float(out)

    @property
    def circumradius(self) -> float:
        return max(abs(v) for v in self.vertices)

    @property
    def label(self) -> str:
        return "polygon(" + ";".join(
            f"{v.real:g}{v.imag:+g}i" for v in self.vertices) + ")"


@dataclass(frozen=True)
class SectorAnnulus(Window):
    """{t e^{-i theta}: r1 <= t <= r2, theta1 <= theta <= theta2}, angles in [0, pi]."""

    theta1: float
    theta2: float
    r1: float
    r2: float

    def __post_init__(self):
        if not 0.0 <= self.theta1 < self.theta2 <= np.pi:
            raise ValueError("need 0 <= theta1 < theta2 <= pi")
        if not 0.0 <= self.r1 < self.r2:
            raise ValueError("need 0 <= r1 < r2")

    def contains(self, z, variant: str = "closed"):
        _check_variant(variant)
        x, y = _as_xy(z)
        r = np.hypot(x, y)
        th = np.where(r > 0, np.arctan2(-np.asarray(y, float), x), 0.0)
        if "open" in variant:
            inside = (self.r1 < r) & (r < self.r2) & (self.theta1 < th) & (th < self.theta2)
        else:
            inside = (self.r1 <= r) & (r <= self.r2) \
                & (((self.theta1 <= th) & (th <= self.theta2)) | (r == 0.0))
            inside &= y <= 0.0
        out = _apply_half_plane(inside, y, variant)
        return out if np.ndim(z) else bool(out)

    def scaled(self, factor: float) -> "SectorAnnulus":
        return SectorAnnulus(self.theta1, self.theta2, self.r1 * factor, self.r2 * factor)

    def ray_intervals(self, theta: float) -> list[tuple[float, float]]:
        if self.theta1 < theta < self.theta2:
            return [(self.r1, self.r2)]
        return []

    def real_segments(self) -> list[tuple[float, float]]:
        segs = []
        if self.theta1 == 0.0:
            segs.append((self.r1, self.r2))
        if self.theta2 == np.pi:
            segs.append((-self.r2, -self.r1))
        return sorted(segs)

    def boundary_distance(self, z):
        return self.to_shapely().exterior.distance(Point(np.real(z), np.imag(z))) \
            if np.ndim(z) == 0 else np.array(
                [self.boundary_distance(p) for p in np.ravel(z)]).reshape(np.shape(z))

    @property
    def circumradius(self) -> float:
        return self.r2

    @property
    def label(self) -> str:
        return f"sector({self.theta1:g};{self.theta2:g};{self.r1:g};{self.r2:g})"

    def to_shapely(self) -> ShapelyPolygon:
        th = np.linspace(self.theta1, self.theta2, 512)
        outer = [(self.r2 * np.cos(t), -self.r2 * np.sin(t)) for t in th]
        if self.r1 > 0:
            inner = [(self.r1 * np.cos(t), -self.r1 * np.sin(t)) for t in th[::-1]]
        else:
            inner = [(0.0, 0.0)]
        return ShapelyPolygon(outer + inner)
