"""Persistence: experiment configs, profile caches, deterministic CSV/JSON.

All emitted files are byte-deterministic for identical inputs: fixed field
order, fixed decimal formatting (17 significant digits in data files,
shortest round-trip strings in configs) and LF line endings.  The profile
cache stores everything needed to rebuild an MZDistribution without
re-running the quadratures, keyed by (d, tol).
"""

from __future__ import annotations

import json
import os
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from mzres.angular import AngularProfile, e_const
from mzres.complexfn import SigmaCurve
from mzres.mzdist import MZDistribution, c_const
from mzres.windows import Disc, Polygon, SectorAnnulus, Window

#: bump when the cache or config layout changes incompatibly
SCHEMA_VERSION = 1

#: environment variable overriding the default profile cache directory
CACHE_ENV = "MZRES_CACHE_DIR"


class CacheError(RuntimeError):
    """Profile cache unusable: corrupted, incomplete, or wrong schema."""


def _dec(x: float) -> str:
    """Fixed 17-significant-digit decimal, exact under round-trip."""
    return f"{float(x):.17g}"


def _short(x: float) -> str:
    """Shortest decimal string that round-trips to the same float."""
    return repr(float(x))


# ---------------------------------------------------------------------------
# experiment configuration


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one batch run needs, parsed from a flat key=value file."""

    d: int
    shells: tuple[tuple[float, complex], ...]
    radii: tuple[float, ...]
    windows: tuple[Window, ...]
    mesh: float
    tol: float
    seed: int
    outdir: str

    def __post_init__(self):
        if self.d < 3 or self.d % 2 == 0:
            raise ValueError(f"dimension must be odd and >= 3, got {self.d}")
        if not self.shells:
            raise ValueError("at least one potential shell is required")
        rr = [r for r, _ in self.shells]
        if any(b <= a for a, b in zip(rr, rr[1:])) or rr[0] <= 0:
            raise ValueError("shell radii must be positive and strictly increasing")
        if self.shells[-1][1] == 0:
            raise ValueError("the outermost shell value must be nonzero")
        if not self.radii or any(r <= 0 for r in self.radii) \
                or any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("radii must be positive and strictly increasing")
        if not self.mesh > 0:
            raise ValueError("mesh must be positive")
        if not 0.0 < self.tol <= 1e-2:
            raise ValueError("tol must lie in (0, 1e-2]")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    @property
    def a(self) -> float:
        return self.shells[-1][0]


def _window_line(w: Window) -> tuple[str, str]:
    if isinstance(w, Disc):
        return "disc", " ".join(_short(v) for v in
                                (w.center.real, w.center.imag, w.radius))
    if isinstance(w, SectorAnnulus):
        return "sector", " ".join(_short(v) for v in
                                  (w.theta1, w.theta2, w.r1, w.r2))
    if isinstance(w, Polygon):
        return "polygon", " ".join(
            f"{_short(v.real)} {_short(v.imag)}" for v in w.vertices)
    raise TypeError(f"cannot serialize window type {type(w).__name__}")


def save_config(cfg: ExperimentConfig, path: str) -> None:
    lines = [
        f"schema = {SCHEMA_VERSION}",
        "",
        "[experiment]",
        f"d = {cfg.d}",
        f"tol = {_short(cfg.tol)}",
        f"mesh = {_short(cfg.mesh)}",
        f"seed = {cfg.seed}",
        f"outdir = {cfg.outdir}",
        "radii = " + " ".join(_short(r) for r in cfg.radii),
        "",
        "[potential]",
    ]
    for r, v in cfg.shells:
        lines.append(f"shell = {_short(r)} {_short(v.real)} {_short(v.imag)}")
    lines.append("")
    lines.append("[windows]")
    for w in cfg.windows:
        key, val = _window_line(w)
        lines.append(f"{key} = {val}")
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _cfg_error(path: str, lineno: int, msg: str) -> ValueError:
    return ValueError(f"{path}:{lineno}: {msg}")


def load_config(path: str) -> ExperimentConfig:
    scalars: dict[str, str] = {}
    shells: list[tuple[float, complex]] = []
    windows: list[Window] = []
    section = ""
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1].strip()
                continue
            if "=" not in line:
                raise _cfg_error(path, lineno, f"expected key = value, got {line!r}")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            try:
                if section == "potential" and key == "shell":
                    r, re_v, im_v = (float(t) for t in val.split())
                    shells.append((r, complex(re_v, im_v)))
                elif section == "windows":
                    nums = [float(t) for t in val.split()]
                    if key == "disc":
                        cx, cy, rad = nums
                        windows.append(Disc(complex(cx, cy), rad))
                    elif key == "sector":
                        windows.append(SectorAnnulus(*nums))
                    elif key == "polygon":
                        if len(nums) % 2:
                            raise ValueError("odd number of polygon coordinates")
                        windows.append(Polygon(
                            [complex(x, y) for x, y in zip(nums[::2], nums[1::2])]))
                    else:
                        raise ValueError(f"unknown window kind {key!r}")
                else:
                    scalars[key] = val
            except ValueError as exc:
                raise _cfg_error(path, lineno, f"field {key!r}: {exc}") from exc
    if scalars.get("schema") != str(SCHEMA_VERSION):
        raise ValueError(
            f"{path}: schema version {scalars.get('schema')!r} does not match "
            f"{SCHEMA_VERSION}")
    missing = [k for k in ("d", "tol", "mesh", "seed", "outdir", "radii")
               if k not in scalars]
    if missing:
        raise ValueError(f"{path}: missing required fields {missing}")
    try:
        return ExperimentConfig(
            d=int(scalars["d"]),
            shells=tuple(shells),
            radii=tuple(float(t) for t in scalars["radii"].split()),
            windows=tuple(windows),
            mesh=float(scalars["mesh"]),
            tol=float(scalars["tol"]),
            seed=int(scalars["seed"]),
            outdir=scalars["outdir"],
        )
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# profile cache


def default_cache_dir() -> str:
    return os.environ.get(
        CACHE_ENV, os.path.join(os.path.expanduser("~"), ".cache", "mzres"))


def cache_path(d: int, tol: float, cache_dir: str | None = None) -> str:
    return os.path.join(cache_dir or default_cache_dir(),
                        f"profile_d{d}_tol{_short(tol)}.json")


def save_profile_cache(dist: MZDistribution, path: str) -> None:
    p = dist.profile
    payload = {
        "schema_version": SCHEMA_VERSION,
        "d": dist.d,
        "tol": _dec(p.tol),
        "chebyshev_coeffs": [_dec(c) for c in p.coeffs],
        "dcoeffs": [_dec(c) for c in p.dcoeffs],
        "ddcoeffs": [_dec(c) for c in p.ddcoeffs],
        "edge_coeffs": [_dec(c) for c in p.edge_coeffs],
        "edge_theta": _dec(p.edge_theta),
        "e_d": _dec(dist.e_d),
        "c_d": _dec(dist.c_d),
        "sigma_nodes": [[_dec(t), _dec(r)] for t, r in dist.sigma.nodes],
    }
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")


def load_profile_cache(path: str) -> MZDistribution:
    try:
        with open(path) as f:
            payload = json.load(f)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheError(f"unreadable profile cache {path}: {exc}") from exc
    try:
        if payload["schema_version"] != SCHEMA_VERSION:
            raise CacheError(
                f"profile cache {path} has schema version "
                f"{payload['schema_version']}, expected {SCHEMA_VERSION}")
        profile = AngularProfile(
            d=int(payload["d"]),
            tol=float(payload["tol"]),
            coeffs=np.array([float(c) for c in payload["chebyshev_coeffs"]]),
            dcoeffs=np.array([float(c) for c in payload["dcoeffs"]]),
            ddcoeffs=np.array([float(c) for c in payload["ddcoeffs"]]),
            edge_coeffs=np.array([float(c) for c in payload["edge_coeffs"]]),
            edge_theta=float(payload["edge_theta"]),
        )
        thetas = np.array([float(t) for t, _ in payload["sigma_nodes"]])
        radii = np.array([float(r) for _, r in payload["sigma_nodes"]])
        x = 2.0 * thetas / np.pi - 1.0
        sigma = SigmaCurve(thetas=thetas, radii=radii,
                           coeffs=C.chebfit(x, radii, len(radii) - 1))
        dist = MZDistribution(d=profile.d, profile=profile, sigma=sigma,
                              e_d=float(payload["e_d"]), c_d=float(payload["c_d"]))
    except CacheError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise CacheError(f"malformed profile cache {path}: {exc}") from exc
    if abs(dist.e_d - e_const(dist.d)) > 1e-12 \
            or abs(dist.c_d - c_const(profile)) > 10 * max(profile.tol, 1e-12):
        raise CacheError(f"profile cache {path} fails its consistency checks")
    return dist


def cached_distribution(d: int, tol: float = 1e-9,
                        cache_dir: str | None = None) -> MZDistribution:
    """Load the (d, tol) distribution from cache, rebuilding on any defect."""
    path = cache_path(d, tol, cache_dir)
    if os.path.exists(path):
        try:
            return load_profile_cache(path)
        except CacheError as exc:
            warnings.warn(f"rebuilding profile: {exc}", stacklevel=2)
    dist = MZDistribution.build(d, tol)
    save_profile_cache(dist, path)
    return dist


# ---------------------------------------------------------------------------
# deterministic tables


def _cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _dec(v)
    if isinstance(v, str):
        if "," in v or "\n" in v:
            raise ValueError(f"cell value {v!r} would break the CSV layout")
        return v
    raise TypeError(f"unsupported CSV cell type {type(v).__name__}")


def write_csv(header, rows, path: str) -> None:
    """Comma-separated table with mandatory header, .17g floats, LF endings."""
    lines = [",".join(header)]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row {row!r} does not match the header width")
        lines.append(",".join(_cell(v) for v in row))
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write("\n".join(lines) + "\n")


def _jsonify(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _dec(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _dec(obj.real), "im": _dec(obj.imag)}
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"unsupported JSON value type {type(obj).__name__}")


def write_json(report, path: str) -> None:
    """Sorted-key JSON with floats as 17-significant-digit decimal strings."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as f:
        json.dump(_jsonify(report), f, indent=1, sort_keys=True)
        f.write("\n")


# ---------------------------------------------------------------------------
# resonance datasets

RESONANCE_COLUMNS = ("re_lambda", "im_lambda", "l", "channel_order",
                     "harmonic_mult", "total_mult", "residual")


def resonance_rows(rs) -> list[tuple]:
    """Resonance CSV rows (one per entry, recorded upper points included last)."""
    rows = []
    for e in list(rs.entries) + list(rs.upper_entries):
        rows.append((float(e.lam.real), float(e.lam.imag), int(e.l),
                     int(e.order), int(e.harmonic_mult), int(e.mult),
                     float(e.residual)))
    return rows
