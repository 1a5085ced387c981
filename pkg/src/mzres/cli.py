"""Batch command-line front-end.

Subcommands wrap the library one-to-one and emit deterministic CSV/JSON
reports, with matplotlib figures rendered next to the tables (suppress with
--no-figures).  Exit codes: 0 success, 1 numerical failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from mzres.angular import e_const, h1_direct
from mzres.counting import (REPORT_COLUMNS, empirical_measure, n_count,
                            weak_convergence_report)
from mzres.io_store import (RESONANCE_COLUMNS, cached_distribution, load_config,
                            resonance_rows, write_csv, write_json)
from mzres.metric import dist_lip, discretize_mz, rate_fit, restrict_empirical
from mzres.mzdist import (Sector, c_const, c_const_dual, corollary_coefficient,
                          kappa, potential_H, sector_mass, window_mass)
from mzres.resonator import RadialPotential, channel_zeros, resonances, swave_oracle
from mzres.windows import Disc, SectorAnnulus

DISTANCE_COLUMNS = ("r", "omega_id", "gamma", "value", "solver_gap", "mesh")
RATE_COLUMNS = ("omega_id", "slope", "intercept", "residual")


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 2."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


# ---------------------------------------------------------------------------
# verify


def _endpoint_derivative(d: int, at_zero: bool) -> float:
    """Extrapolated one-sided derivative of h_d at 0+ or pi-.

    h' approaches its limit like a series in theta^(1/2) starting at
    theta^(3/2); fitting the first few powers on shrinking angles removes the
    leading corrections (residual ~1e-8 in practice).
    """
    thetas = np.array([0.02, 0.01, 0.005, 0.0025])
    vals = np.array([h1_direct(d, t if at_zero else np.pi - t) for t in thetas])
    A = np.column_stack([thetas ** p for p in (0.0, 1.5, 2.0, 2.5)])
    coef = np.linalg.solve(A, vals)
    return float(coef[0])


def _verify_checks(d: int, tol: float):
    dist = cached_distribution(d, tol)
    p = dist.profile
    ed = e_const(d)
    checks = []

    t = np.linspace(0.0, np.pi / 2, 64)
    dev = float(np.max(np.abs(p.h(np.pi / 2 + t) - p.h(np.pi / 2 - t))))
    checks.append(("h reflection symmetry", dev, 1e-8))

    checks.append(("h'(0+) vs e_d", abs(_endpoint_derivative(d, True) - ed), 1e-4))
    checks.append(("h'(pi-) vs -e_d",
                   abs(_endpoint_derivative(d, False) + ed), 1e-4))

    c1, c2 = c_const(p), c_const_dual(d, 1e-8)
    checks.append(("dual c_d agreement", abs(c1 - c2) / c1, 1e-5))

    total = sector_mass(dist, Sector(0.0, np.pi)) + dist.mu0_total
    checks.append(("unit mass, angular route", abs(total - 1.0), 1e-5))
    total2 = window_mass(dist, SectorAnnulus(0.0, np.pi, 0.0, 1.0), 1e-6)
    checks.append(("unit mass, window quadrature", abs(total2 - 1.0), 1e-3))

    w = Disc(-0.4j, 0.25)
    base = window_mass(dist, w, 1e-8)
    dev = max(abs(window_mass(dist, w.scaled(lam), 1e-8) - lam ** d * base)
              / (lam ** d * base) for lam in (0.5, 2.0))
    checks.append(("dilation homogeneity", dev, 1e-5))

    h = 1e-3
    dev = 0.0
    for z in (0.3 - 0.4j, -0.2 - 0.5j, 0.5 - 0.3j, -0.7j):
        lap = (potential_H(dist, z + h) + potential_H(dist, z - h)
               + potential_H(dist, z + 1j * h) + potential_H(dist, z - 1j * h)
               - 4.0 * potential_H(dist, z)) / (h * h)
        dev = max(dev, abs(lap / (2.0 * np.pi) - kappa(dist, z)) / kappa(dist, z))
    checks.append(("Laplacian of H vs density", dev, 1e-2))
    return checks


def _cmd_verify(args) -> int:
    _require(args.tol > 0.0, "tol must be positive")
    _require(args.d >= 3 and args.d % 2 == 1, "dimension must be odd and >= 3")
    checks = _verify_checks(args.d, args.tol)
    width = max(len(n) for n, _, _ in checks)
    ok_all = True
    for name, value, tol in checks:
        ok = value <= tol
        ok_all &= ok
        print(f"{name:<{width}}  {value:12.3e}  <= {tol:.0e}  "
              f"{'PASS' if ok else 'FAIL'}")
    return 0 if ok_all else 1


# ---------------------------------------------------------------------------
# tables


def _cmd_hd_table(args) -> int:
    _require(args.n >= 2, "need at least 2 table rows")
    dist = cached_distribution(args.d, args.tol)
    p = dist.profile
    thetas = np.linspace(0.0, np.pi, args.n)
    rows = [(float(t), p.h(t), p.h1(t), p.h2(t), p.density(t)) for t in thetas]
    write_csv(("theta", "h", "dh", "ddh", "density"), rows, args.out)
    if not args.no_figures:
        from mzres import plots
        plots.profile_figure(dist, os.path.splitext(args.out)[0] + ".png")
    print(f"wrote {args.out}")
    return 0


def _cmd_sector_mass(args) -> int:
    _require(0.0 <= args.theta1 < args.theta2 <= np.pi + 1e-15,
             "need 0 <= theta1 < theta2 <= pi")
    dist = cached_distribution(args.d, args.tol)
    s = Sector(args.theta1, min(args.theta2, np.pi))
    lemma = sector_mass(dist, s)
    coro = corollary_coefficient(dist, s)
    if args.convention in ("both", "lemma"):
        print(f"lemma      {lemma:.12g}")
    if args.convention in ("both", "corollary") and \
            (args.convention == "corollary" or coro != lemma):
        print(f"corollary  {coro:.12g}")
    return 0


# ---------------------------------------------------------------------------
# resonance pipeline


def _outdir(args, cfg) -> str:
    out = args.out or cfg.outdir
    os.makedirs(out, exist_ok=True)
    return out


def _cmd_resonances(args) -> int:
    cfg = load_config(args.config)
    out = _outdir(args, cfg)
    V = RadialPotential(cfg.d, cfg.shells)
    R = max(cfg.radii)
    rs = resonances(V, R, tol=min(cfg.tol, 1e-9))

    if args.oracle:
        _require(cfg.d == 3, "the s-wave oracle exists only for d = 3")
        _require(len(cfg.shells) == 1, "the s-wave oracle needs a single shell")
        box = (-8.0, 8.0, -4.0, -1e-6)
        key = lambda z: (z.real, z.imag)
        mine = sorted((z for z, _ in channel_zeros(V, 0, box)), key=key)
        ref = sorted(swave_oracle(cfg.a, cfg.shells[0][1], box), key=key)
        if len(mine) != len(ref) or any(abs(a - b) > 1e-8
                                        for a, b in zip(mine, ref)):
            raise RuntimeError(
                f"s-wave oracle mismatch: engine found {len(mine)} zeros, "
                f"oracle {len(ref)}")
        print(f"oracle check passed on {len(ref)} l=0 zeros")

    csv_path = os.path.join(out, "resonances.csv")
    write_csv(RESONANCE_COLUMNS, resonance_rows(rs), csv_path)
    dist = cached_distribution(cfg.d, cfg.tol)
    summary = {
        "potential": V.label,
        "search_radius": R,
        "entries": len(rs.entries),
        "upper_entries": len(rs.upper_entries),
        "counts": {repr(r): n_count(rs, r) for r in cfg.radii},
        "weyl_ratios": {
            repr(r): n_count(rs, r) / (dist.c_d * cfg.a ** cfg.d * r ** cfg.d)
            for r in cfg.radii},
    }
    write_json(summary, os.path.join(out, "resonances_summary.json"))
    if not args.no_figures:
        from mzres import plots
        plots.resonance_figure(rs, os.path.join(out, "resonances.png"))
    print(f"wrote {csv_path} ({len(rs.entries)} entries)")
    return 0


def _cmd_converge(args) -> int:
    cfg = load_config(args.config)
    _require(len(cfg.windows) > 0, "converge needs at least one window")
    out = _outdir(args, cfg)
    dist = cached_distribution(cfg.d, cfg.tol)
    V = RadialPotential(cfg.d, cfg.shells)
    rs = resonances(V, max(cfg.radii), tol=min(cfg.tol, 1e-9))

    rows = weak_convergence_report(rs, dist, cfg.radii, cfg.windows)
    write_csv(REPORT_COLUMNS, rows, os.path.join(out, "convergence.csv"))

    drows, by_window, rates = [], {}, {}
    for w in cfg.windows:
        grid = discretize_mz(dist, w, cfg.mesh)
        pts = []
        for r in cfg.radii:
            em = restrict_empirical(empirical_measure(rs, r, dist), w)
            rep = dist_lip(em, grid, w)
            drows.append((float(r), w.label, rep.gamma, rep.value,
                          rep.solver_gap, cfg.mesh))
            pts.append((float(r), rep.value))
        by_window[w.label] = pts
        if len(pts) >= 3 and all(v > 0 for _, v in pts):
            rates[w.label] = rate_fit(pts)
    write_csv(DISTANCE_COLUMNS, drows, os.path.join(out, "distance.csv"))
    write_csv(RATE_COLUMNS,
              [(wid, *rates[wid]) for wid in sorted(rates)],
              os.path.join(out, "rates.csv"))
    for wid in sorted(rates):
        slope, _, resid = rates[wid]
        print(f"{wid}: rate slope {slope:+.3f} (residual {resid:.3f})")
    if not args.no_figures:
        from mzres import plots
        plots.convergence_figure(rows, os.path.join(out, "convergence.png"))
        plots.distance_figure(by_window, rates, os.path.join(out, "distance.png"))
    print(f"wrote reports to {out}")
    return 0


def _cmd_sample(args) -> int:
    _require(args.n >= 1, "need at least one sample")
    dist = cached_distribution(args.d, args.tol)
    z = dist.sample(args.n, args.seed)
    write_csv(("re", "im"), [(float(v.real), float(v.imag)) for v in z], args.out)
    if not args.no_figures:
        from mzres import plots
        plots.sample_figure(z, os.path.splitext(args.out)[0] + ".png")
    print(f"wrote {args.out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mzres",
        description="resonance counting against the odd-dimensional limit "
                    "distribution")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, config=False):
        if config:
            p.add_argument("--config", required=True, help="experiment config file")
            p.add_argument("--out", default=None,
                           help="output directory (default: config outdir)")
        p.add_argument("--no-figures", action="store_true",
                       help="emit tables only, no png files")

    p = sub.add_parser("verify", help="run the identity suite for one dimension")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("hd-table", help="tabulate the angular profile")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default="hd_table.csv")
    common(p)
    p.set_defaults(func=_cmd_hd_table)

    p = sub.add_parser("sector-mass", help="mass coefficients of one sector")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--theta1", type=float, required=True)
    p.add_argument("--theta2", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--convention", choices=("both", "lemma", "corollary"),
                   default="both")
    p.set_defaults(func=_cmd_sector_mass)

    p = sub.add_parser("resonances", help="compute and store a resonance set")
    common(p, config=True)
    p.add_argument("--oracle", action="store_true",
                   help="cross-check l=0 against the s-wave closed form (d=3)")
    p.set_defaults(func=_cmd_resonances)

    p = sub.add_parser("converge", help="weak-convergence and distance reports")
    common(p, config=True)
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("sample", help="draw from the limit distribution")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out", default="samples.csv")
    common(p)
    p.set_defaults(func=_cmd_sample)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # numerical failure of a well-formed request
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
