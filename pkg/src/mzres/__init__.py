"""Scattering-resonance counting against its odd-dimensional limit distribution.

The package computes three things and ties them together:

* the limit probability measure on the closed lower unit half-disc
  (angular profile h_d, density kappa, sector and window masses, sampling),
* true resonances of compactly supported radial step potentials via
  per-channel matching determinants and argument-principle root search,
* quantitative comparison of the scaled empirical resonance measure with
  the limit measure (counting functions, window counts, a compact-support
  Wasserstein-type distance).
"""

from mzres.complexfn import rho, rho_prime, sigma_radius, build_sigma, SigmaCurve
from mzres.io_store import cached_distribution
from mzres.metric import dist_lip, discretize_mz, restrict_empirical
from mzres.mzdist import MZDistribution, Sector, sector_mass, window_mass
from mzres.windows import Disc, Polygon, SectorAnnulus
from mzres.resonator import RadialPotential, ResonanceSet, resonances
from mzres.counting import EmpiricalMeasure, n_count, big_N, window_count, empirical_measure

__all__ = [
    "rho",
    "rho_prime",
    "sigma_radius",
    "build_sigma",
    "SigmaCurve",
    "cached_distribution",
    "dist_lip",
    "discretize_mz",
    "restrict_empirical",
    "MZDistribution",
    "Sector",
    "sector_mass",
    "window_mass",
    "Disc",
    "Polygon",
    "SectorAnnulus",
    "RadialPotential",
    "ResonanceSet",
    "resonances",
    "EmpiricalMeasure",
    "n_count",
    "big_N",
    "window_count",
    "empirical_measure",
]
