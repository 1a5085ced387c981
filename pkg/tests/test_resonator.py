import math

import numpy as np
import pytest

from mzres.resonator import (RadialPotential, ResonanceEntry, ResonanceSet,
                             channel_det, channel_zeros, harmonic_multiplicity,
                             resonances, swave_oracle)

# bound-state wavenumbers of the depth-10 unit well, frozen from matching the
# interior solution to the decaying modified spherical Bessel tail (brentq on
# the exact log-derivative conditions, checked at 1e-14)
BOUND_L0 = 2.150393937475127
BOUND_L1 = 0.22285808268379514


def _swave_matching(a, v):
    def f(k):
        kp = np.sqrt(complex(k * k - v))
        return kp / np.tan(kp * a) - 1j * k
    return f


def test_harmonic_multiplicity_values():
    assert harmonic_multiplicity(3, 0) == 1
    assert harmonic_multiplicity(3, 2) == 5          # 2l+1 in three variables
    assert harmonic_multiplicity(5, 1) == 5
    for d, l in [(3, 4), (5, 3), (7, 2)]:
        expect = (2 * l + d - 2) * math.factorial(l + d - 3) \
            // (math.factorial(l) * math.factorial(d - 2))
        assert harmonic_multiplicity(d, l) == expect


def test_harmonic_multiplicity_errors():
    with pytest.raises(ValueError):
        harmonic_multiplicity(4, 0)
    with pytest.raises(ValueError):
        harmonic_multiplicity(3, -1)


def test_radial_potential_validation():
    with pytest.raises(ValueError):
        RadialPotential(4, [(1.0, 5.0)])
    with pytest.raises(ValueError):
        RadialPotential(3, [(1.0, 5.0), (0.5, 2.0)])
    with pytest.raises(ValueError):
        RadialPotential(3, [(1.0, 0.0)])
    V = RadialPotential(3, [(0.5, 2.0), (1.0, -3.0)])
    assert V.a == 1.0 and V.is_real and V.max_value == 3.0


def test_channel_det_zero_argument():
    V = RadialPotential(3, [(1.0, 5.0)])
    with pytest.raises(ValueError):
        channel_det(V, 0, 0.0)


def test_channel_det_swave_zero_set():
    # D_0 vanishes exactly at the closed-form matching-condition zeros,
    # nowhere nearby, and carries a simple-zero phase winding around each
    V = RadialPotential(3, [(1.0, -9.0)])
    for z in swave_oracle(1.0, -9.0, (-5.0, 5.0, -3.0, -1e-6)):
        near = abs(channel_det(V, 0, z))
        ring = np.array([channel_det(V, 0, z + 0.2 * np.exp(1j * t))
                         for t in np.linspace(0, 2 * np.pi, 65)])
        assert near < 1e-7 * np.min(np.abs(ring))
        winding = np.sum(np.diff(np.unwrap(np.angle(ring)))) / (2 * np.pi)
        assert round(float(winding)) == 1


def test_channel_det_conjugation_symmetry():
    V = RadialPotential(3, [(1.0, 6.0)])
    rng = np.random.default_rng(5)
    for l in (0, 3):
        for _ in range(10):
            k = complex(rng.uniform(-8, 8), rng.uniform(-3, -0.1))
            a, b = channel_det(V, l, k), channel_det(V, l, -np.conj(k))
            assert abs(abs(a) - abs(b)) < 1e-10 * abs(a)


def test_channel_zeros_matches_swave_oracle():
    V = RadialPotential(3, [(1.0, -9.0)])
    box = (-5.0, 5.0, -3.0, -1e-6)
    found = sorted((z for z, _ in channel_zeros(V, 0, box)),
                   key=lambda z: (round(z.real, 6), z.imag))
    ref = sorted(swave_oracle(1.0, -9.0, box),
                 key=lambda z: (round(z.real, 6), z.imag))
    assert len(found) == len(ref) > 0
    assert max(abs(a - b) for a, b in zip(found, ref)) < 1e-8


def test_channel_zeros_order_sum_equals_winding():
    V = RadialPotential(3, [(1.0, 6.0)])
    box = (0.5, 7.0, -2.5, -0.05)
    zeros = channel_zeros(V, 5, box)
    x1, x2, y1, y2 = box
    ts = np.linspace(0.0, 1.0, 4001)
    corners = [x1 + 1j * y1, x2 + 1j * y1, x2 + 1j * y2, x1 + 1j * y2,
               x1 + 1j * y1]
    pts = np.concatenate([(1 - ts) * a + ts * b
                          for a, b in zip(corners, corners[1:])])
    vals = np.array([channel_det(V, 5, z) for z in pts])
    winding = round(float(np.sum(np.diff(np.unwrap(np.angle(vals)))))
                    / (2 * np.pi))
    assert sum(w for _, w in zeros) == winding


def test_channel_zeros_near_free_potential_empty():
    V = RadialPotential(3, [(1.0, 1e-7)])
    assert channel_zeros(V, 0, (-5.0, 5.0, -3.0, -0.05)) == []


def test_zero_moves_continuously_with_potential():
    box = (2.5, 4.5, -2.0, -0.5)
    z0 = swave_oracle(1.0, -9.0, box)
    z1 = swave_oracle(1.0, -9.0 + 1e-4, box)
    assert len(z0) == len(z1) == 1
    assert abs(z0[0] - z1[0]) <= 10.0 * 1e-4


def test_resonances_bound_states_of_attractive_well():
    V = RadialPotential(3, [(1.0, -10.0)])
    rs = resonances(V, 12.0)
    up = sorted(rs.upper_entries, key=lambda e: e.l)
    assert [e.l for e in up] == [0, 1]
    assert abs(up[0].lam - 1j * BOUND_L0) < 1e-9
    assert abs(up[1].lam - 1j * BOUND_L1) < 1e-9


def test_resonances_conjugate_pairing_for_real_potential(rs60):
    rs = rs60.rs
    right = [e for e in rs.entries if e.lam.real > 1e-8]
    left = {(round(-e.lam.real, 6), round(e.lam.imag, 6)): e.mult
            for e in rs.entries if e.lam.real < -1e-8}
    assert len(right) == len(left)
    unpaired = sum(1 for e in right
                   if left.get((round(e.lam.real, 6),
                                round(e.lam.imag, 6))) != e.mult)
    assert unpaired == 0


def test_resonances_sorted_residuals_and_cutoff(rs60):
    rs = rs60.rs
    mods = [abs(e.lam) for e in rs.entries]
    assert mods == sorted(mods)
    assert max(e.residual for e in rs.entries) <= 1e-9
    l_max = int(np.ceil(np.e * 1.0 * 60.0 / 2.0)) + 10
    assert max(e.l for e in rs.entries) <= l_max - 5
    assert all(e.mult == e.order * harmonic_multiplicity(3, e.l)
               for e in rs.entries)


def test_resonances_complex_potential_swave():
    V = RadialPotential(3, [(1.0, 3.0 + 2.0j)])
    box = (-6.0, 6.0, -4.0, -1e-6)
    found = sorted((z for z, _ in channel_zeros(V, 0, box)),
                   key=lambda z: (round(z.real, 6), z.imag))
    ref = sorted(swave_oracle(1.0, 3.0 + 2.0j, box),
                 key=lambda z: (round(z.real, 6), z.imag))
    assert len(found) == len(ref) > 0
    assert max(abs(a - b) for a, b in zip(found, ref)) < 1e-8


def test_resonance_set_invariants():
    V = RadialPotential(3, [(1.0, 5.0)])
    e1 = ResonanceEntry(lam=1.0 - 1.0j, l=0, order=1, harmonic_mult=1,
                        residual=0.0)
    e2 = ResonanceEntry(lam=3.0 - 1.0j, l=1, order=1, harmonic_mult=3,
                        residual=0.0)
    rs = ResonanceSet(potential=V, entries=(e1, e2), radius=5.0)
    assert rs.entries[0].mult == 1 and rs.entries[1].mult == 3
    with pytest.raises(ValueError):
        ResonanceSet(potential=V, entries=(e2, e1), radius=5.0)
    with pytest.raises(ValueError):
        ResonanceSet(potential=V, entries=(e1, e2), radius=2.0)
