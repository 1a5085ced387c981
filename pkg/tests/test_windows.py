import numpy as np
import pytest

from mzres.windows import VARIANTS, Disc, Polygon, SectorAnnulus


def test_variant_list_is_fixed():
    assert VARIANTS == ("lower-open", "lower-closed", "open", "closed")


def test_disc_membership_variants():
    w = Disc(0.0, 1.0)
    assert w.contains(0.5 - 0.5j, "lower-open")
    assert not w.contains(0.5, "lower-open")       # on the real axis
    assert w.contains(0.5, "lower-closed")
    assert not w.contains(0.5 + 0.5j, "lower-closed")
    assert w.contains(0.5 + 0.5j, "open")
    assert w.contains(1.0, "closed") and not w.contains(1.0, "open")
    with pytest.raises(ValueError):
        w.contains(0.0, "bogus")


def test_disc_geometry():
    w = Disc(-0.5j, 0.45)
    # ray through the center
    (a, b), = w.ray_intervals(np.pi / 2)
    assert abs(a - 0.05) < 1e-12 and abs(b - 0.95) < 1e-12
    assert w.ray_intervals(0.1) == []              # misses the disc
    assert w.real_segments() == []
    assert abs(w.boundary_distance(-0.5j) - 0.45) < 1e-12
    assert abs(w.boundary_distance(-0.05j)) < 1e-12
    assert w.circumradius == 0.95
    s = w.scaled(2.0)
    assert s.center == -1j and s.radius == 0.9
    with pytest.raises(ValueError):
        Disc(0.0, 0.0)


def test_disc_real_segments():
    w = Disc(0.2 - 0.1j, 0.5)
    (x1, x2), = w.real_segments()
    half = np.sqrt(0.5 ** 2 - 0.1 ** 2)
    assert abs(x1 - (0.2 - half)) < 1e-12 and abs(x2 - (0.2 + half)) < 1e-12


def test_sector_membership_and_geometry():
    w = SectorAnnulus(np.pi / 4, np.pi / 2, 0.2, 0.8)
    z = 0.5 * np.exp(-1j * 1.0)
    assert w.contains(z, "closed") and w.contains(z, "lower-open")
    assert not w.contains(0.5 * np.exp(-1j * 0.2), "closed")
    assert not w.contains(0.1 * np.exp(-1j * 1.0), "closed")
    assert w.contains(-0.2j, "closed")       # corner: r = r1, theta = theta2
    assert not w.contains(-0.2j, "open")
    assert w.ray_intervals(1.0) == [(0.2, 0.8)]
    assert w.ray_intervals(0.5) == []
    assert w.real_segments() == []
    assert w.circumradius == 0.8
    assert w.scaled(0.5) == SectorAnnulus(np.pi / 4, np.pi / 2, 0.1, 0.4)


def test_sector_real_segments_on_axis():
    w = SectorAnnulus(0.0, np.pi, 0.3, 1.0)
    assert w.real_segments() == [(-1.0, -0.3), (0.3, 1.0)]


def test_sector_validation():
    with pytest.raises(ValueError):
        SectorAnnulus(1.0, 0.5, 0.0, 1.0)
    with pytest.raises(ValueError):
        SectorAnnulus(0.0, 1.0, 0.5, 0.5)


def test_polygon_membership_and_cuts():
    w = Polygon([-0.5 - 0.1j, 0.5 - 0.1j, 0.5 - 0.9j, -0.5 - 0.9j])
    assert w.contains(0.0 - 0.5j, "open")
    assert w.contains(0.5 - 0.5j, "closed") and not w.contains(0.5 - 0.5j, "open")
    (a, b), = w.ray_intervals(np.pi / 2)
    assert abs(a - 0.1) < 1e-9 and abs(b - 0.9) < 1e-9
    assert w.real_segments() == []
    assert abs(w.boundary_distance(0.0 - 0.5j) - 0.4) < 1e-12
    s = w.scaled(2.0)
    assert s.vertices[0] == -1.0 - 0.2j


def test_polygon_real_segments():
    w = Polygon([-0.5, 0.5, 0.0 - 0.8j])
    (x1, x2), = w.real_segments()
    assert abs(x1 + 0.5) < 1e-9 and abs(x2 - 0.5) < 1e-9


def test_polygon_validation():
    with pytest.raises(ValueError):
        Polygon([0.0, 1.0])
    with pytest.raises(ValueError):
        Polygon([0.0, 1.0, 1j, 1.0 + 1j])  # bowtie


def test_vectorized_contains_shapes():
    w = Disc(0.0, 1.0)
    z = np.array([[0.1 - 0.1j, 2.0], [0.5j, -0.5j]])
    out = w.contains(z, "lower-closed")
    assert out.shape == z.shape
    assert out.tolist() == [[True, False], [False, True]]
