import numpy as np
import pytest

from wildknot.cover import build_cover
from wildknot.groups import (
    orbit_spheres,
    pairwise_disjoint_subassembly,
    polyhedron_stages,
)
from wildknot.limitset import (
    cloud_from_csv,
    cloud_from_orbit,
    cloud_to_csv,
    cloud_to_json,
    cloud_to_ply,
    containment_fraction,
    export_cloud,
    hausdorff_one_sided,
    loxodromic_points,
    slice_cloud,
    stage_report,
)
from wildknot.presets import degenerate_single_cube


@pytest.fixture(scope="module")
def setup():
    c = degenerate_single_cube(1)
    cover = build_cover(c)
    sub = pairwise_disjoint_subassembly(cover, n=4)
    orbit = orbit_spheres(sub, 6)
    return cover, sub, orbit


def test_cloud_eps_infinite_gives_all_centers(setup):
    _cover, sub, orbit = setup
    cloud = cloud_from_orbit(orbit, np.inf, offset=sub.offset)
    assert len(cloud) == len(orbit.radii)
    assert cloud.notice is None


def test_cloud_eps_monotone_filter(setup):
    _cover, sub, orbit = setup
    big = cloud_from_orbit(orbit, 0.12, offset=sub.offset)
    small = cloud_from_orbit(orbit, 0.06, offset=sub.offset)
    assert 0 < len(small) < len(big)
    assert set(small.provenance) <= set(big.provenance)
    # halving eps keeps only deeper generations
    assert small.generation.min() >= big.generation.min()


def test_cloud_eps_too_small_notice(setup):
    _cover, sub, orbit = setup
    cloud = cloud_from_orbit(orbit, 1e-12)
    assert len(cloud) == 0
    assert cloud.notice and "radius" in cloud.notice


def test_cloud_points_inside_generation_one_spheres(setup):
    _cover, sub, orbit = setup
    eps = 0.05
    cloud = cloud_from_orbit(orbit, eps, offset=sub.offset)
    gen1 = orbit.generation == 1
    frac = containment_fraction(
        cloud, orbit.centers[gen1] + sub.offset, orbit.radii[gen1]
    )
    assert frac == 1.0


def test_loxodromic_points_inside_hull(setup):
    _cover, sub, orbit = setup
    cloud, skipped = loxodromic_points(sub, 50, seed=11, word_length=6)
    assert len(cloud) == 50
    eps = float(orbit.radii[orbit.generation == orbit.generation.max()].max())
    ref = cloud_from_orbit(orbit, float(orbit.radii[orbit.generation >= 1].max()) * 1.001,
                           offset=sub.offset)
    assert hausdorff_one_sided(cloud, ref) <= eps + 0.2
    # every fixed point inside a generation-1 sphere (never in the domain)
    gen1 = orbit.generation == 1
    assert containment_fraction(
        cloud, orbit.centers[gen1] + sub.offset, orbit.radii[gen1], slack=1e-9
    ) == 1.0


def test_loxodromic_rejects_odd_length(setup):
    _cover, sub, _orbit = setup
    with pytest.raises(ValueError):
        loxodromic_points(sub, 1, word_length=3)


def test_hausdorff_step_bounded_by_radius(setup):
    """One-sided step from depth L to L+1 is at most the max gen-L radius."""
    _cover, sub, _orbit = setup
    for L in (3, 4, 5):
        a = orbit_spheres(sub, L)
        b = orbit_spheres(sub, L + 1)
        ca = cloud_from_orbit(a, np.inf)
        cb = cloud_from_orbit(b, np.inf)
        max_r = float(a.radii[a.generation == L].max())
        assert hausdorff_one_sided(ca, cb) <= max_r + 1e-12


def test_stage_report(setup):
    _cover, sub, orbit = setup
    stages = polyhedron_stages(sub, orbit, 4)
    report = stage_report(stages)
    assert report[0]["description"] == "K_0 = base knot"
    assert report[1]["description"] == "K_1 = K_0 # K_0"
    counts = [r["side_count"] for r in report]
    assert counts == sorted(set(counts))


def test_slice_cloud(setup):
    _cover, sub, orbit = setup
    cloud = cloud_from_orbit(orbit, np.inf, offset=sub.offset)
    sl = slice_cloud(cloud, 3, 0.0, 0.5)
    assert sl.points.shape[1] == 3
    assert len(sl) > 0
    thin = slice_cloud(cloud, 3, 0.0, 0.01)
    assert set(thin.provenance) <= set(sl.provenance)
    far = slice_cloud(cloud, 0, 1e6, 0.5)
    assert len(far) == 0 and far.notice
    with pytest.raises(ValueError):
        slice_cloud(cloud, 0, 0.0, 0.0)


def test_csv_roundtrip(setup):
    _cover, sub, orbit = setup
    cloud = cloud_from_orbit(orbit, 0.1, offset=sub.offset)
    back = cloud_from_csv(cloud_to_csv(cloud))
    assert np.abs(back.points - cloud.points).max() <= 1e-12
    assert back.provenance == cloud.provenance
    assert (back.generation == cloud.generation).all()


def test_ply_format(setup):
    _cover, sub, orbit = setup
    cloud = cloud_from_orbit(orbit, 0.1, offset=sub.offset)
    sl = slice_cloud(cloud, 3, 0.0, 0.5)
    text = cloud_to_ply(sl)
    lines = text.splitlines()
    assert lines[0] == "ply"
    assert lines[1] == "format ascii 1.0"
    assert f"element vertex {len(sl)}" in lines
    assert "end_header" in lines
    body = lines[lines.index("end_header") + 1 :]
    assert len(body) == len(sl)
    assert all(len(row.split()) == 4 for row in body)  # x y z generation


def test_exports_byte_identical(tmp_path, setup):
    _cover, sub, orbit = setup
    cloud = cloud_from_orbit(orbit, 0.1, offset=sub.offset)
    for fmt in ("csv", "ply", "json"):
        p1 = tmp_path / f"a.{fmt}"
        p2 = tmp_path / f"b.{fmt}"
        export_cloud(cloud if fmt != "ply" else slice_cloud(cloud, 3, 0.0, 0.5), fmt, p1)
        export_cloud(cloud if fmt != "ply" else slice_cloud(cloud, 3, 0.0, 0.5), fmt, p2)
        assert p1.read_bytes() == p2.read_bytes()


def test_empty_cloud_exports(tmp_path, setup):
    _cover, sub, orbit = setup
    cloud = cloud_from_orbit(orbit, 1e-12)
    csv = cloud_to_csv(cloud)
    assert csv.count("\n") == 1  # header only
    doc = cloud_to_json(cloud)
    assert '"n_points": 0' in doc
