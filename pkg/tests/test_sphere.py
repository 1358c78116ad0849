import numpy as np
import pytest

from conftest import random_rotation, random_unit
from oracles import cell_membership, sphere_fraction_mc

from openknot.chain3d import edge_linking, segment_crossing_sign
from openknot.sphere import (
    DegenerateGeometryError,
    Quadrilateral,
    antipodal_quadrilateral,
    cell_area,
    convex_cell_area,
    polygon_from_normals,
    quad_normals,
    quadrangle_area,
    spherical_area,
)

FOUR_PI = 4 * np.pi
TWO_PI = 2 * np.pi


def random_quad(rng):
    while True:
        pts = rng.uniform(-1, 1, (4, 3))
        if segment_crossing_sign(*pts) != 0:
            return Quadrilateral.from_segments(*pts)


def test_quad_normals_unit_and_perpendicular(rng):
    # a regular tetrahedron's opposite edges
    pts = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float)
    quad = Quadrilateral.from_segments(pts[0], pts[1], pts[2], pts[3])
    n1, n2, n3, n4 = quad.normals
    planes = [
        (pts[0], pts[2], pts[3]),
        (pts[0], pts[1], pts[3]),
        (pts[1], pts[2], pts[3]),
        (pts[0], pts[1], pts[2]),
    ]
    for n, (a, b, c) in zip((n1, n2, n3, n4), planes):
        assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.dot(n, b - a)) < 1e-12
        assert abs(np.dot(n, c - a)) < 1e-12
    for _ in range(20):
        q = random_quad(rng)
        for n in q.normals:
            assert np.linalg.norm(n) == pytest.approx(1.0, abs=1e-12)


def test_quad_normals_swap_consistency(rng):
    # swapping the two segments builds the transposed quadrilateral
    for _ in range(20):
        pts = rng.uniform(-1, 1, (4, 3))
        try:
            a = quad_normals(pts[0], pts[1], pts[2], pts[3])
            b = quad_normals(pts[2], pts[3], pts[0], pts[1])
        except DegenerateGeometryError:
            continue
        # plane roles permute as n1<->n4, n2<->n3 when the segments swap
        assert np.allclose(np.abs(a[0] @ b[3]), 1.0, atol=1e-9)
        assert np.allclose(np.abs(a[1] @ b[2]), 1.0, atol=1e-9)
        assert np.allclose(np.abs(a[2] @ b[1]), 1.0, atol=1e-9)
        assert np.allclose(np.abs(a[3] @ b[0]), 1.0, atol=1e-9)


def test_quad_normals_degenerate_raises():
    with pytest.raises(DegenerateGeometryError):
        quad_normals([0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 0, 0])


def test_quadrangle_area_is_4pi_linking(rng):
    for _ in range(30):
        pts = rng.uniform(-1, 1, (4, 3))
        s = segment_crossing_sign(*pts)
        if s == 0:
            continue
        quad = Quadrilateral.from_segments(*pts)
        area = quadrangle_area(quad)
        assert 0.0 <= area <= TWO_PI
        assert area == pytest.approx(FOUR_PI * abs(edge_linking(*pts)), abs=1e-12)


def test_quadrangle_area_coplanar_is_zero():
    quad = Quadrilateral.from_segments(
        np.array([0.0, 0, 0]), np.array([1.0, 0, 0]), np.array([0.0, 1, 0]), np.array([1.0, 2, 0])
    )
    assert quadrangle_area(quad) == pytest.approx(0.0, abs=1e-12)


def test_quadrangle_area_matches_direction_fraction(rng):
    # the quadrangle is the set of directions in which the projections cross
    from oracles import projected_crossings

    for k in range(3):
        pts = rng.uniform(-1, 1, (4, 3))
        if segment_crossing_sign(*pts) == 0:
            continue
        quad = Quadrilateral.from_segments(*pts)
        verts = np.array([pts[0], pts[1], pts[2], pts[3]])

        def crosses(dirs):
            hits = np.zeros(len(dirs), dtype=bool)
            for m, xi in enumerate(dirs):
                hits[m] = bool(projected_crossings(verts, False, xi) & {(0, 2)})
            return hits

        frac, se = sphere_fraction_mc(crosses, 20000, seed=100 + k)
        want = quadrangle_area(quad) / TWO_PI
        assert abs(frac - want) <= 3 * se + 1e-9


def test_antipodal_normal_relations(rng):
    for _ in range(100):
        quad = random_quad(rng)
        anti = antipodal_quadrilateral(quad)
        n = quad.normals
        na = anti.normals
        assert np.allclose(na[0], -n[2], atol=1e-9)
        assert np.allclose(na[1], -n[1], atol=1e-9)
        assert np.allclose(na[2], -n[0], atol=1e-9)
        assert np.allclose(na[3], -n[3], atol=1e-9)


def test_antipodal_is_involution_and_preserves_area(rng):
    for _ in range(20):
        quad = random_quad(rng)
        anti = antipodal_quadrilateral(quad)
        again = antipodal_quadrilateral(anti)
        assert np.allclose(again.p_j, quad.p_j, atol=1e-12)
        assert np.allclose(again.p_j1, quad.p_j1, atol=1e-12)
        assert quadrangle_area(anti) == pytest.approx(quadrangle_area(quad), abs=1e-9)


def test_polygon_octant():
    poly = polygon_from_normals([np.eye(3)[0], np.eye(3)[1], np.eye(3)[2]])
    assert not poly.empty
    verts = np.array(poly.vertices)
    assert np.allclose(sorted(verts.tolist()), sorted(np.eye(3).tolist()), atol=1e-12)
    assert spherical_area(poly) == pytest.approx(np.pi / 2, abs=1e-12)


def test_polygon_reversed_orientation_is_complement():
    poly = polygon_from_normals([np.eye(3)[2], np.eye(3)[1], np.eye(3)[0]])
    assert spherical_area(poly) == pytest.approx(4 * np.pi - np.pi / 2, abs=1e-12)
    # the convex-cell area ignores list orientation
    assert convex_cell_area(poly) == pytest.approx(np.pi / 2, abs=1e-12)


def test_polygon_from_banchoff_normals(rng):
    # the four quadrangle circles bound a cell of the quadrangle's area
    for _ in range(20):
        quad = random_quad(rng)
        scale = 1.0 if segment_crossing_sign(quad.p_i, quad.p_i1, quad.p_j, quad.p_j1) > 0 else -1.0
        cell = cell_area([scale * n for n in quad.normals])
        assert cell == pytest.approx(quadrangle_area(quad), abs=1e-9)


def test_parallel_normals_raise():
    with pytest.raises(DegenerateGeometryError):
        polygon_from_normals([np.eye(3)[0], np.eye(3)[0], np.eye(3)[2]])


def test_lune_area():
    theta = 0.7
    a = np.array([0.0, 0, 1])
    b = np.array([np.sin(np.pi - theta), 0, np.cos(np.pi - theta)])
    poly = polygon_from_normals([a, b])
    assert spherical_area(poly) == pytest.approx(2 * theta, abs=1e-12)


def test_spherical_area_against_membership_oracle(rng):
    for k in range(20):
        while True:
            normals = [random_unit(rng) for _ in range(rng.integers(3, 6))]
            poly = polygon_from_normals(normals)
            area = convex_cell_area(poly)
            if not poly.empty and area > 0.05:
                break
        frac, se = sphere_fraction_mc(cell_membership(normals), 200_000, seed=200 + k)
        assert abs(frac - area / FOUR_PI) <= 3 * se + 1e-9


def test_area_rotation_invariance(rng):
    normals = [random_unit(rng) for _ in range(4)]
    area = cell_area(normals)
    for _ in range(10):
        rot = random_rotation(rng)
        rotated = [rot @ w for w in normals]
        assert cell_area(rotated) == pytest.approx(area, abs=1e-9)


def test_area_antipodal_map_invariance(rng):
    for _ in range(10):
        normals = [random_unit(rng) for _ in range(4)]
        assert cell_area([-w for w in normals]) == pytest.approx(cell_area(normals), abs=1e-9)


def test_empty_cell():
    # the positive octant has x + y + z > 0 everywhere, so requiring
    # x . -(1,1,1) >= 0 as well leaves nothing
    e = np.eye(3)
    w4 = -np.ones(3) / np.sqrt(3.0)
    poly = polygon_from_normals([e[0], e[1], e[2], w4])
    assert poly.empty
    assert cell_area([e[0], e[1], e[2], w4]) == 0.0


def test_vertex_halfspace_invariant(rng):
    for _ in range(20):
        normals = [random_unit(rng) for _ in range(4)]
        poly = polygon_from_normals(normals)
        if poly.empty:
            continue
        for v in poly.vertices:
            assert min(float(np.dot(v, w)) for w in poly.normals) >= -1e-9
