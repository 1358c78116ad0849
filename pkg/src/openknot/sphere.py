"""Spherical geometry kernel: quadrangles of segment pairs and polygon areas.

A pair of disjoint segments determines four planes (each through one segment
endpoint and the opposite segment), whose unit normals bound the spherical
quadrangle of projection directions in which the two projected segments cross.
This module builds those normals, the antipodal construction, and computes
areas of spherical polygons cut out by ordered lists of great-circle normals.

Convention: a polygon given by unit normals (w_1, ..., w_k) in counterclockwise
order is the cell of directions x with x . w_m >= 0 for every m; its boundary
arcs lie on the great circles of the w_m.  Reversing the list orientation
describes the complementary region (area 4*pi - A).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
FOUR_PI = 4.0 * np.pi

#: cross products with a norm below this (relative to scale) are degenerate
DEGENERACY_EPS = 1e-12

#: slack allowed when testing half-space membership of polygon vertices
VERTEX_FEASIBILITY_TOL = 1e-9


class DegenerateGeometryError(ValueError):
    """Raised when a construction hits a measure-zero degenerate configuration."""


def _unit(v: np.ndarray, what: str) -> np.ndarray:
    n = np.linalg.norm(v)
    if n < DEGENERACY_EPS:
        raise DegenerateGeometryError(f"vanishing cross product while forming {what}")
    return v / n


def quad_normals(p_i, p_i1, p_j, p_j1) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Unit normals n1..n4 of the quadrilateral joining segment (p_i, p_i1)
    to segment (p_j, p_j1).

    n1 is normal to the plane (p_i, p_j, p_j1), n2 to (p_i, p_i1, p_j1),
    n3 to (p_i1, p_j, p_j1), n4 to (p_i, p_i1, p_j), with the orientations
    fixed by the difference-vector cross products below.
    """
    p_i = np.asarray(p_i, dtype=float)
    p_i1 = np.asarray(p_i1, dtype=float)
    p_j = np.asarray(p_j, dtype=float)
    p_j1 = np.asarray(p_j1, dtype=float)
    r_ij = p_i - p_j
    r_ij1 = p_i - p_j1
    r_i1j = p_i1 - p_j
    r_i1j1 = p_i1 - p_j1
    n1 = _unit(np.cross(r_ij, r_ij1), "n1")
    n2 = _unit(np.cross(r_ij1, r_i1j1), "n2")
    n3 = _unit(np.cross(r_i1j1, r_i1j), "n3")
    n4 = _unit(np.cross(r_i1j, r_ij), "n4")
    return n1, n2, n3, n4


@dataclass(frozen=True)
class Quadrilateral:
    """Two segments in 3-space plus the four derived unit normals."""

    p_i: np.ndarray
    p_i1: np.ndarray
    p_j: np.ndarray
    p_j1: np.ndarray
    normals: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]

    @staticmethod
    def from_segments(p_i, p_i1, p_j, p_j1) -> "Quadrilateral":
        p_i = np.asarray(p_i, dtype=float)
        p_i1 = np.asarray(p_i1, dtype=float)
        p_j = np.asarray(p_j, dtype=float)
        p_j1 = np.asarray(p_j1, dtype=float)
        return Quadrilateral(p_i, p_i1, p_j, p_j1, quad_normals(p_i, p_i1, p_j, p_j1))


def quadrangle_area(quad: Quadrilateral) -> float:
    """Area in [0, 2*pi] of the quadrangle of directions in which the two
    projected segments cross.

    Sum of arcsines of consecutive normal dot products; the raw sum is the
    unsigned area (arguments clamped to [-1, 1] to absorb rounding).
    """
    n1, n2, n3, n4 = quad.normals
    s = 0.0
    for a, b in ((n1, n2), (n2, n3), (n3, n4), (n4, n1)):
        s += float(np.arcsin(np.clip(np.dot(a, b), -1.0, 1.0)))
    return abs(s)


def antipodal_quadrilateral(quad: Quadrilateral) -> Quadrilateral:
    """Quadrilateral generating the antipodal quadrangle: the second segment
    is reflected through the midpoint construction p -> p_i1 - (p - p_i).

    Its normals satisfy n1^A = -n3, n2^A = -n2, n3^A = -n1, n4^A = -n4.
    """
    p_jA = quad.p_i1 - (quad.p_j - quad.p_i)
    p_j1A = quad.p_i1 - (quad.p_j1 - quad.p_i)
    return Quadrilateral.from_segments(quad.p_i, quad.p_i1, p_jA, p_j1A)


@dataclass(frozen=True)
class SphericalPolygon:
    """Convex spherical cell bounded by the great circles of ``normals``.

    ``vertices[k]`` lies on the circles of ``normals[k]`` and
    ``normals[(k+1) % len]``.  An empty cell has no vertices and area 0.
    """

    normals: tuple[np.ndarray, ...]
    vertices: tuple[np.ndarray, ...]
    empty: bool = False

    def contains(self, x, tol: float = VERTEX_FEASIBILITY_TOL) -> bool:
        if self.empty:
            return False
        x = np.asarray(x, dtype=float)
        return all(float(np.dot(x, w)) >= -tol for w in self.normals)

    def interior_points(self, count: int, seed: int = 0) -> np.ndarray:
        """Random interior points as normalized convex combinations of vertices."""
        if self.empty or len(self.vertices) < 3:
            return np.zeros((0, 3))
        rng = np.random.default_rng(seed)
        verts = np.asarray(self.vertices)
        wts = rng.dirichlet(np.ones(len(verts)), size=count)
        pts = wts @ verts
        return pts / np.linalg.norm(pts, axis=1, keepdims=True)


_EMPTY = SphericalPolygon(normals=(), vertices=(), empty=True)


def polygon_from_normals(normals, tol: float = VERTEX_FEASIBILITY_TOL) -> SphericalPolygon:
    """Build the spherical cell {x : x . w_m >= 0 for all m} from ordered normals.

    Vertices come from consecutive circle intersections, with the hemisphere
    choice fixed by the all-half-space test.  If the ordered walk is
    infeasible (cell empty, or a listed circle is inactive), falls back to an
    order-free convex-cell construction; a cell with no feasible corner is
    returned as the empty polygon.
    """
    ws = [np.asarray(w, dtype=float) for w in normals]
    if len(ws) < 2:
        raise ValueError("need at least 2 normals")
    ws = [w / np.linalg.norm(w) for w in ws]
    k = len(ws)

    if k == 2:
        axis = np.cross(ws[0], ws[1])
        norm = np.linalg.norm(axis)
        if norm < DEGENERACY_EPS:
            raise DegenerateGeometryError("parallel normals define no lune")
        v = axis / norm
        return SphericalPolygon(normals=tuple(ws), vertices=(v, -v))

    verts = []
    ordered_ok = True
    for m in range(k):
        a, b = ws[m], ws[(m + 1) % k]
        axis = np.cross(a, b)
        norm = np.linalg.norm(axis)
        if norm < 1e-9:
            raise DegenerateGeometryError("consecutive normals are (anti)parallel")
        v = axis / norm
        margin_pos = min(float(np.dot(v, w)) for w in ws)
        margin_neg = min(float(np.dot(-v, w)) for w in ws)
        if margin_pos >= -tol:
            verts.append(v)
        elif margin_neg >= -tol:
            verts.append(-v)
        else:
            ordered_ok = False
            break

    if ordered_ok:
        return SphericalPolygon(normals=tuple(ws), vertices=tuple(verts))
    return _convex_cell(ws, tol)


def _convex_cell(ws, tol) -> SphericalPolygon:
    """Order-free construction of the cell {x . w >= 0}: collect all feasible
    pairwise circle intersections and sort them around the cell centroid."""
    k = len(ws)
    cands = []
    for a in range(k):
        for b in range(a + 1, k):
            axis = np.cross(ws[a], ws[b])
            norm = np.linalg.norm(axis)
            if norm < 1e-9:
                continue
            for v in (axis / norm, -axis / norm):
                if min(float(np.dot(v, w)) for w in ws) >= -tol:
                    cands.append(v)
    # dedupe nearly identical corners
    verts: list[np.ndarray] = []
    for v in cands:
        if all(float(np.dot(v, u)) < 1.0 - 1e-12 for u in verts):
            verts.append(v)
    if len(verts) < 3:
        return _EMPTY
    centroid = np.sum(verts, axis=0)
    cn = np.linalg.norm(centroid)
    if cn < DEGENERACY_EPS:
        return _EMPTY
    centroid /= cn
    # angular order in the tangent plane at the centroid
    ref = verts[0] - centroid * float(np.dot(verts[0], centroid))
    ref /= np.linalg.norm(ref)
    ref2 = np.cross(centroid, ref)
    ang = [float(np.arctan2(np.dot(v, ref2), np.dot(v, ref))) for v in verts]
    order = np.argsort(ang)
    return SphericalPolygon(normals=tuple(ws), vertices=tuple(verts[i] for i in order))


def spherical_area(poly: SphericalPolygon) -> float:
    """Area of the polygon via its spherical excess.

    Computed as 2*pi minus the sum of signed boundary turn angles; reversing
    the boundary orientation therefore yields 4*pi - A.  A two-circle cell
    (lune) has area twice its dihedral angle.
    """
    if poly.empty:
        return 0.0
    k = len(poly.normals)
    if k == 2:
        dihedral = np.pi - float(np.arccos(np.clip(np.dot(poly.normals[0], poly.normals[1]), -1, 1)))
        return 2.0 * dihedral
    if len(poly.vertices) < 3:
        return 0.0
    verts = list(poly.vertices)
    n = len(verts)
    if n == len(poly.normals):
        # turn angles from the bounding circles themselves
        total_turn = 0.0
        for m in range(n):
            v = verts[m]
            w_in = poly.normals[m]
            w_out = poly.normals[(m + 1) % n]
            t_in = np.cross(w_in, v)
            t_out = np.cross(w_out, v)
            total_turn += float(np.arctan2(np.dot(np.cross(t_in, t_out), v), np.dot(t_in, t_out)))
        return float(TWO_PI - total_turn)
    # fallback cell: signed fan of spherical triangle excesses
    area = 0.0
    v0 = verts[0]
    for m in range(1, n - 1):
        v1, v2 = verts[m], verts[m + 1]
        num = float(np.dot(v0, np.cross(v1, v2)))
        den = 1.0 + float(np.dot(v0, v1)) + float(np.dot(v1, v2)) + float(np.dot(v2, v0))
        area += 2.0 * float(np.arctan2(num, den))
    return abs(area)


def convex_cell_area(poly: SphericalPolygon) -> float:
    """Area of the convex cell {x . w >= 0}, insensitive to the cyclic
    orientation of the normal list (vertices are re-ordered around the cell
    centroid and summed as a signed triangle fan)."""
    if poly.empty or len(poly.vertices) < 2:
        return 0.0
    if len(poly.normals) == 2:
        return spherical_area(poly)
    verts = list(poly.vertices)
    centroid = np.sum(verts, axis=0)
    cn = np.linalg.norm(centroid)
    if cn < DEGENERACY_EPS:
        return 0.0
    centroid /= cn
    ref = verts[0] - centroid * float(np.dot(verts[0], centroid))
    rn = np.linalg.norm(ref)
    if rn < DEGENERACY_EPS:
        return 0.0
    ref /= rn
    ref2 = np.cross(centroid, ref)
    ang = [float(np.arctan2(np.dot(v, ref2), np.dot(v, ref))) for v in verts]
    order = np.argsort(ang)
    ordered = [verts[i] for i in order]
    area = 0.0
    v0 = ordered[0]
    for m in range(1, len(ordered) - 1):
        v1, v2 = ordered[m], ordered[m + 1]
        num = float(np.dot(v0, np.cross(v1, v2)))
        den = 1.0 + float(np.dot(v0, v1)) + float(np.dot(v1, v2)) + float(np.dot(v2, v0))
        area += 2.0 * float(np.arctan2(num, den))
    return abs(area)


def cell_area(normals) -> float:
    """Area of the convex cell cut out by ``normals`` (0.0 for an empty cell)."""
    return convex_cell_area(polygon_from_normals(normals))
