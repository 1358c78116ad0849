"""Projection of chains to knot/knotoid diagrams and diagram polynomials.

A chain projected along a generic direction gives a diagram: transverse
double points with over/under information and signs.  The bracket of a
diagram is the full state sum over the 2^c smoothings, with loop counting by
union-find over the strand segments; an open diagram's endpoint-bearing arc
counts as one component, so a crossing-free arc has bracket 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .chain3d import PolyChain
from .laurent import LOOP_D, LaurentPoly, mono, neg_a3_power

#: hard cap on the 2^c state enumeration
MAX_CROSSINGS = 28

#: relative genericity margin for projections
GENERIC_EPS = 1e-9


class TooManyCrossingsError(ValueError):
    """State-sum capacity exceeded."""


class DiagramPatternError(ValueError):
    """A projected diagram violates a structural constraint (projection bug)."""


@dataclass(frozen=True)
class Crossing:
    over_edge: int
    under_edge: int
    sign: int
    #: curve parameters (edge index + fraction) of the over and under passages
    over_pos: float
    under_pos: float


@dataclass(frozen=True)
class Degenerate:
    """Marker result for a non-generic projection direction."""

    reason: str


@dataclass(frozen=True)
class Diagram:
    crossings: tuple[Crossing, ...]
    #: (crossing index, is_over) in order along the curve
    traversal: tuple[tuple[int, bool], ...]
    closed: bool

    @property
    def n_crossings(self) -> int:
        return len(self.crossings)

    def writhe(self) -> int:
        return sum(c.sign for c in self.crossings)

    def gauss_code(self) -> str:
        """Signed Gauss-code-like dump: one token per passage."""
        toks = []
        for ci, over in self.traversal:
            c = self.crossings[ci]
            toks.append(f"{'O' if over else 'U'}{ci + 1}{'+' if c.sign > 0 else '-'}")
        return " ".join(toks)

    def mirror(self) -> "Diagram":
        """Swap over/under at every crossing (signs flip)."""
        flipped = tuple(
            Crossing(c.under_edge, c.over_edge, -c.sign, c.under_pos, c.over_pos)
            for c in self.crossings
        )
        trav = tuple((ci, not over) for ci, over in self.traversal)
        return Diagram(flipped, trav, self.closed)


def _projection_basis(xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Right-handed orthonormal (b1, b2) with b1 x b2 = xi."""
    helper = np.array([0.0, 0.0, 1.0]) if abs(xi[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    b1 = np.cross(xi, helper)
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(xi, b1)
    return b1, b2


def project(chain: PolyChain, xi) -> Diagram | Degenerate:
    """Orthogonal projection of the chain onto the plane with unit normal xi.

    Over/under comes from the signed distance along xi at each double point;
    the crossing sign is the 2-D orientation of (over direction, under
    direction) as seen from +xi, which coincides with the projection-
    independent segment chirality.  Non-generic directions (edge parallel to
    xi, double point at a vertex, coincident or tangential double points)
    return a Degenerate marker instead of a diagram.
    """
    xi = np.asarray(xi, dtype=float)
    nrm = float(np.linalg.norm(xi))
    if abs(nrm - 1.0) > 1e-9:
        xi = xi / nrm
    b1, b2 = _projection_basis(xi)
    verts = chain.vertices
    pts = np.stack([verts @ b1, verts @ b2], axis=1)
    depth = verts @ xi
    scale = chain.scale()

    n = chain.n_edges
    nv = chain.n_vertices

    def edge2d(i):
        return pts[i % nv], pts[(i + 1) % nv], depth[i % nv], depth[(i + 1) % nv]

    for i in range(n):
        p, q, _, _ = edge2d(i)
        len3d = float(np.linalg.norm(chain.edge_vector(i)))
        if float(np.linalg.norm(q - p)) < GENERIC_EPS * len3d:
            return Degenerate(f"edge {i} projects to a point")

    crossings: list[Crossing] = []
    for i, j in chain.nonadjacent_pairs():
        pa, pb, za, zb = edge2d(i)
        qa, qb, wa, wb = edge2d(j)
        r = pb - pa
        s = qb - qa
        denom = float(r[0] * s[1] - r[1] * s[0])
        qp = qa - pa
        if abs(denom) < GENERIC_EPS * GENERIC_EPS * scale * scale:
            # parallel projected segments: only collinear overlap is degenerate
            if abs(float(qp[0] * r[1] - qp[1] * r[0])) < GENERIC_EPS * scale * scale:
                rr = float(r @ r)
                t0 = float(qp @ r) / rr
                t1 = t0 + float(s @ r) / rr
                if min(t0, t1) < 1.0 + GENERIC_EPS and max(t0, t1) > -GENERIC_EPS:
                    return Degenerate(f"edges {i},{j} project to overlapping collinear segments")
            continue
        t = float(qp[0] * s[1] - qp[1] * s[0]) / denom
        u = float(qp[0] * r[1] - qp[1] * r[0]) / denom
        inside = GENERIC_EPS < t < 1.0 - GENERIC_EPS and GENERIC_EPS < u < 1.0 - GENERIC_EPS
        near = -GENERIC_EPS < t < 1.0 + GENERIC_EPS and -GENERIC_EPS < u < 1.0 + GENERIC_EPS
        if near and not inside:
            return Degenerate(f"double point of edges {i},{j} at a vertex")
        if not inside:
            continue
        zi = za + t * (zb - za)
        zj = wa + u * (wb - wa)
        if abs(zi - zj) < GENERIC_EPS * scale:
            return Degenerate(f"edges {i},{j} nearly touch along the view direction")
        if zi > zj:
            over_edge, under_edge = i, j
            d_over, d_under = r, s
            over_pos, under_pos = i + t, j + u
        else:
            over_edge, under_edge = j, i
            d_over, d_under = s, r
            over_pos, under_pos = j + u, i + t
        cross2 = float(d_over[0] * d_under[1] - d_over[1] * d_under[0])
        sign = 1 if cross2 > 0 else -1
        crossings.append(Crossing(over_edge, under_edge, sign, over_pos, under_pos))

    # passage order along the curve; reject coincident passages
    passages = []
    for ci, c in enumerate(crossings):
        passages.append((c.over_pos, ci, True))
        passages.append((c.under_pos, ci, False))
    passages.sort()
    for (pos_a, *_), (pos_b, *_) in itertools.pairwise(passages):
        if pos_b - pos_a < GENERIC_EPS:
            return Degenerate("two double points coincide along the curve")
    traversal = tuple((ci, over) for _, ci, over in passages)
    return Diagram(tuple(crossings), traversal, chain.closed)


def diagram_writhe(diagram: Diagram) -> int:
    return diagram.writhe()


class _UnionFind:
    __slots__ = ("parent",)

    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, a: int) -> int:
        p = self.parent
        root = a
        while p[root] != root:
            root = p[root]
        while p[a] != root:
            p[a], a = root, p[a]
        return root

    def union(self, a: int, b: int):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _d_powers(max_power: int) -> list[LaurentPoly]:
    powers = [LaurentPoly.one()]
    for _ in range(max_power):
        powers.append(powers[-1] * LOOP_D)
    return powers


def bracket(diagram: Diagram) -> LaurentPoly:
    """Kauffman bracket by full state-sum enumeration.

    Each crossing is smoothed with label +1 (A) or -1 (B); a state
    contributes A^(sum of labels) * d^(components - 1) with d = -A^2 - A^(-2).
    For a positive crossing the A-smoothing joins over-in to under-out; for a
    negative crossing it joins over-in to under-in.
    """
    c = diagram.n_crossings
    if c > MAX_CROSSINGS:
        raise TooManyCrossingsError(f"{c} crossings exceed the state-sum cap of {MAX_CROSSINGS}")
    n_seg = 2 * c + (0 if diagram.closed else 1)
    if c == 0:
        return LaurentPoly.one()

    # passage slot k: incoming segment k, outgoing segment k+1 (mod when closed)
    slots: dict[int, list[tuple[int, bool]]] = {}
    for k, (ci, over) in enumerate(diagram.traversal):
        slots.setdefault(ci, []).append((k, over))

    ends = []
    for ci in range(c):
        (ka, over_a), (kb, over_b) = slots[ci]
        seg_in_a, seg_out_a = ka, (ka + 1) % n_seg if diagram.closed else ka + 1
        seg_in_b, seg_out_b = kb, (kb + 1) % n_seg if diagram.closed else kb + 1
        if over_a:
            o_in, o_out, u_in, u_out = seg_in_a, seg_out_a, seg_in_b, seg_out_b
        else:
            o_in, o_out, u_in, u_out = seg_in_b, seg_out_b, seg_in_a, seg_out_a
        ends.append((o_in, o_out, u_in, u_out, diagram.crossings[ci].sign))

    counts: dict[tuple[int, int], int] = {}
    for labels in itertools.product((1, -1), repeat=c):
        uf = _UnionFind(n_seg)
        for (o_in, o_out, u_in, u_out, sign), label in zip(ends, labels):
            oriented = (label * sign) > 0
            if oriented:
                uf.union(o_in, u_out)
                uf.union(o_out, u_in)
            else:
                uf.union(o_in, u_in)
                uf.union(o_out, u_out)
        loops = sum(1 for s in range(n_seg) if uf.find(s) == s)
        key = (sum(labels), loops)
        counts[key] = counts.get(key, 0) + 1

    dpow = _d_powers(max(loops for _, loops in counts))
    total = LaurentPoly.zero()
    for (sigma, loops), mult in sorted(counts.items()):
        total = total + mono(float(mult), 4 * sigma) * dpow[loops - 1]
    return total


def normalized_bracket(diagram: Diagram) -> LaurentPoly:
    """(-A^3)^(-writhe) times the bracket; for closed diagrams this is the
    projection-independent invariant whose t-form is the Jones polynomial."""
    return neg_a3_power(-diagram.writhe()) * bracket(diagram)


#: diagram classes realizable by a 4-edge open chain
K0 = "k0"
K21 = "k2.1"

_ALLOWED_4EDGE_PAIRS = {frozenset({0, 2}), frozenset({0, 3}), frozenset({1, 3})}


def classify_4edge(diagram: Diagram) -> str:
    """Classify a projection of a 4-edge open chain as trivial or k2.1.

    With 4 edges the only non-trivial knotoid is k2.1: two interleaved
    crossings of equal sign on the edge pairs {1,3}+{1,4} or {2,4}+{1,4}
    (1-based).  Anything else is trivial; an impossible crossing pattern
    raises, since it indicates a projection bug.
    """
    if diagram.closed:
        raise ValueError("classify_4edge applies to open-chain diagrams")
    c = diagram.n_crossings
    if c > 3:
        raise DiagramPatternError(f"{c} crossings cannot arise from a 4-edge open chain")
    pair_sets = [frozenset({cr.over_edge, cr.under_edge}) for cr in diagram.crossings]
    for ps in pair_sets:
        if ps not in _ALLOWED_4EDGE_PAIRS:
            raise DiagramPatternError(f"crossing between adjacent-looking edges {sorted(ps)}")
    if c <= 1:
        return K0
    if c == 2:
        if set(pair_sets) == {frozenset({0, 2}), frozenset({1, 3})}:
            raise DiagramPatternError("edges 1-3 and 2-4 cannot cross simultaneously")
        ids = [ci for ci, _ in diagram.traversal]
        interleaved = ids[0] == ids[2]
        signs = {cr.sign for cr in diagram.crossings}
        return K21 if interleaved and len(signs) == 1 else K0
    if set(pair_sets) != _ALLOWED_4EDGE_PAIRS:
        raise DiagramPatternError("three crossings must involve all three non-adjacent pairs")
    return K0
