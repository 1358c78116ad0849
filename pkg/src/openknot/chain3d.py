"""Polygonal chains in 3-space and the Gauss-integral family of measures.

Pairwise edge linking is evaluated in finite form as the (signed) spherical
area of the crossing quadrangle divided by 4*pi; summing over edge pairs gives
the chain-chain linking number, writhe, and average crossing number without
numerical integration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .sphere import DegenerateGeometryError, Quadrilateral, quadrangle_area

EDGE_EPS = 1e-12

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class PolyChain:
    """Ordered vertices of an open or closed polygonal chain.

    Edge i runs from vertex i to vertex i+1 (indices mod n when closed; a
    closed chain does not repeat its first vertex).
    """

    vertices: np.ndarray
    closed: bool = False

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise ValueError(f"vertices must have shape (n, 3), got {v.shape}")
        if not np.isfinite(v).all():
            raise ValueError("vertices must be finite")
        minimum = 3 if self.closed else 2
        if len(v) < minimum:
            kind = "closed" if self.closed else "open"
            raise ValueError(f"a {kind} chain needs at least {minimum} vertices, got {len(v)}")
        nxt = np.roll(v, -1, axis=0) if self.closed else v[1:]
        cur = v if self.closed else v[:-1]
        lengths = np.linalg.norm(nxt - cur, axis=1)
        if (lengths <= EDGE_EPS).any():
            i = int(np.argmax(lengths <= EDGE_EPS))
            raise ValueError(f"consecutive vertices {i} and {i + 1} coincide")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_edges(self) -> int:
        return len(self.vertices) if self.closed else len(self.vertices) - 1

    def edge(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Endpoints (start, end) of edge i."""
        n = self.n_vertices
        return self.vertices[i % n], self.vertices[(i + 1) % n]

    def edge_vector(self, i: int) -> np.ndarray:
        a, b = self.edge(i)
        return b - a

    def reversed(self) -> "PolyChain":
        return PolyChain(np.ascontiguousarray(self.vertices[::-1]), self.closed)

    def adjacent(self, i: int, j: int) -> bool:
        """True if edges i and j share a vertex."""
        if i == j:
            return True
        n = self.n_edges
        if self.closed:
            return (j - i) % n == 1 or (i - j) % n == 1
        return abs(i - j) == 1

    def nonadjacent_pairs(self) -> list[tuple[int, int]]:
        n = self.n_edges
        return [(i, j) for i in range(n) for j in range(i + 1, n) if not self.adjacent(i, j)]

    def scale(self) -> float:
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(max(np.linalg.norm(span), 1.0e-30))


def crossing_sign(chain: PolyChain, pair: tuple[int, int]) -> int:
    """Chirality of a non-adjacent edge pair: sign of (e_i x e_j) . (p_i - p_j).

    This is the sign of the Gauss integrand over the two segments, hence the
    crossing sign seen in every generic projection where they cross.  Returns
    0 only in the degenerate coplanar case.
    """
    i, j = pair
    if chain.adjacent(i, j):
        raise ValueError(f"edges {i} and {j} are adjacent")
    return segment_crossing_sign(*chain.edge(i), *chain.edge(j))


def segment_crossing_sign(a0, a1, b0, b1, eps: float = EDGE_EPS) -> int:
    a0 = np.asarray(a0, float)
    a1 = np.asarray(a1, float)
    b0 = np.asarray(b0, float)
    b1 = np.asarray(b1, float)
    ea, eb = a1 - a0, b1 - b0
    triple = float(np.dot(np.cross(ea, eb), a0 - b0))
    scale = float(np.linalg.norm(ea) * np.linalg.norm(eb) * (np.linalg.norm(a0 - b0) + 1.0))
    if abs(triple) <= eps * max(scale, eps):
        return 0
    return 1 if triple > 0 else -1


def edge_linking(a0, a1, b0, b1, with_flag: bool = False):
    """Gauss linking integral of two disjoint segments, in finite form.

    Magnitude is quadrangle area / 4*pi (always <= 1/2); the sign is the
    segment chirality.  Degenerate (coplanar or touching) pairs contribute
    0.0 and, with ``with_flag=True``, report ``(0.0, True)``.
    """
    sign = segment_crossing_sign(a0, a1, b0, b1)
    if sign == 0:
        return (0.0, True) if with_flag else 0.0
    try:
        quad = Quadrilateral.from_segments(a0, a1, b0, b1)
    except DegenerateGeometryError:
        return (0.0, True) if with_flag else 0.0
    value = sign * quadrangle_area(quad) / FOUR_PI
    return (value, False) if with_flag else value


def pair_linking(chain: PolyChain, pair: tuple[int, int]) -> float:
    """edge_linking of a non-adjacent edge pair of one chain."""
    i, j = pair
    if chain.adjacent(i, j):
        raise ValueError(f"edges {i} and {j} are adjacent")
    return edge_linking(*chain.edge(i), *chain.edge(j))


def _segment_distance(a0, a1, b0, b1) -> float:
    """Minimum distance between two segments (standard clamped projection)."""
    d1 = a1 - a0
    d2 = b1 - b0
    r = a0 - b0
    a = float(np.dot(d1, d1))
    e = float(np.dot(d2, d2))
    f = float(np.dot(d2, r))
    c = float(np.dot(d1, r))
    b = float(np.dot(d1, d2))
    denom = a * e - b * b
    s = np.clip((b * f - c * e) / denom, 0.0, 1.0) if denom > EDGE_EPS * a * e else 0.0
    t = (b * s + f) / e
    if t < 0.0:
        t = 0.0
        s = np.clip(-c / a, 0.0, 1.0)
    elif t > 1.0:
        t = 1.0
        s = np.clip((b - c) / a, 0.0, 1.0)
    return float(np.linalg.norm((a0 + s * d1) - (b0 + t * d2)))


def gauss_linking(a: PolyChain, b: PolyChain) -> float:
    """Gauss linking integral of two disjoint chains: double sum of pairwise
    edge linkings.  Integer within ~1e-9 for disjoint closed chains."""
    scale = max(a.scale(), b.scale())
    for i in range(a.n_edges):
        for j in range(b.n_edges):
            if _segment_distance(*a.edge(i), *b.edge(j)) <= EDGE_EPS * scale:
                raise DegenerateGeometryError(
                    f"chains touch near edge {i} of the first and edge {j} of the second"
                )
    total = 0.0
    for i in range(a.n_edges):
        ai = a.edge(i)
        for j in range(b.n_edges):
            total += edge_linking(*ai, *b.edge(j))
    return total


def writhe(chain: PolyChain) -> float:
    """Self-linking: sum over non-adjacent edge pairs of twice the signed
    pairwise linking (the average over projections of the diagram writhe)."""
    return 2.0 * sum(pair_linking(chain, p) for p in chain.nonadjacent_pairs())


def acn(chain: PolyChain) -> float:
    """Average crossing number: as writhe but with unsigned contributions."""
    return 2.0 * sum(abs(pair_linking(chain, p)) for p in chain.nonadjacent_pairs())
