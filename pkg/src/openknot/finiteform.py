"""Exact closed forms for the bracket and Jones polynomials of short chains.

For an open 3-edge chain the bracket is a two-term polynomial in the single
possible crossing; for a closed 4-gon it is determined by the two diagonal
edge pairs.  For an open 4-edge chain the projection classes are: the trivial
knotoid at writhes 0, +-1, +-2 and the unique non-trivial knotoid k2.1, and
every class probability is the area of an explicit spherical polygon built
from the quadrangle normals of the three non-adjacent edge pairs.  Areas of
joint-crossing regions are dispatched by sign tests (w, w0 and the c-values
below) to ordered normal lists; set differences are evaluated as area
subtraction after an interior-sampling containment check, and unions add
areas of cells that share a bounding circle from opposite sides.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain3d import PolyChain, crossing_sign, pair_linking
from .laurent import LaurentPoly, neg_a3_power
from .sphere import (
    DegenerateGeometryError,
    SphericalPolygon,
    cell_area,
    polygon_from_normals,
    quad_normals,
)

TWO_PI = 2.0 * np.pi

#: sign tests closer to zero than this raise instead of guessing a table row
DISCRIMINANT_EPS = 1e-10

PROB_TOL = 1e-9

#: bracket of the standard k2.1 diagram with two positive crossings (writhe +2)
K21_BRACKET_POS = LaurentPoly({8: 1.0, -16: -1.0, 0: 1.0})
#: its mirror (two negative crossings, writhe -2)
K21_BRACKET_NEG = LaurentPoly({-8: 1.0, 16: -1.0, 0: 1.0})


def k21_bracket(sign: int) -> LaurentPoly:
    """Bracket of the k2.1 knotoid whose two crossings carry ``sign``."""
    return K21_BRACKET_POS if sign > 0 else K21_BRACKET_NEG


class FiniteFormError(RuntimeError):
    """Internal inconsistency: a probability left [0, 1] or a region check failed."""


@dataclass(frozen=True)
class CaseConditions:
    """Sign data steering the table dispatch for one 4-edge chain."""

    eps_13: int
    eps_14: int
    eps_24: int
    w: float
    w0: float | None
    c_values: dict[str, float]


@dataclass(frozen=True)
class E4Probabilities:
    """Projection-class probabilities of an open 4-edge chain.

    ``p_k0`` maps the diagram writhe (an actual signed integer) to the
    probability of a trivial-knotoid projection with that writhe; ``p_k21``
    is the probability of the k2.1 knotoid, which occurs at writhe
    ``k21_writhe`` only.
    """

    eps_24: int
    p_k21: float
    k21_writhe: int
    p_k0: dict[int, float]

    def total(self) -> float:
        return self.p_k21 + sum(self.p_k0.values())


def _check_probability(name: str, p: float) -> float:
    if p < -PROB_TOL or p > 1.0 + PROB_TOL:
        raise FiniteFormError(f"probability {name}={p} outside [0, 1]")
    return min(1.0, max(0.0, p))


def _guard(name: str, value: float, scale: float = 1.0) -> float:
    if abs(value) < DISCRIMINANT_EPS * scale:
        raise DegenerateGeometryError(f"sign test {name} is too close to zero ({value})")
    return value


# -- 3-edge chains and closed 4-gons ------------------------------------------


def bracket_e3(chain: PolyChain) -> LaurentPoly:
    """Bracket of an open 3-edge chain:
    2|L(e1,e3)| (-A^3)^sign + (1 - 2|L(e1,e3)|)."""
    if chain.closed or chain.n_edges != 3:
        raise ValueError("bracket_e3 needs an open chain with 3 edges")
    link = pair_linking(chain, (0, 2))
    p_cross = 2.0 * abs(link)
    if p_cross == 0.0:
        return LaurentPoly.one()
    sign = 1 if link > 0 else -1
    return neg_a3_power(sign).scale(p_cross) + LaurentPoly.one().scale(1.0 - p_cross)


def jones_e3(chain: PolyChain) -> LaurentPoly:
    """Normalized bracket of any open 3-edge chain: the constant 1."""
    if chain.closed or chain.n_edges != 3:
        raise ValueError("jones_e3 needs an open chain with 3 edges")
    return LaurentPoly.one()


def bracket_p4_closed(chain: PolyChain) -> LaurentPoly:
    """Bracket of a closed 4-gon from its two diagonal pairs:
    2|L13| (-A^(3 s13)) + 2|L24| (-A^(3 s24)) + (1 - ACN)."""
    if not chain.closed or chain.n_edges != 4:
        raise ValueError("bracket_p4_closed needs a closed chain with 4 edges")
    l13 = pair_linking(chain, (0, 2))
    l24 = pair_linking(chain, (1, 3))
    out = LaurentPoly.one().scale(1.0 - 2.0 * abs(l13) - 2.0 * abs(l24))
    if l13 != 0.0:
        out = out + neg_a3_power(1 if l13 > 0 else -1).scale(2.0 * abs(l13))
    if l24 != 0.0:
        out = out + neg_a3_power(1 if l24 > 0 else -1).scale(2.0 * abs(l24))
    return out


# -- joint-crossing quadrangles -----------------------------------------------


def _head_normals(c_a: float, c_b: float, n1, u3):
    """Boundary circles at the far corner shared by the two quadrangles,
    keyed by the signs of the two vertex tests (equal-sign case)."""
    if c_a > 0 and c_b > 0:
        return [n1]
    if c_a < 0 and c_b < 0:
        return [-u3]
    if c_a > 0 and c_b < 0:
        return [n1, -u3]
    return [-u3, n1]


def _tail_normals(c_a: float, c_b: float, n3, u1):
    if c_a > 0 and c_b > 0:
        return [n3]
    if c_a < 0 and c_b < 0:
        return [-u1]
    if c_a > 0 and c_b < 0:
        return [-u1, n3]
    return [n3, -u1]


def q_joint(a0, a1, b0, b1, b2) -> SphericalPolygon:
    """Spherical polygon of directions in which segment (a0, a1) crosses both
    consecutive segments (b0, b1) and (b1, b2) in projection.

    The joint-crossing probability is its area / 2 pi.  Empty when the equal-
    sign configuration fails the piercing tests (w > 0 or w0 > 0).
    """
    a0 = np.asarray(a0, float)
    a1 = np.asarray(a1, float)
    b0 = np.asarray(b0, float)
    b1 = np.asarray(b1, float)
    b2 = np.asarray(b2, float)

    from .chain3d import segment_crossing_sign

    eps_ij = segment_crossing_sign(a0, a1, b0, b1)
    eps_ij1 = segment_crossing_sign(a0, a1, b1, b2)
    if eps_ij == 0 or eps_ij1 == 0:
        raise DegenerateGeometryError("a segment pair is coplanar")

    n1, n2, n3, n4 = quad_normals(a0, a1, b0, b1)
    u1, u2, u3, u4 = quad_normals(a0, a1, b1, b2)
    w = _guard("w", float(np.dot(np.cross(u2, -n2), np.cross(u2, n4))))
    scale = max(np.linalg.norm(p) for p in (a0, a1, b0, b1, b2)) + 1.0

    if eps_ij == eps_ij1:
        v3 = np.cross(b2 - b0, b2 - b1)
        v3 /= np.linalg.norm(v3)
        w0 = _guard("w0", float(np.dot(np.cross(v3, -n1), np.cross(v3, n3))))
        if w > 0 or w0 > 0:
            return SphericalPolygon(normals=(), vertices=(), empty=True)
        c_j1_i1 = _guard("c_{j+1,i+1}", float(np.dot(a1 - b1, n1)) * eps_ij, scale)
        c_j2_i1 = _guard("c_{j+2,i+1}", float(np.dot(a1 - b2, n1)) * eps_ij, scale)
        c_j1_i = _guard("c_{j+1,i}", float(np.dot(a0 - b1, n3)) * eps_ij, scale)
        c_j2_i = _guard("c_{j+2,i}", float(np.dot(a0 - b2, n3)) * eps_ij, scale)
        normals = [
            n4,
            *_head_normals(c_j1_i1, c_j2_i1, n1, u3),
            -u2,
            *_tail_normals(c_j1_i, c_j2_i, n3, u1),
        ]
        return polygon_from_normals(normals)

    c_j2_i = _guard("c_{j+2,i}", float(np.dot(a0 - b2, n1)) * eps_ij, scale)
    c_j2_i1 = _guard("c_{j+2,i+1}", float(np.dot(a1 - b2, n3)) * eps_ij, scale)
    first = -u1 if c_j2_i > 0 else n1
    second = -u3 if c_j2_i1 > 0 else n3
    middle = -u2 if w < 0 else n4
    return polygon_from_normals([n2, first, middle, second])


# -- the open 4-edge machinery --------------------------------------------------


def _signs(chain: PolyChain) -> tuple[int, int, int]:
    e13 = crossing_sign(chain, (0, 2))
    e14 = crossing_sign(chain, (0, 3))
    e24 = crossing_sign(chain, (1, 3))
    if 0 in (e13, e14, e24):
        raise DegenerateGeometryError("an edge pair of the 4-chain is coplanar")
    return e13, e14, e24


def _event_intersection_area(cell_normals, quad_normals_list) -> float:
    """Area of a convex cell intersected with a crossing event region.

    The event region of an edge pair is the quadrangle cell together with its
    antipodal copy, so the intersection is evaluated against both copies and
    the (disjoint) areas added.
    """
    plus = cell_area(list(cell_normals) + list(quad_normals_list))
    minus = cell_area(list(cell_normals) + [-w for w in quad_normals_list])
    return plus + minus


def _e4_regions(chain: PolyChain):
    """Areas (A(Q134), A(Q1), A(Q)) plus CaseConditions for one 4-edge chain.

    Q134 is the joint-crossing region of pairs (e1,e3) and (e1,e4); Q1 removes
    the directions where e2, e4 also cross; Q is the k2.1 sub-region (zero
    unless the pair signs are equal and the piercing tests pass).
    """
    if chain.closed or chain.n_edges != 4:
        raise ValueError("needs an open chain with 4 edges")
    e13, e14, e24 = _signs(chain)
    P = chain.vertices
    n1, n2, n3, n4 = quad_normals(P[0], P[1], P[2], P[3])
    u1, u2, u3, u4 = quad_normals(P[0], P[1], P[3], P[4])
    v1, v2, v3, v4 = quad_normals(P[1], P[2], P[3], P[4])
    w = _guard("w", float(np.dot(np.cross(u2, -n2), np.cross(u2, n4))))
    scale = chain.scale()

    if e13 == e14:
        w0 = _guard("w0", float(np.dot(np.cross(v3, -n1), np.cross(v3, n3))))
        conds = CaseConditions(e13, e14, e24, w, w0, {})
        if w > 0 or w0 > 0:
            return 0.0, 0.0, 0.0, conds
        c31 = _guard("c31", float(np.dot(P[1] - P[3], n1)) * e13, scale)
        c41 = _guard("c41", float(np.dot(P[1] - P[4], n1)) * e13, scale)
        c30 = _guard("c30", float(np.dot(P[0] - P[3], n3)) * e13, scale)
        c40 = _guard("c40", float(np.dot(P[0] - P[4], n3)) * e13, scale)
        conds = CaseConditions(e13, e14, e24, w, w0, {"c31": c31, "c41": c41, "c30": c30, "c40": c40})
        tail = _tail_normals(c30, c40, n3, u1)
        q134 = [n4, *_head_normals(c31, c41, n1, u3), -u2, *tail]
        a_q134 = cell_area(q134)
        if c41 < 0:
            a_q = cell_area([v3, -v2, -u2])
        else:
            a_q = cell_area([v3, -v2, n1, -u2])
        if e24 == -e13:
            # Q and the rest of Q1 lie on opposite sides of the v3 circle, so
            # their interiors are disjoint and areas add.
            a_q1 = cell_area([n4, -v3, -u2, *tail]) + a_q
        else:
            # uniform sign pattern (s13 = s14 = s24): outside the tabulated
            # cases, remove the e2,e4 crossing event directly
            a_q1 = max(0.0, a_q134 - _event_intersection_area(q134, [v1, v2, v3, v4]))
        return a_q134, a_q1, a_q, conds

    # unequal signs: the joint region is never empty
    c40 = _guard("c40", float(np.dot(P[0] - P[4], n1)) * e13, scale)
    c41 = _guard("c41", float(np.dot(P[1] - P[4], n3)) * e13, scale)
    conds = CaseConditions(e13, e14, e24, w, None, {"c40": c40, "c41": c41})
    first = -u1 if c40 > 0 else n1
    second = -u3 if c41 > 0 else n3
    middle = -u2 if w < 0 else n4
    q134 = [n2, first, middle, second]
    a_q134 = cell_area(q134)
    # remove the e2,e4 crossing event directly: both antipodal copies of the
    # (v1..v4) quadrangle can meet the joint region
    a_triple = _event_intersection_area(q134, [v1, v2, v3, v4])
    a_q1 = max(0.0, a_q134 - a_triple)
    return a_q134, a_q1, 0.0, conds


def case_conditions(chain: PolyChain) -> CaseConditions:
    """Sign tests of the forward table dispatch (diagnostic helper)."""
    return _e4_regions(chain)[3]


def p_k21(chain: PolyChain) -> tuple[float, str, int]:
    """Probability that a random projection of an open 4-edge chain is the
    knotoid k2.1, with the realized two-crossing case and crossing sign.

    Case "Bi" uses crossings (e1,e3)+(e1,e4), case "Bii" uses (e2,e4)+(e1,e4)
    and is evaluated by running the same construction on the reversed chain.
    At most one of the two can occur; the k2.1 diagram writhe is twice the
    returned sign.
    """
    if chain.closed or chain.n_edges != 4:
        raise ValueError("p_k21 needs an open chain with 4 edges")
    e13, e14, e24 = _signs(chain)
    p_bi = _e4_regions(chain)[2] / TWO_PI if e13 == e14 else 0.0
    p_bii = _e4_regions(chain.reversed())[2] / TWO_PI if e24 == e14 else 0.0
    if p_bi > 0 and p_bii > 0:
        raise FiniteFormError("both k2.1 cases claim positive probability")
    if p_bi > 0:
        return _check_probability("p_k21", p_bi), "Bi", e14
    if p_bii > 0:
        return _check_probability("p_k21", p_bii), "Bii", e14
    return 0.0, "none", 0


def bracket_e4(chain: PolyChain) -> tuple[LaurentPoly, E4Probabilities]:
    """Exact bracket of an open 4-edge chain with its class probabilities.

    The chain (or its reversal, which has the same projections) is brought to
    one of two sign patterns.  Equal pattern (s13 == s14): classes are k2.1 at
    writhe 2*s13, single crossings at writhes s13 and s24, double kinks at
    2*s13, and the trivial rest.  Mixed pattern (s24 == s13 == -s14): no k2.1,
    single crossings at writhes s13 and s14, rest trivial.
    """
    if chain.closed or chain.n_edges != 4:
        raise ValueError("bracket_e4 needs an open chain with 4 edges")
    e13, e14, e24 = _signs(chain)
    uniform = e13 == e14 == e24
    work = chain if uniform or e13 == e14 or e24 == e13 else chain.reversed()
    f13, f14, f24 = _signs(work)

    l13 = pair_linking(work, (0, 2))
    l14 = pair_linking(work, (0, 3))
    l24 = pair_linking(work, (1, 3))
    a134, a_q1, a_q, _ = _e4_regions(work)
    a421, a_q2, a_q_rev, _ = _e4_regions(work.reversed())

    p_k0: dict[int, float] = {j: 0.0 for j in (-2, -1, 0, 1, 2)}
    if uniform:
        # all three pair signs equal: joint crossings of (e1,e3)+(e1,e4) and
        # of (e2,e4)+(e1,e4) are both governed by the equal-sign construction
        s = f13
        a_tri_f = a134 - a_q1
        a_tri_r = a421 - a_q2
        if abs(a_tri_f - a_tri_r) > 1e-6:
            raise FiniteFormError("triple-crossing areas from the two walks disagree")
        a_tri = 0.5 * (a_tri_f + a_tri_r)
        if a_q > 0.0 and a_q_rev > 0.0:
            raise FiniteFormError("both k2.1 cases claim positive probability")
        prob_k21 = _check_probability("p_k21", (a_q + a_q_rev) / TWO_PI)
        k21_writhe = 2 * s
        p_k0[s] = _check_probability(
            "p_k0[s]",
            2 * (abs(l13) + abs(l14) + abs(l24)) - (2 * a134 + 2 * a421 - a_tri) / TWO_PI,
        )
        p_k0[2 * s] = _check_probability("p_k0[2s]", (a_q1 - a_q + a_q2 - a_q_rev) / TWO_PI)
        p_triple = _check_probability("p_k0[3s]", a_tri / TWO_PI)
        if p_triple > PROB_TOL:
            p_k0[3 * s] = p_triple
    elif f13 == f14:
        s = f13
        if f24 != -s:
            raise FiniteFormError("sign pattern escaped the case dispatch")
        if a_q_rev != 0.0:
            raise FiniteFormError("reversed chain claims a k2.1 region in the equal case")
        prob_k21 = _check_probability("p_k21", a_q / TWO_PI)
        k21_writhe = 2 * s
        p_k0[-s] = _check_probability("p_k0[-s]", 2 * abs(l24) - a421 / TWO_PI)
        p_k0[s] = _check_probability(
            "p_k0[s]", 2 * abs(l13) + 2 * abs(l14) - (a134 + a_q2 + a_q1) / TWO_PI
        )
        p_k0[2 * s] = _check_probability("p_k0[2s]", (a_q1 - a_q) / TWO_PI)
    else:
        s = f13
        if f24 != s:
            raise FiniteFormError("mixed pattern must have s24 = s13")
        prob_k21 = 0.0
        k21_writhe = 0
        p_k0[s] = _check_probability(
            "p_k0[s]", 2 * abs(l24) + 2 * abs(l13) - (a421 + a_q1) / TWO_PI
        )
        p_k0[-s] = _check_probability("p_k0[-s]", 2 * abs(l14) - (a134 + a_q2) / TWO_PI)
    rest = 1.0 - prob_k21 - sum(p_k0.values())
    p_k0[0] = _check_probability("p_k0[0]", rest)

    poly = LaurentPoly.zero()
    if prob_k21 > 0.0:
        poly = poly + k21_bracket(k21_writhe // 2).scale(prob_k21)
    for j, p in p_k0.items():
        if p > 0.0:
            poly = poly + neg_a3_power(j).scale(p)
    probs = E4Probabilities(eps_24=e24, p_k21=prob_k21, k21_writhe=k21_writhe, p_k0=dict(p_k0))
    return poly, probs


def jones_e4(chain: PolyChain) -> LaurentPoly:
    """Normalized bracket of an open 4-edge chain, in the variable t.

    p * (-A^3)^(-2 s) <k2.1_s> + (1 - p), then A = t^(-1/4); equal to 1 when
    the k2.1 probability vanishes.
    """
    prob, _case, sign = p_k21(chain)
    if prob == 0.0:
        return LaurentPoly.one()
    f_a = (neg_a3_power(-2 * sign) * k21_bracket(sign)).scale(prob) + LaurentPoly.one().scale(
        1.0 - prob
    )
    return f_a.substitute_t()
