import numpy as np
import pytest

from conftest import I_T0, random_chain, random_rotation
from oracles import gauss_linking_quadrature

from openknot.chain3d import (
    PolyChain,
    acn,
    crossing_sign,
    edge_linking,
    gauss_linking,
    pair_linking,
    segment_crossing_sign,
    writhe,
)
from openknot.sphere import DegenerateGeometryError

# the worked pair used throughout: e_i = (0,0,0)->(1,0,0), e_j = (0,1,1)->(1,-1,1)
PAIR = (np.array([0.0, 0, 0]), np.array([1.0, 0, 0]), np.array([0.0, 1, 1]), np.array([1.0, -1, 1]))


def test_polychain_validation():
    with pytest.raises(ValueError):
        PolyChain(np.array([[0.0, 0, 0]]))
    with pytest.raises(ValueError):
        PolyChain(np.array([[0.0, 0, 0], [0, 0, 0], [1, 1, 1]]))
    with pytest.raises(ValueError):
        PolyChain(np.array([[0.0, 0, 0], [1, 0, 0]]), closed=True)
    with pytest.raises(ValueError):
        PolyChain(np.array([[0.0, 0, np.inf], [1, 0, 0], [1, 1, 0]]))
    ch = PolyChain(np.array([[0.0, 0, 0], [1, 0, 0], [1, 1, 0]]), closed=True)
    assert ch.n_edges == 3 and PolyChain(ch.vertices).n_edges == 2


def test_crossing_sign_matches_integral_orientation():
    # chirality is anchored to the sign of the linking double integral
    sign = segment_crossing_sign(*PAIR)
    oracle = np.sign(gauss_linking_quadrature(*PAIR))
    assert sign == oracle == 1


def test_crossing_sign_degenerate_and_mirror(rng):
    a0, a1 = np.array([0.0, 0, 0]), np.array([1.0, 0, 0])
    b0, b1 = np.array([0.0, 1, 0]), np.array([1.0, 2, 0])
    assert segment_crossing_sign(a0, a1, b0, b1) == 0  # coplanar
    for _ in range(50):
        pts = rng.uniform(-1, 1, (4, 3))
        s = segment_crossing_sign(*pts)
        mirrored = pts * np.array([1, 1, -1.0])
        assert segment_crossing_sign(*mirrored) == -s


def test_edge_linking_against_quadrature(rng):
    value = edge_linking(*PAIR)
    assert value == pytest.approx(gauss_linking_quadrature(*PAIR), abs=1e-8)
    for _ in range(25):
        pts = rng.uniform(-1, 1, (4, 3))
        got = edge_linking(*pts)
        want = gauss_linking_quadrature(*pts)
        assert got == pytest.approx(want, abs=1e-7)
        assert abs(got) <= 0.5


def test_edge_linking_degenerate_flag():
    a0, a1 = np.array([0.0, 0, 0]), np.array([1.0, 0, 0])
    b0, b1 = np.array([0.0, 1, 0]), np.array([1.0, 2, 0])
    value, degenerate = edge_linking(a0, a1, b0, b1, with_flag=True)
    assert value == 0.0 and degenerate


def test_edge_linking_sign_equals_crossing_sign(rng):
    for _ in range(100):
        pts = rng.uniform(-1, 1, (4, 3))
        s = segment_crossing_sign(*pts)
        if s == 0:
            continue
        assert np.sign(edge_linking(*pts)) == s


def unit_square(center, axis):
    """Closed unit square centered at ``center`` in the plane normal to axis."""
    basis = {
        "z": (np.array([1.0, 0, 0]), np.array([0.0, 1, 0])),
        "y": (np.array([1.0, 0, 0]), np.array([0.0, 0, 1])),
    }[axis]
    u, v = basis
    c = np.asarray(center, float)
    pts = [c - 0.5 * u - 0.5 * v, c + 0.5 * u - 0.5 * v, c + 0.5 * u + 0.5 * v, c - 0.5 * u + 0.5 * v]
    return PolyChain(np.array(pts), closed=True)


def hopf_squares():
    a = unit_square((0.0, 0.0, 0.0), "z")
    b = unit_square((0.5, 0.0, 0.0), "y")
    return a, b


def test_gauss_linking_far_squares():
    a = unit_square((0.0, 0.0, 0.0), "z")
    b = unit_square((500.0, 0.0, 0.0), "y")
    assert abs(gauss_linking(a, b)) < 1e-6


def test_gauss_linking_hopf():
    a, b = hopf_squares()
    lk = gauss_linking(a, b)
    assert abs(abs(lk) - 1.0) < 1e-9
    assert gauss_linking(a.reversed(), b) == pytest.approx(-lk, abs=1e-12)


def test_gauss_linking_rigid_motion_invariance(rng):
    a, b = hopf_squares()
    lk = gauss_linking(a, b)
    rot = random_rotation(rng)
    shift = rng.uniform(-5, 5, 3)
    a2 = PolyChain(a.vertices @ rot.T + shift, closed=True)
    b2 = PolyChain(b.vertices @ rot.T + shift, closed=True)
    assert gauss_linking(a2, b2) == pytest.approx(lk, abs=1e-9)


def subdivide(chain, k=2):
    pts = []
    n = chain.n_edges
    for i in range(n):
        a, b = chain.edge(i)
        for t in np.arange(k) / k:
            pts.append(a + t * (b - a))
    if not chain.closed:
        pts.append(chain.vertices[-1])
    return PolyChain(np.array(pts), chain.closed)


def test_gauss_linking_integer_and_subdivision(rng):
    a, b = hopf_squares()
    lk = gauss_linking(a, b)
    assert abs(lk - round(lk)) < 1e-9
    assert gauss_linking(subdivide(a, 3), subdivide(b, 2)) == pytest.approx(lk, abs=1e-9)


def test_gauss_linking_touching_chains_raise():
    a = unit_square((0.0, 0.0, 0.0), "z")
    bad = PolyChain(np.array([[0.5, 0, 0], [1.0, 1, 1]]))  # starts on a square edge
    with pytest.raises(DegenerateGeometryError):
        gauss_linking(a, bad)


def test_writhe_planar_and_mirror(rng):
    flat = PolyChain(np.array([[0.0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0.2, 0.5, 0]]))
    assert writhe(flat) == 0.0
    for _ in range(20):
        ch = random_chain(rng, 6)
        mirrored = PolyChain(ch.vertices * np.array([1, 1, -1.0]))
        assert writhe(mirrored) == pytest.approx(-writhe(ch), abs=1e-12)


def test_writhe_against_quadrature():
    ch = PolyChain(I_T0)
    expected = sum(
        2.0 * gauss_linking_quadrature(*ch.edge(i), *ch.edge(j))
        for i, j in ch.nonadjacent_pairs()
    )
    assert writhe(ch) == pytest.approx(expected, abs=1e-6)


def test_acn_properties(rng):
    flat = PolyChain(np.array([[0.0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0.2, 0.5, 0]]))
    assert acn(flat) == 0.0
    for _ in range(30):
        ch = random_chain(rng, 6)
        assert acn(ch) >= abs(writhe(ch)) - 1e-12
    for _ in range(10):
        gon = random_chain(rng, 4, closed=True)
        expected = 2 * abs(pair_linking(gon, (0, 2))) + 2 * abs(pair_linking(gon, (1, 3)))
        assert acn(gon) == pytest.approx(expected, abs=1e-14)


def test_crossing_sign_adjacent_rejected(chain_t0):
    with pytest.raises(ValueError):
        crossing_sign(chain_t0, (0, 1))
