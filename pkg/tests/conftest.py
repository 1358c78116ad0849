import numpy as np
import pytest

from openknot.chain3d import PolyChain
from openknot.laurent import LaurentPoly

# snapshots of the benchmark 4-edge chain whose last vertex sweeps a circle
I_T0 = np.array([(0, 1, 0), (0, 0, 0), (-0.2, 0.8, 0.8), (0.1, 0.8, -0.8), (0.76, 0.5, 0.19)])
I_T1 = np.array([(0, 1, 0), (0, 0, 0), (-0.2, 0.8, 0.8), (0.1, 0.8, -0.8), (0.35, 0.5, 0.37)])
I_T2 = np.array([(0, 1, 0), (0, 0, 0), (-0.2, 0.8, 0.8), (0.1, 0.8, -0.8), (-0.02, 0.5, 0.39)])

# an embedded hexagonal trefoil (positive chirality), found by random search
# and verified against the state sum over many generic projections
TREFOIL_HEX = np.array(
    [
        [0.890225, 0.250783, 0.683031],
        [0.533011, 0.892538, 0.506258],
        [0.578907, 0.499433, 0.010042],
        [0.616764, 0.434596, 0.795308],
        [0.924870, 0.523523, 0.571223],
        [0.158481, 0.627532, 0.577965],
    ]
)

#: Jones of the right-handed trefoil: t + t^3 - t^4 (quarter-units of t)
JONES_TREFOIL = LaurentPoly({4: 1.0, 12: 1.0, 16: -1.0})
JONES_TREFOIL_MIRROR = LaurentPoly({-4: 1.0, -12: 1.0, -16: -1.0})

#: bracket of the standard k2.1 diagram (two positive crossings)
K21_BRACKET = LaurentPoly({8: 1.0, -16: -1.0, 0: 1.0})
#: its Jones form: t + t^(3/2) - t^(5/2)
JONES_K21 = LaurentPoly({4: 1.0, 6: 1.0, 10: -1.0})


@pytest.fixture
def rng():
    return np.random.default_rng(20240801)


@pytest.fixture
def chain_t0():
    return PolyChain(I_T0)


@pytest.fixture
def chain_t1():
    return PolyChain(I_T1)


@pytest.fixture
def chain_t2():
    return PolyChain(I_T2)


@pytest.fixture
def trefoil_hex():
    return PolyChain(TREFOIL_HEX, closed=True)


def random_chain(rng, n_vertices, closed=False, scale=1.0):
    return PolyChain(rng.uniform(0.0, scale, (n_vertices, 3)), closed=closed)


def random_unit(rng):
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def random_rotation(rng):
    q = rng.normal(size=4)
    q /= np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


def assert_poly_close(a: LaurentPoly, b: LaurentPoly, tol: float = 1e-12, msg: str = ""):
    if not a.approx_eq(b, tol):
        raise AssertionError(f"{msg or 'polynomials differ'}: {a.format()} vs {b.format()}")
