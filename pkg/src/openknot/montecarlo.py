"""Projection-averaged invariants by Monte-Carlo sampling of directions.

The estimators draw uniform directions on the unit sphere with a
counter-based generator keyed by (seed, sample index, retry), so results are
reproducible bit-for-bit and independent of batching.  Projections are
grouped by combinatorial diagram signature; each distinct diagram's
polynomial is computed once by the state sum and averaged with the observed
frequencies, which is exactly the per-sample average.

Degenerate (non-generic) directions are resampled from a deterministic retry
substream and counted in ``rejected``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chain3d import PolyChain
from .diagram import Crossing, Diagram, bracket, classify_4edge, normalized_bracket
from .laurent import LaurentPoly

GENERIC_EPS = 1e-9
MAX_RETRIES = 64


class ConditioningError(RuntimeError):
    """Too many degenerate projections: the chain geometry is ill-conditioned."""


# -- counter-based RNG ------------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_P_INDEX = np.uint64(0xD6E8FEB86659FD93)
_P_RETRY = np.uint64(0xCA5A826395121157)


def _mix64(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        x = (x + _GOLDEN).astype(np.uint64)
        x ^= x >> np.uint64(30)
        x *= _MIX1
        x ^= x >> np.uint64(27)
        x *= _MIX2
        x ^= x >> np.uint64(31)
    return x


def _uniform01(words: np.ndarray) -> np.ndarray:
    return (words >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def sample_direction(seed: int, index, retry: int = 0) -> np.ndarray:
    """Uniform point(s) on S^2 for (seed, index, retry); pure counter-based.

    ``index`` may be an int or an integer array; the result has shape (3,) or
    (len(index), 3).  Identical arguments always give identical output.
    """
    idx = np.atleast_1d(np.asarray(index, dtype=np.uint64))
    with np.errstate(over="ignore"):
        base = _mix64(np.uint64(seed & 0xFFFFFFFFFFFFFFFF) * _GOLDEN)
    a = _mix64(idx * _P_INDEX + np.uint64(retry) * _P_RETRY + base)
    b = _mix64(a ^ _GOLDEN)
    z = 2.0 * _uniform01(a) - 1.0
    phi = 2.0 * np.pi * _uniform01(b)
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    dirs = np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)
    return dirs[0] if np.isscalar(index) else dirs


# -- vectorized projection geometry ----------------------------------------


def _pair_crossing_data(chain: PolyChain, dirs: np.ndarray):
    """Crossing data of every non-adjacent edge pair for a batch of directions.

    Returns (pairs, crossed, sign, over_first, t, u, degenerate) where the
    per-pair arrays have shape (n_pairs, B); t is the double-point parameter
    on the first edge of the pair and u on the second.
    """
    verts = chain.vertices
    nv = chain.n_vertices
    scale = chain.scale()
    B = len(dirs)

    helper = np.where(
        np.abs(dirs[:, 2:3]) < 0.9, np.array([[0.0, 0.0, 1.0]]), np.array([[1.0, 0.0, 0.0]])
    )
    b1 = np.cross(dirs, helper)
    b1 /= np.linalg.norm(b1, axis=1, keepdims=True)
    b2 = np.cross(dirs, b1)

    x = verts @ b1.T  # (nv, B)
    y = verts @ b2.T
    z = verts @ dirs.T

    degenerate = np.zeros(B, dtype=bool)

    def vtx(i):
        i = i % nv
        return x[i], y[i], z[i]

    # short projected edges
    for e in range(chain.n_edges):
        ax, ay, _ = vtx(e)
        bx, by, _ = vtx(e + 1)
        len3d = float(np.linalg.norm(chain.edge_vector(e)))
        degenerate |= np.hypot(bx - ax, by - ay) < GENERIC_EPS * len3d

    pairs = chain.nonadjacent_pairs()
    P = len(pairs)
    crossed = np.zeros((P, B), dtype=bool)
    sign = np.zeros((P, B), dtype=np.int8)
    over_first = np.zeros((P, B), dtype=bool)
    tpar = np.zeros((P, B))
    upar = np.zeros((P, B))

    for k, (i, j) in enumerate(pairs):
        pax, pay, paz = vtx(i)
        pbx, pby, pbz = vtx(i + 1)
        qax, qay, qaz = vtx(j)
        qbx, qby, qbz = vtx(j + 1)
        rx, ry = pbx - pax, pby - pay
        sx, sy = qbx - qax, qby - qay
        denom = rx * sy - ry * sx
        tiny = np.abs(denom) < GENERIC_EPS * GENERIC_EPS * scale * scale
        safe = np.where(tiny, 1.0, denom)
        qpx, qpy = qax - pax, qay - pay
        t = (qpx * sy - qpy * sx) / safe
        u = (qpx * ry - qpy * rx) / safe
        inside = (t > GENERIC_EPS) & (t < 1 - GENERIC_EPS) & (u > GENERIC_EPS) & (u < 1 - GENERIC_EPS)
        near = (t > -GENERIC_EPS) & (t < 1 + GENERIC_EPS) & (u > -GENERIC_EPS) & (u < 1 + GENERIC_EPS)
        degenerate |= tiny  # parallel projected segments: resample, cheap and safe
        degenerate |= near & ~inside & ~tiny
        zi = paz + t * (pbz - paz)
        zj = qaz + u * (qbz - qaz)
        ins = inside & ~tiny
        degenerate |= ins & (np.abs(zi - zj) < GENERIC_EPS * scale)
        crossed[k] = ins
        over_first[k] = zi > zj
        sgn = np.where(denom > 0, 1, -1).astype(np.int8)
        sign[k] = np.where(over_first[k], sgn, -sgn)
        tpar[k] = t
        upar[k] = u

    # double points too close along a shared edge
    for k1 in range(P):
        i1, j1 = pairs[k1]
        for k2 in range(k1 + 1, P):
            i2, j2 = pairs[k2]
            for e in {i1, j1} & {i2, j2}:
                par1 = tpar[k1] if e == i1 else upar[k1]
                par2 = tpar[k2] if e == i2 else upar[k2]
                both = crossed[k1] & crossed[k2]
                degenerate |= both & (np.abs(par1 - par2) < GENERIC_EPS)

    return pairs, crossed, sign, over_first, tpar, upar, degenerate


def _sample_batch(chain: PolyChain, seed: int, index: np.ndarray):
    """Crossing data for the given sample indices, resampling degenerate
    directions from the deterministic retry substream.  Returns the data
    tuple plus the number of rejected (resampled) draws."""
    dirs = sample_direction(seed, index)
    data = _pair_crossing_data(chain, dirs)
    rejected = 0
    retry = 0
    while True:
        degenerate = data[6]
        n_bad = int(degenerate.sum())
        if n_bad == 0:
            return data, rejected
        rejected += n_bad
        retry += 1
        if retry > MAX_RETRIES:
            raise ConditioningError("projections remain degenerate after maximum retries")
        bad = np.flatnonzero(degenerate)
        dirs[bad] = sample_direction(seed, index[bad], retry)
        sub = _pair_crossing_data(chain, dirs[bad])
        for full, part in zip(data[1:6], sub[1:6]):
            full[:, bad] = part
        data[6][bad] = sub[6]


# -- diagram signatures ------------------------------------------------------


def _signature_of_sample(pairs, crossed, sign, over_first, tpar, upar, b) -> tuple:
    """Canonical diagram signature of one sample: passage tokens in curve order."""
    passages = []
    for k, (i, j) in enumerate(pairs):
        if not crossed[k, b]:
            continue
        s = int(sign[k, b])
        over_edge = i if over_first[k, b] else j
        passages.append((i + tpar[k, b], k, i == over_edge, s, i, j))
        passages.append((j + upar[k, b], k, j == over_edge, s, i, j))
    passages.sort()
    return tuple((k, over, s, i, j) for _, k, over, s, i, j in passages)


def _diagram_from_signature(signature: tuple, closed: bool) -> Diagram:
    """Rebuild a representative Diagram from a passage-token signature."""
    first_slot: dict[int, tuple] = {}
    crossings: list[Crossing] = []
    index_of: dict[int, int] = {}
    for slot, (k, over, s, i, j) in enumerate(signature):
        if k not in first_slot:
            first_slot[k] = (slot, over)
            continue
        slot0, over0 = first_slot[k]
        # with i < j non-adjacent, the edge-i passage always sorts first,
        # so the first token of pair k carries the edge-i over/under flag
        over_edge = i if over0 else j
        under_edge = j if over0 else i
        over_pos = float(slot0 if over0 else slot)
        under_pos = float(slot if over0 else slot0)
        index_of[k] = len(crossings)
        crossings.append(Crossing(over_edge, under_edge, s, over_pos, under_pos))
    traversal = tuple((index_of[k], over) for (k, over, *_rest) in signature)
    return Diagram(tuple(crossings), traversal, closed)


def _pack_signatures_4edge(crossed, sign, over_first, tpar, upar) -> np.ndarray:
    """Vectorized signature packing for open 4-edge chains (pairs (0,2), (0,3),
    (1,3)): per-pair state nibble plus the two passage-order bits that the
    bracket can depend on (order along edge 0 and along edge 3)."""
    nib = np.where(crossed, 1 + (sign > 0) + 2 * over_first, 0).astype(np.int64)
    ord0 = (crossed[0] & crossed[1] & (tpar[0] < tpar[1])).astype(np.int64)
    ord3 = (crossed[1] & crossed[2] & (upar[1] < upar[2])).astype(np.int64)
    return nib[0] + 5 * (nib[1] + 5 * (nib[2] + 5 * (ord0 + 2 * ord3)))


def _unpack_signature_4edge(code: int) -> tuple:
    pairs = [(0, 2), (0, 3), (1, 3)]
    nibs = []
    rest = int(code)
    for _ in range(3):
        nibs.append(rest % 5)
        rest //= 5
    ord0, ord3 = rest % 2, rest // 2
    # double-point parameters consistent with the recorded orderings
    t_first = {0: 0.25 if ord0 else 0.75, 1: 0.75 if ord0 else 0.25, 2: 0.5}
    u_second = {0: 0.5, 1: 0.25 if ord3 else 0.75, 2: 0.75 if ord3 else 0.25}
    passages = []
    for k, (i, j) in enumerate(pairs):
        if nibs[k] == 0:
            continue
        s = 1 if (nibs[k] - 1) & 1 else -1
        first_over = bool((nibs[k] - 1) & 2)
        passages.append((i + t_first[k], k, first_over, s, i, j))
        passages.append((j + u_second[k], k, not first_over, s, i, j))
    passages.sort()
    return tuple((k, over, s, i, j) for _, k, over, s, i, j in passages)


def _count_signatures(
    chain: PolyChain,
    n_samples: int,
    seed: int,
    block: int = 1 << 15,
    use_fast: bool | None = None,
):
    """Map signature -> occurrence count over n_samples accepted projections."""
    counts: dict[tuple, int] = {}
    rejected = 0
    fast4 = (not chain.closed) and chain.n_edges == 4
    if use_fast is not None:
        fast4 = fast4 and use_fast
    int_counts: dict[int, int] = {}
    for start in range(0, n_samples, block):
        index = np.arange(start, min(start + block, n_samples), dtype=np.uint64)
        (pairs, crossed, sign, over_first, tpar, upar, _), rej = _sample_batch(chain, seed, index)
        rejected += rej
        if fast4:
            codes = _pack_signatures_4edge(crossed, sign, over_first, tpar, upar)
            uniq, cnts = np.unique(codes, return_counts=True)
            for code, cnt in zip(uniq.tolist(), cnts.tolist()):
                int_counts[code] = int_counts.get(code, 0) + cnt
        else:
            any_cross = crossed.any(axis=0)
            n_trivial = int((~any_cross).sum())
            if n_trivial:
                counts[()] = counts.get((), 0) + n_trivial
            for b in np.flatnonzero(any_cross):
                sig = _signature_of_sample(pairs, crossed, sign, over_first, tpar, upar, int(b))
                counts[sig] = counts.get(sig, 0) + 1
        if rejected > 0.5 * (start + len(index)) and rejected > 1000:
            raise ConditioningError(f"degenerate-projection rate above 50% ({rejected} rejected)")
    if fast4:
        for code, cnt in int_counts.items():
            counts[_unpack_signature_4edge(code)] = cnt
    return counts, rejected


# -- estimates ----------------------------------------------------------------


@dataclass(frozen=True)
class BracketEstimate:
    """Monte-Carlo average of a diagram polynomial with per-coefficient errors."""

    mean: LaurentPoly
    stderr: dict[int, float]
    samples: int
    rejected: int
    seed: int
    variable: str = "A"

    def to_json_dict(self) -> dict:
        return {
            "variable": self.variable,
            "mean": self.mean.to_pairs(),
            "stderr": [[k, self.stderr[k]] for k in sorted(self.stderr, reverse=True)],
            "samples": self.samples,
            "rejected": self.rejected,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class DistributionEstimate:
    """Empirical joint law of (diagram class, writhe) over projections."""

    entries: dict[tuple[str, int], tuple[float, float]]
    samples: int
    rejected: int
    seed: int

    def probability(self, cls: str, writhe: int | None = None) -> float:
        if writhe is None:
            return sum(p for (c, _), (p, _) in self.entries.items() if c == cls)
        return self.entries.get((cls, writhe), (0.0, 0.0))[0]


def _average(counts: dict[tuple, int], polys: dict[tuple, LaurentPoly], n: int):
    mean = LaurentPoly.zero()
    for sig in sorted(counts):
        mean = mean + polys[sig].scale(counts[sig] / n)
    support = set(mean.support())
    for poly in polys.values():
        support.update(poly.support())
    stderr = {}
    for k in support:
        m = mean.coeff(k)
        sq = sum(counts[sig] * polys[sig].coeff(k) ** 2 for sig in counts)
        var = max(0.0, (sq - n * m * m) / (n - 1)) if n > 1 else 0.0
        stderr[k] = float(np.sqrt(var / n))
    return mean, stderr


def mc_bracket(chain: PolyChain, n_samples: int, seed: int) -> BracketEstimate:
    """Average bracket polynomial over uniform projection directions."""
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    counts, rejected = _count_signatures(chain, n_samples, seed)
    polys = {sig: bracket(_diagram_from_signature(sig, chain.closed)) for sig in counts}
    mean, stderr = _average(counts, polys, n_samples)
    return BracketEstimate(mean, stderr, n_samples, rejected, seed)


def mc_jones(chain: PolyChain, n_samples: int, seed: int, variable: str = "t") -> BracketEstimate:
    """Average normalized bracket ((-A^3)^(-writhe) times the bracket).

    For a closed chain every accepted projection yields the same polynomial
    (checked to 1e-9), the Jones invariant of the knot.  By default the
    result is reported in t via A = t^(-1/4).
    """
    if n_samples < 100:
        raise ValueError("need at least 100 samples")
    counts, rejected = _count_signatures(chain, n_samples, seed)
    polys = {
        sig: normalized_bracket(_diagram_from_signature(sig, chain.closed)) for sig in counts
    }
    if chain.closed and len(polys) > 1:
        ref = next(iter(polys.values()))
        for poly in polys.values():
            if not poly.approx_eq(ref, 1e-9):
                raise AssertionError("closed-chain normalized bracket varies across projections")
    mean, stderr = _average(counts, polys, n_samples)
    if variable == "t":
        mean = mean.substitute_t()
        stderr = {-k // 4: v for k, v in stderr.items()}
    return BracketEstimate(mean, stderr, n_samples, rejected, seed, variable=variable)


def mc_distribution(
    chain: PolyChain, n_samples: int, seed: int, classifier=None
) -> DistributionEstimate:
    """Empirical joint frequencies of (diagram class, writhe) with binomial
    standard errors.  Uses the 4-edge classifier unless one is supplied."""
    if classifier is None:
        if chain.n_edges != 4 or chain.closed:
            raise ValueError("default classifier needs an open 4-edge chain")
        classifier = classify_4edge
    counts, rejected = _count_signatures(chain, n_samples, seed)
    class_counts: dict[tuple[str, int], int] = {}
    for sig, cnt in sorted(counts.items()):
        diag = _diagram_from_signature(sig, chain.closed)
        key = (classifier(diag), diag.writhe())
        class_counts[key] = class_counts.get(key, 0) + cnt
    entries = {}
    for key, cnt in sorted(class_counts.items()):
        p = cnt / n_samples
        entries[key] = (p, float(np.sqrt(p * (1.0 - p) / n_samples)))
    return DistributionEstimate(entries, n_samples, rejected, seed)
