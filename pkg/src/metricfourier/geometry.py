"""Finite-set geometry: distances, projections, metric pairs, chains, hulls.

Compact sets are modelled as finite point clouds in R^d.  Continua (discs,
segments) enter as epsilon-nets built by the fixture layer; every assertion
about such sets carries a tolerance of the order of the net parameter.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

# Projection witnesses: everything within TIE_TOL of the minimum distance
# counts as a nearest point, so projections are sets, not single points.
TIE_TOL = 1e-9
# Two points closer than DEDUP_TOL are considered the same point.
DEDUP_TOL = 1e-12
# Exact chain enumeration refuses beyond this many chains.
CHAIN_LIMIT = 10 ** 6
# Block size (matrix entries) for chunked distance computations.
_BLOCK = 1 << 22

_CDIST_METRIC = {"l1": "cityblock", "l2": "euclidean", "linf": "chebyshev"}
_NORM_ORD = {"l1": 1, "l2": 2, "linf": np.inf}


class DimensionMismatch(ValueError):
    """Operands live in different ambient dimensions."""


class ChainExplosion(RuntimeError):
    """Exact chain enumeration would exceed the configured limit."""


def as_point(p) -> np.ndarray:
    """Coerce to a finite 1-d float vector (scalars become 1-d)."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("a point must be a nonempty vector")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite coordinates")
    return arr


def vec_norm(v, norm: str = "l2") -> float:
    """Norm of a single vector under the selected norm."""
    return float(np.linalg.norm(as_point(v), ord=_NORM_ORD[norm]))


@dataclass(frozen=True)
class PointSet:
    """Nonempty finite subset of R^d stored as an (m, d) array."""

    points: np.ndarray

    @staticmethod
    def of(points, dedup_tol: float = DEDUP_TOL) -> "PointSet":
        if isinstance(points, np.ndarray) and points.ndim == 2:
            arr = np.array(points, dtype=float)
            if arr.shape[0] == 0 or arr.shape[1] == 0:
                raise ValueError("a PointSet must be nonempty")
            if not np.all(np.isfinite(arr)):
                raise ValueError("point has non-finite coordinates")
            if dedup_tol > 0:
                arr = _dedup(arr, dedup_tol)
            arr.setflags(write=False)
            return PointSet(arr)
        rows = [as_point(p) for p in points]
        if not rows:
            raise ValueError("a PointSet must be nonempty")
        d = rows[0].size
        if any(r.size != d for r in rows):
            raise DimensionMismatch("points of mixed dimension")
        arr = np.array(rows, dtype=float)
        if dedup_tol > 0:
            arr = _dedup(arr, dedup_tol)
        arr.setflags(write=False)
        return PointSet(arr)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def __iter__(self):
        return iter(self.points)

    def single(self) -> np.ndarray:
        if len(self) != 1:
            raise ValueError("set is not a singleton")
        return self.points[0]


def _dedup(arr: np.ndarray, tol: float) -> np.ndarray:
    if arr.shape[0] <= 1:
        return arr
    if arr.shape[0] <= 4096:
        keep: list[np.ndarray] = []
        for row in arr:
            if not keep or np.min(np.max(np.abs(np.array(keep) - row), axis=1)) > tol:
                keep.append(row)
        return np.array(keep)
    # Large clouds (epsilon-nets): grid-snap dedup, adequate for generated nets.
    snapped = np.round(arr / max(tol, 1e-15))
    _, idx = np.unique(snapped, axis=0, return_index=True)
    return arr[np.sort(idx)]


def _check_dims(A: PointSet, B: PointSet) -> None:
    if A.dim != B.dim:
        raise DimensionMismatch(f"dimension {A.dim} vs {B.dim}")


def _dists_to(p: np.ndarray, B: PointSet, norm: str) -> np.ndarray:
    return cdist(p[None, :], B.points, metric=_CDIST_METRIC[norm])[0]


def min_dists(P: np.ndarray, Q: np.ndarray, norm: str = "l2") -> np.ndarray:
    """Distance from each row of P to the set Q, block-wise to bound memory."""
    m = P.shape[0]
    out = np.full(m, np.inf)
    pb = max(1, min(m, _BLOCK // max(1, Q.shape[0])))
    qb = max(1, _BLOCK // pb)
    metric = _CDIST_METRIC[norm]
    for i in range(0, m, pb):
        pi = P[i:i + pb]
        best = np.full(pi.shape[0], np.inf)
        for j in range(0, Q.shape[0], qb):
            d = cdist(pi, Q[j:j + qb], metric=metric)
            np.minimum(best, d.min(axis=1), out=best)
        out[i:i + pb] = best
    return out


def dist_point_set(p, B: PointSet, norm: str = "l2",
                   tie_tol: float = TIE_TOL) -> tuple[float, PointSet]:
    """Distance from p to B plus the witness set of near-minimizers."""
    p = as_point(p)
    if p.size != B.dim:
        raise DimensionMismatch(f"dimension {p.size} vs {B.dim}")
    d = _dists_to(p, B, norm)
    value = float(d.min())
    witnesses = B.points[d <= value + tie_tol]
    return value, PointSet.of(witnesses, dedup_tol=0)


def project(p, B: PointSet, norm: str = "l2", tie_tol: float = TIE_TOL) -> PointSet:
    """Nearest-point projection of p onto B (all tied witnesses)."""
    return dist_point_set(p, B, norm, tie_tol)[1]


def hausdorff(A: PointSet, B: PointSet, norm: str = "l2") -> float:
    """Hausdorff distance: max of the two directed sup-min distances."""
    _check_dims(A, B)
    fwd = float(min_dists(A.points, B.points, norm).max())
    bwd = float(min_dists(B.points, A.points, norm).max())
    return max(fwd, bwd)


def set_norm(A: PointSet, norm: str = "l2") -> float:
    """Hausdorff distance from A to the origin, i.e. max |a|."""
    return float(np.linalg.norm(A.points, ord=_NORM_ORD[norm], axis=1).max())


@dataclass(frozen=True)
class MetricPairList:
    """Pairs (a, b) where one point projects onto the opposite set."""

    pairs: tuple

    def __len__(self) -> int:
        return len(self.pairs)

    def as_points(self):
        return [(a.copy(), b.copy()) for a, b in self.pairs]


def metric_pairs(A: PointSet, B: PointSet, norm: str = "l2",
                 tie_tol: float = TIE_TOL) -> MetricPairList:
    """All metric pairs of (A, B); symmetric duplicates counted once."""
    _check_dims(A, B)
    if len(A) * len(B) > 4 * 10 ** 6:
        raise ChainExplosion(
            "pair enumeration too large; query membership with is_metric_pair")
    D = cdist(A.points, B.points, metric=_CDIST_METRIC[norm])
    idx: set[tuple[int, int]] = set()
    mins_b = D.min(axis=1)
    for i in range(len(A)):
        for j in np.nonzero(D[i] <= mins_b[i] + tie_tol)[0]:
            idx.add((i, int(j)))
    mins_a = D.min(axis=0)
    for j in range(len(B)):
        for i in np.nonzero(D[:, j] <= mins_a[j] + tie_tol)[0]:
            idx.add((int(i), j))
    pairs = tuple((A.points[i], B.points[j]) for i, j in sorted(idx))
    return MetricPairList(pairs)


def is_metric_pair(a, b, A: PointSet, B: PointSet, norm: str = "l2",
                   tie_tol: float = TIE_TOL) -> bool:
    """Membership test that avoids enumerating all pairs of large sets."""
    a = as_point(a)
    b = as_point(b)
    da, _ = dist_point_set(b, A, norm, tie_tol)
    db, _ = dist_point_set(a, B, norm, tie_tol)
    gap = vec_norm(a - b, norm)
    return gap <= da + tie_tol or gap <= db + tie_tol


def _pair_indices(A: PointSet, B: PointSet, norm: str, tie_tol: float):
    D = cdist(A.points, B.points, metric=_CDIST_METRIC[norm])
    idx: set[tuple[int, int]] = set()
    mins_b = D.min(axis=1)
    mins_a = D.min(axis=0)
    for i in range(len(A)):
        for j in np.nonzero(D[i] <= mins_b[i] + tie_tol)[0]:
            idx.add((i, int(j)))
    for j in range(len(B)):
        for i in np.nonzero(D[:, j] <= mins_a[j] + tie_tol)[0]:
            idx.add((int(i), j))
    return idx


def enumerate_metric_chains(sets: list[PointSet], norm: str = "l2",
                            tie_tol: float = TIE_TOL,
                            limit: int = CHAIN_LIMIT) -> list[tuple]:
    """All metric chains (a_0, ..., a_n) of an ordered list of sets."""
    if len(sets) < 2:
        raise ValueError("need at least two sets")
    for A, B in zip(sets, sets[1:]):
        _check_dims(A, B)
    adjacency = []
    for A, B in zip(sets, sets[1:]):
        idx = _pair_indices(A, B, norm, tie_tol)
        nxt: dict[int, list[int]] = {}
        for i, j in sorted(idx):
            nxt.setdefault(i, []).append(j)
        adjacency.append(nxt)
    # Count before materializing to catch explosions cheaply.
    counts = {j: 1 for j in range(len(sets[-1]))}
    for A, nxt in zip(reversed(sets[:-1]), reversed(adjacency)):
        counts = {i: sum(counts.get(j, 0) for j in js) for i, js in nxt.items()}
    total = sum(counts.values())
    if total > limit:
        raise ChainExplosion(
            f"{total} chains exceed limit {limit}; use greedy selections instead")
    chains: list[tuple] = []
    stack: list[int] = []

    def walk(level: int, i: int) -> None:
        stack.append(i)
        if level == len(adjacency):
            chains.append(tuple(sets[k].points[s] for k, s in enumerate(stack)))
        else:
            for j in adjacency[level].get(i, []):
                walk(level + 1, j)
        stack.pop()

    for i in range(len(sets[0])):
        walk(0, i)
    return chains


def metric_linear_combination(lambdas, sets: list[PointSet], norm: str = "l2",
                              tie_tol: float = TIE_TOL,
                              limit: int = CHAIN_LIMIT) -> PointSet:
    """{sum lambda_i a_i} over all metric chains; order of the sets matters."""
    lambdas = [float(l) for l in lambdas]
    if len(lambdas) != len(sets):
        raise ValueError("weights and sets must have equal length")
    if len(sets) == 1:
        return PointSet.of(lambdas[0] * sets[0].points)
    chains = enumerate_metric_chains(sets, norm, tie_tol, limit)
    sums = [sum(l * a for l, a in zip(lambdas, ch)) for ch in chains]
    return PointSet.of(sums)


def minkowski_combination(lambdas, sets: list[PointSet],
                          limit: int = CHAIN_LIMIT) -> PointSet:
    """All sums over the full Cartesian product: the convexifying baseline."""
    lambdas = [float(l) for l in lambdas]
    if len(lambdas) != len(sets):
        raise ValueError("weights and sets must have equal length")
    count = 1
    for s in sets:
        count *= len(s)
        if count > limit:
            raise ChainExplosion(f"product size exceeds limit {limit}")
    sums = [sum(l * a for l, a in zip(lambdas, combo))
            for combo in itertools.product(*(s.points for s in sets))]
    return PointSet.of(sums)


def metric_average(t: float, A: PointSet, B: PointSet, norm: str = "l2",
                   tie_tol: float = TIE_TOL) -> PointSet:
    """{(1-t)a + t b : (a,b) a metric pair of (A, B)} for t in [0,1]."""
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    pairs = metric_pairs(A, B, norm, tie_tol)
    return PointSet.of([(1.0 - t) * a + t * b for a, b in pairs.pairs])


def convex_hull(A: PointSet) -> PointSet:
    """Hull vertices: {min, max} in d=1, monotone-chain vertices in d=2."""
    if A.dim == 1:
        v = A.points[:, 0]
        return PointSet.of([[v.min()], [v.max()]])
    if A.dim != 2:
        raise ValueError("convex hull supported only for d <= 2")
    pts = sorted({(float(x), float(y)) for x, y in A.points})
    if len(pts) <= 2:
        return PointSet.of(pts)

    def half(seq):
        out = []
        for p in seq:
            while len(out) > 1:
                v0, v1 = out[-2], out[-1]
                if ((v1[0] - v0[0]) * (p[1] - v0[1])
                        - (p[0] - v0[0]) * (v1[1] - v0[1])) <= 0.0:
                    out.pop()
                else:
                    break
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    return PointSet.of(lower[:-1] + upper[:-1])


def hull_contains(hull: PointSet, p, tol: float = 1e-9) -> bool:
    """Membership in the convex hull described by its vertex set."""
    p = as_point(p)
    if p.size != hull.dim:
        raise DimensionMismatch(f"dimension {p.size} vs {hull.dim}")
    if hull.dim == 1:
        v = hull.points[:, 0]
        return v.min() - tol <= p[0] <= v.max() + tol
    verts = [tuple(map(float, q)) for q in convex_hull(hull).points]
    if len(verts) == 1:
        return vec_norm(p - np.array(verts[0])) <= tol
    if len(verts) == 2:
        a, b = np.array(verts[0]), np.array(verts[1])
        ab = b - a
        t = float(np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0))
        return vec_norm(p - (a + t * ab)) <= tol
    n = len(verts)
    for i in range(n):
        x0, y0 = verts[i]
        x1, y1 = verts[(i + 1) % n]
        cross = (x1 - x0) * (p[1] - y0) - (p[0] - x0) * (y1 - y0)
        edge = max(np.hypot(x1 - x0, y1 - y0), 1e-300)
        if cross / edge < -tol:
            return False
    return True
