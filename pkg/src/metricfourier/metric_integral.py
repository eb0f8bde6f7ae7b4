"""Weighted metric Riemann sums, the weighted metric integral via selections,
the convexifying Aumann baseline, and the inclusion property report."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .geometry import (CHAIN_LIMIT, PointSet, as_point, convex_hull,
                       enumerate_metric_chains, hull_contains, min_dists)
from .svf import Partition, SelectionFamily, SetValuedFunction

QTOL = 1e-10


@dataclass(frozen=True)
class WeightFunction:
    """Scalar BV weight on [a, b].

    `antiderivative`, when declared, makes subinterval integrals exact
    (polynomial/trig weights); otherwise adaptive quadrature at QTOL is used.
    """

    fn: object
    variation_hint: float
    sup_hint: float
    discontinuities: tuple = ()
    antiderivative: object | None = None

    def __call__(self, x: float) -> float:
        return float(self.fn(x))

    @staticmethod
    def constant(c: float) -> "WeightFunction":
        c = float(c)
        return WeightFunction(lambda x: c, 0.0, abs(c),
                              antiderivative=lambda x: c * x)


def integrate_weight(k: WeightFunction, u: float, v: float,
                     qtol: float = QTOL) -> float:
    """Integral of k over [u, v], exact when an antiderivative is declared."""
    if u == v:
        return 0.0
    if k.antiderivative is not None:
        return float(k.antiderivative(v) - k.antiderivative(u))
    cuts = sorted({u, v} | {d for d in k.discontinuities if u < d < v})
    total = 0.0
    for s, t in zip(cuts, cuts[1:]):
        val, _ = quad(k.fn, s, t, epsabs=qtol, epsrel=qtol, limit=200)
        total += val
    return total


@dataclass(frozen=True)
class IntegralResult:
    value_set: PointSet
    method: str
    partition_norm: float


def weighted_metric_riemann_sum(F: SetValuedFunction, k: WeightFunction,
                                chi: Partition, mode: str = "exact",
                                family: SelectionFamily | None = None,
                                norm: str = "l2",
                                limit: int = CHAIN_LIMIT) -> PointSet:
    """Left-endpoint sums {sum (x_{i+1}-x_i) k(x_i) y_i}.

    exact: over all metric chains of (F(x_0), ..., F(x_{n-1}));
    family: along each selection's chain restricted to chi.
    """
    nodes = chi.nodes
    dx = np.diff(nodes)
    weights = dx * np.array([k(x) for x in nodes[:-1]])
    if mode == "exact":
        sets = [F(x) for x in nodes[:-1]]
        if len(sets) == 1:
            sums = [weights[0] * p for p in sets[0].points]
        else:
            chains = enumerate_metric_chains(sets, norm=norm, limit=limit)
            sums = [sum(w * y for w, y in zip(weights, ch)) for ch in chains]
        return PointSet.of(sums)
    if mode == "family":
        if family is None:
            raise ValueError("family mode requires a SelectionFamily")
        sums = [sum(w * as_point(s(x)) for w, x in zip(weights, nodes[:-1]))
                for s in family.selections]
        return PointSet.of(sums)
    raise ValueError(f"unknown mode {mode!r}")


def right_weighted_metric_riemann_sum(F: SetValuedFunction, k: WeightFunction,
                                      chi: Partition, mode: str = "exact",
                                      family: SelectionFamily | None = None,
                                      norm: str = "l2",
                                      limit: int = CHAIN_LIMIT) -> PointSet:
    """Right-endpoint analogue {sum (x_{i+1}-x_i) k(x_{i+1}) y_{i+1}}."""
    nodes = chi.nodes
    dx = np.diff(nodes)
    weights = dx * np.array([k(x) for x in nodes[1:]])
    if mode == "exact":
        sets = [F(x) for x in nodes[1:]]
        if len(sets) == 1:
            sums = [weights[0] * p for p in sets[0].points]
        else:
            chains = enumerate_metric_chains(sets, norm=norm, limit=limit)
            sums = [sum(w * y for w, y in zip(weights, ch)) for ch in chains]
        return PointSet.of(sums)
    if mode == "family":
        if family is None:
            raise ValueError("family mode requires a SelectionFamily")
        sums = [sum(w * as_point(s(x)) for w, x in zip(weights, nodes[1:]))
                for s in family.selections]
        return PointSet.of(sums)
    raise ValueError(f"unknown mode {mode!r}")


def weighted_metric_integral(F: SetValuedFunction, k: WeightFunction,
                             family: SelectionFamily,
                             qtol: float = QTOL) -> IntegralResult:
    """{integral of k*s : s in family}; each s is piecewise constant on its
    fine partition, so the integral reduces to exact subinterval k-integrals."""
    if len(family) == 0:
        raise ValueError("family must be nonempty")
    sums = []
    pnorm = 0.0
    for s in family.selections:
        nodes = s.base.nodes
        pnorm = max(pnorm, float(np.diff(nodes).max()))
        acc = np.zeros(as_point(s.values[0]).size)
        for i in range(len(nodes) - 1):
            acc = acc + as_point(s.values[i]) * integrate_weight(
                k, float(nodes[i]), float(nodes[i + 1]), qtol)
        sums.append(acc)
    return IntegralResult(PointSet.of(sums), "selection_family", pnorm)


def aumann_integral_convex(F: SetValuedFunction, k: WeightFunction,
                           chi: Partition) -> PointSet:
    """Riemann approximation of the Aumann integral of k*F: Minkowski sums of
    scaled hulls.  Returns interval endpoints (d=1) or hull vertices (d=2)."""
    nodes = chi.nodes
    dx = np.diff(nodes)
    weights = dx * np.array([k(x) for x in nodes[:-1]])
    d = F(chi.a).dim
    if d == 1:
        lo = hi = 0.0
        for w, x in zip(weights, nodes[:-1]):
            v = F(x).points[:, 0]
            lo += min(w * v.min(), w * v.max())
            hi += max(w * v.min(), w * v.max())
        return PointSet.of([[lo], [hi]])
    if d != 2:
        raise ValueError("Aumann baseline supported only for d <= 2")
    acc = np.zeros((1, 2))
    for w, x in zip(weights, nodes[:-1]):
        verts = convex_hull(F(x)).points * w
        acc = (acc[:, None, :] + verts[None, :, :]).reshape(-1, 2)
        acc = convex_hull(PointSet.of(acc)).points
    return PointSet.of(acc)


@dataclass(frozen=True)
class InclusionReport:
    intersection: PointSet | None
    normalized: PointSet
    union_hull: PointSet
    lower_ok: bool
    upper_ok: bool
    lower_margin: float
    upper_margin: float
    vacuous: bool

    @property
    def passed(self) -> bool:
        return self.lower_ok and self.upper_ok


def inclusion_check(F: SetValuedFunction, k: WeightFunction,
                    family: SelectionFamily, grid: int = 129,
                    member_tol: float = 1e-6, inter_tol: float = 1e-9,
                    norm: str = "l2") -> InclusionReport:
    """Check intersection(F) subset normalized integral subset hull(union F)
    for k >= 0 with nonzero mass, on a dense x-grid."""
    xs = sorted(set(np.linspace(F.a, F.b, grid)) | set(map(float, F.jump_points)))
    mass = integrate_weight(k, F.a, F.b)
    if mass == 0.0:
        raise ValueError("weight must have nonzero integral")
    sampled = [F(x) for x in xs]
    cands = F(F.a).points
    keep = np.ones(len(cands), dtype=bool)
    for S in sampled:
        keep &= min_dists(cands, S.points, norm) <= inter_tol
    intersection = PointSet.of(cands[keep], dedup_tol=0) if keep.any() else None
    value = weighted_metric_integral(F, k, family).value_set
    normalized = PointSet.of(value.points / mass, dedup_tol=0)
    union_hull = convex_hull(PointSet.of(np.vstack([S.points for S in sampled]),
                                         dedup_tol=1e-9))
    vacuous = intersection is None
    if vacuous:
        lower_ok, lower_margin = True, np.inf
    else:
        gaps = min_dists(intersection.points, normalized.points, norm)
        lower_margin = float(member_tol - gaps.max())
        lower_ok = bool(gaps.max() <= member_tol)
    upper_ok = all(hull_contains(union_hull, p, member_tol)
                   for p in normalized.points)
    upper_margin = float(member_tol) if upper_ok else float("-inf")
    return InclusionReport(intersection, normalized, union_hull,
                           lower_ok, upper_ok, lower_margin, upper_margin,
                           vacuous)
