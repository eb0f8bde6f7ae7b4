"""Brute-force reference implementations used only by tests.

Each oracle is deliberately plain: nested loops, its own projection logic,
no shared shortcuts with the library code paths beyond plain distances."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import PointSet
from .svf import Partition, SetValuedFunction

_TIE = 1e-9


def _argmins(p: np.ndarray, pts: np.ndarray) -> list[int]:
    d = [float(np.linalg.norm(p - q)) for q in pts]
    lo = min(d)
    return [i for i, di in enumerate(d) if di <= lo + _TIE]


def _pairs(A: np.ndarray, B: np.ndarray) -> set[tuple[int, int]]:
    out: set[tuple[int, int]] = set()
    for i in range(len(A)):
        for j in _argmins(A[i], B):
            out.add((i, j))
    for j in range(len(B)):
        for i in _argmins(B[j], A):
            out.add((i, j))
    return out


def _all_chains(sets: list[np.ndarray], limit: int = 10 ** 4) -> list[list[int]]:
    chains = [[i] for i in range(len(sets[0]))]
    for A, B in zip(sets, sets[1:]):
        ok = _pairs(A, B)
        chains = [ch + [j] for ch in chains for j in range(len(B))
                  if (ch[-1], j) in ok]
        if len(chains) > limit:
            raise RuntimeError("oracle instance too large")
    return chains


@dataclass(frozen=True)
class TinyInstance:
    """A small Riemann-sum instance: nodes, one point set per node, weights."""

    nodes: np.ndarray
    sets: tuple
    weights: np.ndarray

    @staticmethod
    def random(rng: np.random.Generator, dim: int = 1) -> "TinyInstance":
        n_nodes = int(rng.integers(3, 6))
        nodes = np.sort(rng.uniform(0.0, 1.0, n_nodes))
        while np.any(np.diff(nodes) < 1e-3):
            nodes = np.sort(rng.uniform(0.0, 1.0, n_nodes))
        sets = tuple(rng.uniform(-2.0, 2.0, (int(rng.integers(1, 5)), dim))
                     for _ in range(n_nodes))
        weights = rng.uniform(-1.5, 1.5, n_nodes)
        return TinyInstance(nodes, sets, weights)

    def svf(self) -> SetValuedFunction:
        nodes = self.nodes
        sets = [PointSet.of(s) for s in self.sets]

        def fn(x: float) -> PointSet:
            i = int(np.searchsorted(nodes, x, side="right")) - 1
            return sets[min(max(i, 0), len(sets) - 1)]

        return SetValuedFunction(float(nodes[0]), float(nodes[-1]), fn,
                                 jump_points=tuple(float(t) for t in nodes[1:-1]))

    def partition(self) -> Partition:
        return Partition.of(self.nodes)


def oracle_riemann_set(inst: TinyInstance) -> np.ndarray:
    """Left-endpoint weighted sums over every metric chain, exhaustively."""
    sets = [np.asarray(s, dtype=float) for s in inst.sets[:-1]]
    dx = np.diff(inst.nodes)
    w = dx * inst.weights[:-1]
    if len(sets) == 1:
        sums = [w[0] * p for p in sets[0]]
    else:
        sums = [sum(wi * sets[k][i] for k, (wi, i) in enumerate(zip(w, ch)))
                for ch in _all_chains(sets)]
    return np.array(sums)


def oracle_fourier(f, n: int, x: float, nodes: int = 200_000,
                   breakpoints=()) -> float:
    """S_n f(x) by dense trapezoid quadrature of the kernel integral,
    piecewise between declared discontinuities of f."""
    cuts = sorted({-np.pi, np.pi} | {float(t) for t in breakpoints
                                     if -np.pi < t < np.pi})
    total = 0.0
    for u, v in zip(cuts, cuts[1:]):
        m = max(16, int(nodes * (v - u) / (2.0 * np.pi)))
        t = np.linspace(u, v, m + 1)
        ft = np.array([f(ti) for ti in t])
        # One-sided values at the piece ends: stay inside the open piece.
        ft[0] = f(u + 1e-9 * (v - u))
        ft[-1] = f(v - 1e-9 * (v - u))
        kernel = 0.5 + sum(np.cos(k * (x - t)) for k in range(1, n + 1))
        total += float(np.trapezoid(kernel * ft, t))
    return total / np.pi


def _limit(g, x: float, sign: float, h: float = 1e-5) -> np.ndarray:
    """Matched one-sided set limit with linear Richardson extrapolation."""
    P1 = np.atleast_2d(np.asarray(g(x + sign * h), dtype=float))
    P2 = np.atleast_2d(np.asarray(g(x + sign * h / 2.0), dtype=float))
    out = []
    for p in P1:
        q = P2[int(np.argmin([np.linalg.norm(p - r) for r in P2]))]
        out.append(2.0 * q - p)
    return np.array(out)


def oracle_AF(F, x: float, h: float = 1e-5) -> PointSet:
    """Exact A_F(x) for fixtures whose branches move (at most) linearly.

    Enumerates transitions across x that stay metric pairs at two probe
    scales: direct left-to-right pairs, and two-leg paths through F(x)."""

    def sets_at(t: float) -> np.ndarray:
        S = F(t)
        return S.points if isinstance(S, PointSet) else np.atleast_2d(S)

    L1, R1 = sets_at(x - h), sets_at(x + h)
    L2, R2 = sets_at(x - h / 2.0), sets_at(x + h / 2.0)
    S = sets_at(x)
    Llim = _limit(sets_at, x, -1.0, h)
    Rlim = _limit(sets_at, x, +1.0, h)
    mids: list[np.ndarray] = []
    direct = _pairs(L1, R1) & _pairs(L2, R2)
    for i, j in direct:
        mids.append((Llim[i] + Rlim[j]) / 2.0)
    left_in = _pairs(L1, S) & _pairs(L2, S)
    right_out = _pairs(S, R1) & _pairs(S, R2)
    for m in range(len(S)):
        lefts = [i for (i, mm) in left_in if mm == m]
        rights = [j for (mm, j) in right_out if mm == m]
        for i in lefts:
            for j in rights:
                mids.append((Llim[i] + Rlim[j]) / 2.0)
    return PointSet.of(mids, dedup_tol=1e-9)
