"""Set-valued functions on an interval: chain functions, metric selections,
variation and local moduli analyzers.

A metric selection is approximated by a greedy projection chain on a fine
dyadic partition; `cauchy_defect` records how much the chain moved in the
last refinement step (convergence diagnostic, not a proof).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import (DEDUP_TOL, TIE_TOL, PointSet, as_point,
                       enumerate_metric_chains, hausdorff, project, vec_norm)

# A greedy chain certifies convergence when the last refinement moved
# nothing on the probe grid by more than STOL.
STOL = 1e-8
# Seed values must lie in F(x_hat) within this tolerance.
SEED_TOL = 1e-7


class GreedySeedError(ValueError):
    """Seed value does not belong to F at the seed node."""


@dataclass(frozen=True)
class Partition:
    """Strictly increasing nodes from a to b."""

    nodes: np.ndarray

    @staticmethod
    def of(nodes) -> "Partition":
        arr = np.asarray(sorted(float(x) for x in nodes), dtype=float)
        if arr.size < 2 or np.any(np.diff(arr) <= 0):
            raise ValueError("nodes must be strictly increasing, length >= 2")
        arr.setflags(write=False)
        return Partition(arr)

    @staticmethod
    def uniform(a: float, b: float, cells: int) -> "Partition":
        return Partition.of(np.linspace(a, b, cells + 1))

    @staticmethod
    def dyadic(a: float, b: float, depth: int, forced=()) -> "Partition":
        nodes = list(np.linspace(a, b, 2 ** depth + 1))
        for x in forced:
            x = float(x)
            if a < x < b and min(abs(x - t) for t in nodes) > 1e-13:
                nodes.append(x)
        return Partition.of(nodes)

    @property
    def a(self) -> float:
        return float(self.nodes[0])

    @property
    def b(self) -> float:
        return float(self.nodes[-1])

    @property
    def norm(self) -> float:
        return float(np.diff(self.nodes).max())

    def __len__(self) -> int:
        return self.nodes.size


@dataclass(frozen=True)
class SetValuedFunction:
    """Interval domain plus an evaluator x -> PointSet.

    `jump_points` declares discontinuities so partitions can be forced
    through them.  `variation_function` carries the exact variation
    function when a fixture knows it in closed form.
    """

    a: float
    b: float
    fn: object
    jump_points: tuple = ()
    variation_hint: float | None = None
    sup_hint: float | None = None
    variation_function: object | None = None

    def __call__(self, x: float) -> PointSet:
        if not (self.a - 1e-12 <= x <= self.b + 1e-12):
            raise ValueError(f"{x} outside domain [{self.a}, {self.b}]")
        return self.fn(min(max(x, self.a), self.b))


@dataclass(frozen=True)
class MetricChain:
    """Point values over a partition with consecutive metric pairs."""

    partition: Partition
    values: tuple


@dataclass(frozen=True)
class ChainFunction:
    """Piecewise-constant extension of a chain: values[i] on [x_i, x_{i+1})."""

    chain: MetricChain

    @property
    def nodes(self) -> np.ndarray:
        return self.chain.partition.nodes

    @property
    def values(self) -> tuple:
        return self.chain.values

    def __call__(self, x: float):
        nodes = self.nodes
        if not (nodes[0] - 1e-12 <= x <= nodes[-1] + 1e-12):
            raise ValueError(f"{x} outside [{nodes[0]}, {nodes[-1]}]")
        i = int(np.searchsorted(nodes, x, side="right")) - 1
        i = min(max(i, 0), len(self.values) - 1)
        return self.values[i]


def _pick_witness(witnesses: PointSet) -> np.ndarray:
    """Deterministic tie-break: lexicographically smallest coordinate tuple."""
    pts = witnesses.points
    order = np.lexsort(pts.T[::-1])
    return pts[order[0]]


def greedy_chain(F: SetValuedFunction, chi: Partition, seed,
                 norm: str = "l2", tie_tol: float = TIE_TOL) -> MetricChain:
    """Chain through the seed, projecting outward node by node."""
    x_hat, y_hat = float(seed[0]), as_point(seed[1])
    nodes = chi.nodes
    i0 = int(np.argmin(np.abs(nodes - x_hat)))
    if abs(nodes[i0] - x_hat) > 1e-9:
        raise ValueError("seed abscissa must be a partition node")
    d, w = _dist_project(y_hat, F(nodes[i0]), norm, tie_tol)
    if d > SEED_TOL:
        raise GreedySeedError(f"seed value is {d:.3g} away from F(x_hat)")
    values: list = [None] * len(nodes)
    values[i0] = _pick_witness(w)
    for i in range(i0 + 1, len(nodes)):
        values[i] = _pick_witness(project(values[i - 1], F(nodes[i]), norm, tie_tol))
    for i in range(i0 - 1, -1, -1):
        values[i] = _pick_witness(project(values[i + 1], F(nodes[i]), norm, tie_tol))
    return MetricChain(chi, tuple(values))


def _dist_project(p, B, norm, tie_tol):
    from .geometry import dist_point_set
    return dist_point_set(p, B, norm, tie_tol)


def evaluate_chain_function(c: ChainFunction, x: float):
    return c(x)


@dataclass
class MetricSelection:
    """Greedy chain function on a fine dyadic partition plus diagnostics."""

    base: ChainFunction
    seed: tuple
    refinement_depth: int
    cauchy_defect: float
    smooth_fn: object | None = None
    _coeff_cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x: float):
        return self.base(x)

    @property
    def nodes(self) -> np.ndarray:
        return self.base.nodes

    @property
    def values(self) -> tuple:
        return self.base.values

    def one_sided_limit(self, x: float, side: str):
        """s(x-0) or s(x+0), extrapolated linearly from the two nearest
        node samples on the requested side (exact for piecewise-linear
        branch motion, which covers all regression fixtures)."""
        nodes = self.nodes
        vals = self.values
        if side == "-":
            idx = np.nonzero(nodes < x - 1e-12)[0]
            if idx.size == 0:
                return as_point(self.base(x))
            picks = idx[-2:] if idx.size >= 2 else idx[-1:]
        elif side == "+":
            idx = np.nonzero(nodes > x + 1e-12)[0]
            if idx.size == 0:
                return as_point(self.base(x))
            picks = idx[:2] if idx.size >= 2 else idx[:1]
        else:
            raise ValueError("side must be '-' or '+'")
        if picks.size == 1:
            return as_point(vals[int(picks[0])])
        i, j = int(picks[0]), int(picks[1])
        t_i, t_j = nodes[i], nodes[j]
        v_i, v_j = as_point(vals[i]), as_point(vals[j])
        return v_i + (v_j - v_i) * ((x - t_i) / (t_j - t_i))


def approximate_selection(F: SetValuedFunction, seed, depth: int,
                          probe: Partition | None = None,
                          norm: str = "l2") -> MetricSelection:
    """Greedy chains on refining dyadic partitions; keep the deepest."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    x_hat = float(seed[0])
    forced = (x_hat,) + tuple(F.jump_points)
    if probe is None:
        probe = Partition.dyadic(F.a, F.b, min(depth, 6), forced)
    prev = None
    last = None
    for k in range(1, depth + 1):
        chi = Partition.dyadic(F.a, F.b, k, forced)
        prev = last
        last = ChainFunction(greedy_chain(F, chi, seed, norm))
    defect = 0.0
    if prev is not None:
        for x in probe.nodes:
            defect = max(defect, vec_norm(as_point(last(x)) - as_point(prev(x)), norm))
    smooth = _singleton_evaluator(F, last)
    return MetricSelection(last, (x_hat, as_point(seed[1])), depth, defect, smooth)


def _singleton_evaluator(F: SetValuedFunction, cf: ChainFunction):
    """If F is singleton-valued on the chain nodes, its unique selection is
    x -> the single point of F(x); keep that exact evaluator."""
    for x in cf.nodes:
        if len(F(x)) != 1:
            return None
    return lambda x: F(x).single()


@dataclass(frozen=True)
class SelectionFamily:
    """Computational stand-in for the family of all metric selections."""

    selections: tuple
    seed_grid: str

    def __len__(self) -> int:
        return len(self.selections)


def _sorted_rows(pts: np.ndarray) -> np.ndarray:
    return pts[np.lexsort(pts.T[::-1])]


def selection_family(F: SetValuedFunction, x_seeds: int, y_seeds: int,
                     depth: int, norm: str = "l2",
                     probe: Partition | None = None) -> SelectionFamily:
    """Selections seeded on a uniform x-grid (plus jumps) crossed with up to
    y_seeds points of each F(x_hat), deduplicated on a probe grid."""
    if x_seeds < 1 or y_seeds < 1:
        raise ValueError("seed counts must be positive")
    xs = sorted(set(np.linspace(F.a, F.b, x_seeds)) | {float(j) for j in F.jump_points})
    if probe is None:
        probe = Partition.dyadic(F.a, F.b, 6, tuple(F.jump_points))
    selections: list[MetricSelection] = []
    signatures: list[np.ndarray] = []
    for x_hat in xs:
        pts = _sorted_rows(F(x_hat).points)
        if len(pts) <= y_seeds:
            picks = pts
        else:
            picks = pts[np.linspace(0, len(pts) - 1, y_seeds).round().astype(int)]
        for y_hat in picks:
            s = approximate_selection(F, (x_hat, y_hat), depth, probe, norm)
            sig = np.concatenate([as_point(s(x)) for x in probe.nodes])
            if any(np.max(np.abs(sig - old)) <= DEDUP_TOL for old in signatures):
                continue
            signatures.append(sig)
            selections.append(s)
    return SelectionFamily(tuple(selections),
                           f"uniform x={x_seeds} (+jumps) times y<={y_seeds}")


def exhaustive_chain_family(F: SetValuedFunction, chi: Partition,
                            norm: str = "l2", limit: int = 10 ** 5) -> SelectionFamily:
    """Every metric chain over F sampled at the partition nodes, as a family.

    For piecewise-constant F whose pieces are resolved by `chi` this is the
    complete set of selections; seed-grid greedy chaining cannot reach chains
    that mix projection directions, so oracle-equivalence tests use this.
    """
    sets = [F(x) for x in chi.nodes]
    chains = enumerate_metric_chains(sets, norm=norm, limit=limit)
    selections = []
    for ch in chains:
        cf = ChainFunction(MetricChain(chi, tuple(ch)))
        selections.append(MetricSelection(cf, (chi.a, as_point(ch[0])), 0, 0.0))
    return SelectionFamily(tuple(selections), "exhaustive chains")


# ---------------------------------------------------------------------------
# Variation and moduli analyzers.  The argument g may be a callable returning
# a PointSet (an SVF), a vector, or a scalar; rho dispatches accordingly.

def _rho(u, v, norm: str) -> float:
    if isinstance(u, PointSet) or isinstance(v, PointSet):
        return hausdorff(u, v, norm)
    return vec_norm(as_point(u) - as_point(v), norm)


def variation_on_partition(g, chi: Partition, norm: str = "l2") -> float:
    """V(g, chi) = sum of rho(g(x_i), g(x_{i-1}))."""
    vals = [g(x) for x in chi.nodes]
    return float(sum(_rho(u, v, norm) for u, v in zip(vals, vals[1:])))


def total_variation(g, a: float | None = None, b: float | None = None,
                    depth: int = 12, vtol: float = 1e-9, forced=(),
                    norm: str = "l2") -> tuple[float, bool]:
    """Variation on refining dyadic partitions; a lower bound in general,
    exact once the refinement stabilizes (piecewise-monotone fixtures)."""
    if isinstance(g, (ChainFunction, MetricSelection)):
        # Exact for piecewise-constant data: jumps happen at the nodes.
        vals = [as_point(v) for v in g.values]
        v = float(sum(vec_norm(u2 - u1, norm) for u1, u2 in zip(vals, vals[1:])))
        return v, True
    if isinstance(g, SetValuedFunction):
        a = g.a if a is None else a
        b = g.b if b is None else b
        forced = tuple(forced) + tuple(g.jump_points)
    if a is None or b is None:
        raise ValueError("domain endpoints required for plain callables")
    history: list[float] = []
    for k in range(2, depth + 1):
        chi = Partition.dyadic(a, b, k, forced)
        v = variation_on_partition(g, chi, norm)
        history.append(v)
        # Two successive agreements guard against single-level plateaus.
        if len(history) >= 3 and abs(history[-1] - history[-2]) < vtol \
                and abs(history[-2] - history[-3]) < vtol:
            return v, True
    return history[-1], False


def one_sided_value(g, x: float, side: str, delta: float = 1e-3,
                    lo: float | None = None, hi: float | None = None,
                    probes: int = 20):
    """g(x-0) or g(x+0) along offsets delta*2^-j with a final linear
    (Richardson) extrapolation; exact for locally linear scalar/vector g."""
    sgn = -1.0 if side == "-" else 1.0
    if lo is not None and hi is not None:
        room = (x - lo) if side == "-" else (hi - x)
        if room <= 0:
            raise ValueError("no room on the requested side")
        delta = min(delta, room / 2.0)
    offs = [delta * 2.0 ** (-j) for j in range(probes + 1)]
    v_prev = g(x + sgn * offs[-2])
    v_last = g(x + sgn * offs[-1])
    if isinstance(v_last, PointSet):
        return v_last
    v_prev, v_last = as_point(v_prev), as_point(v_last)
    return 2.0 * v_last - v_prev


@dataclass(frozen=True)
class LocalModuli:
    two_sided: float
    left: float
    right: float
    left_quasi: float
    right_quasi: float


def local_moduli(g, x_star: float, delta: float, lo: float, hi: float,
                 probes: int = 48, norm: str = "l2") -> LocalModuli:
    """Suprema of the defining expressions over probe grids.

    left/right: sup rho(g(x), g(x*)) over [x*-delta, x*] / [x*, x*+delta];
    two_sided over the window [x*-delta/2, x*+delta/2]; the quasi variants
    measure from the one-sided limits g(x*-0)/g(x*+0) and exclude x*.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")

    def grid(u, v):
        # Cluster geometrically near x* so one-sided behaviour is resolved.
        lin = np.linspace(u, v, probes)
        geo_l = x_star - (x_star - u) * 2.0 ** -np.arange(1, 12)
        geo_r = x_star + (v - x_star) * 2.0 ** -np.arange(1, 12)
        g_all = np.concatenate([lin, geo_l, geo_r])
        return np.unique(np.clip(g_all, u, v))

    u_l, v_r = max(lo, x_star - delta), min(hi, x_star + delta)
    g_star = g(x_star)
    left = 0.0
    if x_star > lo:
        left = max((_rho(g(x), g_star, norm) for x in grid(u_l, x_star)), default=0.0)
    right = 0.0
    if x_star < hi:
        right = max((_rho(g(x), g_star, norm)
                     for x in grid(x_star, v_r)), default=0.0)
    half_l = max(lo, x_star - delta / 2.0)
    half_r = min(hi, x_star + delta / 2.0)
    window = grid(half_l, half_r)
    w_vals = [g(x) for x in window]
    two_sided = 0.0
    for i in range(len(w_vals)):
        for j in range(i + 1, len(w_vals)):
            two_sided = max(two_sided, _rho(w_vals[i], w_vals[j], norm))
    left_quasi = 0.0
    if x_star > lo:
        g_minus = one_sided_value(g, x_star, "-", lo=lo, hi=hi)
        xs = [x for x in grid(u_l, x_star) if x < x_star - 1e-13]
        left_quasi = max((_rho(g_minus, g(x), norm) for x in xs), default=0.0)
    right_quasi = 0.0
    if x_star < hi:
        g_plus = one_sided_value(g, x_star, "+", lo=lo, hi=hi)
        xs = [x for x in grid(x_star, v_r) if x > x_star + 1e-13]
        right_quasi = max((_rho(g_plus, g(x), norm) for x in xs), default=0.0)
    return LocalModuli(two_sided, left, right, left_quasi, right_quasi)


def variation_function_samples(g, chi: Partition, norm: str = "l2"):
    """Cumulative variation along the partition: [(x_i, v_g(x_i))]."""
    vals = [g(x) for x in chi.nodes]
    out = [(float(chi.nodes[0]), 0.0)]
    acc = 0.0
    for i in range(1, len(vals)):
        acc += _rho(vals[i - 1], vals[i], norm)
        out.append((float(chi.nodes[i]), acc))
    return out
