"""Experiment runner: convergence tables, bound checks, worked-example
regressions, integrals, and raw selection dumps, emitted as CSV."""
from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fixtures as fx
from .fourier import (delta_grid, fit_K, limit_set_AF, metric_fourier,
                      min_djordan_bound, svf_bound_rhs, svf_jump_omega,
                      trig_eval)
from .geometry import PointSet, dist_point_set, hausdorff, is_metric_pair, metric_average
from .metric_integral import (WeightFunction, aumann_integral_convex,
                              inclusion_check, weighted_metric_integral)
from .oracle import oracle_AF
from .svf import Partition, selection_family

PI = math.pi


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    fixture: str | None = None
    svf: dict | None = None
    orders: list = field(default_factory=lambda: [16, 64, 256])
    x_grid: object = 9          # count or explicit list
    x_seeds: int = 7
    y_seeds: int = 4
    depth: int = 4              # base refinement depth; grows with the order
    norm: str = "l2"
    out: str | None = None
    weight: dict | None = None
    eps: float = 1e-3
    tolerances: dict = field(default_factory=dict)

    _KEYS = {"fixture", "svf", "orders", "x_grid", "x_seeds", "y_seeds",
             "depth", "norm", "out", "weight", "eps", "tolerances"}

    @staticmethod
    def from_dict(d: dict) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        extra = set(d) - ExperimentConfig._KEYS
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        cfg = ExperimentConfig(**d)
        if any(int(n) < 1 for n in cfg.orders):
            raise ConfigError("orders must be positive")
        if cfg.norm not in ("l1", "l2", "linf"):
            raise ConfigError("norm must be one of l1, l2, linf")
        if cfg.x_seeds < 1 or cfg.y_seeds < 1 or cfg.depth < 1:
            raise ConfigError("seed counts and depth must be positive")
        for key, val in cfg.tolerances.items():
            if float(val) <= 0:
                raise ConfigError(f"tolerance {key} must be positive")
        return cfg

    def build_svf(self):
        if self.svf is not None:
            return fx.parse_svf(self.svf)
        if self.fixture is None:
            raise ConfigError("config needs 'fixture' or 'svf'")
        if self.fixture == "balls":
            return fx.balls_fixture(eps=self.eps)
        try:
            return fx.SVF_FIXTURES[self.fixture]()
        except KeyError as exc:
            raise ConfigError(f"unknown fixture {self.fixture!r}") from exc

    def grid(self, F) -> list[float]:
        if isinstance(self.x_grid, (list, tuple)):
            xs = [float(x) for x in self.x_grid]
            if any(not F.a <= x <= F.b for x in xs):
                raise ConfigError("x_grid outside the fixture domain")
            return xs
        count = int(self.x_grid)
        if count < 1:
            raise ConfigError("x_grid count must be positive")
        margin = min(0.3, (F.b - F.a) / 10.0)
        return list(np.linspace(F.a + margin, F.b - margin, count))


def selection_depth(n: int, base: int = 4, lo: int = 6, hi: int = 12) -> int:
    """Refinement depth paired with kernel order n: the piecewise-constant
    resolution must outpace the kernel so discretization decays with n."""
    return min(hi, max(lo, base + math.ceil(math.log2(max(n, 2)))))


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def _write_csv(header, rows, out_path):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v)
                              for v in row))
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def parse_weight(spec: dict | None) -> WeightFunction:
    if spec is None:
        return WeightFunction.constant(1.0)
    kind = spec.get("kind")
    if kind == "constant":
        return WeightFunction.constant(float(spec.get("value", 1.0)))
    if kind == "poly":
        coeffs = [float(c) for c in spec["coeffs"]]

        def k(x, c=coeffs):
            return sum(ci * x ** i for i, ci in enumerate(c))

        def K(x, c=coeffs):
            return sum(ci * x ** (i + 1) / (i + 1) for i, ci in enumerate(c))

        return WeightFunction(k, float(spec.get("variation", 0.0)) or 1.0,
                              float(spec.get("sup", 1.0)), antiderivative=K)
    if kind in ("cos", "sin"):
        m = int(spec.get("k", 1))
        if kind == "cos":
            return WeightFunction(lambda x: math.cos(m * x), 4.0 * m, 1.0,
                                  antiderivative=lambda x: math.sin(m * x) / m)
        return WeightFunction(lambda x: math.sin(m * x), 4.0 * m, 1.0,
                              antiderivative=lambda x: -math.cos(m * x) / m)
    raise ConfigError(f"unknown weight kind {kind!r}")


def run_convergence(cfg: ExperimentConfig) -> list[tuple]:
    F = cfg.build_svf()
    xs = cfg.grid(F)
    jumps = set(float(j) for j in F.jump_points)
    orders = sorted(int(n) for n in cfg.orders)
    families = {}

    def family_for(n):
        d = selection_depth(n, cfg.depth)
        if d not in families:
            families[d] = selection_family(F, cfg.x_seeds, cfg.y_seeds, d,
                                           cfg.norm)
        return families[d]

    cells = [(n, x) for n in orders for x in xs]

    def cell(args):
        n, x = args
        fam = family_for(n)
        approx = metric_fourier(F, n, x, fam).value_set
        if any(abs(x - j) < 1e-12 for j in jumps):
            target, kind = limit_set_AF(F, x, fam), "A_F"
        else:
            target, kind = F(x), "F"
        return (n, float(x), hausdorff(approx, target, cfg.norm), kind)

    # Families are built eagerly (shared, cached); cells are independent.
    for n in orders:
        family_for(n)
    if cfg.tolerances.get("threads", 1) and int(cfg.tolerances.get("threads", 1)) > 1:
        with ThreadPoolExecutor(int(cfg.tolerances["threads"])) as pool:
            rows = list(pool.map(cell, cells))
    else:
        rows = [cell(c) for c in cells]
    return rows


def run_bound_check(cfg: ExperimentConfig) -> list[tuple]:
    orders = sorted(int(n) for n in cfg.orders)
    if cfg.fixture in fx.SCALAR_FIXTURES:
        f = fx.SCALAR_FIXTURES[cfg.fixture]()
        if f.coeff is None:
            raise ConfigError("fixture lacks closed-form coefficients")
        deltas = delta_grid()
        moduli = {}

        def omega(d):
            if d not in moduli:
                from .fourier import quasi_moduli
                lq, rq = quasi_moduli(f.vf, f.jump, d, -PI, PI)
                moduli[d] = max(lq, rq)
            return moduli[d]

        rows = []
        nmax = max(orders)
        a, b = f.coefficients(nmax)
        for n in orders:
            observed = abs(trig_eval(a, b, f.jump, n) - f.midpoint)
            bound = min_djordan_bound(f.variation, omega, n, deltas=deltas)
            rows.append((n, observed, bound, int(observed <= bound)))
        return rows
    # Set-valued path: fit the norm-dependent constant K on the fixture, then
    # report the calibrated bound per order.
    F = cfg.build_svf()
    if F.variation_function is None or not F.jump_points:
        raise ConfigError("set-valued bound check needs a jump fixture with "
                          "an exact variation function")
    x = float(F.jump_points[0])
    omega = svf_jump_omega(F.variation_function, x, F.a, F.b)
    V = F.variation_hint
    obs = []
    for n in orders:
        fam = selection_family(F, cfg.x_seeds, cfg.y_seeds,
                               selection_depth(n, cfg.depth), cfg.norm)
        approx = metric_fourier(F, n, x, fam).value_set
        target = limit_set_AF(F, x, fam)
        observed = hausdorff(approx, target, cfg.norm)
        bracket = min(svf_bound_rhs(V, n, d, omega, 1.0) for d in delta_grid())
        obs.append((n, observed, bracket))
    K = max(fit_K([(o, br) for _, o, br in obs]), 1e-12)
    return [(n, o, K * br, int(o <= K * br + 1e-12)) for n, o, br in obs]


def run_example(name: str, eps: float = 1e-3, out=None) -> int:
    if out is None:
        out = sys.stdout
    checks: list[tuple[str, bool]] = []

    def check(label, ok):
        checks.append((label, bool(ok)))
        out.write(f"{'ok' if ok else 'FAIL'}: {label}\n")

    if name == "lines":
        A = PointSet.of([-0.25, 0.0, 0.25])
        B = PointSet.of([-1.0, 1.0])
        avg = metric_average(0.5, A, B)
        want = np.array([-0.625, -0.5, 0.5, 0.625])
        got = np.sort(avg.points[:, 0])
        check("metric average is {-5/8, -1/2, 1/2, 5/8}",
              len(got) == 4 and np.allclose(got, want, atol=1e-12))
        F = fx.lines_fixture()
        fam = selection_family(F, 9, 5, 8)
        AF = limit_set_AF(F, 0.5, fam)
        gap = float(np.min(np.abs(AF.points[:, 0] - 0.5)))
        check("1/2 is at least 1/8 away from A_F", gap >= 0.125 - 1e-9)
        check("oracle A_F agrees with the family",
              hausdorff(AF, oracle_AF(F, 0.5)) <= 1e-9)
    elif name == "balls":
        F = fx.balls_fixture(eps=eps)
        L, R = F(0.5 - 1e-6), F(0.5 + 1e-6)
        d, w = dist_point_set((0.0, 0.0), L)
        target = np.array([-2.0 + math.sqrt(2) / 2, 2.0 - math.sqrt(2) / 2])
        check("projection of the origin onto the left disc",
              float(np.linalg.norm(w.points[0] - target)) <= 2 * eps)
        from .svf import approximate_selection
        s = approximate_selection(F, (0.5, (0.0, 0.0)), 3)
        mid = (s.one_sided_limit(0.5, "-") + s.one_sided_limit(0.5, "+")) / 2.0
        check("(0, 2 - sqrt(2)/2) is a midpoint of one-sided limits",
              float(np.linalg.norm(mid - [0.0, 2.0 - math.sqrt(2) / 2])) <= 2 * eps)
        check("the two one-sided limits do not form a metric pair",
              not is_metric_pair(s.one_sided_limit(0.5, "-"),
                                 s.one_sided_limit(0.5, "+"), L, R))
    elif name == "integral-inclusion":
        F = fx.zero_union_sine()
        fam = selection_family(F, 7, 4, 7)
        report = inclusion_check(F, WeightFunction.constant(1.0), fam)
        check("intersection is nonempty", not report.vacuous)
        check("intersection inside the normalized integral", report.lower_ok)
        check("normalized integral inside the hull of the union",
              report.upper_ok)
    else:
        raise ConfigError(f"unknown example {name!r}")
    return 0 if all(ok for _, ok in checks) else 1


def run_integral(cfg: ExperimentConfig) -> list[tuple]:
    F = cfg.build_svf()
    k = parse_weight(cfg.weight)
    fam = selection_family(F, cfg.x_seeds, cfg.y_seeds, cfg.depth, cfg.norm)
    result = weighted_metric_integral(F, k, fam)
    rows = [("metric",) + tuple(map(float, p)) for p in result.value_set.points]
    chi = Partition.uniform(F.a, F.b, 256)
    for p in aumann_integral_convex(F, k, chi).points:
        rows.append(("aumann_vertex",) + tuple(map(float, p)))
    return rows


def run_selections(cfg: ExperimentConfig) -> list[tuple]:
    F = cfg.build_svf()
    fam = selection_family(F, cfg.x_seeds, cfg.y_seeds, cfg.depth, cfg.norm)
    xs = cfg.grid(F)
    rows = []
    for i, s in enumerate(fam.selections):
        for x in xs:
            rows.append((i, float(x)) + tuple(map(float, np.atleast_1d(s(x)))))
    return rows


def _load_config(args) -> ExperimentConfig:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            cfg = ExperimentConfig.from_dict(json.load(fh))
    else:
        cfg = ExperimentConfig()
    if getattr(args, "norm", None):
        cfg.norm = args.norm
    if getattr(args, "out", None):
        cfg.out = args.out
    if getattr(args, "depth", None):
        cfg.depth = args.depth
    if getattr(args, "seed_grid", None):
        try:
            xs, ys = args.seed_grid.split(",")
            cfg.x_seeds, cfg.y_seeds = int(xs), int(ys)
        except ValueError as exc:
            raise ConfigError("--seed-grid expects X,Y") from exc
    if getattr(args, "threads", None):
        cfg.tolerances["threads"] = int(args.threads)
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="metricfourier",
        description="Metric Fourier approximation experiments")
    sub = parser.add_subparsers(dest="verb", required=True)

    def common(p):
        p.add_argument("--config", help="JSON experiment config")
        p.add_argument("--out", help="output CSV path (default stdout)")
        p.add_argument("--norm", choices=["l1", "l2", "linf"])
        p.add_argument("--threads", type=int)
        p.add_argument("--seed-grid", dest="seed_grid", metavar="X,Y")
        p.add_argument("--depth", type=int)

    for verb in ("convergence", "bound-check", "integral", "selections",
                 "hausdorff"):
        common(sub.add_parser(verb))
    px = sub.add_parser("example")
    px.add_argument("name", choices=["balls", "lines", "integral-inclusion"])
    px.add_argument("--eps", type=float, default=1e-3)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "example":
            return run_example(args.name, args.eps)
        if args.verb == "hausdorff":
            if not args.config:
                raise ConfigError("hausdorff needs --config with set_a/set_b")
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
            extra = set(data) - {"set_a", "set_b", "norm"}
            if extra:
                raise ConfigError(f"unknown config keys: {sorted(extra)}")
            A = PointSet.of(data["set_a"])
            B = PointSet.of(data["set_b"])
            sys.stdout.write(_fmt(hausdorff(A, B, data.get("norm", "l2"))) + "\n")
            return 0
        cfg = _load_config(args)
        if args.verb == "convergence":
            _write_csv(("n", "x", "distance", "target"),
                       run_convergence(cfg), cfg.out)
        elif args.verb == "bound-check":
            _write_csv(("n", "observed", "bound", "pass"),
                       run_bound_check(cfg), cfg.out)
        elif args.verb == "integral":
            _write_csv(("kind", "coords..."), run_integral(cfg), cfg.out)
        elif args.verb == "selections":
            _write_csv(("selection", "x", "coords..."),
                       run_selections(cfg), cfg.out)
        return 0
    except (ConfigError, fx.DescriptionError, OSError,
            json.JSONDecodeError, KeyError, TypeError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
