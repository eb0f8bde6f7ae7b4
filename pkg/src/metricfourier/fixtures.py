"""Regression fixtures: the disc and line examples, scalar BV test functions
with closed-form Fourier coefficients, and an inline piecewise description
parser used by the CLI."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import PointSet
from .svf import SetValuedFunction

PI = math.pi


def wrap_period(t: float) -> float:
    """Map t into [-pi, pi) for 2*pi-periodic evaluation."""
    return ((t + PI) % (2.0 * PI)) - PI


# ---------------------------------------------------------------------------
# Scalar fixtures

@dataclass(frozen=True)
class ScalarFixture:
    """A 2*pi-periodic scalar BV function with exact side data."""

    name: str
    fn: object                 # periodized evaluator
    jump: float                # the discontinuity under study
    midpoint: float            # (f(x+0)+f(x-0))/2 at the jump
    variation: float           # V over one period, periodization included
    breakpoints: tuple         # interior discontinuities in (-pi, pi)
    vf: object                 # exact variation function on [-pi, pi]
    coeff: object | None = None  # k -> (a_k, b_k) closed form

    def coefficients(self, n: int):
        a = np.zeros(n + 1)
        b = np.zeros(n + 1)
        for k in range(n + 1):
            a[k], b[k] = self.coeff(k)
        return a, b


def square_wave() -> ScalarFixture:
    def f(t):
        t = wrap_period(t)
        return 1.0 if t >= 0.0 else -1.0

    def vf(t):
        if t < 0.0:
            return 0.0
        return 2.0 if t < PI else 4.0

    def coeff(k):
        if k == 0:
            return 0.0, 0.0
        return 0.0, (4.0 / (PI * k) if k % 2 == 1 else 0.0)

    return ScalarFixture("square-wave", f, 0.0, 0.0, 4.0, (0.0,), vf, coeff)


def sawtooth() -> ScalarFixture:
    # t + pi on [-pi, 0), t - pi on [0, pi): one jump of size 2*pi at 0.
    def f(t):
        t = wrap_period(t)
        return t + PI if t < 0.0 else t - PI

    def vf(t):
        return t + PI if t < 0.0 else 3.0 * PI + t

    def coeff(k):
        if k == 0:
            return 0.0, 0.0
        return 0.0, -2.0 / k

    return ScalarFixture("sawtooth", f, 0.0, 0.0, 4.0 * PI, (0.0,), vf, coeff)


def step_fixture() -> ScalarFixture:
    # Indicator of [1, pi): monotone on the period, jump at 1.
    def f(t):
        t = wrap_period(t)
        return 1.0 if t >= 1.0 else 0.0

    def vf(t):
        if t < 1.0:
            return 0.0
        return 1.0 if t < PI else 2.0

    def coeff(k):
        if k == 0:
            return (PI - 1.0) / PI, 0.0
        a = -math.sin(k) / (PI * k)
        b = (math.cos(k) - math.cos(k * PI)) / (PI * k)
        return a, b

    return ScalarFixture("step", f, 1.0, 0.5, 2.0, (1.0,), vf, coeff)


def trig_poly() -> ScalarFixture:
    # Degree-3 trigonometric polynomial; its own partial sums reproduce it.
    a = {0: 1.4, 1: -0.3, 3: 0.2}
    b = {2: 0.5}

    def f(t):
        return (a[0] / 2.0 - 0.3 * math.cos(t) + 0.5 * math.sin(2 * t)
                + 0.2 * math.cos(3 * t))

    def coeff(k):
        return a.get(k, 0.0), b.get(k, 0.0)

    def vf(t):
        # Not used by bound tests; cheap numeric stand-in.
        raise NotImplementedError("trig-poly has no closed-form vf")

    return ScalarFixture("trig-poly", f, 0.0, f(0.0), 4.0, (), vf, coeff)


SCALAR_FIXTURES = {
    "square-wave": square_wave,
    "sawtooth": sawtooth,
    "step": step_fixture,
    "trig-poly": trig_poly,
}


# ---------------------------------------------------------------------------
# Set-valued fixtures

def lines_fixture(x0: float = 0.5) -> SetValuedFunction:
    """Three constant points, five values at the jump, then two moving lines."""
    left = PointSet.of([-0.25, 0.0, 0.25])
    at = PointSet.of([-1.0, -0.25, 0.0, 0.25, 1.0])

    def fn(t):
        if t < x0:
            return left
        if t == x0:
            return at
        return PointSet.of([-1.0 + t - x0, 1.0 + t - x0])

    def vf(t):
        if t < x0:
            return 0.0
        if t == x0:
            return 0.75
        return 1.75 + (t - x0)

    return SetValuedFunction(-PI, PI, fn, jump_points=(x0,),
                             variation_hint=1.75 + (PI - x0),
                             sup_hint=1.0 + PI - x0,
                             variation_function=vf)


def disc_net(center, radius: float, eps: float) -> PointSet:
    """Polar epsilon-net of a closed disc; ring sizes are multiples of 8 so
    the boundary points facing the axis directions land on the grid."""
    cx, cy = float(center[0]), float(center[1])
    rings = max(1, math.ceil(radius / eps))
    pts = [np.array([cx, cy])]
    for j in range(1, rings + 1):
        r = radius * j / rings
        m = 8 * max(1, math.ceil(2.0 * PI * r / (8.0 * eps)))
        ang = np.linspace(0.0, 2.0 * PI, m, endpoint=False)
        ring = np.column_stack([cx + r * np.cos(ang), cy + r * np.sin(ang)])
        pts.append(ring)
    return PointSet.of(np.vstack([np.atleast_2d(p) for p in pts]), dedup_tol=0)


def balls_fixture(x0: float = 0.5, eps: float = 1e-3) -> SetValuedFunction:
    """Disc B((-2,2),1) before the jump, disc B((2,2),1) after, and at the
    jump their union together with the origin."""
    netL = disc_net((-2.0, 2.0), 1.0, eps)
    netR = disc_net((2.0, 2.0), 1.0, eps)
    at = PointSet.of(np.vstack([netL.points, [[0.0, 0.0]], netR.points]),
                     dedup_tol=0)

    def fn(t):
        if t < x0:
            return netL
        if t == x0:
            return at
        return netR

    return SetValuedFunction(-PI, PI, fn, jump_points=(x0,),
                             variation_hint=8.0, sup_hint=math.hypot(3.0, 3.0))


def _abscos_cum(t: float) -> float:
    """Integral of |cos| from -pi to t (variation function of sin)."""
    if t <= -PI / 2.0:
        return -math.sin(t)
    if t <= PI / 2.0:
        return 2.0 + math.sin(t)
    return 4.0 - math.sin(t)


def two_branch_sine() -> SetValuedFunction:
    """F(t) = {sin t, sin t + 2}: continuous, two well-separated branches."""

    def fn(t):
        return PointSet.of([math.sin(t), math.sin(t) + 2.0])

    return SetValuedFunction(-PI, PI, fn, jump_points=(),
                             variation_hint=4.0, sup_hint=3.0,
                             variation_function=_abscos_cum)


def zero_union_sine() -> SetValuedFunction:
    """F(t) = {0} union {2 + sin t}: the constant selection 0 exists."""

    def fn(t):
        return PointSet.of([0.0, 2.0 + math.sin(t)])

    return SetValuedFunction(-PI, PI, fn, jump_points=(),
                             variation_hint=4.0, sup_hint=3.0)


def constant_set_fixture(points, a: float = -PI, b: float = PI) -> SetValuedFunction:
    A = PointSet.of(points)
    return SetValuedFunction(a, b, lambda t: A, jump_points=(),
                             variation_hint=0.0,
                             variation_function=lambda t: 0.0)


def singleton_fixture(f, a: float = -PI, b: float = PI,
                      jumps=()) -> SetValuedFunction:
    return SetValuedFunction(a, b, lambda t: PointSet.of([f(t)]),
                             jump_points=tuple(jumps))


def step_svf(x0: float = 0.5) -> SetValuedFunction:
    """Singleton step {0} -> {1}; the simplest jump fixture."""

    def fn(t):
        return PointSet.of([0.0 if t < x0 else 1.0])

    def vf(t):
        return 0.0 if t < x0 else 1.0

    return SetValuedFunction(-PI, PI, fn, jump_points=(x0,),
                             variation_hint=1.0, sup_hint=1.0,
                             variation_function=vf)


SVF_FIXTURES = {
    "lines": lines_fixture,
    "balls": balls_fixture,
    "two-branch-sine": two_branch_sine,
    "zero-union-sine": zero_union_sine,
    "step-svf": step_svf,
    "constant-pm1": lambda: constant_set_fixture([-1.0, 1.0]),
}


# ---------------------------------------------------------------------------
# Inline piecewise description parser (CLI mini-language)

_EVAL_NS = {"sin": math.sin, "cos": math.cos, "tan": math.tan,
            "exp": math.exp, "sqrt": math.sqrt, "abs": abs, "pi": PI}


class DescriptionError(ValueError):
    """Malformed inline SVF description."""


def _check_keys(d: dict, allowed: set, where: str) -> None:
    extra = set(d) - allowed
    if extra:
        raise DescriptionError(f"unknown keys {sorted(extra)} in {where}")


def _piece_evaluator(piece: dict, where: str):
    kinds = [k for k in ("points", "curve", "disc") if k in piece]
    if len(kinds) != 1:
        raise DescriptionError(f"{where} needs exactly one of points/curve/disc")
    kind = kinds[0]
    if kind == "points":
        S = PointSet.of(piece["points"])
        return lambda t: S
    if kind == "disc":
        d = piece["disc"]
        _check_keys(d, {"center", "radius", "eps"}, where + ".disc")
        S = disc_net(d["center"], float(d["radius"]), float(d["eps"]))
        return lambda t: S
    branches = []
    for expr in piece["curve"]:
        coords = expr if isinstance(expr, list) else [expr]
        branches.append([compile(str(e), where, "eval") for e in coords])

    def fn(t):
        pts = [[eval(code, {"__builtins__": {}}, dict(_EVAL_NS, t=t))
                for code in br] for br in branches]
        return PointSet.of(pts)

    return fn


def parse_svf(desc: dict) -> SetValuedFunction:
    """Build an SVF from {'domain': [a,b], 'pieces': [...], 'at': [...]}.

    Pieces cover [a, b) left-to-right via their 'end' breakpoints; each piece
    and each 'at' override holds a finite point list, a parametric curve
    (expressions in t), or a disc epsilon-net spec."""
    _check_keys(desc, {"domain", "pieces", "at"}, "description")
    try:
        a, b = float(desc["domain"][0]), float(desc["domain"][1])
    except (KeyError, IndexError, TypeError) as exc:
        raise DescriptionError("domain must be [a, b]") from exc
    if not a < b:
        raise DescriptionError("domain must satisfy a < b")
    pieces = desc.get("pieces")
    if not pieces:
        raise DescriptionError("at least one piece required")
    ends = []
    evals = []
    for i, piece in enumerate(pieces):
        where = f"pieces[{i}]"
        _check_keys(piece, {"end", "points", "curve", "disc"}, where)
        last = i == len(pieces) - 1
        if last:
            end = b
            if "end" in piece and abs(float(piece["end"]) - b) > 1e-12:
                raise DescriptionError("last piece must end at b")
        else:
            if "end" not in piece:
                raise DescriptionError(f"{where} missing 'end'")
            end = float(piece["end"])
            if not a < end < b or (ends and end <= ends[-1]):
                raise DescriptionError(f"{where} 'end' out of order")
        ends.append(end)
        evals.append(_piece_evaluator(piece, where))
    overrides = {}
    for i, entry in enumerate(desc.get("at", [])):
        where = f"at[{i}]"
        _check_keys(entry, {"x", "points", "curve", "disc"}, where)
        overrides[float(entry["x"])] = _piece_evaluator(entry, where)
    jump_list = tuple(sorted(set(ends[:-1]) | set(overrides)))

    def fn(t):
        for x_at, ev in overrides.items():
            if abs(t - x_at) <= 1e-13:
                return ev(t)
        for end, ev in zip(ends, evals):
            if t < end:
                return ev(t)
        return evals[-1](t)

    return SetValuedFunction(a, b, fn, jump_points=jump_list)
