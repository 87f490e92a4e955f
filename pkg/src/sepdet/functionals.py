"""Variational quantities over a space and their restricted counterparts.

Everything here is a finite formula over materialized regions: discrete
liminf/limsup along a radius grid, the pairwise Lipschitz supremum over a
ball, the torus supremum (t - f(u))^+ / d(x, u), and the descent slope as an
inf-sup-sup sweep over shells.  Each operation takes an optional Y argument;
when given, the regions are intersected with Y, which is all the restriction
identities need.

The module also ships the three registered witness-problem families
(punctured-ball, ball-pairs, torus-slope) and the deterministic parameter
truncations derived from a space's realized distances.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

from .errors import (
    DescriptorError,
    EmptyRegion,
    IsolatedPoint,
    LipschitzViolation,
    NoCoordinates,
    UnknownPoint,
)
from .extreal import FLOAT_TOL, Num, close, fmt, is_exact, is_finite, parse, pos_part, sub
from .scheme import (
    Region,
    WitnessProblem,
    positive_scalar_params,
    shell_params,
)
from .spaces import (
    MetricSpace,
    Point,
    ball_pairs,
    ball_points,
    punctured_ball_points,
    torus_points,
)


class FunctionOracle:
    """A function on points, possibly taking +inf (proper: finite somewhere)."""

    def __init__(self, name: str, fn: Callable[[Point], Num],
                 table: Optional[dict] = None):
        self.name = name
        self._fn = fn
        self._table = table

    def __repr__(self) -> str:
        return f"FunctionOracle({self.name!r})"

    def value(self, p: Point) -> Num:
        return self._fn(p)

    def is_finite_at(self, p: Point) -> bool:
        return is_finite(self.value(p))

    def check_proper(self, space: MetricSpace, budget: Optional[int] = None) -> None:
        """Raise unless some enumerated point has a finite value."""
        for p in space.iter_points(budget):
            if self.is_finite_at(p):
                return
        raise ValueError(f"function {self.name!r} has no finite value on the space")

    def tabulate(self, space: MetricSpace, budget: Optional[int] = None) -> dict:
        return {p.id: self.value(p) for p in space.iter_points(budget)}

    def to_descriptor(self, space: Optional[MetricSpace] = None) -> dict:
        if self._table is not None:
            table = self._table
        elif space is not None:
            table = self.tabulate(space)
        else:
            raise ValueError("need a space to tabulate a closed-form function")
        return {"kind": "table",
                "values": {pid: fmt(v) for pid, v in sorted(table.items())}}

    @classmethod
    def from_table(cls, values: dict, name: str = "table") -> "FunctionOracle":
        table = {str(pid): parse(v) for pid, v in values.items()}

        def fn(p: Point) -> Num:
            try:
                return table[p.id]
            except KeyError:
                raise UnknownPoint(f"function {name!r} has no value for point {p.id!r}")

        return cls(name, fn, table=table)

    @classmethod
    def from_coords(cls, fn: Callable[[tuple], Num], name: str) -> "FunctionOracle":
        def wrapped(p: Point) -> Num:
            if p.coords is None:
                raise NoCoordinates(f"function {name!r} needs coordinates at {p.id!r}")
            return fn(p.coords)

        return cls(name, wrapped)

    @classmethod
    def from_descriptor(cls, obj: dict) -> "FunctionOracle":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise DescriptorError("function descriptor must be an object with 'kind'")
        kind = obj["kind"]
        if kind == "table":
            values = obj.get("values")
            if not isinstance(values, dict) or not values:
                raise DescriptorError("table function needs a nonempty 'values' object")
            try:
                return cls.from_table(values, name="table")
            except ValueError as exc:
                raise DescriptorError(f"values: {exc}") from exc
        if kind in ("linear", "quadratic", "abs"):
            coeffs = obj.get("coeffs")
            if not isinstance(coeffs, list) or not coeffs:
                raise DescriptorError(f"{kind} function needs a 'coeffs' list")
            try:
                cs = tuple(parse(c) for c in coeffs)
                offset = parse(obj.get("offset", 0))
            except ValueError as exc:
                raise DescriptorError(f"coeffs/offset: {exc}") from exc

            def combine(coords: tuple) -> Num:
                if len(coords) != len(cs):
                    raise DescriptorError(
                        f"{kind} function expects dimension {len(cs)}, got {len(coords)}")
                if kind == "quadratic":
                    return sum(c * v * v for c, v in zip(cs, coords)) + offset
                lin = sum(c * v for c, v in zip(cs, coords)) + offset
                return abs(lin) if kind == "abs" else lin

            return cls.from_coords(combine, name=kind)
        if kind == "step":
            try:
                threshold = parse(obj.get("threshold", 0))
                low = parse(obj.get("low", 0))
                high = parse(obj.get("high", 1))
            except ValueError as exc:
                raise DescriptorError(f"step fields: {exc}") from exc
            axis = obj.get("axis", 0)
            if not isinstance(axis, int) or axis < 0:
                raise DescriptorError("step 'axis' must be a nonnegative integer")

            def step(coords: tuple) -> Num:
                if axis >= len(coords):
                    raise DescriptorError(f"step axis {axis} out of range")
                return high if coords[axis] >= threshold else low

            return cls.from_coords(step, name="step")
        raise DescriptorError(f"unknown function kind {kind!r}")


BUILTIN_FUNCTIONS = {
    "coord": lambda: FunctionOracle.from_coords(lambda c: c[0], "coord"),
    "abs": lambda: FunctionOracle.from_coords(lambda c: abs(c[0]), "abs"),
    "square": lambda: FunctionOracle.from_coords(lambda c: c[0] * c[0], "square"),
    "zero": lambda: FunctionOracle("zero", lambda p: 0),
    "one": lambda: FunctionOracle("one", lambda p: 1),
}


def builtin_function(name: str) -> FunctionOracle:
    try:
        return BUILTIN_FUNCTIONS[name]()
    except KeyError:
        raise DescriptorError(
            f"unknown function {name!r}; builtins: {sorted(BUILTIN_FUNCTIONS)}")


# ---------------------------------------------------------------------------
# Scale grids


@dataclass(frozen=True)
class ScaleGrid:
    """Finite radius/shell/level grids swept by the discrete formulas."""

    radii: tuple = ()
    shells: tuple = ()  # (r, s) pairs with r < s
    levels: tuple = ()  # t values for torus scores


def _half(v: Num) -> Num:
    return Fraction(v, 2) if is_exact(v) else v / 2


def midpoint_grid(values: Sequence[Num]) -> tuple:
    """One scale inside every gap of a sorted positive value list.

    Returns half the smallest value, the midpoints of consecutive values,
    and one scale past the largest: every distinct sublevel set of the value
    list is realized by some grid entry.
    """
    vals = sorted(set(values))
    if not vals:
        return ()
    out = [_half(vals[0])]
    for a, b in zip(vals, vals[1:]):
        out.append(_half(a + b))
    out.append(vals[-1] + 1)
    return tuple(out)


def default_radius_grid(space, center: Optional[Point] = None) -> tuple:
    return midpoint_grid(space.realized_distances(center))


def default_shell_grid(space, center: Optional[Point] = None) -> tuple:
    radii = default_radius_grid(space, center)
    return tuple((r, s) for i, r in enumerate(radii) for s in radii[i + 1:])


def level_grid(f: FunctionOracle, space, mode: str = "sample",
               budget: Optional[int] = None) -> tuple:
    """t levels: below min f, at values of f, above max f.

    mode "sample" keeps three levels; mode "full" keeps every finite value
    (needed when a closure must cover the level t = f(x) for every center).
    """
    vals = sorted({f.value(p) for p in space.iter_points(budget)
                   if f.is_finite_at(p)})
    if not vals:
        raise ValueError("function has no finite values on the space")
    if mode == "full":
        return tuple([vals[0] - 1] + vals + [vals[-1] + 1])
    if mode == "sample":
        return tuple(dict.fromkeys([vals[0] - 1, vals[len(vals) // 2], vals[-1] + 1]))
    raise ValueError(f"unknown level mode {mode!r}")


def scale_grid_for(space, f: Optional[FunctionOracle] = None,
                   center: Optional[Point] = None, t_mode: str = "sample") -> ScaleGrid:
    return ScaleGrid(
        radii=default_radius_grid(space, center),
        shells=default_shell_grid(space, center),
        levels=level_grid(f, space, t_mode) if f is not None else (),
    )


# ---------------------------------------------------------------------------
# Limit values along a grid


def _grid_radii(grid) -> tuple:
    radii = grid.radii if isinstance(grid, ScaleGrid) else tuple(grid)
    if not radii:
        raise ValueError("radius grid is empty")
    return radii


def _restricted(points: Iterable[Point], allowed: Optional[set]) -> list:
    if allowed is None:
        return list(points)
    return [u for u in points if u in allowed]


def _check_center(x: Point, allowed: Optional[set]) -> None:
    if allowed is not None and x not in allowed:
        raise UnknownPoint(f"center {x.id!r} must lie in the restriction set")


def liminf_at(f: FunctionOracle, space: MetricSpace, x: Point, grid,
              Y: Optional[Iterable[Point]] = None,
              budget: Optional[int] = None) -> Num:
    """sup over grid radii of inf of f over the punctured ball (within Y).

    Monotone under grid refinement.  Raises IsolatedPoint when every
    punctured ball along the grid is empty.
    """
    radii = _grid_radii(grid)
    allowed = None if Y is None else set(Y)
    _check_center(x, allowed)
    vals = []
    for r in radii:
        pts = _restricted(punctured_ball_points(space, x, r, budget), allowed)
        if pts:
            vals.append(min(f.value(u) for u in pts))
    if not vals:
        raise IsolatedPoint(f"every punctured ball at {x.id!r} along the grid is empty")
    return max(vals)


def limsup_at(f: FunctionOracle, space: MetricSpace, x: Point, grid,
              Y: Optional[Iterable[Point]] = None,
              budget: Optional[int] = None) -> Num:
    """inf over grid radii of sup of f over the punctured ball (within Y)."""
    radii = _grid_radii(grid)
    allowed = None if Y is None else set(Y)
    _check_center(x, allowed)
    vals = []
    for r in radii:
        pts = _restricted(punctured_ball_points(space, x, r, budget), allowed)
        if pts:
            vals.append(max(f.value(u) for u in pts))
    if not vals:
        raise IsolatedPoint(f"every punctured ball at {x.id!r} along the grid is empty")
    return min(vals)


def continuity_check(f: FunctionOracle, space: MetricSpace, x: Point, grid,
                     Y: Optional[Iterable[Point]] = None, tol: Num = 0,
                     budget: Optional[int] = None) -> bool:
    """True when grid liminf and limsup both agree with f(x) up to tol."""
    fx = f.value(x)
    lo = liminf_at(f, space, x, grid, Y, budget)
    hi = limsup_at(f, space, x, grid, Y, budget)
    return close(lo, fx, tol) and close(hi, fx, tol)


# ---------------------------------------------------------------------------
# Pairwise Lipschitz quantities


class PairSup(NamedTuple):
    value: object  # Num; 0 when no pairs exist
    pairs: int  # number of unordered pairs scanned


def _exact_div(num: Num, den: Num) -> Num:
    # int / int would float-divide; every other exact mix already stays exact
    if isinstance(num, int) and isinstance(den, int):
        q = Fraction(num, den)
        return int(q) if q.denominator == 1 else q
    return num / den


def _pair_quotient(f: FunctionOracle, space: MetricSpace, a: Point, b: Point) -> Num:
    return _exact_div(abs(sub(f.value(a), f.value(b))), space.distance(a, b))


def lip_local_sup(f: FunctionOracle, space: MetricSpace, x: Point, r: Num,
                  Y: Optional[Iterable[Point]] = None,
                  budget: Optional[int] = None) -> PairSup:
    """sup of |f(u1) - f(u2)| / d(u1, u2) over distinct pairs of B(x, r) ∩ Y.

    Returns PairSup(0, 0) when the ball holds fewer than two points.
    """
    allowed = None if Y is None else set(Y)
    _check_center(x, allowed)
    pts = _restricted(ball_points(space, x, r, budget), allowed)
    best: Num = 0
    pairs = 0
    for i, a in enumerate(pts):
        for b in pts[i + 1:]:
            pairs += 1
            q = _pair_quotient(f, space, a, b)
            if q > best:
                best = q
    return PairSup(best, pairs)


def lip_modulus(f: FunctionOracle, space: MetricSpace, x: Point, grid,
                Y: Optional[Iterable[Point]] = None,
                budget: Optional[int] = None) -> Num:
    """min over grid radii of the local pairwise supremum at x.

    The discrete version of the least Lipschitz constant valid on some ball
    around x.
    """
    radii = _grid_radii(grid)
    return min(lip_local_sup(f, space, x, r, Y, budget).value for r in radii)


# ---------------------------------------------------------------------------
# Torus suprema and slopes


def _descent_quotient(t: Num, f: FunctionOracle, space: MetricSpace,
                      x: Point, u: Point) -> Num:
    num = pos_part(sub(t, f.value(u)))
    return _exact_div(num, space.distance(x, u))


def torus_sup(f: FunctionOracle, space: MetricSpace, x: Point, t: Num, r: Num, s: Num,
              Y: Optional[Iterable[Point]] = None,
              budget: Optional[int] = None) -> Num:
    """sup of (t - f(u))^+ / d(x, u) over the shell r < d(x, u) < s (within Y).

    Raises EmptyRegion when the (restricted) shell is empty.
    """
    allowed = None if Y is None else set(Y)
    _check_center(x, allowed)
    pts = _restricted(torus_points(space, x, r, s, budget), allowed)
    if not pts:
        raise EmptyRegion(f"empty shell ({fmt(r)}, {fmt(s)}) at {x.id!r}")
    return max(_descent_quotient(t, f, space, x, u) for u in pts)


def slope_at(f: FunctionOracle, space: MetricSpace, x: Point,
             grid: Optional[ScaleGrid] = None,
             Y: Optional[Iterable[Point]] = None,
             budget: Optional[int] = None) -> Num:
    """Descent slope at x: inf over s of sup over r < s of the shell supremum.

    The level is t = f(x); by the sign conventions (t - f(u))^+ with
    +inf - +inf = 0, the value is well defined for proper f, and is +inf
    exactly when every realized inner supremum is.  Empty shells contribute
    nothing; if every shell in the grid is empty the point is isolated.
    """
    shells = grid.shells if isinstance(grid, ScaleGrid) else tuple(grid or ())
    if not shells:
        shells = default_shell_grid(space, x)
    if not shells:
        raise IsolatedPoint(f"no shells realized at {x.id!r}")
    allowed = None if Y is None else set(Y)
    _check_center(x, allowed)
    t = f.value(x)
    inner: dict = {}
    for r, s in shells:
        pts = _restricted(torus_points(space, x, r, s, budget), allowed)
        if not pts:
            continue
        sup = max(_descent_quotient(t, f, space, x, u) for u in pts)
        if s not in inner or sup > inner[s]:
            inner[s] = sup
    if not inner:
        raise IsolatedPoint(f"every shell at {x.id!r} is empty")
    return min(inner.values())


# ---------------------------------------------------------------------------
# Products: Lipschitz bound in the second variable, partial slopes


def lipschitz_second_witness(f2: Callable[[Point, Point], Num],
                             space1: MetricSpace, space2: MetricSpace, k: Num,
                             budget: Optional[int] = None) -> Optional[tuple]:
    """First triple (x, y1, y2) violating |f(x,y1) - f(x,y2)| <= k d2(y1,y2).

    Scans points in enumeration order, at most budget triples; None when no
    violation is found.  Exact values compare exactly; float chains get the
    1e-12 slack.
    """
    count = 0
    for x in space1.iter_points(budget):
        pts2 = list(space2.iter_points(budget))
        for i, y1 in enumerate(pts2):
            for y2 in pts2[i + 1:]:
                count += 1
                if budget is not None and count > budget:
                    return None
                gap = abs(f2(x, y1) - f2(x, y2))
                bound = k * space2.distance(y1, y2)
                slack = 0 if is_exact(gap) and is_exact(bound) else FLOAT_TOL
                if gap > bound + slack:
                    return (x, y1, y2)
    return None


def verify_lipschitz_second(f2: Callable[[Point, Point], Num],
                            space1: MetricSpace, space2: MetricSpace, k: Num,
                            budget: Optional[int] = None) -> bool:
    """True when no scanned triple violates the k-Lipschitz bound in y."""
    return lipschitz_second_witness(f2, space1, space2, k, budget) is None


def partial_slope(f2: Callable[[Point, Point], Num], space1: MetricSpace,
                  x: Point, y: Point, grid: Optional[ScaleGrid] = None,
                  Y1: Optional[Iterable[Point]] = None,
                  k: Optional[Num] = None, space2: Optional[MetricSpace] = None,
                  budget: Optional[int] = None) -> Num:
    """Slope of the slice u -> f(u, y) at x over the first factor (within Y1).

    When k and space2 are given, a spot-check of the Lipschitz bound in the
    second variable runs first and raises LipschitzViolation on failure.
    """
    if k is not None:
        if space2 is None:
            raise ValueError("spot-check needs space2 together with k")
        witness = lipschitz_second_witness(f2, space1, space2, k,
                                           budget=budget or 128)
        if witness is not None:
            wx, wy1, wy2 = witness
            raise LipschitzViolation(
                f"bound k={fmt(k)} fails at x={wx.id}, y1={wy1.id}, y2={wy2.id}")
    slice_f = FunctionOracle(f"slice@{y.id}", lambda u: f2(u, y))
    return slope_at(slice_f, space1, x, grid, Y1)


# ---------------------------------------------------------------------------
# Registered witness-problem families


def radius_truncation(space, density: Optional[int] = None) -> tuple:
    """Scalar radii realizing every distinct ball of the space.

    One value inside each gap between consecutive realized distances, plus
    half the minimum and one past the diameter.  density caps the grid by
    even subsampling (first and last kept).
    """
    grid = midpoint_grid(space.realized_distances())
    if density is not None and density >= 2 and len(grid) > density:
        step = (len(grid) - 1) / (density - 1)
        idx = sorted({round(i * step) for i in range(density)})
        grid = tuple(grid[i] for i in idx)
    return grid


def shell_truncation(space, t_values: Sequence[Num],
                     density: Optional[int] = None) -> tuple:
    """All (t, r, s) with r < s from the radius grid and t from t_values."""
    radii = radius_truncation(space, density)
    shells = [(r, s) for i, r in enumerate(radii) for s in radii[i + 1:]]
    return tuple((t, r, s) for t in t_values for (r, s) in shells)


def punctured_ball_problem(space: MetricSpace, f: FunctionOracle,
                           mode: str = "sup",
                           truncation: Optional[Sequence[Num]] = None,
                           budget: Optional[int] = None) -> WitnessProblem:
    """Arity-1 problem: region B(x, r) \\ {x}, score f(u)."""
    trunc = radius_truncation(space) if truncation is None else tuple(truncation)
    regions: dict = {}

    def region(x: Point, r: Num) -> Region:
        key = (x.id, _fast_key(r))
        got = regions.get(key)
        if got is None:
            got = Region(1, tuple((u,) for u in punctured_ball_points(space, x, r, budget)))
            regions[key] = got
        return got

    def member(x: Point, r: Num, u: tuple) -> bool:
        return u[0] != x and space.distance(x, u[0]) < r

    def score(z: tuple, u: tuple) -> Num:
        return f.value(u[0])

    return WitnessProblem(
        name=f"punctured-ball[{mode}]", space=space,
        params=positive_scalar_params(trunc), arity=1, mode=mode,
        region=region, member=member, score=score)


def ball_pairs_problem(space: MetricSpace, f: FunctionOracle,
                       mode: str = "sup",
                       truncation: Optional[Sequence[Num]] = None,
                       budget: Optional[int] = None) -> WitnessProblem:
    """Arity-2 problem: distinct pairs of B(x, r), score |f(u1)-f(u2)|/d."""
    trunc = radius_truncation(space) if truncation is None else tuple(truncation)
    cache: dict = {}

    def pair_score(a: Point, b: Point) -> Num:
        key = (a.id, b.id) if a.id <= b.id else (b.id, a.id)
        v = cache.get(key)
        if v is None:
            v = _pair_quotient(f, space, a, b)
            cache[key] = v
        return v

    def region(x: Point, r: Num) -> Region:
        return ball_pairs(space, x, r, budget)

    def member(x: Point, r: Num, u: tuple) -> bool:
        a, b = u
        return a != b and space.distance(x, a) < r and space.distance(x, b) < r

    def score(z: tuple, u: tuple) -> Num:
        return pair_score(u[0], u[1])

    return WitnessProblem(
        name=f"ball-pairs[{mode}]", space=space,
        params=positive_scalar_params(trunc), arity=2, mode=mode,
        region=region, member=member, score=score)


def _fast_key(v: Num):
    """Hashable stand-in avoiding the slow Fraction.__hash__."""
    if isinstance(v, (int, Fraction)):
        return (v.numerator, v.denominator)
    return v


def torus_slope_problem(space: MetricSpace, f: FunctionOracle,
                        mode: str = "sup",
                        truncation: Optional[Sequence[tuple]] = None,
                        t_mode: str = "sample",
                        budget: Optional[int] = None) -> WitnessProblem:
    """Arity-1 problem: shells r < d(x,u) < s, score (t - f(u))^+ / d(x,u)."""
    if truncation is None:
        truncation = shell_truncation(space, level_grid(f, space, t_mode))
    cache: dict = {}
    shells: dict = {}  # shells ignore t, so one Region serves every level

    def region(x: Point, p: tuple) -> Region:
        _, r, s = p
        key = (x.id, _fast_key(r), _fast_key(s))
        got = shells.get(key)
        if got is None:
            got = Region(1, tuple((u,) for u in torus_points(space, x, r, s, budget)))
            shells[key] = got
        return got

    def member(x: Point, p: tuple, u: tuple) -> bool:
        _, r, s = p
        return r < space.distance(x, u[0]) < s

    def score(z: tuple, u: tuple) -> Num:
        x, p = z
        key = (_fast_key(p[0]), x.id, u[0].id)
        v = cache.get(key)
        if v is None:
            v = _descent_quotient(p[0], f, space, x, u[0])
            cache[key] = v
        return v

    return WitnessProblem(
        name=f"torus-slope[{mode}]", space=space,
        params=shell_params(tuple(truncation)), arity=1, mode=mode,
        region=region, member=member, score=score)


PROBLEM_FAMILIES = {
    "punctured-ball": punctured_ball_problem,
    "ball-pairs": ball_pairs_problem,
    "torus-slope": torus_slope_problem,
}


def problem_from_descriptor(space: MetricSpace, f: FunctionOracle,
                            obj: dict) -> WitnessProblem:
    """Build a registered problem from {"family", "mode", ...} JSON."""
    if not isinstance(obj, dict):
        raise DescriptorError("problem descriptor must be an object")
    family = obj.get("family")
    if family not in PROBLEM_FAMILIES:
        raise DescriptorError(
            f"unknown family {family!r}; registered: {sorted(PROBLEM_FAMILIES)}")
    mode = obj.get("mode", "sup")
    if mode not in ("sup", "inf"):
        raise DescriptorError(f"mode must be 'sup' or 'inf', got {mode!r}")
    kwargs: dict = {"mode": mode}
    if family == "torus-slope":
        t_mode = obj.get("t_mode", "sample")
        if t_mode not in ("sample", "full"):
            raise DescriptorError(f"t_mode must be 'sample' or 'full', got {t_mode!r}")
        density = obj.get("q_density")
        if density is not None:
            if not isinstance(density, int) or density < 2:
                raise DescriptorError("q_density must be an integer >= 2")
            kwargs["truncation"] = shell_truncation(
                space, level_grid(f, space, t_mode), density)
        else:
            kwargs["t_mode"] = t_mode
    else:
        density = obj.get("q_density")
        if density is not None:
            if not isinstance(density, int) or density < 2:
                raise DescriptorError("q_density must be an integer >= 2")
            kwargs["truncation"] = radius_truncation(space, density)
    return PROBLEM_FAMILIES[family](space, f, **kwargs)
