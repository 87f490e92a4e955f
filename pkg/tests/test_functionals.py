"""Variational quantities: limits, Lipschitz suprema, shell slopes, slices."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sepdet import (
    DescriptorError,
    EmptyRegion,
    FunctionOracle,
    IsolatedPoint,
    LipschitzViolation,
    ScaleGrid,
    builtin_function,
    continuity_check,
    default_radius_grid,
    default_shell_grid,
    level_grid,
    lip_local_sup,
    lip_modulus,
    liminf_at,
    limsup_at,
    lipschitz_second_witness,
    midpoint_grid,
    partial_slope,
    slope_at,
    torus_sup,
    verify_lipschitz_second,
)
from sepdet.extreal import POS_INF, is_pos_inf
from conftest import coord_space

COORD = builtin_function("coord")
ABS = builtin_function("abs")
ZERO = builtin_function("zero")

table_values = st.lists(
    st.fractions(min_value=-5, max_value=5, max_denominator=4),
    min_size=2, max_size=6)


def random_instance(values):
    space = coord_space([(f"q{i}", i) for i in range(len(values))])
    f = FunctionOracle.from_table(
        {f"q{i}": v for i, v in enumerate(values)})
    return space, f


class TestGrids:
    def test_midpoint_grid_realizes_every_sublevel(self):
        grid = midpoint_grid([1, 2, 3])
        assert grid == (Fraction(1, 2), Fraction(3, 2), Fraction(5, 2), 4)

    def test_midpoint_grid_empty(self):
        assert midpoint_grid([]) == ()

    def test_default_radius_grid_from_center(self, line3):
        # distances from p0 are {1, 3}
        assert default_radius_grid(line3, line3.point("p0")) == (
            Fraction(1, 2), Fraction(2), 4)

    def test_default_shell_grid_orders_pairs(self, grid5):
        shells = default_shell_grid(grid5, grid5.point("g2"))
        assert all(r < s for r, s in shells)
        assert len(shells) == len(set(shells))

    def test_level_grid_sample_and_full(self, line3):
        assert level_grid(COORD, line3, "sample") == (-1, 1, 4)
        assert level_grid(COORD, line3, "full") == (-1, 0, 1, 3, 4)

    def test_level_grid_needs_a_finite_value(self, line3):
        top = FunctionOracle("top", lambda p: POS_INF)
        with pytest.raises(ValueError):
            level_grid(top, line3)


class TestLimits:
    def test_constant_function(self, grid5):
        grid = default_radius_grid(grid5)
        x = grid5.point("g2")
        assert liminf_at(ZERO, grid5, x, grid) == 0
        assert limsup_at(ZERO, grid5, x, grid) == 0
        assert continuity_check(ZERO, grid5, x, grid)

    def test_line_values_at_the_endpoints(self, line3):
        grid = default_radius_grid(line3)
        p0 = line3.point("p0")
        # nearest neighbor of p0 carries value 1, so both limits are 1
        assert liminf_at(COORD, line3, p0, grid) == 1
        assert limsup_at(COORD, line3, p0, grid) == 1
        assert not continuity_check(COORD, line3, p0, grid)

    def test_small_scales_dominate_the_limsup(self, line3):
        # at p1 the scale 3/2 ball sees only p0, so the limsup collapses to 0
        grid = default_radius_grid(line3)
        p1 = line3.point("p1")
        assert liminf_at(COORD, line3, p1, grid) == 0
        assert limsup_at(COORD, line3, p1, grid) == 0

    def test_indicator_spike_is_invisible_from_its_own_center(self, grid5):
        x = grid5.point("g2")
        spike = FunctionOracle("spike", lambda p: 1 if p == x else 0)
        grid = default_radius_grid(grid5)
        assert liminf_at(spike, grid5, x, grid) == 0
        assert limsup_at(spike, grid5, x, grid) == 0
        assert not continuity_check(spike, grid5, x, grid)

    def test_restriction_that_is_closed_changes_nothing(self, line3):
        grid = default_radius_grid(line3)
        p0 = line3.point("p0")
        Y = [p0, line3.point("p1")]
        assert liminf_at(COORD, line3, p0, grid, Y=Y) == 1
        assert limsup_at(COORD, line3, p0, grid, Y=Y) == 1

    def test_isolated_point_raises(self, line3):
        with pytest.raises(IsolatedPoint):
            liminf_at(COORD, line3, line3.point("p0"), (Fraction(1, 2),))

    @given(table_values)
    def test_duality_limsup_is_minus_liminf_of_minus(self, values):
        space, f = random_instance(values)
        neg = FunctionOracle("neg", lambda p: -f.value(p))
        grid = default_radius_grid(space)
        for x in space.points:
            assert limsup_at(f, space, x, grid) == -liminf_at(neg, space, x, grid)

    @given(table_values)
    def test_limits_bracket_each_other(self, values):
        space, f = random_instance(values)
        grid = default_radius_grid(space)
        for x in space.points:
            assert liminf_at(f, space, x, grid) <= limsup_at(f, space, x, grid)


class TestLipschitz:
    def test_linear_slope_two(self, grid5):
        double = FunctionOracle.from_coords(lambda c: 2 * c[0], "double")
        x = grid5.point("g2")
        got = lip_local_sup(double, grid5, x, Fraction(3, 2))
        assert got.value == 2 and got.pairs == 3  # ball {g1, g2, g3}
        assert lip_modulus(double, grid5, x, (Fraction(3, 2), Fraction(5))) == 2

    def test_constant_has_modulus_zero(self, grid5):
        x = grid5.point("g2")
        assert lip_local_sup(ZERO, grid5, x, Fraction(5)).value == 0
        assert lip_modulus(ZERO, grid5, x, default_radius_grid(grid5)) == 0

    def test_singleton_ball_reports_no_pairs(self, grid5):
        got = lip_local_sup(COORD, grid5, grid5.point("g2"), Fraction(1, 2))
        assert got == (0, 0)

    def test_abs_function_modulus(self, grid5):
        x = grid5.point("g2")
        assert lip_modulus(ABS, grid5, x, (Fraction(3, 2), Fraction(5))) == 1

    def test_restriction_shrinks_the_pair_set(self, grid5):
        x = grid5.point("g2")
        Y = [x, grid5.point("g3")]
        got = lip_local_sup(COORD, grid5, x, Fraction(5), Y=Y)
        assert got.pairs == 1 and got.value == 1

    @given(table_values)
    def test_local_sup_monotone_in_radius(self, values):
        space, f = random_instance(values)
        x = space.points[0]
        radii = default_radius_grid(space)
        sups = [lip_local_sup(f, space, x, r).value for r in radii]
        assert sups == sorted(sups)


class TestTorusSup:
    def test_line_example(self, line3):
        got = torus_sup(COORD, line3, line3.point("p0"), 2,
                        Fraction(1, 2), Fraction(7, 2))
        assert got == 1  # (2 - 1)/1 beats (2 - 3)^+/3 = 0

    def test_level_below_the_shell_minimum_gives_zero(self, line3):
        got = torus_sup(COORD, line3, line3.point("p0"), 0,
                        Fraction(1, 2), Fraction(7, 2))
        assert got == 0

    def test_infinite_level_gives_infinite_sup(self, line3):
        got = torus_sup(COORD, line3, line3.point("p0"), POS_INF,
                        Fraction(1, 2), Fraction(7, 2))
        assert is_pos_inf(got)

    def test_infinite_values_cancel_at_an_infinite_level(self, line3):
        top = FunctionOracle("top", lambda p: POS_INF)
        got = torus_sup(top, line3, line3.point("p0"), POS_INF,
                        Fraction(1, 2), Fraction(7, 2))
        assert got == 0  # the +inf - +inf = 0 convention

    def test_empty_shell_raises(self, line3):
        with pytest.raises(EmptyRegion):
            torus_sup(COORD, line3, line3.point("p0"), 2,
                      Fraction(1, 4), Fraction(1, 2))

    def test_restriction_to_a_shellless_set_raises(self, line3):
        with pytest.raises(EmptyRegion):
            torus_sup(COORD, line3, line3.point("p0"), 2,
                      Fraction(1, 2), Fraction(7, 2), Y=[line3.point("p0")])


class TestSlope:
    def test_symmetric_grid_center(self, grid5):
        assert slope_at(COORD, grid5, grid5.point("g2")) == 1

    def test_line_endpoint_is_a_minimum(self, line3):
        assert slope_at(COORD, line3, line3.point("p0")) == 0

    def test_line_interior(self, line3):
        assert slope_at(COORD, line3, line3.point("p1")) == 1

    def test_abs_at_its_minimizer(self, grid5):
        assert slope_at(ABS, grid5, grid5.point("g2")) == 0

    def test_constant_slope_is_zero(self, grid5):
        for x in grid5.points:
            assert slope_at(ZERO, grid5, x) == 0

    def test_global_minimizer_has_slope_zero(self, grid5):
        assert slope_at(COORD, grid5, grid5.point("g0")) == 0

    def test_all_infinite_values_cancel(self, grid5):
        top = FunctionOracle("top", lambda p: POS_INF)
        assert slope_at(top, grid5, grid5.point("g2")) == 0

    def test_infinite_center_over_finite_neighbors(self, grid5):
        x = grid5.point("g2")
        f = FunctionOracle("peak", lambda p: POS_INF if p == x else 0)
        assert is_pos_inf(slope_at(f, grid5, x))

    def test_explicit_grid_overrides_the_default(self, grid5):
        # the single shell (3/2, 5/2) sees g0 and g4; g0 wins with (0-(-2))/2
        grid = ScaleGrid(shells=((Fraction(3, 2), Fraction(5, 2)),))
        assert slope_at(COORD, grid5, grid5.point("g2"), grid) == 1

    def test_empty_shells_raise_isolated(self, grid5):
        grid = ScaleGrid(shells=((Fraction(1, 4), Fraction(1, 2)),))
        with pytest.raises(IsolatedPoint):
            slope_at(COORD, grid5, grid5.point("g2"), grid)

    @given(table_values, st.fractions(min_value=0, max_value=4, max_denominator=4))
    def test_positive_homogeneity(self, values, c):
        space, f = random_instance(values)
        scaled = FunctionOracle("scaled", lambda p: c * f.value(p))
        for x in space.points:
            assert slope_at(scaled, space, x) == c * slope_at(f, space, x)

    @given(table_values)
    def test_slope_zero_at_any_global_minimizer(self, values):
        space, f = random_instance(values)
        best = min(values)
        for x in space.points:
            if f.value(x) == best:
                assert slope_at(f, space, x) == 0


class TestProductSlices:
    def make_pair(self):
        s1 = coord_space([(f"a{k}", k) for k in range(5)])
        s2 = coord_space([(f"b{k}", 2 * k) for k in range(3)])
        return s1, s2

    def test_witness_for_a_violated_bound(self):
        s1, s2 = self.make_pair()

        def f2(x, y):
            return 3 * y.coords[0]

        w = lipschitz_second_witness(f2, s1, s2, k=1)
        assert w is not None
        x, y1, y2 = w
        assert abs(f2(x, y1) - f2(x, y2)) > s2.distance(y1, y2)
        assert not verify_lipschitz_second(f2, s1, s2, k=1)

    def test_bound_independent_of_y_verifies_at_k_zero(self):
        s1, s2 = self.make_pair()

        def f2(x, y):
            return x.coords[0] ** 2

        assert verify_lipschitz_second(f2, s1, s2, k=0)

    def test_true_bound_verifies(self):
        s1, s2 = self.make_pair()
        y0 = s2.point("b0")

        def f2(x, y):
            return x.coords[0] + Fraction(1, 2) * s2.distance(y, y0)

        assert verify_lipschitz_second(f2, s1, s2, k=Fraction(1, 2))
        assert not verify_lipschitz_second(f2, s1, s2, k=Fraction(1, 4))

    def test_partial_slope_of_an_x_only_function(self):
        s1, s2 = self.make_pair()

        def f2(x, y):
            return x.coords[0]

        x = s1.point("a2")
        assert partial_slope(f2, s1, x, s2.point("b1")) == slope_at(COORD, s1, x)

    def test_partial_slope_spot_check_raises(self):
        s1, s2 = self.make_pair()

        def f2(x, y):
            return 3 * y.coords[0]

        with pytest.raises(LipschitzViolation):
            partial_slope(f2, s1, s1.point("a0"), s2.point("b0"),
                          k=1, space2=s2)

    def test_partial_slope_spot_check_needs_space2(self):
        s1, s2 = self.make_pair()
        with pytest.raises(ValueError):
            partial_slope(lambda x, y: 0, s1, s1.point("a0"), s2.point("b0"),
                          k=1)


class TestDescriptors:
    def test_table_roundtrip(self, line3):
        f = FunctionOracle.from_table({"p0": "1/2", "p1": 2, "p2": "inf"})
        desc = f.to_descriptor()
        back = FunctionOracle.from_descriptor(desc)
        assert back.value(line3.point("p0")) == Fraction(1, 2)
        assert is_pos_inf(back.value(line3.point("p2")))

    def test_closed_forms(self, grid5):
        linear = FunctionOracle.from_descriptor(
            {"kind": "linear", "coeffs": [2], "offset": 1})
        assert linear.value(grid5.point("g3")) == 3
        quad = FunctionOracle.from_descriptor(
            {"kind": "quadratic", "coeffs": [1]})
        assert quad.value(grid5.point("g0")) == 4
        step = FunctionOracle.from_descriptor(
            {"kind": "step", "threshold": 0, "low": -1, "high": 1})
        assert step.value(grid5.point("g1")) == -1
        assert step.value(grid5.point("g2")) == 1

    @pytest.mark.parametrize("desc,needle", [
        ({"kind": "mystery"}, "kind"),
        ({"kind": "table", "values": {}}, "values"),
        ({"kind": "linear"}, "coeffs"),
        ({"kind": "step", "axis": -1}, "axis"),
        ({"kind": "table", "values": {"p0": "x"}}, "values"),
    ])
    def test_bad_descriptors_name_the_field(self, desc, needle):
        with pytest.raises(DescriptorError) as err:
            FunctionOracle.from_descriptor(desc)
        assert needle in str(err.value)

    def test_check_proper(self, line3):
        top = FunctionOracle("top", lambda p: POS_INF)
        with pytest.raises(ValueError):
            top.check_proper(line3)
        COORD.check_proper(line3)
