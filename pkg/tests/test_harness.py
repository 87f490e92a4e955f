"""Instance generators, the brute-force oracle, dumps/replay, suite runs."""

import json
from fractions import Fraction

import pytest

from sepdet import (
    EmptyRegion,
    SuiteConfig,
    SuiteReport,
    UnknownSuite,
    builtin_function,
    ball_pairs_problem,
    brute_force_optimum,
    check_inf_reduction,
    check_reduction,
    check_sup_reduction,
    closure_iterate,
    dyadic_interval_space,
    punctured_ball_problem,
    random_finite_metric,
    random_table_function,
    replay_check,
    run_suite,
    step_function,
    torus_slope_problem,
    witness_dump,
)
from sepdet.extreal import is_finite
from sepdet.harness import SUITES

COORD = builtin_function("coord")


class TestSpaceGenerator:
    def test_single_point(self):
        space = random_finite_metric(1, "s")
        assert len(space) == 1
        assert space.matrix == ((0,),)

    def test_two_points_symmetric_positive(self):
        space = random_finite_metric(2, "s")
        assert space.matrix[0][1] == space.matrix[1][0] > 0

    @pytest.mark.parametrize("method,dim", [
        ("shortest-path", 1), ("euclidean", 1), ("euclidean", 2)])
    def test_axioms_hold(self, method, dim):
        for seed in range(4):
            space = random_finite_metric(8, f"t{seed}", method, dim=dim)
            space.validate()
            assert len(space) == 8

    def test_shortest_path_triangle_at_scale(self):
        space = random_finite_metric(50, "big", "shortest-path")
        space.validate(tol=0)  # integer distances check exactly

    def test_exactness_by_method(self):
        assert random_finite_metric(6, "x", "shortest-path").exact
        assert random_finite_metric(6, "x", "euclidean", dim=1).exact
        assert not random_finite_metric(6, "x", "euclidean", dim=2).exact

    def test_deterministic_in_the_seed(self):
        a = random_finite_metric(7, "same", "euclidean", dim=1)
        b = random_finite_metric(7, "same", "euclidean", dim=1)
        assert a.matrix == b.matrix
        c = random_finite_metric(7, "other", "euclidean", dim=1)
        assert a.matrix != c.matrix

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            random_finite_metric(4, "s", "random-walk")

    def test_size_must_be_positive(self):
        with pytest.raises(ValueError):
            random_finite_metric(0, "s")


class TestFunctionGenerators:
    def test_table_function_is_finite_by_default(self):
        space = random_finite_metric(10, "f")
        f = random_table_function(space, "f")
        assert all(is_finite(f.value(p)) for p in space.points)

    def test_inf_share_keeps_a_finite_value(self):
        space = random_finite_metric(6, "f")
        f = random_table_function(space, "f", inf_share=1.0)
        vals = [f.value(p) for p in space.points]
        assert any(not is_finite(v) for v in vals)
        assert any(is_finite(v) for v in vals)

    def test_deterministic_in_the_seed(self):
        space = random_finite_metric(6, "f")
        a = random_table_function(space, "g")
        b = random_table_function(space, "g")
        assert a.tabulate(space) == b.tabulate(space)

    def test_step_function_takes_two_values(self):
        space = random_finite_metric(9, "f", "euclidean", dim=1)
        f = step_function(space, "f")
        assert len({f.value(p) for p in space.points}) <= 2


class TestDyadicSpace:
    def test_enumeration_and_distance(self):
        lazy = dyadic_interval_space()
        pts = lazy.enumerate_points(8)
        assert len(pts) == 8
        assert len({p.id for p in pts}) == 8
        a, b = pts[0], pts[1]
        assert lazy.distance(a, b) == abs(a.coords[0] - b.coords[0])
        assert all(0 <= p.coords[0] <= 1 for p in pts)


class TestBruteForce:
    def test_matches_the_max_on_the_line(self, line3):
        prob = punctured_ball_problem(line3, COORD, "sup")
        got = brute_force_optimum(prob, (line3.point("p0"), Fraction(4)))
        assert got == 3

    def test_pair_problem_on_the_line(self, line3):
        prob = ball_pairs_problem(line3, COORD, "sup")
        got = brute_force_optimum(prob, (line3.point("p0"), Fraction(7, 2)))
        assert got == 1  # every coordinate pair quotient is exactly 1

    def test_restriction_narrows_the_scan(self, line3):
        prob = punctured_ball_problem(line3, COORD, "sup")
        z = (line3.point("p0"), Fraction(4))
        got = brute_force_optimum(prob, z, restrict=[line3.point("p1")])
        assert got == 1

    def test_empty_scan_raises(self, line3):
        prob = punctured_ball_problem(line3, COORD, "sup")
        with pytest.raises(EmptyRegion):
            brute_force_optimum(prob, (line3.point("p0"), Fraction(1, 2)))

    @pytest.mark.parametrize("mode", ["sup", "inf"])
    def test_agrees_with_the_check_lhs_everywhere(self, mode):
        # dual route: member() scan vs region() enumeration
        for i in range(6):
            n = 5 + i % 3
            method = ("euclidean", "shortest-path")[i % 2]
            space = random_finite_metric(n, f"bf:{i}", method, dim=1)
            f = random_table_function(space, f"bf:{i}")
            for build in (punctured_ball_problem, ball_pairs_problem,
                          torus_slope_problem):
                prob = build(space, f, mode)
                Y = space.points
                for x in Y:
                    for p in prob.params.truncation:
                        chk = check_reduction(prob, Y, (x, p))
                        if chk.verdict == "skipped-empty-region":
                            with pytest.raises(EmptyRegion):
                                brute_force_optimum(prob, (x, p))
                            continue
                        assert brute_force_optimum(prob, (x, p)) == chk.lhs


class TestSuiteReportBookkeeping:
    def test_instances_and_checks_are_counted_separately(self):
        report = SuiteReport(name="t", seed=0)
        report.begin_instance()
        report.check_pass()
        report.check_pass()
        report.end_instance()
        report.begin_instance()
        report.fail({"kind": "planted"})
        report.end_instance()
        assert report.instances == 2
        assert (report.passes, report.fails) == (1, 1)
        assert (report.checks_passed, report.checks_failed) == (2, 1)
        assert not report.ok

    def test_skips_do_not_fail_an_instance(self):
        report = SuiteReport(name="t", seed=0)
        report.begin_instance()
        report.check_skip("skipped_empty_shell")
        report.end_instance()
        assert report.ok and report.passes == 1
        assert report.notes == {"skipped_empty_shell": 1}

    def test_dump_cap(self):
        report = SuiteReport(name="t", seed=0)
        report.begin_instance()
        for _ in range(25):
            report.fail({"kind": "planted"})
        report.end_instance()
        assert report.checks_failed == 25
        assert len(report.failures) == SuiteReport.MAX_DUMPS

    def test_json_form_has_no_runtime(self):
        report = SuiteReport(name="t", seed=3)
        report.runtime_seconds = 1.5
        body = report.to_json()
        assert "runtime" not in json.dumps(body)
        assert body["name"] == "t" and body["seed"] == 3

    def test_config_validation(self):
        with pytest.raises(ValueError):
            SuiteConfig(instances=0)
        with pytest.raises(ValueError):
            SuiteConfig(eps=-1)
        with pytest.raises(ValueError):
            SuiteConfig(cap=0)
        with pytest.raises(ValueError):
            SuiteConfig(tolerance=-1)


def planted_failure(line3):
    """A deliberately unclosed Y: the inf check at (p0, 4) must fail."""
    prob = punctured_ball_problem(line3, COORD, "inf")
    Y = [line3.point("p0"), line3.point("p2")]
    chk = check_inf_reduction(prob, Y, (line3.point("p0"), Fraction(4)))
    return prob, Y, chk


class TestDumpAndReplay:
    def test_failing_check_replays_to_the_same_verdict(self, line3):
        prob, Y, chk = planted_failure(line3)
        assert chk.verdict == "fail"
        dump = witness_dump(line3, COORD, prob, Y, chk)
        replayed = replay_check(dump)
        assert replayed.verdict == "fail"
        assert replayed.lhs == chk.lhs and replayed.rhs == chk.rhs

    def test_dump_is_json_serializable_and_complete(self, line3):
        prob, Y, chk = planted_failure(line3)
        dump = witness_dump(line3, COORD, prob, Y, chk)
        encoded = json.dumps(dump, sort_keys=True)
        back = json.loads(encoded)
        assert back["problem"]["family"] == "punctured-ball"
        assert back["problem"]["mode"] == "inf"
        assert back["Y"] == ["p0", "p2"]
        assert replay_check(back).verdict == "fail"

    def test_passing_check_replays_to_a_pass(self, line3):
        prob = punctured_ball_problem(line3, COORD, "sup")
        Y = closure_iterate(prob, [line3.point("p0")]).union
        chk = check_sup_reduction(prob, Y, (line3.point("p0"), Fraction(4)))
        dump = witness_dump(line3, COORD, prob, Y, chk)
        assert replay_check(dump).verdict == "pass"


class TestRunSuite:
    def test_unknown_suite(self):
        with pytest.raises(UnknownSuite):
            run_suite("thm-9.9")

    def test_registry_covers_the_ten_suites(self):
        assert sorted(SUITES) == [
            "prop-1.1", "prop-3.2", "prop-4.1", "thm-2.1", "thm-2.2",
            "thm-2.3", "thm-3.1", "thm-3.3", "thm-4.2", "thm-4.3"]
        assert all(desc for _, desc in SUITES.values())

    def test_tiny_sup_suite_passes(self):
        report = run_suite("thm-2.1", SuiteConfig(instances=3, sizes=(5,), seed=1))
        assert report.ok
        assert report.instances == 3 and report.passes == 3
        assert report.checks_passed > 0

    def test_reports_are_byte_identical_across_runs(self):
        cfg = SuiteConfig(instances=2, sizes=(5, 6), seed=7)
        a = run_suite("thm-3.1", cfg)
        b = run_suite("thm-3.1", cfg)
        assert (json.dumps(a.to_json(), sort_keys=True)
                == json.dumps(b.to_json(), sort_keys=True))

    def test_different_seeds_differ(self):
        a = run_suite("thm-2.1", SuiteConfig(instances=1, sizes=(6,), seed=1))
        b = run_suite("thm-2.1", SuiteConfig(instances=1, sizes=(6,), seed=2))
        assert (json.dumps(a.to_json(), sort_keys=True)
                != json.dumps(b.to_json(), sort_keys=True))

    def test_singleton_spaces_skip_cleanly(self):
        report = run_suite("prop-3.2", SuiteConfig(instances=2, sizes=(1,), seed=1))
        assert report.ok and report.passes == 2
        assert report.checks_failed == 0

    def test_two_point_spaces_note_pairless_balls(self):
        report = run_suite("prop-3.2", SuiteConfig(instances=2, sizes=(2,), seed=1))
        assert report.ok
        assert report.notes.get("skipped_no_pairs", 0) > 0

    def test_shell_override_skips_every_region(self):
        cfg = SuiteConfig(instances=2, sizes=(4,), seed=1,
                          shells_override=((1, Fraction(1, 8), Fraction(1, 4)),))
        report = run_suite("prop-4.1", cfg)
        assert report.ok
        assert report.checks_passed == 0
        assert report.notes.get("skipped_empty_shell", 0) > 0

    def test_adversarial_rejection_is_total(self):
        report = run_suite("thm-4.3", SuiteConfig(instances=2, sizes=(4,), seed=3))
        assert report.ok
        assert report.notes.get("adversarial_rejected", 0) >= 10
        assert all(d.get("kind") != "adversarial-accepted" for d in report.failures)

    def test_runtime_is_recorded(self):
        report = run_suite("thm-2.1", SuiteConfig(instances=1, sizes=(5,), seed=1))
        assert report.runtime_seconds > 0
        assert "OK" in report.summary()
