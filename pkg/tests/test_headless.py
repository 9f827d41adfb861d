"""Scenario runner scoring: rate math, report rendering, failure capture."""

import json

import pytest

from sketchteleop.service.headless import (
    _JOYSTICK_DONE,
    ScenarioOutcome,
    ScenarioRunner,
    SuiteReport,
    _StepFailed,
    build_eval_report,
    compute_rates,
    load_scenarios,
    run_headless,
)

PICK = {
    "name": "pick the red cube",
    "steps": [
        {"op": "sketch", "shape": "circle", "on": "cube_red", "radius": 12.0},
        {"op": "expect_interpretation", "task": "pick", "shape": "circle"},
        {"op": "confirm"},
        {"op": "run_until_result"},
        {"op": "expect_result", "success": True},
        {"op": "expect_holding", "object": "cube_red"},
    ],
}

# Arrow pointing away from the robot, so the rule reads it as a push; the
# declared expectation says pull.  The interpretation check must miss.
MISLABELED_PULL = {
    "name": "pull expectation on a push arrow",
    "steps": [
        {"op": "sketch", "shape": "arrow", "from": "cube_red", "to_world": [2.0, 0.3]},
        {"op": "expect_interpretation", "task": "pull", "shape": "arrow"},
    ],
}


class TestComputeRates:
    def test_rendered_rate_examples(self):
        counts = {
            "execution": {
                "pick": {"correct": 9, "total": 10},
                "drop": {"correct": 0, "total": 10},
                "push": {"correct": 10, "total": 10},
            }
        }
        report = compute_rates(counts)
        assert report.tsr == {"pick": "0.900", "drop": "0.000", "push": "1.000"}
        assert report.skipped == []

    def test_thirds_render_to_three_decimals(self):
        counts = {"interpretation": {"place": {"correct": 1, "total": 3}}}
        assert compute_rates(counts).isr == {"place": "0.333"}
        counts = {"interpretation": {"place": {"correct": 2, "total": 3}}}
        assert compute_rates(counts).isr == {"place": "0.667"}

    def test_half_milli_rounds_to_even(self):
        assert compute_rates(
            {"execution": {"a": {"correct": 1, "total": 16}}}
        ).tsr == {"a": "0.062"}
        assert compute_rates(
            {"execution": {"a": {"correct": 3, "total": 16}}}
        ).tsr == {"a": "0.188"}

    def test_correct_above_total_raises(self):
        counts = {"execution": {"pick": {"correct": 11, "total": 10}}}
        with pytest.raises(ValueError, match="exceeds total"):
            compute_rates(counts)

    def test_zero_total_is_skipped_not_divided(self):
        counts = {
            "interpretation": {"drop": {"correct": 0, "total": 0}},
            "execution": {"pick": {"correct": 1, "total": 1}},
        }
        report = compute_rates(counts)
        assert "drop" not in report.isr
        assert report.skipped == ["interpretation/drop: no samples"]
        # the raw tally stays visible even though no rate was computed
        assert report.per_class_counts["interpretation"]["drop"]["total"] == 0


class TestEvalReport:
    COUNTS = {
        "interpretation": {
            "pick": {"correct": 9, "total": 10},
            "push": {"correct": 10, "total": 10},
        },
        "execution": {"pick": {"correct": 8, "total": 10}},
        "variation": {"grasp from left": {"correct": 7, "total": 10}},
    }

    def test_json_is_sorted_and_newline_terminated(self):
        text = compute_rates(self.COUNTS).to_json()
        assert text.endswith("\n")
        body = json.loads(text)
        assert list(body) == sorted(body)
        assert body["isr"]["pick"] == "0.900"

    def test_json_ignores_input_dict_order(self):
        shuffled = {
            "execution": {"pick": {"total": 10, "correct": 8}},
            "variation": {"grasp from left": {"total": 10, "correct": 7}},
            "interpretation": {
                "push": {"total": 10, "correct": 10},
                "pick": {"total": 10, "correct": 9},
            },
        }
        assert compute_rates(shuffled).to_json() == compute_rates(self.COUNTS).to_json()

    def test_table_has_one_row_per_task_and_a_variation_block(self):
        lines = compute_rates(self.COUNTS).table_lines()
        assert lines[0].split() == ["task", "ISR", "TSR"]
        pick = next(l for l in lines if l.startswith("pick"))
        assert "9/10" in pick and "(0.900)" in pick
        assert "8/10" in pick and "(0.800)" in pick
        push = next(l for l in lines if l.startswith("push"))
        assert "(1.000)" in push
        assert "-" in push  # push was never executed, only interpreted
        assert any(l.split() == ["variation", "VSR"] for l in lines)
        var = next(l for l in lines if l.startswith("grasp from left"))
        assert "7/10" in var and "(0.700)" in var


class TestBuildEvalReport:
    def outcomes(self):
        return [
            ScenarioOutcome(
                name="left grasp lands",
                passed=True,
                task_class="pick",
                variation="grasp from left",
                interpretation_checks=1,
                interpretation_passed=1,
                result_checks=1,
                result_passed=1,
                param_checks=1,
                param_passed=1,
            ),
            ScenarioOutcome(
                name="left grasp never checked its parameter",
                passed=True,
                task_class="pick",
                variation="grasp from left",
                interpretation_checks=1,
                interpretation_passed=1,
                result_checks=1,
                result_passed=1,
            ),
            ScenarioOutcome(
                name="misread sketch",
                passed=False,
                task_class="pick",
                interpretation_checks=1,
                interpretation_passed=0,
            ),
        ]

    def test_sections_fold_per_scenario(self):
        report = build_eval_report(SuiteReport(self.outcomes()))
        assert report.per_class_counts["interpretation"]["pick"] == {
            "correct": 2,
            "total": 3,
        }
        # execution counts whole scenarios, and only those that checked a result
        assert report.per_class_counts["execution"]["pick"] == {"correct": 2, "total": 2}
        assert report.isr == {"pick": "0.667"}
        assert report.tsr == {"pick": "1.000"}

    def test_variation_needs_its_parameter_checked(self):
        report = build_eval_report(SuiteReport(self.outcomes()))
        # scenario two declared a variation but never verified the varied
        # parameter, so it cannot count as a variation success
        assert report.per_class_counts["variation"]["grasp from left"] == {
            "correct": 1,
            "total": 2,
        }
        assert report.vsr == {"grasp from left": "0.500"}

    def test_summary_lines_mark_failures(self):
        lines = SuiteReport(self.outcomes()).summary_lines()
        assert lines[0].startswith("[pass] left grasp lands")
        assert lines[2].startswith("[FAIL] misread sketch")
        assert "scenarios 2/3" in lines[-1]


class TestLoadScenarios:
    def test_skips_blanks_and_comments(self, tmp_path):
        path = tmp_path / "suite.jsonl"
        path.write_text('# a comment\n\n{"name": "only one"}\n   \n', "utf-8")
        scenarios = load_scenarios(path)
        assert [s["name"] for s in scenarios] == ["only one"]

    def test_bad_line_reports_its_number(self, tmp_path):
        path = tmp_path / "suite.jsonl"
        path.write_text('{"name": "ok"}\n# fine\n{"name": broken\n', "utf-8")
        with pytest.raises(ValueError, match=r":3: bad scenario JSON"):
            load_scenarios(path)


class TestFeedbackTranslation:
    def recorder(self):
        runner = ScenarioRunner({"name": "wired", "steps": []})
        sent: list[tuple[str, dict]] = []
        runner._send = lambda t, p: sent.append((t, p))
        return runner, sent

    def test_resume_and_done_fold_to_the_done_flag(self):
        runner, sent = self.recorder()
        runner._op_feedback({"action": "resume"})
        runner._op_feedback({"action": "done"})
        assert sent == [("joystick", _JOYSTICK_DONE)] * 2

    def test_abort_is_a_rejection(self):
        runner, sent = self.recorder()
        runner._op_feedback({"action": "abort"})
        assert sent == [("confirm", {"accept": False})]

    def test_jog_fills_missing_axes_with_zero(self):
        runner, sent = self.recorder()
        runner._op_feedback({"action": "jog", "right_x": 0.4})
        assert sent == [
            ("joystick", {"left_y": 0.0, "right_x": 0.4, "right_y": 0.0, "done": False})
        ]

    def test_gripper_actions_pass_through(self):
        runner, sent = self.recorder()
        runner._op_feedback({"action": "grasp"})
        runner._op_feedback({"action": "release"})
        assert sent == [("grasp", {}), ("release", {})]

    def test_unknown_action_is_a_recorded_failure(self):
        runner, sent = self.recorder()
        with pytest.raises(_StepFailed):
            runner._op_feedback({"action": "teleport"})
        assert not sent
        assert runner.outcome.passed is False
        assert any("teleport" in f for f in runner.outcome.failures)


class TestRunnerBookkeeping:
    def test_task_class_from_scenario_key(self):
        runner = ScenarioRunner(
            {"name": "n", "task": "rotate", "variation": "quarter turn cw", "steps": []}
        )
        assert runner.outcome.task_class == "rotate"
        assert runner.outcome.variation == "quarter turn cw"

    def test_task_class_inferred_from_first_expectation(self):
        runner = ScenarioRunner(
            {
                "name": "n",
                "steps": [
                    {"op": "confirm"},
                    {"op": "expect_interpretation", "task": "place"},
                    {"op": "expect_interpretation", "task": "drop"},
                ],
            }
        )
        assert runner.outcome.task_class == "place"

    def test_unknown_op_fails_without_raising(self):
        outcome = ScenarioRunner(
            {"name": "n", "steps": [{"op": "warp_reality"}]}
        ).run()
        assert outcome.passed is False
        assert any("warp_reality" in f for f in outcome.failures)

    def test_expect_error_consumes_the_error(self):
        outcome = ScenarioRunner(
            {
                "name": "grasp outside a pause",
                "steps": [
                    {"op": "feedback", "action": "grasp"},
                    {"op": "expect_error", "code": "bad_phase"},
                ],
            }
        ).run()
        assert outcome.passed is True


class TestSuiteRobustness:
    def test_interpretation_miss_scores_and_suite_continues(self):
        report = build_eval_report(
            SuiteReport(
                [
                    ScenarioRunner(MISLABELED_PULL).run(),
                    ScenarioRunner(PICK).run(),
                ]
            )
        )
        assert report.isr == {"pull": "0.000", "pick": "1.000"}
        # the mislabeled scenario halted before any result check, so the
        # execution section never hears about it
        assert "pull" not in report.tsr
        assert report.tsr == {"pick": "1.000"}
        assert report.skipped == []

    def test_abort_mid_plan_reports_cancellation(self):
        outcome = ScenarioRunner(
            {
                "name": "operator aborts at the first pause",
                "steps": [
                    {"op": "sketch", "shape": "circle", "on": "cube_red", "radius": 12.0},
                    {"op": "expect_interpretation", "task": "pick"},
                    {"op": "confirm"},
                    {"op": "ticks", "n": 200},
                    {"op": "feedback", "action": "abort"},
                    {
                        "op": "expect_result",
                        "success": False,
                        "reason": "cancelled by operator",
                    },
                ],
            }
        ).run()
        assert outcome.passed, outcome.failures

    def test_reports_are_byte_identical_across_runs(self, tmp_path):
        path = tmp_path / "suite.jsonl"
        lines = ["# tiny determinism suite"]
        lines.append(json.dumps(PICK))
        lines.append(json.dumps(MISLABELED_PULL))
        path.write_text("\n".join(lines) + "\n", "utf-8")
        first = run_headless(path)
        second = run_headless(path)
        assert first.to_json() == second.to_json()
        assert json.loads(first.to_json())["isr"] == {"pick": "1.000", "pull": "0.000"}
