"""
STOL - transfer 실험 테스트
"""

import statistics

import pytest

from stol.experiment import METHODS, RunSummary, run_experiment, run_trial, summarize
from stol.models import TrainConfig, TrainReport

# 기본 설정 (n_source=200, l=10, n_test=200, C=100, seed 0..10) pilot 실행의 관측 median
PILOT_MEDIANS = {
    "source_only": 0.5931,
    "target_only": 0.0171,
    "adapted": 0.0386,
    "pooled": 0.2619,
}
MEDIAN_SLACK = 0.02


def assert_run_invariants(run, eps_cp):
    assert run.converged and 1 <= run.iterations <= 1000
    assert -1e-6 <= run.min_gap and run.max_gap <= 1e-5 * (1 + run.C)
    assert run.max_dual_drop <= 1e-9
    assert run.train_loss <= run.final_xi + eps_cp + 1e-12


class TestRunSummary:

    def test_from_report(self):
        cfg = TrainConfig(C=10.0)
        report = TrainReport(
            iterations=3, dual_objective_trace=[0.1, 0.3, 0.25], duality_gap_trace=[2e-7, -1e-8],
            final_primal_objective=0.25, final_dual_objective=0.25, final_xi=0.05, train_loss=0.0,
            terminated_by="converged", working_set_size=2, labeled_count=4, config=cfg)
        run = RunSummary.from_report(report, [3.0, 4.0])
        assert run.converged and run.C == 10.0
        assert (run.min_gap, run.max_gap) == (-1e-8, 2e-7)
        assert run.max_dual_drop == pytest.approx(0.05)
        assert run.weight_norm == 5.0

    def test_no_solve_has_zero_gap(self):
        report = TrainReport(
            iterations=1, dual_objective_trace=[], duality_gap_trace=[], final_primal_objective=0.0,
            final_dual_objective=0.0, final_xi=0.0, train_loss=0.0, terminated_by="converged",
            working_set_size=0, labeled_count=1, config=TrainConfig())
        run = RunSummary.from_report(report, [0.0])
        assert (run.min_gap, run.max_gap, run.max_dual_drop) == (0.0, 0.0, 0.0)


class TestTrial:

    def test_small_trial_structure(self):
        cfg = TrainConfig(C=10.0)
        result = run_trial(0, n_source=20, l=4, n_test=20, cfg=cfg)
        assert set(result.errors) == set(METHODS)
        assert set(result.runs) == set(METHODS)
        for name in METHODS:
            assert 0.0 <= result.errors[name] <= 1.0
            assert_run_invariants(result.runs[name], cfg.eps_cp)

    def test_trial_is_deterministic(self):
        cfg = TrainConfig(C=10.0)
        a = run_trial(3, n_source=15, l=3, n_test=10, cfg=cfg)
        b = run_trial(3, n_source=15, l=3, n_test=10, cfg=cfg)
        assert a == b

    def test_summarize_takes_medians(self):
        trials = [run_trial(s, n_source=10, l=3, n_test=10, cfg=TrainConfig(C=5.0)) for s in range(3)]
        medians = summarize(trials)
        for name in METHODS:
            assert medians[name] == statistics.median(t.errors[name] for t in trials)


@pytest.mark.slow
def test_transfer_medians_at_defaults():
    result = run_experiment(range(11), n_source=200, l=10, n_test=200)
    medians = result["medians"]
    for name in METHODS:
        assert medians[name] <= PILOT_MEDIANS[name] + MEDIAN_SLACK
    assert medians["adapted"] <= medians["source_only"]
    eps_cp = TrainConfig().eps_cp
    for trial in result["trials"]:
        for name in METHODS:
            assert_run_invariants(RunSummary(**trial["runs"][name]), eps_cp)
