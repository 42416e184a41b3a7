import numpy as np

import pytest

from mixreg.cli.scenario import scenario_from_document
from mixreg.cli.trials import (
    TOOL_NAME,
    diagnostics_summary,
    initial_state,
    resolve_jobs,
    run_trial,
    run_trials,
    summarise_trials,
)
from mixreg.numeric.data_generation import sample_dataset


def _scenario(**overrides):
    document = {
        "name": "small",
        "truth": {
            "generator": "orthogonal-scaled",
            "k": 2,
            "d": 3,
            "r": 2.0,
            "sigma": 0.1,
        },
        "init": {"beta_radius": 0.2, "seed": 40},
        "n": 600,
        "trials": 3,
        "base_seed": 7,
        "em": {"max_iters": 5},
    }
    document.update(overrides)
    return scenario_from_document(document)


def test_run_trial_is_seeded():
    scenario = _scenario()
    first = run_trial(scenario, 1)
    second = run_trial(scenario, 1)
    assert first.trial == 1
    np.testing.assert_array_equal(
        first.trace.final_state.betas, second.trace.final_state.betas
    )
    assert first.final_matched_error == second.final_matched_error
    other = run_trial(scenario, 2)
    assert other.final_matched_error != first.final_matched_error


def test_run_trial_records_initial_conditions():
    scenario = _scenario()
    result = run_trial(scenario, 0)
    assert result.max_beta_errs.size == result.trace.iterations_used + 1
    np.testing.assert_allclose(result.max_beta_errs[0], 0.2, rtol=1e-12)
    np.testing.assert_allclose(result.condition_report.init_beta_radius, 2.0)
    assert result.oracle_error > 0.0


def test_run_trial_zero_iterations_reports_init_only():
    scenario = _scenario(em={"max_iters": 0}, trials=1)
    summary = summarise_trials(scenario, run_trials(scenario))
    assert summary["iterations"] == [0]
    np.testing.assert_allclose(summary["per_iteration"]["median"], [0.2], rtol=1e-12)
    np.testing.assert_allclose(summary["final_matched_error"], [0.2], rtol=1e-12)


def test_initial_state_random_kind():
    scenario = _scenario(init={"kind": "random", "seed": 3})
    data = sample_dataset(scenario.truth, scenario.n, scenario.dataset_seed(0))
    first = initial_state(scenario, data, 0)
    again = initial_state(scenario, data, 0)
    np.testing.assert_array_equal(first.betas, again.betas)
    np.testing.assert_allclose(first.weights, [0.5, 0.5])


@pytest.mark.parametrize("estimator", ["em-split", "em-pooled", "am"])
def test_run_trials_every_estimator(estimator):
    scenario = _scenario(estimator=estimator, T=3)
    results = run_trials(scenario)
    assert [result.trial for result in results] == [0, 1, 2]
    for result in results:
        assert result.trace.estimator == estimator
        assert result.final_matched_error < 0.2
    if estimator == "em-split":
        assert results[0].trace.batch_sizes == (200, 200, 200)


def test_run_trials_in_worker_processes_match_serial():
    scenario = _scenario()
    serial = summarise_trials(scenario, run_trials(scenario, jobs=1))
    parallel = summarise_trials(scenario, run_trials(scenario, jobs=2))
    assert parallel == serial


def test_resolve_jobs():
    assert resolve_jobs(3) == 3
    assert resolve_jobs(0) >= 1
    with pytest.raises(ValueError, match="--jobs must be >= 0"):
        resolve_jobs(-1)


def test_summarise_trials_layout():
    scenario = _scenario()
    summary = summarise_trials(scenario, run_trials(scenario))
    assert summary["tool"] == TOOL_NAME
    assert summary["scenario_id"] == "small"
    assert summary["scenario"] == scenario.document
    assert summary["trials"] == 3
    assert len(summary["final_matched_error"]) == 3
    assert summary["median_final_matched_error"] == float(
        np.median(summary["final_matched_error"])
    )
    per_iteration = summary["per_iteration"]
    assert len(per_iteration["median"]) == max(summary["iterations"]) + 1
    assert all(
        q25 <= median <= q75
        for q25, median, q75 in zip(
            per_iteration["q25"], per_iteration["median"], per_iteration["q75"]
        )
    )
    assert summary["condition_report"]["verdict"] == "satisfied"
    assert summary["condition_report"]["satisfied"] == 3
    assert summary["degenerate_count"] == sum(summary["degenerate_counts"])
    assert "diagnostics" not in summary


def test_summarise_trials_violated_conditions():
    # bound c R_min / (k log k) = 0.5 * 2.83 / 1.39, about 1.02
    scenario = _scenario(init={"beta_radius": 1.5, "seed": 0}, em={"max_iters": 1})
    summary = summarise_trials(scenario, run_trials(scenario))
    assert summary["condition_report"]["verdict"] == "violated"
    assert summary["condition_report"]["first_trial"]["satisfied"] is False


def test_diagnostics_summary():
    scenario = _scenario(diagnostics={"n_mc": 2000, "seed": 5})
    diagnostics = diagnostics_summary(scenario)
    assert set(diagnostics) == {"events", "em_operator_terms"}
    assert diagnostics["events"]["n_mc"] == 2000
    assert diagnostics["events"]["origins"] == [1]
    assert diagnostics_summary(_scenario()) is None


def test_diagnostics_summary_skips_noiseless_truth(caplog):
    truth = {"generator": "orthogonal-scaled", "k": 2, "d": 3, "r": 1.0}
    scenario = _scenario(truth=truth, diagnostics={"n_mc": 100})
    assert diagnostics_summary(scenario) is None
    assert "diagnostics need sigma > 0" in caplog.text


def test_diagnostics_summary_samples_data_for_random_init_only(monkeypatch):
    sampled = []

    def recording_sample_dataset(truth, n, seed):
        sampled.append(n)
        return sample_dataset(truth, n, seed)

    monkeypatch.setattr("mixreg.cli.trials.sample_dataset", recording_sample_dataset)
    diagnostics = {"n_mc": 500, "seed": 5}
    assert diagnostics_summary(_scenario(diagnostics=diagnostics)) is not None
    assert sampled == []
    random_scenario = _scenario(
        init={"kind": "random", "seed": 3}, diagnostics=diagnostics
    )
    assert diagnostics_summary(random_scenario) is not None
    assert sampled == [600]
