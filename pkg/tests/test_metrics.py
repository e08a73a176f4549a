import random

import pytest

from explorebench import agents, metrics, oracle
from explorebench.episode import History, append_history, run_episode
from explorebench.worldgen import generate_treasure_rooms


def test_decompose_identity_exact():
    report = metrics.decompose(20, 15, 9)
    assert report.total_gap == report.explore_gap + report.exploit_gap
    assert report.total_gap == 11
    assert report.explore_gap == 5
    assert report.exploit_gap == 6
    assert report.norm_total == pytest.approx(11 / 20)


def test_decompose_zero_r_max_safe():
    report = metrics.decompose(0, 0, 0)
    assert report.norm_total == 0.0


def test_decompose_rejects_bad_ordering():
    with pytest.raises(metrics.MetricError):
        metrics.decompose(10, 12, 5)  # exploit above max
    with pytest.raises(metrics.MetricError):
        metrics.decompose(10, 5, 7)  # agent above exploit


def test_table_fixture_first_model_row():
    # last-episode normalized gaps 0.80 = 0.25 + 0.55; fractions 0.31 / 0.69
    report = metrics.decompose(100, 75, 20)
    assert report.norm_total == pytest.approx(0.80)
    assert report.norm_explore == pytest.approx(0.25)
    assert report.norm_exploit == pytest.approx(0.55)
    assert report.norm_exploit / report.norm_total == pytest.approx(0.69, abs=0.005)
    assert report.norm_explore / report.norm_total == pytest.approx(0.31, abs=0.005)


def test_table_fixture_random_walk_row():
    # 0.85 = 0.53 + 0.32; fractions 0.62 / 0.38
    report = metrics.decompose(100, 47, 15)
    assert report.norm_total == pytest.approx(0.85)
    assert report.norm_explore == pytest.approx(0.53)
    assert report.norm_exploit == pytest.approx(0.32)
    assert report.norm_explore / report.norm_total == pytest.approx(0.62, abs=0.005)
    assert report.norm_exploit / report.norm_total == pytest.approx(0.38, abs=0.005)


def test_mean_gap_report_averages_per_episode():
    reports = [metrics.decompose(10, 8, 4), metrics.decompose(10, 10, 10)]
    mean = metrics.mean_gap_report(reports)
    assert mean.total_gap == pytest.approx(3.0)
    assert mean.exploit_gap == pytest.approx(2.0)
    assert mean.explore_gap == pytest.approx(1.0)
    assert mean.scope == "mean_over_episodes"
    with pytest.raises(metrics.MetricError):
        metrics.mean_gap_report([])


def _history(world, seed, episodes=5):
    policy = agents.RandomWalkPolicy(seed)
    history = History()
    for _ in range(episodes):
        history = append_history(history, run_episode(world, policy, history))
    return history


def test_coverage_bounds_and_monotonicity():
    world = generate_treasure_rooms(13, (4, 4), p_drop=0.1)
    history = _history(world, 3, episodes=6)
    prev = 0.0
    for i in range(1, len(history) + 1):
        prefix = History(history.trajectories[:i])
        cov = metrics.coverage(prefix, world)
        assert 0 < cov <= 100
        assert cov >= prev
        prev = cov


def test_redundancy_closed_forms():
    world = generate_treasure_rooms(13, (4, 4), p_drop=0.1)
    history = _history(world, 3, episodes=1)
    r = metrics.redundancy(history)
    assert 0 <= r < 1
    # duplicating the whole episode doubles every (state, action) pair
    doubled = History(
        history.trajectories
        + (
            type(history.trajectories[0])(
                2, history.trajectories[0].events, history.trajectories[0].final_observation
            ),
        )
    )
    pairs = len(history.trajectories[0].events)
    unique = pairs * (1 - metrics.redundancy(history))
    assert metrics.redundancy(doubled) == pytest.approx(1 - unique / (2 * pairs))
    with pytest.raises(metrics.MetricError):
        metrics.redundancy(History())


def test_sample_efficiency_first_90pct_index():
    assert metrics.sample_efficiency([0, 0, 5, 9, 10, 10]) == 4
    assert metrics.sample_efficiency([10]) == 1
    assert metrics.sample_efficiency([0, 0, 0]) == 1  # all-zero series: max is 0
    with pytest.raises(metrics.MetricError):
        metrics.sample_efficiency([])


def test_summarize_run_consistency():
    world = generate_treasure_rooms(17, (4, 4), p_drop=0.1)
    history = _history(world, 9, episodes=5)
    summary = metrics.summarize_run(history, world, "rw", "task_oriented", 9)
    row = summary.to_row()
    assert list(row) == metrics.SUMMARY_COLUMNS
    assert row["episodes"] == 5
    assert row["r_max"] == world.r_max
    assert 0 <= row["coverage_pct"] <= 100
    assert 0 <= row["redundancy"] < 1
    assert 1 <= row["sample_efficiency"] <= row["interactions"]
    # identity holds on emitted normalized gaps
    assert summary.last.norm_total == pytest.approx(
        summary.last.norm_explore + summary.last.norm_exploit
    )
    assert summary.mean.norm_total == pytest.approx(
        summary.mean.norm_explore + summary.mean.norm_exploit
    )
    series = oracle.exploit_series(history, world, "per_episode")
    assert row["exploit_return_final"] == series[-1]


def test_aggregate_groups_and_fractions():
    world = generate_treasure_rooms(17, (4, 4), p_drop=0.1)
    rows = []
    for seed in (1, 2, 3):
        history = _history(world, seed, episodes=4)
        rows.append(
            metrics.summarize_run(history, world, "rw", "task_oriented", seed).to_row()
        )
    out = metrics.aggregate(rows, ["model", "instruction", "env_kind"])
    assert len(out) == 1
    entry = out[0]
    assert entry["n"] == 3
    for scope in ("last", "mean"):
        if entry[f"{scope}_total_gap"] > 0:
            assert entry[f"{scope}_exploit_frac"] + entry[
                f"{scope}_explore_frac"
            ] == pytest.approx(1.0)
    assert entry["coverage_pct_se"] >= 0
    with pytest.raises(metrics.MetricError):
        metrics.aggregate([], ["model"])


def test_aggregate_separates_groups():
    world = generate_treasure_rooms(17, (4, 4), p_drop=0.1)
    rows = []
    for model in ("a", "b"):
        history = _history(world, 1, episodes=3)
        rows.append(
            metrics.summarize_run(history, world, model, "task_oriented", 1).to_row()
        )
    out = metrics.aggregate(rows, ["model"])
    assert [e["model"] for e in out] == ["a", "b"]
