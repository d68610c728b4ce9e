import math

import pytest

import apsel


def test_lowest_mcs_timing():
    assert apsel.frame_tx_time(8.6, 6.0) == pytest.approx(1599e-6, rel=1e-12)
    assert apsel.required_airtime(4.0, 8.6, 6.0) == pytest.approx(0.5555, rel=1e-12)


def test_path_loss_and_rates():
    assert apsel.path_loss(10.0, walls_per_m=0.0) == pytest.approx(74.7267)
    assert apsel.select_rates(-90.0) is None
    data, legacy = apsel.select_rates(-68.0)
    assert data == pytest.approx(51.6)
    assert legacy == pytest.approx(24.0)


def test_toy_enumeration():
    table = apsel.enumerate()
    assert len(table) == 4
    winners = [row for row in table if row["all_satisfied"]]
    assert [w["associations"] for w in winners] == [[0, 1]]
    both_first = next(r for r in table if r["associations"] == [0, 0])
    assert both_first["throughput_mbps"][0] == pytest.approx(7.59, abs=0.01)


def test_small_run():
    summary = apsel.run({"rounds": 10, "seeds": 3, "parallelism": 1})
    assert summary["failures"] == 0
    assert len(summary["seed_final_means"]) == 3
    assert all(0.0 < v <= 1.0 for v in summary["seed_final_means"])
    assert len(summary["mean_per_round"]) == 10
    assert not math.isnan(summary["final_mean_normalized_throughput"])


def test_preset_and_errors():
    assert "fig4-grid-clusters" in apsel.preset_names()
    res = apsel.run_preset("toy")
    assert set(res) == {"ss", "eps_greedy", "eps_sticky"}
    with pytest.raises(ValueError, match="did you mean"):
        apsel.resolve_config({"epsilonn": 0.1})
    with pytest.raises(ValueError):
        apsel.run({"rounds": 0})
