import math

import numpy as np
import pytest

import patrolsim as ps


def test_floorplan_basics():
    plan = ps.FloorPlan.office()
    assert plan.n_zones == 6
    assert plan.n_tiles == 12
    assert plan.zone_center(0) == (6.0, 9.0)
    assert plan.tile_index(6, 9) == 0
    assert plan.tile_index(5, 2) == -1  # outside free space


def test_reward_indicator():
    plan = ps.FloorPlan.office()
    assert ps.reward(plan, [(6.0, 9.0)]) == [1, 0, 0, 0, 0, 0]
    assert ps.reward(plan, [(1.0, 6.0)]) == [0] * 6
    # max over agents saturates at 1
    assert ps.reward(plan, [(6.0, 9.0), (6.2, 9.1)]) == [1, 0, 0, 0, 0, 0]


def test_line_of_sight_and_step():
    plan = ps.FloorPlan.office()
    assert plan.line_of_sight((1, 8), (7, 13))
    assert not plan.line_of_sight((6, 9), (13, 9))

    pos = [(6.0, 9.0)]
    for _ in range(200):
        pos = ps.step(plan, pos, [4], 0.5)
    x, y = pos[0]
    cx, cy = plan.zone_center(4)
    assert math.hypot(x - cx, y - cy) < 1e-6


def test_nbinom_cdf_values():
    assert ps.nbinom_cdf(1, 0.5, 1) == pytest.approx(0.5)
    assert ps.nbinom_cdf(2, 0.5, 2) == pytest.approx(0.25)
    assert ps.nbinom_cdf(2, 0.5, 1) == 0.0


def test_dual_update_projection():
    out = ps.dual_update([1.0], [0.0], 0.01, 0.5, 100, [0.5])
    assert out[0] == pytest.approx(1.24)
    clamped = ps.dual_update([0.1], [100.0], 0.01, 0.5, 100, [0.5])
    assert clamped[0] == 0.0
    assert ps.norm_bound(0.01, 0.5, 6) == pytest.approx(50 * math.sqrt(6.0))


def test_oracle_actions_top_n():
    plan = ps.FloorPlan.office()
    acts = ps.oracle_actions(plan, [3, 2, 1, 0, 0, 0], [(2, 6), (10, 6), (22, 6)])
    assert sorted(acts) == [0, 1, 2]


def test_run_oracle_and_determinism():
    kwargs = dict(horizon=1000, seed=7)
    a = ps.run_oracle(**kwargs)
    b = ps.run_oracle(**kwargs)
    assert a["multiplier_bound_ok"]
    avg = a["running_average"]
    assert avg.shape == (1000, 6)
    assert np.all(avg >= 0.0) and np.all(avg <= 1.0)
    np.testing.assert_array_equal(avg, b["running_average"])
    np.testing.assert_array_equal(a["local_multipliers"], b["local_multipliers"])
    assert a["occupancy"].sum() == 5 * 1000


def test_verify_dissemination_bound():
    res = ps.verify_dissemination(path_nodes=3, p=0.5, trials=3000, t0=50, seed=3)
    assert res["holds"]
    assert res["bound"] == pytest.approx(4.0)
    assert res["arrival_law_consistent"]
    assert res["exact_cdf"][2] == pytest.approx(0.25)


def test_feasibility_margin_dict():
    tm = ps.feasibility_margin(0.01, 0.5, 100, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6], 1, 1.0)
    assert tm["delta"] == pytest.approx(0.4 - 6 * 0.01)
    assert tm["margin"] == pytest.approx(math.sqrt(0.06))


def test_config_error_maps_to_python():
    with pytest.raises(ps.PatrolConfigError):
        ps.run_oracle(thresholds=[1.5] * 6, horizon=100)
