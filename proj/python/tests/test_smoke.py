import math

import pytest

import mdpsynth

FIG1 = """\
mdp 1
discount 0.5
initial s1
targets t
state s1
  action loop
    -> s1 1
  action go cost 1
    -> t 1
state t
  action stay
    -> t 1
"""

TWOPATH = """\
mdp 1
discount 0.5
initial s1
targets t
state s1
  action a cost 2
    -> t 1
  action b cost 1
    -> s2 1
state s2
  action c cost 1
    -> t 1
state t
  action stay
    -> t 1
"""


def test_parse_roundtrip():
    mdp = mdpsynth.parse_mdp(FIG1)
    assert mdp.num_states == 2
    assert mdp.state_names == ["s1", "t"]
    assert mdpsynth.validate(mdp) == []
    again = mdpsynth.parse_mdp(mdpsynth.serialize_mdp(mdp))
    assert again.state_names == mdp.state_names
    assert again.discount == mdp.discount


def test_max_reach_and_values():
    mdp = mdpsynth.parse_mdp(TWOPATH)
    ra = mdpsynth.max_reach(mdp)
    assert ra["x"] == pytest.approx([1.0, 1.0, 1.0], abs=1e-9)
    assert ra["tmin"] == [1, 2, 2]
    values = mdpsynth.optimal_values(mdp)
    assert values["y"] == pytest.approx([1.5, 1.0, 0.0], abs=1e-9)


def test_policy_evaluation():
    mdp = mdpsynth.parse_mdp(FIG1)
    delta = 0.1
    policy = [[1.0 - delta, delta], [1.0]]
    assert mdpsynth.reach_prob(mdp, policy) == pytest.approx(1.0, abs=1e-9)
    expected = delta / (1.0 - 0.5 * (1.0 - delta))
    assert mdpsynth.evaluate_cost(mdp, policy) == pytest.approx(expected, abs=1e-9)


def test_eps_synthesis():
    mdp = mdpsynth.parse_mdp(FIG1)
    report = mdpsynth.synth_eps_optimal(mdp, eps=0.01)
    assert report["reach"] == pytest.approx(1.0, abs=1e-6)
    assert report["cost"] <= 0.01 + 1e-9
    assert report["infimum"] == pytest.approx(0.0, abs=1e-12)


def test_existence():
    assert not mdpsynth.check_existence(mdpsynth.parse_mdp(FIG1))["exists"]
    cert = mdpsynth.check_existence(mdpsynth.parse_mdp(TWOPATH))
    assert cert["exists"]
    assert cert["infimum"] == pytest.approx(1.5, abs=1e-9)


def test_exact_and_approx_agree_on_twopath():
    mdp = mdpsynth.parse_mdp(TWOPATH)
    exact = mdpsynth.solve_exact(mdp)
    approx = mdpsynth.synth_approx(mdp)
    assert exact["cost"] == pytest.approx(1.5, abs=1e-6)
    assert approx["cost"] == pytest.approx(1.5, abs=1e-6)
    assert exact["reach"] == pytest.approx(1.0, abs=1e-6)
    oracle = mdpsynth.brute_force_oracle(mdp)
    assert oracle["best_cost"] == pytest.approx(exact["cost"], abs=1e-6)


def test_simulation_is_deterministic():
    mdp = mdpsynth.parse_mdp(TWOPATH)
    policy = [[0.0, 1.0], [1.0], [1.0]]
    a = mdpsynth.simulate(mdp, policy, episodes=2000, horizon=50, seed=7)
    b = mdpsynth.simulate(mdp, policy, episodes=2000, horizon=50, seed=7)
    assert a == b
    assert a["reach"] == pytest.approx(1.0, abs=1e-12)
    assert a["cost"] == pytest.approx(1.5, abs=1e-12)


def test_grid_mdp():
    layout = "\n".join(
        [
            "grid 1",
            "slip 0.9",
            "discount 0.9",
            "T m .",
            "h # .",
            "S . .",
        ]
    )
    mdp = mdpsynth.grid_mdp(layout)
    assert mdpsynth.validate(mdp) == []
    report = mdpsynth.synth_approx(mdp)
    assert report["reach"] == pytest.approx(1.0, abs=1e-6)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
