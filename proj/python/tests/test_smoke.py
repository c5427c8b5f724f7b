import math

import numpy as np
import pytest

import optstop


def test_config_defaults_and_hash():
    cfg = optstop.resolve_config()
    assert cfg["bags"] == "10"
    assert cfg["model"] == "put"
    assert optstop.config_hash({"out": "a"}) == optstop.config_hash({"out": "b"})
    assert optstop.config_hash({"seed_test": 5}) != optstop.config_hash()


def test_bad_config_raises():
    with pytest.raises(ValueError):
        optstop.resolve_config({"sigma": "abc"})
    with pytest.raises(ValueError):
        optstop.resolve_config({"model": "max_call", "dim": 2, "ls": "true"})


def test_simulate_shape_and_determinism():
    fields = {"k_train": 20, "steps": 5, "sigma": 0.0, "drift": 0.05}
    a = optstop.simulate(fields)
    assert a.shape == (20, 6, 1)
    assert np.allclose(a[:, 5, 0], 100 * math.exp(0.05), rtol=1e-14)
    b = optstop.simulate({"k_train": 20, "steps": 5})
    assert np.array_equal(b, optstop.simulate({"k_train": 20, "steps": 5}))


def test_reward_examples():
    assert optstop.reward("put", 0, [85.0]) == 15.0
    assert optstop.reward("max_call", 0, [110.0, 90.0], steps=9, maturity=3) == 10.0


def test_cross_example_split_is_a_leaf():
    pts = np.array([[2, 6], [5, 5], [3, 3], [6, 2]], dtype=float)
    d = optstop.delta_split(pts, np.array([2, -0.5, -0.5, 2]))
    assert d["is_leaf"] and d["weight"] == 0
    p = optstop.delta_split(pts, np.array([2, -0.5, -0.5, 2]), splitter="prototype")
    assert not p["is_leaf"]


def test_grow_and_predict():
    tree = optstop.grow(np.array([[1.0], [2.0], [3.0], [4.0]]), np.array([-1.0, -1, 1, 1]),
                        min_node_size=1)
    assert tree.predict([2.0]) == 1
    assert tree.predict([2.0001]) == 0
    assert tree.leaf_count == 2


def test_small_experiment():
    out = optstop.run_experiment({"k_train": 2000, "k_test": 2000, "steps": 10})
    kinds = {r["kind"]: r for r in out["reports"]}
    assert {"v_train", "v_test", "v_max", "ls_train", "ls_test", "european_bs"} <= set(kinds)
    assert kinds["v_test"]["value"] <= kinds["v_max"]["value"]
    assert 4.0 < kinds["v_test"]["value"] < 8.0


def test_oracle_two_state_example():
    paths = np.array([[[95.0], [100.0]], [[95.0], [92.0]]])
    fields = {"steps": 1, "rate": 0.0}
    assert optstop.oracle(paths, fields)["value"] == 5.0
    assert optstop.oracle(paths, fields, brute_force=True)["value"] == 5.0
    assert optstop.v_max(paths, fields)["value"] == 6.5


def test_european_put():
    assert optstop.european_put_price(100, 100, 0.05, 0.05, 0.2, 1.0) == pytest.approx(5.573526, abs=1e-6)
