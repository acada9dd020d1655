import numpy as np
import pytest

from fdcolor.graph import generate, path_graph
from fdcolor.montecarlo import (
    WindowShrinkWarning,
    bootstrap_null,
    check_k_dependence_mc,
    choose_pairs,
    sample_colors,
    tv_independence,
)


def test_tv_of_independent_and_dependent():
    rng = np.random.default_rng(0)
    a = rng.integers(0, 4, 20000)
    b = rng.integers(0, 4, 20000)
    assert tv_independence(a, b, 4, 4) < 0.02
    assert tv_independence(a, a, 4, 4) == pytest.approx(0.75, abs=0.01)
    null = bootstrap_null(a, b, 4, 4, 50, rng)
    assert null.shape == (50,) and (null >= 0).all()


def test_iid_control_passes():
    g = generate("torus:4x4")
    rep = check_k_dependence_mc(g, "iid", 1, 6000, seed=3)
    assert rep.verdict == "PASS"
    assert rep.control_detected is False
    assert all(r.distance > 1 for r in rep.records)


def test_adjacent_dependence_detected():
    rep = check_k_dependence_mc(path_graph(8), "fiid", 0, 10000, seed=1)
    assert rep.verdict == "FAIL"
    assert rep.control_detected


def test_small_budget_shrinks_windows():
    with pytest.warns(WindowShrinkWarning):
        rep = check_k_dependence_mc(generate("torus:4x4"), "fiid", 1, 1000, seed=0, pairs=6)
    assert rep.warnings
    assert all(len(r.A) == 1 and len(r.B) == 1 for r in rep.records)


def test_too_few_trials():
    with pytest.raises(ValueError):
        check_k_dependence_mc(path_graph(5), "fiid", 1, 999, seed=0)


def test_choose_pairs_distances():
    import random

    g = generate("torus:6x6")
    pairs = choose_pairs(g, 2, 10, random.Random(0))
    assert len(pairs) == 10
    assert all(d > 2 for _, _, d in pairs)
    assert any(d == 3 for _, _, d in pairs)


def test_sampling_independent_of_jobs():
    g = generate("cycle:7")
    one = sample_colors(g, "fiid", 5, 400, jobs=1)
    two = sample_colors(g, "fiid", 5, 400, jobs=2)
    assert np.array_equal(one, two)


def test_mc_report_deterministic():
    g = generate("tree:3:2")
    a = check_k_dependence_mc(g, "invariant", 2, 3000, seed=9, pairs=6).as_dict()
    b = check_k_dependence_mc(g, "invariant", 2, 3000, seed=9, pairs=6).as_dict()
    assert a == b
