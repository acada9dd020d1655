import random
from fractions import Fraction

import numpy as np
import pytest

from fdcolor.dependence import check_k_dependence_exact, check_properness
from fdcolor.exact import (
    ExactCapError,
    ExactJoint,
    LineJoint,
    exact_pipeline_distribution,
    random_test_vectors,
)
from fdcolor.graph import build_graph, cycle_graph, generate, path_graph
from fdcolor.insertion import exact_line_distribution
from fdcolor.kernels import BatchSampler
from fdcolor.pipeline import unflatten

TRIANGLE = build_graph([(0, 1), (1, 2), (2, 0)], 3)
STAR = build_graph([(0, 1), (0, 2), (0, 3)], 4)


def test_single_vertex_uniform():
    g = build_graph([], 1, degree_bound=2)
    j = ExactJoint(g, "invariant")
    assert j.total_mass() == 1
    table = j.joint_table()
    assert len(table) == 27 and set(table.values()) == {Fraction(1, 27)}


def test_single_vertex_no_coordinates():
    j = ExactJoint(build_graph([], 1), "fiid")
    assert j.arity == 0 and j.total_mass() == 1


def test_single_edge_invariant_support():
    table = ExactJoint(path_graph(2), "invariant").joint_table()
    assert sum(table.values()) == 1
    assert len(table) == 6 and all(a != b for a, b in table)
    assert set(table.values()) == {Fraction(1, 6)}


def test_single_edge_fiid_uniform_on_proper_pairs():
    table = ExactJoint(path_graph(2), "fiid").joint_table()
    assert len(table) == 12 and set(table.values()) == {Fraction(1, 12)}


@pytest.mark.parametrize("variant", ["invariant", "fiid"])
@pytest.mark.parametrize("g", [TRIANGLE, STAR, path_graph(4), cycle_graph(4)], ids=["tri", "star", "p4", "c4"])
def test_mass_one_and_support_proper(g, variant):
    j = ExactJoint(g, variant)
    assert j.total_mass() == 1
    for u, v in g.edges():
        assert j.prob_equal(u, v) == 0


def test_triangle_joint_support_proper():
    j = ExactJoint(TRIANGLE, "invariant")
    table = j.joint_table(cap=10**6)
    assert sum(table.values()) == 1
    for codes in table:
        tuples = [unflatten(c, 3, 3) for c in codes]
        assert check_properness(TRIANGLE, tuples)


def test_coordinate_marginal_consistent():
    j = ExactJoint(STAR, "fiid")
    full = j.marginal((1,))
    part = j.marginal((1,), coords=(0, 5))
    assert np.array_equal(full.sum(axis=(1, 2, 3, 4)), part)
    assert part.sum() == 1


def test_contract_matches_dense():
    j = ExactJoint(path_graph(3), "invariant")
    rng = random.Random(0)
    vec = random_test_vectors((0, 2), j.arity, j.q, rng, bits=8)
    dense = j.marginal((0, 2))
    expect = Fraction(0)
    for idx in np.ndindex(dense.shape):
        w = 1
        for s, v in enumerate((0, 2)):
            for c in range(j.arity):
                w *= int(vec[v][c, idx[s * j.arity + c]])
        expect += dense[idx] * w
    assert j.product_moment(vec) == expect


def test_p4_far_ends_factor():
    j = ExactJoint(path_graph(4), "invariant")
    rep = check_k_dependence_exact(j, 2)
    assert [(r.A, r.B, r.discrepancy) for r in rep.records] == [((0,), (3,), 0)]


def test_p4_distance_two_dependent():
    # measured with the oracle: sites two apart are not independent
    rep = check_k_dependence_exact(ExactJoint(path_graph(4), "invariant"), 1)
    assert rep.verdict == "FAIL"
    assert rep.max_discrepancy == Fraction(1, 9720)


def test_identity_test_agrees_with_dense():
    j = ExactJoint(path_graph(4), "invariant")
    dense = check_k_dependence_exact(j, 1)
    probe = check_k_dependence_exact(j, 1, dense_cap=1)
    assert {r.method for r in probe.records} == {"identity"}
    assert [r.independent for r in dense.records] == [r.independent for r in probe.records]


def test_cap_error_has_cost():
    with pytest.raises(ExactCapError, match="neighbor-choice"):
        exact_pipeline_distribution(path_graph(7), "fiid")
    with pytest.raises(ExactCapError):
        ExactJoint(STAR, "fiid").marginal((0, 1, 2))


def test_line_joint_adapter():
    rep = check_k_dependence_exact(LineJoint(exact_line_distribution("path", 5, 4)), 1)
    assert rep.verdict == "PASS" and rep.max_discrepancy == 0 and rep.tested
    bad = check_k_dependence_exact(LineJoint(exact_line_distribution("path", 5, 3)), 1)
    assert bad.max_discrepancy == Fraction(1, 45)


@pytest.mark.parametrize("variant", ["invariant", "fiid"])
def test_sampler_matches_oracle_on_triangle(variant):
    j = ExactJoint(TRIANGLE, variant)
    law = j.marginal((0,), coords=(0, 1, 2))
    sampler = BatchSampler(TRIANGLE, variant)
    n = 20000
    flat = sampler.flattened(sampler.sample(2, n))[:, 0]
    counts = np.bincount(flat, minlength=law.size)
    p = np.array([float(x) for x in law.flat])
    z = (counts - n * p) / np.sqrt(n * p * (1 - p))
    assert np.abs(z).max() < 4.5
