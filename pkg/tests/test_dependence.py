import pytest

from fdcolor.dependence import (
    DependenceReport,
    PairRecord,
    PropernessError,
    check_k_dependence_exact,
    check_properness,
    smallest_passing_k,
    window_pairs,
)
from fdcolor.exact import ExactJoint
from fdcolor.graph import build_graph, path_graph

TRIANGLE = build_graph([(0, 1), (1, 2), (2, 0)], 3)


def test_properness_examples():
    assert check_properness(TRIANGLE, [(1, 2), (2, 1), (3, 3)])
    assert not check_properness(TRIANGLE, [(1, 2), (1, 2), (3, 3)])
    assert check_properness(build_graph([], 3), [1, 1, 1])
    assert check_properness(TRIANGLE, {0: 1, 1: 2, 2: 3})


def test_properness_missing_vertex():
    with pytest.raises(PropernessError):
        check_properness(TRIANGLE, [1, 2])
    with pytest.raises(PropernessError):
        check_properness(TRIANGLE, {0: 1, 2: 3})


def test_window_pairs():
    pairs = list(window_pairs(path_graph(4), 1, max_window=1))
    assert [(a, b, d) for a, b, d in pairs] == [((0,), (2,), 2), ((0,), (3,), 3), ((1,), (3,), 2)]
    assert list(window_pairs(path_graph(4), 5)) == []


def test_empty_report_passes():
    rep = check_k_dependence_exact(ExactJoint(TRIANGLE, "fiid"), 1)
    assert rep.records == [] and rep.verdict == "PASS" and rep.max_discrepancy == 0


def test_only_far_pairs_count():
    rep = DependenceReport(2, [PairRecord((0,), (1,), 1, 1), PairRecord((0,), (3,), 3, 0)])
    assert rep.verdict == "PASS"
    assert rep.as_dict()["pairs_tested"] == 1


def test_monotone_in_k():
    j = ExactJoint(path_graph(5), "invariant")
    verdicts = [check_k_dependence_exact(j, k).verdict for k in range(0, 5)]
    first = verdicts.index("PASS")
    assert all(v == "PASS" for v in verdicts[first:])
    assert smallest_passing_k(j) == first == 2


def test_report_document_shape():
    rep = check_k_dependence_exact(ExactJoint(path_graph(4), "invariant"), 1)
    doc = rep.as_dict()
    assert list(doc) == ["mode", "k", "verdict", "pairs_tested", "max_discrepancy", "records"]
    assert doc["verdict"] == "FAIL" and doc["max_discrepancy"] == "1/9720"
    assert doc["records"][0] == {"A": [0], "B": [2], "distance": 2,
                                 "discrepancy": "1/9720", "method": "dense"}
