import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from fdcolor.insertion import (
    CYCLE,
    PATH,
    OracleCapError,
    SeededStream,
    check_k_dependence_line,
    empirical_line_counts,
    exact_line_distribution,
    insertion_weight,
    is_proper_line,
    multinomial_z_scores,
    sample_line,
)
from fdcolor.kernels import sample_lines
from fdcolor.randomness import derive_seed


def path_total(n, q):
    # q first symbols, then 2(q-1) + (m-1)(q-2) valid moves at length m
    return q * math.prod(2 * (q - 1) + (m - 1) * (q - 2) for m in range(1, n))


def cycle_total(n, q):
    # one extra factor n for the final rotation
    return n * q * (q - 1) * math.prod(m * (q - 2) for m in range(2, n))


def brute_weight(x, cyclic):
    """Count build orders by trying every deletion order."""
    n = len(x)
    count = 0
    for order in itertools.permutations(range(n)):
        present = sorted(order[:1])
        ok = True
        for i in order[1:]:
            present = sorted(present + [i])
            j = present.index(i)
            m = len(present)
            if cyclic:
                nb = {present[(j - 1) % m], present[(j + 1) % m]} - {i}
            else:
                nb = {present[k] for k in (j - 1, j + 1) if 0 <= k < m}
            if any(x[i] == x[k] for k in nb):
                ok = False
                break
        count += ok
    return count


def test_path_two_uniform():
    dist = exact_line_distribution(PATH, 2, 4)
    assert len(dist.weights) == 12
    assert set(dist.support.values()) == {Fraction(1, 12)}
    assert all(w == 2 for w in dist.weights.values())


def test_single_site_uniform():
    dist = exact_line_distribution(PATH, 1, 3)
    assert dist.support == {(c,): Fraction(1, 3) for c in (1, 2, 3)}


def test_path3_endpoints_independent():
    dist = exact_line_distribution(PATH, 3, 4)
    m = dist.marginal([0, 2])
    for a in range(1, 5):
        for b in range(1, 5):
            assert m[(a, b)] == Fraction(1, 16)


@pytest.mark.parametrize("q", [3, 4])
def test_normalizers(q):
    for n in range(1, 9):
        assert exact_line_distribution(PATH, n, q).total == path_total(n, q)
    for n in range(3, 8):
        assert exact_line_distribution(CYCLE, n, q).total == cycle_total(n, q)


@pytest.mark.parametrize("x,cyclic", [((1, 2, 3, 1), False), ((1, 2, 1, 2, 3), False),
                                      ((1, 2, 3), True), ((1, 2, 1, 3), True),
                                      ((1, 1, 2), False)])
def test_weight_matches_brute_force(x, cyclic):
    assert insertion_weight(x, cyclic) == brute_weight(x, cyclic)


@pytest.mark.parametrize("topology,n", [(PATH, 5), (CYCLE, 5)])
def test_support_is_proper_and_mass_one(topology, n):
    dist = exact_line_distribution(topology, n, 3)
    assert sum(dist.support.values()) == 1
    assert all(is_proper_line(x, topology == CYCLE) for x in dist.weights)


def test_reversal_and_color_symmetry():
    for topology, n in [(PATH, 6), (CYCLE, 6)]:
        dist = exact_line_distribution(topology, n, 3)
        for x, w in dist.weights.items():
            assert dist.weights[x[::-1]] == w
            perm = {1: 2, 2: 3, 3: 1}
            assert dist.weights[tuple(perm[c] for c in x)] == w


def test_cycle3_rotation_and_color_invariant():
    dist = exact_line_distribution(CYCLE, 3, 4)
    # all 24 proper 3-cycles with q=4 are one orbit
    assert len(dist.weights) == 24
    assert set(dist.support.values()) == {Fraction(1, 24)}


def test_two_cycle_single_adjacency():
    dist = exact_line_distribution(CYCLE, 2, 4)
    assert set(dist.support.values()) == {Fraction(1, 12)}


def test_consistency_under_endpoint_marginal():
    for q in (3, 4):
        for n in range(2, 8):
            big = exact_line_distribution(PATH, n, q)
            small = exact_line_distribution(PATH, n - 1, q).support
            assert big.marginal(range(n - 1)) == small
            assert big.marginal(range(1, n)) == small


def test_oracle_cap():
    with pytest.raises(OracleCapError):
        exact_line_distribution(PATH, 10, 3)
    with pytest.raises(ValueError):
        exact_line_distribution(PATH, 0, 3)


def test_dump_format():
    text = exact_line_distribution(PATH, 2, 4).dump()
    lines = text.splitlines()
    assert lines[0] == "12 1/12" and lines[-1] == "43 1/12"
    assert lines == sorted(lines)


def test_q4_one_dependent_small():
    for n in range(2, 7):
        assert check_k_dependence_line(exact_line_distribution(PATH, n, 4), 1).independent


def test_q3_fails_one_dependence():
    res = check_k_dependence_line(exact_line_distribution(PATH, 4, 3), 1)
    assert not res.independent
    assert res.worst == Fraction(1, 45)
    assert res.worst_pair == ((0,), (2,))


def test_cycle_q3_dependence_constants():
    # measured: adjacent-but-one sites of the 3-color cycle are correlated
    assert check_k_dependence_line(exact_line_distribution(CYCLE, 4, 3), 1).worst == Fraction(1, 18)
    assert check_k_dependence_line(exact_line_distribution(CYCLE, 5, 3), 1).worst == Fraction(1, 45)
    for n in range(3, 8):
        assert check_k_dependence_line(exact_line_distribution(CYCLE, n, 3), 2).independent


def test_empty_window_trivial():
    res = check_k_dependence_line(exact_line_distribution(PATH, 2, 3), 5)
    assert res.independent and res.pairs_checked == 0


@pytest.mark.parametrize("topology,n,q", [(PATH, 4, 3), (CYCLE, 4, 4)])
def test_sequential_and_restart_agree_with_oracle(topology, n, q):
    dist = exact_line_distribution(topology, n, q)
    for method, samples in [("sequential", 20000), ("restart", 6000)]:
        counts = empirical_line_counts(topology, n, q, samples, seed=5, method=method)
        assert set(counts) <= set(dist.weights)
        z = multinomial_z_scores(counts, dist.support, samples)
        assert max(abs(v) for v in z.values()) < 4.5


def test_samples_proper():
    for s in range(300):
        for topology, n, q in [(PATH, 7, 3), (CYCLE, 7, 3), (CYCLE, 3, 4)]:
            x = sample_line(topology, n, q, SeededStream(derive_seed(1, s), n))
            assert x.is_proper() and len(x.colors) == n


def test_sample_line_rejects_short_cycle():
    with pytest.raises(ValueError):
        sample_line(CYCLE, 2, 4, SeededStream(0, 2))
    with pytest.raises(ValueError):
        sample_line(PATH, 3, 4, SeededStream(0, 3), method="bogus")


def test_compiled_lines_match_reference():
    for topology, n, q in [(PATH, 6, 3), (CYCLE, 5, 4)]:
        batch = sample_lines(topology, n, q, 7, 200)
        for s in range(200):
            ref = sample_line(topology, n, q, SeededStream(derive_seed(7, s), n)).colors
            assert tuple(batch[s]) == ref


def test_compiled_lines_against_oracle():
    dist = exact_line_distribution(PATH, 5, 4)
    batch = sample_lines(PATH, 5, 4, 3, 50000)
    keys, counts = np.unique(batch, axis=0, return_counts=True)
    emp = {tuple(int(c) for c in k): int(c) for k, c in zip(keys, counts)}
    z = multinomial_z_scores(emp, dist.support, 50000)
    assert max(abs(v) for v in z.values()) < 4.5
