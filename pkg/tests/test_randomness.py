import pytest
from hypothesis import given, strategies as st

from fdcolor.randomness import VertexRandomness, derive_seed, falling_factorial


def test_reproducible():
    a, b = VertexRandomness(11), VertexRandomness(11)
    assert a.uniform(3, "xi/2") == b.uniform(3, "xi/2")
    assert a.uniform(3, "xi/2") != a.uniform(4, "xi/2")
    assert a.uniform(3, "xi/2") != a.uniform(3, "xi/1")
    assert a.uniform(3, "xi/2", 0) != a.uniform(3, "xi/2", 1)


def test_uniform_range_and_mean():
    r = VertexRandomness(1)
    xs = [r.uniform(v, "u") for v in range(20000)]
    assert all(0 <= x < 1 for x in xs)
    assert abs(sum(xs) / len(xs) - 0.5) < 0.01


def test_uniform_choice_unbiased():
    r = VertexRandomness(2)
    m = 3
    counts = [0] * m
    n = 30000
    for v in range(n):
        counts[r.uniform_choice(v, "c", 0, m)] += 1
    for c in counts:
        # 5 sigma for a binomial(n, 1/3)
        assert abs(c - n / m) < 5 * (n * (1 / m) * (1 - 1 / m)) ** 0.5


def test_uniform_choice_rejects_zero():
    with pytest.raises(ValueError):
        VertexRandomness(0).uniform_choice(0, "c", 0, 0)


def test_injection_is_injective():
    r = VertexRandomness(5)
    for v in range(200):
        inj = r.random_injection(v, [10, 20, 30], 4)
        assert sorted(inj) == [10, 20, 30]
        assert len(set(inj.values())) == 3
        assert set(inj.values()) <= {1, 2, 3, 4}
    with pytest.raises(ValueError):
        r.random_injection(0, [1, 2, 3], 2)


def test_injection_uniform_over_all_maps():
    r = VertexRandomness(9)
    n = 24000
    seen = {}
    for v in range(n):
        key = tuple(sorted(r.random_injection(v, [0, 1], 3).items()))
        seen[key] = seen.get(key, 0) + 1
    # (3)_2 = 6 injections, each with probability 1/6
    assert len(seen) == falling_factorial(3, 2) == 6
    for c in seen.values():
        assert abs(c - n / 6) < 5 * (n * (1 / 6) * (5 / 6)) ** 0.5


def test_perturbed_only_changes_chosen_vertices():
    r = VertexRandomness(4)
    p = r.perturbed([2, 5])
    assert p.uniform(1, "t") == r.uniform(1, "t")
    assert p.uniform(2, "t") != r.uniform(2, "t")
    assert r.perturbed([2], salt=1).uniform(2, "t") != r.perturbed([2], salt=2).uniform(2, "t")


@given(st.integers(0, 2**63), st.integers(0, 10**6))
def test_derive_seed_pure(seed, t):
    assert derive_seed(seed, t) == derive_seed(seed, t)
    assert 0 <= derive_seed(seed, t) < 2**64
