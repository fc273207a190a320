import numpy as np
import pytest

import oracles
from tropctl.invariance import (
    check_geometric_invariance,
    corollary_bound,
    is_decreasing,
    max_invariant,
    phi,
)
from tropctl.semimodule import Semimodule, contains, semimodule_equal
from tropctl.semiring import NEG_INF

N = NEG_INF


def test_swap_example_collapses():
    K = Semimodule.from_generators([[0, N], [1, 0]])  # y ≥ x + 1
    report = max_invariant(K, [[N, 0], [0, N]], [[0], [0]], cap=10)
    assert report.stabilized_at == 2
    assert report.result.is_trivial
    assert len(report.steps) == 3


def test_shrinking_band_never_stabilizes():
    K = Semimodule.from_generators([[0, 0], [-1, N]])  # y ≤ x - 1
    report = max_invariant(K, [[-1, N], [N, 0]], [[0], [0]], cap=10)
    assert report.cap_exceeded and report.result is None
    for r in range(1, 11):
        expected = Semimodule.from_generators([[0, 0], [-r, N]])
        assert semimodule_equal(report.step(r), expected)
    assert is_decreasing(report)


@pytest.mark.parametrize("l", [1, 2, 3, 5])
def test_band_stabilizes_after_volume_plus_one(l):
    K = Semimodule.from_generators([[0, 0], [1, l]])
    report = max_invariant(K, [[1, N], [N, 0]], [[0], [0]], cap=20)
    assert report.stabilized_at == l + 1
    assert report.result.is_trivial
    assert report.bound == 2 * l + 2
    for r in range(1, l + 1):
        # X_r = {x + r ≤ y ≤ x + l}
        assert semimodule_equal(report.step(r), Semimodule.from_generators([[0, 0], [r, l]]))
        assert not contains(report.step(r + 1), report.step(r))


def test_phi_of_trivial():
    T = Semimodule.trivial(2)
    assert phi(T, [[0, N], [N, 0]], [[0], [0]]).is_trivial


def test_fixed_point_is_geometrically_invariant():
    rng = np.random.default_rng(21)
    checked = 0
    for _ in range(60):
        n = int(rng.integers(1, 4))
        G = rng.integers(-2, 3, size=(n, 2)).astype(float)
        K = Semimodule.from_generators(G)
        A = rng.integers(-2, 3, size=(n, n)).astype(float)
        A[rng.random((n, n)) < 0.4] = N
        B = rng.integers(-1, 2, size=(n, 1)).astype(float)
        report = max_invariant(K, A, B, cap=30)
        assert is_decreasing(report)
        if report.cap_exceeded:
            continue
        checked += 1
        Ks = report.result
        assert check_geometric_invariance(Ks, A, B)
        assert contains(K, Ks)
        assert report.stabilized_at <= report.bound
        # every point of K* can be steered back into K* by some control
        for x in oracles.box(n, -2, 2):
            if x in Ks:
                Ax = oracles.mp_apply(A, x)
                assert any(
                    tuple(max(a, u + b) for a, b in zip(Ax, B[:, 0])) in Ks for u in [N, *range(-10, 11)]
                )
    assert checked > 20


def test_corollary_bound():
    assert corollary_bound(Semimodule.from_generators([[0, 0], [1, 3]])) == 4**2 - 3**2 + 1
    assert corollary_bound(Semimodule.from_generators([[0], [N]])) is None
    assert corollary_bound(Semimodule.trivial(2)) is None


def test_cap_validation():
    with pytest.raises(ValueError):
        max_invariant(Semimodule.whole(1), [[0]], [[0]], cap=0)
    with pytest.raises(ValueError):
        max_invariant(Semimodule.whole(2), [[0]], [[0]], cap=3)
