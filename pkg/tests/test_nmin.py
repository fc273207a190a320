import itertools
import math

import numpy as np
import pytest

from tropctl.feedback import solve_feedback
from tropctl.invariance import max_invariant
from tropctl.nmin import encode, from_zmax, to_zmax
from tropctl.semimodule import membership, semimodule_equal

INF = math.inf
A = [[1, INF], [1, 0]]
B = [[1], [1]]
K = [[0, 0], [0, INF]]  # columns (0, 0) and (0, +inf): x ≤ y


def nmin_in(x, generators):
    """Brute force: is x a min-plus combination of the generators with natural scalars?"""
    G = np.asarray(generators, dtype=float)
    for coeffs in itertools.product([*range(0, 8), INF], repeat=G.shape[1]):
        y = np.min(G + np.array(coeffs), axis=1) if G.shape[1] else np.full(len(x), INF)
        if np.array_equal(y, x):
            return True
    return False


def test_conversion_round_trip():
    M = np.array([[0, 3], [INF, 1]], dtype=float)
    np.testing.assert_array_equal(from_zmax(to_zmax(M)), M)
    with pytest.raises(ValueError):
        to_zmax([[-1]])


@pytest.fixture(scope="module")
def problem():
    enc = encode(A, B, K)
    report = max_invariant(enc.K, enc.A, enc.B, cap=10)
    return enc, report


def test_encoded_k_matches_nmin_set(problem):
    enc, _ = problem
    for x in itertools.product([*range(0, 5), INF], repeat=2):
        assert membership(enc.encode_vector(x), enc.K) == (x[0] <= x[1])


def test_invariant_subset(problem):
    enc, report = problem
    assert report.stabilized_at == 2
    expected = enc.encode_semimodule([[0, 1, 0], [1, 1, INF]])
    assert semimodule_equal(report.result, expected)
    for x in itertools.product([*range(0, 5), INF], repeat=2):
        inside = x[0] <= x[1] and x[1] >= 1
        assert membership(enc.encode_vector(x), report.result) == inside
        assert nmin_in(np.array(x, dtype=float), enc.decode_generators(report.result)) == inside


def test_no_natural_feedback(problem):
    enc, report = problem
    res = solve_feedback(enc.A, enc.B, report.result, support=enc.feedback_support, nonpositive=True)
    assert not res.found and res.method == "elimination"


def test_negative_gain_would_work(problem):
    # dropping the F ≥ 0 restriction admits a feedback, so the restriction matters
    enc, report = problem
    res = solve_feedback(enc.A, enc.B, report.result, support=enc.feedback_support)
    assert res.found
    assert enc.decode_feedback(res.F).min() < 0


def test_natural_feedback_when_one_exists():
    # x' = min(x + 1, u + 0) stays in {x ≥ 0} with u = x + 1 (gain 1)
    enc = encode([[1]], [[0]], [[0]])
    res = solve_feedback(enc.A, enc.B, enc.K, support=enc.feedback_support, nonpositive=True)
    assert res.found
    assert enc.decode_feedback(res.F).min() >= 0
