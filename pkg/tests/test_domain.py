import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from besq.domain import (
    SystemParams,
    classify,
    classify_nonnegative_solution,
    classify_strong_uniqueness,
    n_star,
    particle_config,
    ranks,
    reflect,
    structure_prediction,
)


@pytest.mark.parametrize("p,alpha,expected", [(4, 2, 3), (5, 0, 3), (2, 0, 1)])
def test_n_star_examples(p, alpha, expected):
    assert n_star(p, alpha) == expected


@pytest.mark.parametrize("p,alpha", [(3, 2), (3, -1), (4, 1.5), (2, 1)])
def test_n_star_rejects_outside_range(p, alpha):
    with pytest.raises(ValueError):
        n_star(p, alpha)


def test_n_star_bounds_exhaustive():
    for p in range(2, 40):
        for a in range(p - 1):
            ns = n_star(p, a)
            assert 2 * ns in (p + a, p + a + 1)
            assert a <= ns < p


@pytest.mark.parametrize(
    "x,expected",
    [((-1, 0, 2, 3), (2, 1, 3)), ((0, 0, 0), (0, 0, 0)), ((1, 2, 3), (3, 0, 3))],
)
def test_ranks_examples(x, expected):
    assert ranks(x) == expected


def test_ranks_use_exact_zero():
    assert ranks([-1e-300, 0.0, 1e-300]) == (1, 1, 2)


@pytest.mark.parametrize(
    "p,alpha,x,expected",
    [
        (3, 1, (1, 2, 3), True),
        (3, 1, (0, 0, 1), False),
        (3, 2.5, (0, 0, 0), True),
        (3, -1, (-3, -2, -1), True),
        (3, -1, (-1, 0, 0), False),
    ],
)
def test_strong_uniqueness_examples(p, alpha, x, expected):
    assert classify_strong_uniqueness(SystemParams(p, alpha), x) is expected


@pytest.mark.parametrize(
    "p,alpha,x,expected",
    [(3, 3, (0, 1, 5), True), (3, 1, (0, 0, 2), True), (3, 1, (0, 1, 2), False), (3, 0.5, (0, 0, 0), False)],
)
def test_nonnegative_examples(p, alpha, x, expected):
    assert classify_nonnegative_solution(SystemParams(p, alpha), x) is expected


def test_nonnegative_rejects_negative_start():
    with pytest.raises(ValueError):
        classify_nonnegative_solution(SystemParams(2, 1), [-1, 2])


@given(st.floats(-5, 5, allow_nan=False), st.floats(0, 10, allow_nan=False))
def test_nonnegative_single_particle_is_sign_of_alpha(alpha, x):
    assert classify_nonnegative_solution(SystemParams(1, alpha), [x]) is (alpha >= 0)


@pytest.mark.parametrize(
    "p,alpha,n,hits,neg",
    [
        (3, 0, 2, [True, True, False], [True, False, False]),
        (2, 1.5, 1, [True, False], [False, False]),
        (2, 1, 1, [True, False], [False, False]),
    ],
)
def test_structure_prediction_examples(p, alpha, n, hits, neg):
    got_n, got_hits, got_neg = structure_prediction(SystemParams(p, alpha))
    assert got_n == n
    assert list(got_hits) == hits
    assert list(got_neg) == neg


def test_structure_prediction_rejects_large_alpha():
    with pytest.raises(ValueError):
        structure_prediction(SystemParams(2, 3.0))


@given(st.integers(1, 12), st.floats(-20, 12.99, allow_nan=False))
def test_structure_prediction_monotone(p, alpha):
    if alpha >= p + 1:
        return
    n, hits, neg = structure_prediction(SystemParams(p, alpha))
    assert np.all(hits[neg])
    assert np.all(np.diff(hits.astype(int)) <= 0)
    assert np.all(np.diff(neg.astype(int)) <= 0)
    assert int(hits.sum()) == min(max(n, 0), p)


def test_particle_config_validation():
    with pytest.raises(ValueError, match="x0 length 2 != p 3"):
        particle_config([0, 1], 3)
    with pytest.raises(ValueError):
        particle_config([2, 1])
    with pytest.raises(ValueError):
        particle_config([0, math.nan])


def test_reflect():
    a, x = reflect(2, [-1, 0, 3])
    assert a == -2
    assert list(x) == [-3, 0, 1]


def test_classify_report_fields():
    rep = classify(SystemParams(3, 1), [0, 0, 1])
    d = rep.to_dict()
    for key in ("n_star", "rk_plus", "rk_minus", "rk", "unique_strong", "nonneg_exists",
                "structure_n", "hits_zero", "goes_negative"):
        assert key in d
    assert d["n_star"] == 2
    assert d["rk"] == d["rk_plus"] + d["rk_minus"] == 1
    assert d["unique_strong"] is False
    assert d["nonneg_exists"] is True
    assert d["structure_n"] == 2


def test_classify_flags_reflection_and_negative_start():
    rep = classify(SystemParams(3, -1), [-2, -1, 0])
    assert rep.reflected
    assert rep.nonneg_exists is False
    assert rep.hits_zero is None
    assert rep.notes
