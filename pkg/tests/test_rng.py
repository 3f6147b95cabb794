import numpy as np
import pytest

from besq.rng import PARTICLES, WISHART, RngSpec, gaussian_stream


def test_same_stream_is_identical():
    a = gaussian_stream(RngSpec(42, (3, PARTICLES))).draw(1000)
    b = gaussian_stream(RngSpec(42, (3, PARTICLES))).draw(1000)
    assert np.array_equal(a, b)


def test_chunked_draws_equal_one_draw():
    whole = gaussian_stream(RngSpec(9, (1, 2))).draw(10_000)
    s = gaussian_stream(RngSpec(9, (1, 2)))
    parts = np.concatenate([s.draw(n) for n in (1, 17, 4000, 5982)])
    assert np.array_equal(whole, parts)


def test_distinct_streams_uncorrelated():
    n = 100_000
    a = gaussian_stream(RngSpec(1, (0, PARTICLES))).draw(n)
    b = gaussian_stream(RngSpec(1, (0, WISHART))).draw(n)
    c = gaussian_stream(RngSpec(1, (1, PARTICLES))).draw(n)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.02
    assert abs(np.corrcoef(a, c)[0, 1]) < 0.02
    assert not np.array_equal(a[:10], c[:10])


def test_moments():
    z = gaussian_stream(RngSpec(123)).draw(100_000)
    assert abs(z.mean()) < 0.01
    assert abs(z.var() - 1.0) < 0.02


def test_zero_noise_hook():
    assert np.array_equal(gaussian_stream(RngSpec(5, zero_noise=True)).draw(7), np.zeros(7))


def test_replicate_and_child_keys():
    base = RngSpec(7, (99, 99), zero_noise=True)
    r = base.replicate(4, WISHART)
    assert r.stream == (4, WISHART) and r.seed == 7 and r.zero_noise
    assert r.child(1).stream == (4, WISHART, 1)


@pytest.mark.parametrize("seed", [-1, 2**64])
def test_seed_range(seed):
    with pytest.raises(ValueError):
        RngSpec(seed)
