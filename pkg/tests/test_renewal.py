import io
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from renewal_kac import DiscreteAtoms, Exponential, RenewalPath, RngStream, count_at, parity_at, simulate_path
from renewal_kac.errors import QueryBeyondHorizon, RunawayPath
from renewal_kac.renewal import compensated_cumsum

from .conftest import LAWS


@pytest.fixture
def small_path():
    return RenewalPath.from_arrivals([0.5, 1.2, 3.0], 2.9)


def test_point_mass_path():
    path = simulate_path(DiscreteAtoms((1.0,), (1.0,)), 3.5, RngStream(0))
    assert path.arrivals.tolist() == [1.0, 2.0, 3.0, 4.0]
    assert len(path.inter_arrivals) == 4


@pytest.mark.parametrize("name", sorted(LAWS))
@pytest.mark.parametrize("horizon", [0.1, 1.0, 37.5, 5000.0])
def test_last_arrival_exceeds_horizon(name, horizon):
    path = simulate_path(LAWS[name], horizon, RngStream(8))
    assert path.arrivals[-1] > horizon
    assert len(path) == 1 or path.arrivals[-2] <= horizon


def test_poisson_count_clt():
    # Poisson(1e6) count: standard deviation 1e3
    horizon = 10**6
    path = simulate_path(Exponential(1.0), horizon, RngStream(21))
    assert abs(count_at(path, horizon) - horizon) <= 4 * math.sqrt(horizon)


def test_large_horizon_uses_several_blocks():
    path = simulate_path(Exponential(1.0), 3e6, RngStream(22))
    assert path.arrivals[-1] > 3e6
    assert np.all(np.diff(path.arrivals) >= 0)
    assert np.allclose(np.diff(path.arrivals), path.inter_arrivals[1:], atol=1e-8)


def test_count_examples(small_path):
    assert count_at(small_path, 0.4) == 0
    assert count_at(small_path, 1.2) == 2
    assert count_at(small_path, 2.9) == 2


def test_parity_examples(small_path):
    assert parity_at(small_path, 0.3) == 1
    assert parity_at(small_path, 1.0) == -1
    ties = RenewalPath([0.5, 0.0, 3.0], 1.0)
    assert parity_at(ties, 0.7) == 1
    assert count_at(ties, 0.5) == 2


def test_query_beyond_horizon(small_path):
    with pytest.raises(QueryBeyondHorizon):
        count_at(small_path, 2.95)


def test_invalid_paths():
    with pytest.raises(ValueError):
        RenewalPath([1.0, 1.0], 2.0)
    with pytest.raises(ValueError):
        RenewalPath([1.0, -0.5, 3.0], 2.0)


def test_runaway_path():
    law = DiscreteAtoms((0.0, 1.0), (0.999, 0.001))
    with pytest.raises(RunawayPath):
        simulate_path(law, 100.0, RngStream(1), max_events=1000)


def test_sandwich_identity_many_queries():
    rng = np.random.default_rng(5)
    checked = 0
    for r, name in enumerate(sorted(LAWS) * 25):
        path = simulate_path(LAWS[name], 200.0, RngStream(31, (r,)))
        ts = rng.uniform(0, 200.0, 1000)
        ls = path.counts(ts)
        s = path.partial_sums
        assert np.all(s[ls] <= ts)
        assert np.all(ts < s[ls + 1])
        checked += ts.size
    assert checked == 10**5


@given(st.integers(0, 2**32), st.sampled_from(sorted(LAWS)))
@settings(max_examples=40, deadline=None)
def test_count_monotone(seed, name):
    path = simulate_path(LAWS[name], 50.0, RngStream(seed))
    ts = np.linspace(0, 50.0, 500)
    assert np.all(np.diff(path.counts(ts)) >= 0)


@pytest.mark.parametrize("name", sorted(LAWS))
def test_count_at_horizon_excludes_overshoot(name):
    path = simulate_path(LAWS[name], 77.0, RngStream(2))
    assert count_at(path, 77.0) == len(path) - 1


def test_compensated_cumsum_matches_exact_rational():
    rng = np.random.default_rng(0)
    x = rng.exponential(1.0, 20000) * 10 ** rng.uniform(-6, 2, 20000)
    got = compensated_cumsum(x)
    exact = Fraction(0)
    worst = 0.0
    for k, v in enumerate(x):
        exact += Fraction(v)
        ref = float(exact)
        worst = max(worst, abs(got[k] - ref) / math.ulp(ref))
    assert worst <= 2


def test_compensated_cumsum_beats_naive_on_long_sums():
    x = np.full(10**7, 0.1)
    k = 10**7 - 1
    ref = float(Fraction(0.1) * (k + 1))
    assert abs(compensated_cumsum(x)[k] - ref) <= 2 * math.ulp(ref)
    assert abs(np.cumsum(x)[k] - ref) > 2 * math.ulp(ref)


def test_csv_dump():
    path = RenewalPath.from_arrivals([0.5, 1.25], 1.0)
    buf = io.StringIO()
    path.write_csv(buf)
    assert buf.getvalue().splitlines() == ["k,U_k,S_k", "1,0.5,0.5", "2,0.75,1.25"]


def test_simulation_reproducible():
    a = simulate_path(LAWS["gamma"], 500.0, RngStream(9, (4,)))
    b = simulate_path(LAWS["gamma"], 500.0, RngStream(9, (4,)))
    assert np.array_equal(a.inter_arrivals, b.inter_arrivals)
