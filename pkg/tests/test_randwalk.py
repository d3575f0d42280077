"""Random walk experiments: determinism, exact tables, frozen oracle values."""

import math
from fractions import Fraction

import pytest

from nilq.randwalk import (
    DecayFit,
    EnumerationLimitError,
    ExperimentConfig,
    ResourceLimitError,
    coordinate_clt_stats,
    clt_csv,
    decay_slope,
    escape_csv,
    escape_probability,
    rank_experiment,
    rank_experiment_csv,
    return_probability_exact,
    return_table_csv,
    schwartz_zippel_check,
    stream_seed,
    trial_rng,
)


def _binom(n, k):
    return math.comb(n, k)


def test_stream_seed_distinct_and_stable():
    a = stream_seed(7, 100, 3)
    assert a == stream_seed(7, 100, 3)
    assert a != stream_seed(7, 100, 4)
    assert a != stream_seed(7, 101, 3)
    assert a != stream_seed(8, 100, 3)
    # derived python streams agree too
    assert trial_rng(7, 100, 3).random() == trial_rng(7, 100, 3).random()


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(m=0, r=1, lengths=(10,), trials=5, seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(m=2, r=-1, lengths=(10,), trials=5, seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(m=2, r=1, lengths=(), trials=5, seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(m=2, r=1, lengths=(0,), trials=5, seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(m=2, r=1, lengths=(10,), trials=0, seed=1)


def test_rank_experiment_deterministic():
    cfg = ExperimentConfig(m=2, r=2, lengths=(6, 12), trials=60, seed=424)
    rows1 = rank_experiment(cfg)
    rows2 = rank_experiment(cfg)
    assert rows1 == rows2
    for row in rows1:
        assert 0 <= row.full_rank_count <= row.trials
        assert row.p_hat == Fraction(row.full_rank_count, row.trials)
    assert rank_experiment_csv(cfg) == rank_experiment_csv(cfg, rows1)


def test_rank_experiment_r_zero_always_full():
    cfg = ExperimentConfig(m=2, r=0, lengths=(5,), trials=10, seed=1)
    (row,) = rank_experiment(cfg)
    assert row.p_hat == 1


def test_rank_experiment_csv_shape():
    cfg = ExperimentConfig(m=2, r=1, lengths=(4,), trials=8, seed=99)
    text = rank_experiment_csv(cfg)
    lines = text.strip().split("\n")
    assert lines[0].startswith("# config: ")
    assert lines[1] == "length,trials,full_rank_count,p_hat,stderr"
    assert len(lines) == 3
    assert '"seed": 99' in lines[0]


def test_clt_stats_deterministic_and_plausible():
    s1 = coordinate_clt_stats(2, 400, 300, 17)
    s2 = coordinate_clt_stats(2, 400, 300, 17)
    assert s1 == s2
    for i in range(2):
        # crude sanity; the acceptance suite checks 5% at scale
        assert abs(s1.means[i]) < 0.3
        assert 0.25 < s1.variances[i] < 0.75
        assert 0.0 <= s1.sup_distances[i] <= 1.0
    text = clt_csv(s1)
    assert text.splitlines()[1] == "coordinate,mean,variance,variance_stderr,sup_distance"
    assert len(text.splitlines()) == 4


def test_clt_single_trial_variance_degenerate():
    s = coordinate_clt_stats(2, 10, 1, 5)
    assert s.variances == (0.0, 0.0)
    assert all(math.isinf(v) for v in s.variance_stderrs)


def test_escape_default_epsilon_is_log_n():
    e = escape_probability(2, 100, 50, 3)
    assert e.epsilon == pytest.approx(math.log(100))
    assert e.p_hat == 0  # ln(100)*10 = 46 is far out in the tail


def test_escape_epsilon_overrides():
    # threshold above the walk range: exactly zero
    e = escape_probability(2, 50, 40, 3, epsilon=8.0)
    assert 8.0 > math.sqrt(50)
    assert e.p_hat == 0
    # threshold zero: every trial escapes
    e = escape_probability(2, 50, 40, 3, epsilon=0.0)
    assert e.p_hat == 1
    text = escape_csv([e])
    assert text.splitlines()[1] == "n,epsilon,count,p_hat,stderr"


def test_return_probabilities_match_binomial_m1():
    table = return_probability_exact(1, 20)
    assert table.exact
    for n in range(21):
        p_n = Fraction(_binom(n, n // 2), 2**n) if n % 2 == 0 else Fraction(0)
        np1 = n + 1
        p_n1 = Fraction(_binom(np1, np1 // 2), 2**np1) if np1 % 2 == 0 else Fraction(0)
        assert table.values[n] == p_n + p_n1


def test_return_probabilities_match_product_m2():
    # independent coordinate pairs: p_n(0,0) = (C(n,n/2)/2^n)^2 via the
    # rotated-axes bijection of the 4-choice walk
    table = return_probability_exact(2, 14)
    for n in range(0, 15, 2):
        expected = Fraction(_binom(n, n // 2), 2**n) ** 2
        odd = n + 1
        assert table.values[n] == expected
        if odd <= 14:
            assert table.values[odd] == Fraction(_binom(odd + 1, (odd + 1) // 2), 2 ** (odd + 1)) ** 2


def test_return_probabilities_match_multinomial_m3():
    # direct count: paths with matched +/- steps per axis
    def p0(n):
        total = 0
        for i in range(n // 2 + 1):
            for j in range(n // 2 + 1 - i):
                k = n // 2 - i - j
                ways = math.factorial(n) // (
                    math.factorial(i) ** 2 * math.factorial(j) ** 2 * math.factorial(k) ** 2
                )
                total += ways
        return Fraction(total, 6**n)

    table = return_probability_exact(3, 8)
    for n in range(0, 9, 2):
        # values[n] = p_n + p_{n+1} and the odd term vanishes
        assert table.values[n] == p0(n)


def test_return_float_engine_close_to_exact():
    exact = return_probability_exact(2, 40)
    approx = return_probability_exact(2, 40, exact=False)
    assert not approx.exact
    for a, b in zip(exact.values, approx.values):
        assert abs(float(a) - b) < 1e-10


def test_return_default_flips_to_float_past_200():
    t = return_probability_exact(1, 201)
    assert not t.exact


def test_return_resource_limit():
    with pytest.raises(ResourceLimitError):
        return_probability_exact(3, 200, exact=True, state_bits_limit=10**6)


def test_return_table_csv_rows():
    table = return_probability_exact(1, 4)
    lines = return_table_csv(table).strip().split("\n")
    assert lines[1] == "n,return_prob_sum"
    assert lines[2] == "0,1"
    assert lines[3] == "1,1/2"


def test_decay_slope_near_theory():
    assert abs(decay_slope(1, (50, 120)).slope + 0.5) < 0.1
    assert abs(decay_slope(2, (50, 120)).slope + 1.0) < 0.1


def test_decay_slope_reuses_table():
    table = return_probability_exact(1, 60)
    fit = decay_slope(1, (20, 60), table=table)
    assert isinstance(fit, DecayFit)
    assert len(fit.points) >= 2


def test_decay_slope_degenerate_inputs():
    with pytest.raises(ValueError):
        decay_slope(1, (50, 51))  # only one even point
    with pytest.raises(ValueError):
        decay_slope(1, (51, 50))


def test_schwartz_zippel_frozen_counts():
    res = schwartz_zippel_check(1, 1, 1)
    assert (res.total, res.zero_count, res.bound, res.holds) == (3, 1, 2, True)
    res = schwartz_zippel_check(1, 2, 1)
    assert (res.total, res.zero_count, res.bound, res.holds) == (9, 1, 6, True)
    res = schwartz_zippel_check(2, 2, 1)
    assert (res.total, res.zero_count, res.bound, res.holds) == (81, 33, 108, True)
    data = res.to_jsonable()
    assert data["degree"] == 4


def test_schwartz_zippel_enumeration_limit():
    with pytest.raises(EnumerationLimitError):
        schwartz_zippel_check(2, 3, 4, limit=1000)
