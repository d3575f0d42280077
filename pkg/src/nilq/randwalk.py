"""Random-walk experiments on free 2-step nilpotent groups.

Covers: full-rank probability of exponent-sum matrices of independent random
words (the abelianized walk), the per-coordinate central limit behaviour with
variance 1/m, escape-probability estimates, exact return-probability tables
with their log-log decay slope -m/2, and an exhaustive Schwartz-Zippel count
for the sum-of-squared-minors polynomial.

Determinism contract: every stochastic experiment derives one RNG stream per
trial as sha256("<seed>:<scale>:<trial>") over the decimal strings, so results
are independent of execution order and identical configs give byte-identical
CSV tables.  Trials never share mutable state and all aggregation is
commutative integer accumulation, so a parallel runner would reproduce the
same counts; the built-in runner is sequential.

Walk convention: one step multiplies by a uniformly chosen generator or
inverse (2m choices, probability 1/2m each); the abelianized position after n
steps has per-coordinate step mean 0 and variance 1/m.  Letter sequences are
drawn when the words themselves matter (rank_experiment exercises the word
and matrix pipeline); experiments that only need the per-coordinate sums draw
the 2m letter counts from a multinomial instead, which is the same
distribution at a fraction of the cost.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .words import RelatorSet, exponent_sum_matrix, random_word
from .zmatrix import IntMatrix, minor_polynomial, rank as zrank


class ResourceLimitError(Exception):
    """The requested exact table would exceed the state-space budget."""


class EnumerationLimitError(Exception):
    """The requested exhaustive enumeration is too large."""


def stream_seed(seed: int, scale: int, trial: int) -> int:
    """256-bit per-trial seed: sha256 of the decimal string 'seed:scale:trial'."""
    text = f"{seed}:{scale}:{trial}"
    return int.from_bytes(hashlib.sha256(text.encode("ascii")).digest(), "big")


def trial_rng(seed: int, scale: int, trial: int) -> random.Random:
    return random.Random(stream_seed(seed, scale, trial))


def _np_rng(seed: int, scale: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(stream_seed(seed, scale, trial)))


def _binomial_stderr(p: Fraction, trials: int) -> float:
    return math.sqrt(float(p) * (1.0 - float(p)) / trials)


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    r: int
    lengths: Tuple[int, ...]
    trials: int
    seed: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be positive")
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if not self.lengths:
            raise ValueError("lengths must be nonempty")
        if any(n < 1 for n in self.lengths):
            raise ValueError("lengths must be positive")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")

    def to_jsonable(self) -> dict:
        return {
            "m": self.m,
            "r": self.r,
            "lengths": list(self.lengths),
            "trials": self.trials,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class RankExperimentRow:
    length: int
    trials: int
    full_rank_count: int
    p_hat: Fraction
    stderr: float


def rank_experiment(cfg: ExperimentConfig) -> list:
    """Full-rank frequency of the r x m exponent-sum matrix of r independent
    random words, per length.

    Each trial checks the rank two independent ways (fraction-free
    elimination and the sum of squared maximal minors) and insists they
    agree.
    """
    rows = []
    for length in cfg.lengths:
        full = 0
        for t in range(cfg.trials):
            rng = trial_rng(cfg.seed, length, t)
            ws = tuple(random_word(length, cfg.m, rng) for _ in range(cfg.r))
            M = exponent_sum_matrix(RelatorSet(ws, cfg.m))
            is_full = zrank(M) == min(cfg.r, cfg.m)
            if is_full != (minor_polynomial(M) != 0):
                raise AssertionError("rank routes disagree")
            full += is_full
        p = Fraction(full, cfg.trials)
        rows.append(
            RankExperimentRow(length, cfg.trials, full, p, _binomial_stderr(p, cfg.trials))
        )
    return rows


def _config_header(d: dict) -> str:
    return "# config: " + json.dumps(d, sort_keys=True)


def rank_experiment_csv(cfg: ExperimentConfig, rows: Optional[Sequence[RankExperimentRow]] = None) -> str:
    if rows is None:
        rows = rank_experiment(cfg)
    out = [_config_header(cfg.to_jsonable()), "length,trials,full_rank_count,p_hat,stderr"]
    for row in rows:
        out.append(f"{row.length},{row.trials},{row.full_rank_count},{row.p_hat},{row.stderr!r}")
    return "\n".join(out) + "\n"


def _coordinate_sums(m: int, n: int, rng: np.random.Generator) -> list:
    # letter counts over the 2m signed generators; coordinate i sums
    # count(+i) - count(-i)
    counts = rng.multinomial(n, [1.0 / (2 * m)] * (2 * m))
    return [int(counts[2 * i]) - int(counts[2 * i + 1]) for i in range(m)]


@dataclass(frozen=True)
class CltSummary:
    m: int
    n: int
    trials: int
    seed: int
    means: Tuple[float, ...]
    variances: Tuple[float, ...]
    variance_stderrs: Tuple[float, ...]
    sup_distances: Tuple[float, ...]

    def to_jsonable(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "means": list(self.means),
            "variances": list(self.variances),
            "variance_stderrs": list(self.variance_stderrs),
            "sup_distances": list(self.sup_distances),
        }


def _normal_cdf(x: float, m: int) -> float:
    # N(0, 1/m) distribution function
    return 0.5 * (1.0 + math.erf(x * math.sqrt(m / 2.0)))


def coordinate_clt_stats(m: int, n: int, trials: int, seed: int) -> CltSummary:
    """Sample statistics of the normalized coordinate sums s_{n,i}/sqrt(n).

    Sums and sums of squares are accumulated as exact integers; the variance
    estimate is the unbiased sample variance converted from an exact rational
    at the end.  Its reported standard error uses the normal approximation
    var * sqrt(2/(trials-1)).  sup_distances compares the empirical CDF with
    the N(0, 1/m) one on a fixed 41-point grid spanning [-4, 4] standard
    deviations.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be at least 1")
    sums = [0] * m
    squares = [0] * m
    samples = [list() for _ in range(m)]
    for t in range(trials):
        rng = _np_rng(seed, n, t)
        s = _coordinate_sums(m, n, rng)
        for i, v in enumerate(s):
            sums[i] += v
            squares[i] += v * v
            samples[i].append(v)
    sqrt_n = math.sqrt(n)
    means = tuple(float(Fraction(sums[i], trials)) / sqrt_n for i in range(m))
    variances = []
    for i in range(m):
        if trials == 1:
            variances.append(0.0)
            continue
        num = Fraction(squares[i]) - Fraction(sums[i] ** 2, trials)
        variances.append(float(num / ((trials - 1) * n)))
    var_se = tuple(v * math.sqrt(2.0 / (trials - 1)) if trials > 1 else float("inf") for v in variances)
    sigma = 1.0 / math.sqrt(m)
    grid = [(-4.0 + 8.0 * j / 40.0) * sigma for j in range(41)]
    sups = []
    for i in range(m):
        xs = sorted(samples[i])
        worst = 0.0
        for x in grid:
            emp = bisect_right(xs, x * sqrt_n) / trials
            worst = max(worst, abs(emp - _normal_cdf(x, m)))
        sups.append(worst)
    return CltSummary(m, n, trials, seed, means, tuple(variances), var_se, tuple(sups))


def clt_csv(summary: CltSummary) -> str:
    cfg = {"m": summary.m, "n": summary.n, "trials": summary.trials, "seed": summary.seed}
    out = [_config_header(cfg), "coordinate,mean,variance,variance_stderr,sup_distance"]
    for i in range(summary.m):
        out.append(
            f"{i + 1},{summary.means[i]!r},{summary.variances[i]!r},"
            f"{summary.variance_stderrs[i]!r},{summary.sup_distances[i]!r}"
        )
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class EscapeEstimate:
    m: int
    n: int
    trials: int
    seed: int
    epsilon: float
    count: int
    p_hat: Fraction
    stderr: float

    def to_jsonable(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "epsilon": self.epsilon,
            "count": self.count,
            "p_hat": [self.p_hat.numerator, self.p_hat.denominator],
            "stderr": self.stderr,
        }


def escape_probability(
    m: int, n: int, trials: int, seed: int, epsilon: Optional[float] = None
) -> EscapeEstimate:
    """Estimate of P(|s_{n,1}/sqrt(n)| >= epsilon), epsilon defaulting to ln n.

    The first coordinate stands for all by symmetry.  Since |s_{n,1}| <= n,
    any epsilon > sqrt(n) makes the probability exactly zero; the default
    ln n never does (ln n < sqrt(n) for all n >= 1), so the zero regime is
    only reachable through the override.
    """
    if n < 1 or trials < 1:
        raise ValueError("n and trials must be at least 1")
    eps = math.log(n) if epsilon is None else float(epsilon)
    threshold = eps * math.sqrt(n)
    count = 0
    for t in range(trials):
        rng = _np_rng(seed, n, t)
        s = _coordinate_sums(m, n, rng)
        if abs(s[0]) >= threshold:
            count += 1
    p = Fraction(count, trials)
    return EscapeEstimate(m, n, trials, seed, eps, count, p, _binomial_stderr(p, trials))


def escape_csv(estimates: Sequence[EscapeEstimate]) -> str:
    if not estimates:
        raise ValueError("need at least one estimate")
    first = estimates[0]
    cfg = {"m": first.m, "seed": first.seed, "trials": first.trials}
    out = [_config_header(cfg), "n,epsilon,count,p_hat,stderr"]
    for e in estimates:
        out.append(f"{e.n},{e.epsilon!r},{e.count},{e.p_hat},{e.stderr!r}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class ReturnTable:
    """values[n] = p_n(0) + p_{n+1}(0) for the 2m-choice walk on Z^m.

    Exact tables hold Fractions, float tables hold float64 values whose error
    is bounded by roughly n * 2^-50 per entry (one rounding per convolution
    step on probabilities that sum to 1).
    """

    m: int
    n_max: int
    exact: bool
    values: Tuple[Union[Fraction, float], ...]


def return_probability_exact(
    m: int,
    n_max: int,
    exact: Optional[bool] = None,
    state_bits_limit: int = 1 << 31,
) -> ReturnTable:
    """Exact dynamic-programming table of return probabilities.

    The convolution runs over the reachable box [-n-1, n+1]^m.  In exact mode
    all (2n+3)^m cell counts live as fixed-width digits inside one Python
    integer, so one convolution step is a handful of giant shift-and-adds;
    each digit is wide enough that counts never carry between cells.  Every
    step checks probability conservation exactly: the digit sum, recovered
    with a cheap modulus, must equal (2m)^n.  Above n_max = 200 the default
    flips to a float64 array engine (flagged in the output) with the same
    reachability argument; conservation is then checked to 1e-9.
    """
    if m not in (1, 2, 3):
        raise ValueError("m must be 1, 2, or 3")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    if exact is None:
        exact = n_max <= 200
    n_total = n_max + 1
    W = 2 * n_total + 3
    cells = W**m
    if exact:
        bits = math.ceil(n_total * math.log2(2 * m)) + 8
        if cells * bits > state_bits_limit:
            raise ResourceLimitError(
                f"exact table needs {cells * bits} state bits, over the limit "
                f"{state_bits_limit}"
            )
        center = (n_total + 1) * (W**m - 1) // (W - 1)
        shifts = [bits * W**k for k in range(m)]
        mask = (1 << bits) - 1
        modulus = (1 << bits) - 1
        P = 1 << (center * bits)
        center_counts = [1]
        total = 1
        for _ in range(n_total):
            P = sum((P << s) + (P >> s) for s in shifts)
            total *= 2 * m
            if P % modulus != total:
                raise AssertionError("probability mass not conserved")
            center_counts.append((P >> (center * bits)) & mask)
        denom = 1
        values = []
        for n in range(n_max + 1):
            v = Fraction(center_counts[n], denom) + Fraction(center_counts[n + 1], denom * 2 * m)
            values.append(v)
            denom *= 2 * m
        return ReturnTable(m, n_max, True, tuple(values))
    if cells * 64 > state_bits_limit:
        raise ResourceLimitError(
            f"float table needs {cells * 64} state bits, over the limit {state_bits_limit}"
        )
    p = np.zeros((W,) * m, dtype=np.float64)
    p[(n_total + 1,) * m] = 1.0
    step_prob = 1.0 / (2 * m)
    centers = [1.0]
    for _ in range(n_total):
        q = np.zeros_like(p)
        for axis in range(m):
            q += np.roll(p, 1, axis=axis)
            q += np.roll(p, -1, axis=axis)
        p = q * step_prob
        if abs(float(p.sum()) - 1.0) > 1e-9:
            raise AssertionError("probability mass not conserved")
        centers.append(float(p[(n_total + 1,) * m]))
    values = tuple(centers[n] + centers[n + 1] for n in range(n_max + 1))
    return ReturnTable(m, n_max, False, values)


def return_table_csv(table: ReturnTable) -> str:
    cfg = {"exact": table.exact, "m": table.m, "n_max": table.n_max}
    out = [_config_header(cfg), "n,return_prob_sum"]
    for n, v in enumerate(table.values):
        out.append(f"{n},{v}" if table.exact else f"{n},{v!r}")
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class DecayFit:
    m: int
    n_lo: int
    n_hi: int
    slope: float
    intercept: float
    points: Tuple[Tuple[int, float], ...]

    def to_jsonable(self) -> dict:
        return {
            "m": self.m,
            "n_lo": self.n_lo,
            "n_hi": self.n_hi,
            "slope": self.slope,
            "intercept": self.intercept,
            "points": [[n, v] for n, v in self.points],
        }


def decay_slope(m: int, n_range: Tuple[int, int], table: Optional[ReturnTable] = None) -> DecayFit:
    """Least-squares slope of log(p_n(0)+p_{n+1}(0)) against log n over even n.

    The local limit theorem makes this approach -m/2.  Odd n are skipped
    because the parity-split sum is dominated by the even term anyway and the
    even subsequence is strictly positive.
    """
    lo, hi = n_range
    if lo < 1 or hi < lo:
        raise ValueError("need 1 <= lo <= hi")
    if table is None:
        table = return_probability_exact(m, hi)
    if table.m != m or table.n_max < hi:
        raise ValueError("table does not cover the requested range")
    ns = [n for n in range(lo, hi + 1) if n % 2 == 0]
    if len(ns) < 2:
        raise ValueError("degenerate range: need at least two even points")
    vals = [float(table.values[n]) for n in ns]
    if min(vals) == max(vals):
        raise ValueError("degenerate range: constant values")
    if min(vals) <= 0.0:
        raise ValueError("nonpositive table values in range")
    xs = [math.log(n) for n in ns]
    ys = [math.log(v) for v in vals]
    k = len(ns)
    mx = sum(xs) / k
    my = sum(ys) / k
    sxx = sum((x - mx) ** 2 for x in xs)
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = my - slope * mx
    return DecayFit(m, lo, hi, slope, intercept, tuple(zip(ns, vals)))


@dataclass(frozen=True)
class SchwartzZippelResult:
    r: int
    m: int
    box_halfwidth: int
    total: int
    degree: int
    zero_count: int
    bound: int
    holds: bool

    def to_jsonable(self) -> dict:
        return {
            "r": self.r,
            "m": self.m,
            "box_halfwidth": self.box_halfwidth,
            "total": self.total,
            "degree": self.degree,
            "zero_count": self.zero_count,
            "bound": self.bound,
            "holds": self.holds,
        }


def schwartz_zippel_check(
    r: int, m: int, box_halfwidth: int, limit: int = 4_000_000
) -> SchwartzZippelResult:
    """Exhaustive zero count of the sum-of-squared-minors polynomial.

    Enumerates every r x m integer matrix with entries in [-b, b], counts
    those of non-maximal rank (the polynomial's zeros), and compares with the
    bound d * |I|^(rm-1) for d = 2*min(r, m), the polynomial's degree.
    """
    if r < 1 or m < 1 or box_halfwidth < 1:
        raise ValueError("r, m, box_halfwidth must be positive")
    side = 2 * box_halfwidth + 1
    total = side ** (r * m)
    if total > limit:
        raise EnumerationLimitError(f"{total} matrices exceed the limit {limit}")
    import itertools

    zero_count = 0
    entries_range = range(-box_halfwidth, box_halfwidth + 1)
    for tup in itertools.product(entries_range, repeat=r * m):
        if minor_polynomial(IntMatrix(r, m, tup)) == 0:
            zero_count += 1
    degree = 2 * min(r, m)
    bound = degree * side ** (r * m - 1)
    return SchwartzZippelResult(
        r, m, box_halfwidth, total, degree, zero_count, bound, zero_count <= bound
    )
