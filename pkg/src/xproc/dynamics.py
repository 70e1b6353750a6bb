"""Continuous-time Monte Carlo simulation of the exclusion process.

Paths use the total-rate jump construction: with R the sum of all edge
rates, waiting times are Exponential(R) and each jump picks an edge with
probability rate/R and swaps its endpoints (a no-op when they match).
This has the same law as independent per-edge Poisson clocks.

Every sample runs on its own counter-based substream keyed by
(seed, sample_index), so results are bit-reproducible regardless of how
samples are dispatched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import BooleanFunction
from .graph import Graph
from .statespace import Configuration, bit_position, enumerate_level

_U64 = np.uint64


@dataclass(frozen=True)
class SimulationSpec:
    """Sampling policy: start distribution, horizon, seed, sample count.

    level None draws the start uniformly over all 2^n configurations;
    an integer draws uniformly over that level slice. graph and t mirror
    the estimator arguments for self-contained specs; explicit estimator
    arguments take precedence when both are given.
    """

    graph: Graph | None = None
    t: float = 0.0
    level: int | None = None
    seed: int = 0
    samples: int = 1

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"horizon must be >= 0, got {self.t}")
        if self.samples < 1:
            raise ValueError(f"need at least 1 sample, got {self.samples}")


@dataclass(frozen=True)
class EstimateResult:
    point: float
    std_error: float
    samples: int


def sample_rng(seed: int, sample_index: int) -> np.random.Generator:
    """Counter-based substream for one sample of one run."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, sample_index], dtype=_U64)
    return np.random.Generator(np.random.Philox(key=key))


class _EdgeTable:
    """Precomputed per-edge bit masks and the cumulative rate table."""

    def __init__(self, g: Graph):
        self.n = g.n
        self.masks = []
        self.shift_u = []
        self.shift_v = []
        rates = []
        for u, v, rate in g.edges:
            bu = bit_position(g.n, u)
            bv = bit_position(g.n, v)
            self.masks.append((1 << bu) | (1 << bv))
            self.shift_u.append(bu)
            self.shift_v.append(bv)
            rates.append(rate)
        self.rates = np.array(rates)
        self.total_rate = float(self.rates.sum())
        self.cumulative = np.cumsum(self.rates)
        self.uniform = bool(np.all(self.rates == self.rates[0]))
        self.count = len(rates)

    def pick(self, rng: np.random.Generator) -> int:
        if self.uniform:
            return int(rng.integers(self.count))
        u = rng.random() * self.total_rate
        return min(int(np.searchsorted(self.cumulative, u)), self.count - 1)


def _evolve(word: int, table: _EdgeTable, t: float, rng: np.random.Generator) -> int:
    mean = 1.0 / table.total_rate
    clock = rng.exponential(mean)
    while clock <= t:
        k = table.pick(rng)
        if ((word >> table.shift_u[k]) ^ (word >> table.shift_v[k])) & 1:
            word ^= table.masks[k]
        clock += rng.exponential(mean)
    return word


def simulate_path(g: Graph, x0: Configuration, t: float, seed: int) -> Configuration:
    """Sample the configuration at time t started from x0.

    The marble count is conserved on every path.
    """
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    if x0.n != g.n:
        raise ValueError(f"configuration is on {x0.n} vertices, graph has {g.n}")
    table = _EdgeTable(g)
    word = _evolve(x0.word, table, t, sample_rng(seed, 0))
    return Configuration(g.n, word)


def _draw_start(g: Graph, level: int | None, rng: np.random.Generator,
                level_words: np.ndarray | None) -> int:
    if level is None:
        return int(rng.integers(1 << g.n))
    return int(level_words[int(rng.integers(len(level_words)))])


def _start_words(g: Graph, level: int | None) -> np.ndarray | None:
    if level is None:
        return None
    return enumerate_level(g.n, level).words


def estimate_covariance(g: Graph, f: BooleanFunction, t: float,
                        spec: SimulationSpec) -> EstimateResult:
    """Monte Carlo Cov(f(X_0), f(X_t)) with a jackknife standard error."""
    if f.n != g.n:
        raise ValueError(f"function is on {f.n} vertices, graph has {g.n}")
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    table = _EdgeTable(g)
    words = _start_words(g, spec.level)
    m = spec.samples
    a = np.empty(m)   # f at the start
    p = np.empty(m)   # product across the pair
    for i in range(m):
        rng = sample_rng(spec.seed, i)
        w0 = _draw_start(g, spec.level, rng, words)
        wt = _evolve(w0, table, t, rng)
        a[i] = f.values[w0]
        p[i] = a[i] * f.values[wt]
    point = float(p.mean() - a.mean() ** 2)
    if m == 1:
        return EstimateResult(point, 0.0, m)
    # Leave-one-out jackknife of the plug-in covariance.
    sp, sa = p.sum(), a.sum()
    loo = (sp - p) / (m - 1) - ((sa - a) / (m - 1)) ** 2
    se = math.sqrt((m - 1) / m * float(((loo - loo.mean()) ** 2).sum()))
    return EstimateResult(point, se, m)


def estimate_flip_probability(g: Graph, f: BooleanFunction, eps: float,
                              spec: SimulationSpec) -> EstimateResult:
    """Monte Carlo P(f(X_0) != f(X_eps)) with a binomial standard error."""
    if not f.boolean:
        raise ValueError("flip probability requires a Boolean function")
    if f.n != g.n:
        raise ValueError(f"function is on {f.n} vertices, graph has {g.n}")
    if eps < 0:
        raise ValueError(f"time must be >= 0, got {eps}")
    table = _EdgeTable(g)
    words = _start_words(g, spec.level)
    m = spec.samples
    flips = 0
    for i in range(m):
        rng = sample_rng(spec.seed, i)
        w0 = _draw_start(g, spec.level, rng, words)
        wt = _evolve(w0, table, eps, rng)
        if f.values[w0] != f.values[wt]:
            flips += 1
    p_hat = flips / m
    se = math.sqrt(p_hat * (1.0 - p_hat) / m)
    return EstimateResult(p_hat, se, m)
