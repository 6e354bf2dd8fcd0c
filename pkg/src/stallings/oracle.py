"""Brute-force enumeration and statistical checks.

Small cases are enumerated outright: all partial injections of ``{1..n}``
for ``n <= 6`` and all r-tuples of them when ``I_n**r`` is small.  Subgroups
are counted two independent ways (labeled admissible graphs divided by
``(n-1)!``, and distinct canonical forms).  The statistics functions sample
the quantities whose asymptotics are known: connectivity probability, mean
rank, number of sequence components, acceptance rate for permutations.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import asdict, dataclass

import mpmath
import numpy as np
from scipy import stats

from .counting import InjectionTable, build_injection_table
from .generator import random_admissible_graph
from .graphs import AGraph, assemble, canonical_form, is_admissible, is_connected, rank_of
from .injections import (PartialInjection, random_partial_injection, random_permutation,
                         sequence_count_batch)
from .randomness import RandomSource

__all__ = [
    "EnumerationResult",
    "Metric",
    "StatReport",
    "enumerate_partial_injections",
    "admissible_graphs",
    "admissible_classes",
    "enumerate_admissible",
    "brute_force_canonical",
    "uniformity_test",
    "connectivity_stat",
    "rank_stat",
    "sequence_stat",
    "finite_index_accept_stat",
    "finite_index_fraction_bound",
    "asymptotic_crosscheck",
    "MAX_INJECTION_N",
    "MAX_TUPLES",
]

MAX_INJECTION_N = 6
MAX_TUPLES = 200_000


def enumerate_partial_injections(n: int) -> list:
    """Every partial injection of ``{1..n}``, ``I_n`` of them."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > MAX_INJECTION_N:
        raise ValueError(f"enumeration is capped at n={MAX_INJECTION_N}")
    out = []
    image = [None] * n
    used = [False] * (n + 1)

    def rec(u):
        if u == n:
            out.append(PartialInjection(tuple(image)))
            return
        image[u] = None
        rec(u + 1)
        for v in range(1, n + 1):
            if not used[v]:
                used[v] = True
                image[u] = v
                rec(u + 1)
                used[v] = False
        image[u] = None

    rec(0)
    return out


def admissible_graphs(n: int, r: int):
    """Yield every admissible labeled A-graph of size ``n`` over ``r`` letters."""
    injs = enumerate_partial_injections(n)
    if len(injs) ** r > MAX_TUPLES:
        raise ValueError(f"{len(injs)}**{r} tuples is too many to enumerate")
    for letters in itertools.product(injs, repeat=r):
        g = assemble(letters, n)
        if is_admissible(g):
            yield g


def admissible_classes(n: int, r: int) -> list:
    """Sorted canonical forms of all size-``n`` subgroups of the rank-``r`` free group."""
    return sorted({canonical_form(g) for g in admissible_graphs(n, r)})


@dataclass(frozen=True)
class EnumerationResult:
    n: int
    r: int
    labeled_admissible: int
    subgroup_count: int
    canonical_classes: int

    def to_dict(self) -> dict:
        return asdict(self)


def enumerate_admissible(n: int, r: int) -> EnumerationResult:
    if n < 1 or r < 1:
        raise ValueError("need n >= 1 and r >= 1")
    labeled = 0
    classes = set()
    for g in admissible_graphs(n, r):
        labeled += 1
        classes.add(canonical_form(g))
    per_class = math.factorial(n - 1)
    if labeled % per_class:
        raise AssertionError(f"{labeled} labeled graphs not divisible by {per_class}")
    count = labeled // per_class
    if count != len(classes):
        raise AssertionError(f"division gives {count} subgroups, canonical forms {len(classes)}")
    return EnumerationResult(n, r, labeled, count, len(classes))


def brute_force_canonical(g: AGraph) -> tuple:
    """Minimum relabeled edge list over all relabelings fixing vertex 1.

    Independent of :func:`canonical_form`; ``(n-1)!`` work.
    """
    best = None
    for rest in itertools.permutations(range(2, g.n + 1)):
        perm = (1,) + rest
        key = tuple(sorted((perm[u - 1], a, perm[v - 1]) for u, a, v in g.edges()))
        if best is None or key < best:
            best = key
    return best


def uniformity_test(sampler, classes, trials: int, src: RandomSource,
                    key=canonical_form) -> float:
    """Pearson chi-square p-value of ``trials`` draws against the uniform
    distribution on ``classes``.

    ``sampler(src)`` returns one object, ``key(obj)`` maps it to a class.
    """
    classes = list(classes)
    if not classes:
        raise ValueError("need at least one class")
    if trials < 50 * len(classes):
        raise ValueError(f"need at least {50 * len(classes)} trials")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros(len(classes), dtype=np.int64)
    for _ in range(trials):
        c = key(sampler(src))
        if c not in index:
            raise AssertionError(f"sampled object outside the class list: {c!r}")
        counts[index[c]] += 1
    if len(classes) == 1:
        return 1.0
    return float(stats.chisquare(counts).pvalue)


class Metric(enum.Enum):
    RANK = "rank"
    CONNECTIVITY = "connectivity"
    SEQUENCES = "sequences"
    FINITE_INDEX_ACCEPT = "fi-accept"


@dataclass(frozen=True)
class StatReport:
    n: int
    r: int
    trials: int
    mean: float
    stddev: float
    metric: Metric

    def to_dict(self) -> dict:
        d = asdict(self)
        d["metric"] = self.metric.value
        return d


def _report(n, r, values, metric):
    values = np.asarray(values, dtype=np.float64)
    if values.size < 1:
        raise ValueError("trials must be positive")
    sd = float(values.std(ddof=1)) if values.size > 1 else 0.0
    return StatReport(n, r, int(values.size), float(values.mean()), sd, metric)


def _table_for(n, table):
    if table is None or table.n_max < n:
        return build_injection_table(n)
    return table


def connectivity_stat(n: int, r: int, trials: int, src: RandomSource,
                      table: InjectionTable | None = None) -> StatReport:
    """Fraction of uniform r-tuples of partial injections that are connected."""
    table = _table_for(n, table)
    hits = []
    for _ in range(trials):
        g = assemble([random_partial_injection(n, table, src) for _ in range(r)], n)
        hits.append(is_connected(g))
    return _report(n, r, hits, Metric.CONNECTIVITY)


def rank_stat(n: int, r: int, trials: int, src: RandomSource,
              table: InjectionTable | None = None) -> StatReport:
    """Rank of uniform size-``n`` subgroups."""
    table = _table_for(n, table)
    ranks = [rank_of(random_admissible_graph(n, r, table, src).graph)
             for _ in range(trials)]
    return _report(n, r, ranks, Metric.RANK)


def sequence_stat(n: int, trials: int, src: RandomSource,
                  table: InjectionTable | None = None, r: int = 1) -> StatReport:
    """Number of sequence components of a uniform size-``n`` partial injection."""
    table = _table_for(n, table)
    counts = sequence_count_batch(n, trials, table, src)
    return _report(n, r, counts, Metric.SEQUENCES)


def finite_index_accept_stat(n: int, r: int, trials: int, src: RandomSource) -> StatReport:
    """Fraction of uniform r-tuples of permutations that are connected."""
    hits = []
    for _ in range(trials):
        g = assemble([random_permutation(n, src).as_injection() for _ in range(r)], n)
        hits.append(is_connected(g))
    return _report(n, r, hits, Metric.FINITE_INDEX_ACCEPT)


def _log_int(x):
    return mpmath.log(mpmath.mpf(int(x)))


def finite_index_fraction_bound(n: int, r: int, table: InjectionTable) -> mpmath.mpf:
    """``(n!/I_n)**r``, an upper bound for the share of finite-index subgroups."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside 1..{table.n_max}")
    with mpmath.workprec(96):
        return mpmath.exp(r * (mpmath.loggamma(n + 1) - _log_int(table[n])))


def asymptotic_crosscheck(n: int, table: InjectionTable) -> mpmath.mpf:
    """Relative error of ``e^{-1/2} / (2 sqrt(pi)) n^{-1/4} e^{2 sqrt n}``
    as an approximation of ``I_n / n!``."""
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside 1..{table.n_max}")
    with mpmath.workprec(96):
        exact = _log_int(table[n]) - mpmath.loggamma(n + 1)
        nn = mpmath.mpf(n)
        approx = (-mpmath.mpf(1) / 2 - mpmath.log(2 * mpmath.sqrt(mpmath.pi))
                  - mpmath.log(nn) / 4 + 2 * mpmath.sqrt(nn))
        return abs(mpmath.expm1(approx - exact))

