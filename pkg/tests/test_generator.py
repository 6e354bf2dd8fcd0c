import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

from stallings import generator
from stallings.counting import build_injection_table
from stallings.generator import (GenerationError, GenerationReport, random_admissible_graph,
                                 random_finite_index_graph, sample_batch)
from stallings.graphs import assemble, canonical_form, is_admissible, is_connected, rank_of
from stallings.injections import PartialInjection, Permutation
from stallings.oracle import admissible_classes, uniformity_test
from stallings.randomness import RandomSource


@pytest.fixture(scope="module")
def table():
    return build_injection_table(120)


def test_report_rejects_inadmissible():
    g = assemble([PartialInjection.empty(2)] * 2, 2)
    with pytest.raises(AssertionError):
        GenerationReport(g, 0, 1, 2, 2)


def test_argument_checks(table):
    src = RandomSource(0)
    with pytest.raises(ValueError):
        random_admissible_graph(0, 2, table, src)
    with pytest.raises(ValueError):
        random_admissible_graph(3, 1, table, src)
    with pytest.raises(ValueError):
        random_finite_index_graph(3, 1, src)
    with pytest.raises(ValueError):
        sample_batch(3, 2, 0, table, 1)


def test_rejection_cap(table):
    with pytest.raises(GenerationError):
        random_admissible_graph(60, 2, table, RandomSource(0), max_attempts=0)


def test_uniform_at_one(table):
    classes = admissible_classes(1, 2)
    assert len(classes) == 4
    p = uniformity_test(lambda s: random_admissible_graph(1, 2, table, s).graph,
                        classes, 400_000, RandomSource(100))
    assert p > 1e-3


@pytest.mark.parametrize("method", ["guided", "integer"])
def test_uniform_at_two(method, table):
    classes = admissible_classes(2, 2)
    p = uniformity_test(lambda s: random_admissible_graph(2, 2, table, s, method).graph,
                        classes, 200 * len(classes), RandomSource(101))
    assert p > 1e-3


def finite_index_classes(n, r):
    perms = [Permutation(p).as_injection()
             for p in itertools.permutations(range(1, n + 1))]
    return sorted({canonical_form(g) for g in
                   (assemble(t, n) for t in itertools.product(perms, repeat=r))
                   if is_connected(g)})


def test_finite_index_oracle_at_two():
    # of the 4 pairs of permutations of {1,2} only (id, id) is disconnected
    assert len(finite_index_classes(2, 2)) == 3


@pytest.mark.parametrize("n", [1, 2, 3])
def test_finite_index_uniform(n):
    classes = finite_index_classes(n, 2)
    p = uniformity_test(lambda s: random_finite_index_graph(n, 2, s).graph,
                        classes, max(200 * len(classes), 1000), RandomSource(102, n))
    assert p > 1e-3


def test_finite_index_trivial():
    rep = random_finite_index_graph(1, 2, RandomSource(5))
    assert rep.rejections == 0 and rep.graph.edge_count == 2


def test_finite_index_rank():
    src = RandomSource(6)
    for n in (5, 17, 40):
        for r in (2, 3):
            g = random_finite_index_graph(n, r, src).graph
            assert rank_of(g) == (r - 1) * n + 1


def expected_rejections(n, table):
    """1/p - 1 with p = P(connected) * P(no leaf), the latter from a Poisson
    approximation of the number of leaves.

    For one uniform partial injection a fixed vertex touches no edge with
    probability I_{n-1}/I_n and misses its out-edge with probability
    sum_k C(n-1,k) C(n,k) k! / I_n.  Two letters, n-1 candidate leaves.
    """
    i_n = int(table[n])
    none = Fraction(int(table[n - 1]), i_n)
    no_out = Fraction(sum(math.comb(n - 1, k) * math.comb(n, k) * math.factorial(k)
                          for k in range(n)), i_n)
    one = 2 * no_out - 2 * none
    leaves = (n - 1) * (none ** 2 + 2 * none * one)
    p = (1 - Fraction(4, n)) * math.exp(-float(leaves))
    return 1 / p - 1


def test_mean_rejections_at_hundred(table):
    reps = [random_admissible_graph(100, 2, table, RandomSource(7, i)).rejections
            for i in range(10_000)]
    want = expected_rejections(100, table)
    assert 0.35 < want < 0.5
    assert np.mean(reps) == pytest.approx(want, rel=0.2)


def test_rejections_decrease_with_n(table):
    small = np.mean([random_admissible_graph(30, 2, table, RandomSource(8, i)).rejections
                     for i in range(3000)])
    large = np.mean([random_admissible_graph(120, 2, table, RandomSource(9, i)).rejections
                     for i in range(3000)])
    assert large < small
    assert expected_rejections(120, table) < expected_rejections(30, table)


def test_sample_batch_streams(table):
    one = sample_batch(6, 2, 1, table, seed=42)
    direct = random_admissible_graph(6, 2, table, RandomSource(42, 0))
    assert one[0] == direct
    a = sample_batch(6, 2, 5, table, seed=42)
    b = sample_batch(6, 2, 5, table, seed=42)
    assert a == b
    assert a[0] == one[0]
    assert len({canonical_form(r.graph) for r in a}) > 1
    for rep in a:
        assert is_admissible(rep.graph) and rep.seed == 42 and rep.n == 6 and rep.r == 2


def test_sample_batch_finite_index():
    reps = sample_batch(5, 2, 4, None, seed=3, finite_index=True)
    assert all(rank_of(rep.graph) == 6 for rep in reps)


def test_max_attempts_constant():
    assert generator.MAX_ATTEMPTS == 10 ** 6
