# Finite-index subgroups.
#
# These are the subgroups whose graph uses a full permutation for every
# letter.  They are sampled by drawing permutations until the graph is
# connected, and they are very rare among all subgroups of a given size.

import mpmath

from stallings.counting import build_injection_table
from stallings.generator import random_finite_index_graph
from stallings.graphs import is_finite_index, rank_of
from stallings.oracle import finite_index_accept_stat, finite_index_fraction_bound
from stallings.randomness import RandomSource

src = RandomSource(5)
rep = random_finite_index_graph(8, 2, src)
print(rep.graph.edges())
print(rank_of(rep.graph), is_finite_index(rep.graph))  # rank (r-1) n + 1 = 9

# connected permutation pairs are the norm: acceptance is about 1 - 1/n
for n in (5, 20, 100):
    print(n, finite_index_accept_stat(n, 2, 5000, RandomSource(n)).mean, 1 - 1 / n)

# upper bound on the share of finite-index subgroups among all size-n ones
table = build_injection_table(300)
for n in (1, 2, 10, 50, 100, 200, 300):
    print(n, mpmath.nstr(finite_index_fraction_bound(n, 2, table), 5))
