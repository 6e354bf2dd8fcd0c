# Random subgroups of the free group F(a1, a2).
#
# A size-n subgroup is represented by a connected graph on n vertices with no
# leaf other than the base vertex 1.  Draw one partial injection per letter,
# keep the result if it is admissible.

import numpy as np

from stallings.counting import build_injection_table
from stallings.generator import random_admissible_graph, sample_batch
from stallings.graphs import (accepts_word, basis_words, canonical_form, fold, format_word,
                              rank_of, to_dot, to_json)
from stallings.oracle import enumerate_admissible
from stallings.randomness import RandomSource

table = build_injection_table(500)
src = RandomSource(7)

rep = random_admissible_graph(6, 2, table, src)
g = rep.graph
print(to_json(g))
print("rejections:", rep.rejections, "rank:", rank_of(g))
print(to_dot(g))

# a free basis, read off a spanning tree
basis = basis_words(g)
for w in basis:
    print(format_word(w), accepts_word(g, w))

# folding the basis gives back the same graph (up to renaming vertices 2..n)
print(canonical_form(fold(basis, 2)) == canonical_form(g))

# folding by hand
h = fold(["a1 a2 a1 a2"])
print(h.n, rank_of(h), accepts_word(h, "a1 a2 a1 a2 a1 a2 a1 a2"), accepts_word(h, "a1 a2"))

# exact subgroup counts for tiny sizes, two ways
for n in (1, 2, 3):
    print(enumerate_admissible(n, 2))

# mean rank of a size-400 subgroup: close to n - 2 sqrt(n) + 1 = 361
ranks = [rank_of(r.graph) for r in sample_batch(400, 2, 300, table, seed=99)]
print(np.mean(ranks), np.std(ranks, ddof=1))
