# Sampling uniform partial injections.
#
# A partial injection is a union of cycles and sequences (paths).  The sampler
# picks component sizes and kinds first, then spreads labels with a random
# permutation.

from collections import Counter

import numpy as np

from stallings.counting import build_injection_table
from stallings.injections import (count_sequences, decompose, random_partial_injection,
                                  random_shape_sequence, sequence_count_batch)
from stallings.randomness import RandomSource

table = build_injection_table(10_000)
src = RandomSource(seed=2024)

inj = random_partial_injection(12, table, src)
print(inj.image)                        # None = outside the domain
print(sorted(decompose(inj).elements()))

# shapes before labeling
shape = random_shape_sequence(12, table, src)
print(" ".join(str(s) for s in shape.shapes))

# every one of the 7 partial injections of {1, 2} should come up equally often
hist = Counter(random_partial_injection(2, table, src).image for _ in range(70_000))
for image, c in sorted(hist.items(), key=str):
    print(image, c)

# the number of sequences concentrates around sqrt(n)
for n in (100, 1_000, 10_000):
    counts = sequence_count_batch(n, 20_000, table, RandomSource(1, n))
    print(f"n={n:6d}  mean={counts.mean():8.3f}  sqrt(n)={np.sqrt(n):8.3f}  sd={counts.std():.3f}")

# the scalar sampler gives the same statistic, just slower
print(np.mean([count_sequences(random_partial_injection(100, table, src)) for _ in range(2000)]))

# the literal integer method and the default float-guided method are interchangeable
a = Counter(random_partial_injection(3, table, src, method="integer").image for _ in range(34_000))
print(min(a.values()), max(a.values()))  # all near 1000
