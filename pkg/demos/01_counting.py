# Counting partial injections.
#
# I_n = number of injective partial maps {1..n} -> {1..n}.  The table is the
# backbone of every sampler in the package, so we look at it first.

import math

from stallings.counting import build_injection_table, subgroup_count_estimate
from stallings.oracle import asymptotic_crosscheck, enumerate_partial_injections

table = build_injection_table(2000)

# the first few values
print([int(table[k]) for k in range(11)])

# brute force agrees for small n
for n in range(6):
    print(n, len(enumerate_partial_injections(n)), table[n])

# I_n grows a bit faster than n!: the ratio I_n / n! is roughly e^{2 sqrt n}
for n in (10, 100, 1000, 2000):
    ratio = math.exp(table.log_egs[n])  # log_egs holds ln(I_n / n!)
    print(f"n={n:5d}  I_n/n! = {ratio:.4e}  digits of I_n: {len(str(table[n]))}")

# how good is the closed-form approximation of I_n / n! ?
for n in (10, 100, 1000, 2000):
    print(n, float(asymptotic_crosscheck(n, table)))  # relative error, shrinking

# leading-order estimate of the number of size-n subgroups of a free group of rank 2
for n in (1, 2, 3, 10):
    est = subgroup_count_estimate(n, 2, table)
    print(n, est.leading, float(est.leading_log))
