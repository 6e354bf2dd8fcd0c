"""Uniform random subgroups by rejection.

``random_admissible_graph`` draws one uniform partial injection per letter
and retries until the A-graph is connected and 1-trim.  The accepted graph
is uniform among admissible labeled A-graphs; every subgroup of size ``n``
has exactly ``(n-1)!`` such labelings, so forgetting the labels of vertices
``2..n`` gives a uniform size-``n`` subgroup.

``random_finite_index_graph`` does the same with uniform permutations; these
never have leaves, so only connectivity is tested.
"""

from __future__ import annotations

from dataclasses import dataclass

from .counting import InjectionTable
from .graphs import AGraph, assemble, is_admissible, is_connected
from .injections import random_partial_injection, random_permutation
from .randomness import RandomSource

__all__ = [
    "GenerationReport",
    "GenerationError",
    "random_admissible_graph",
    "random_finite_index_graph",
    "sample_batch",
    "MAX_ATTEMPTS",
]

MAX_ATTEMPTS = 10 ** 6


class GenerationError(RuntimeError):
    """The rejection loop hit its safety cap."""


@dataclass(frozen=True)
class GenerationReport:
    graph: AGraph
    rejections: int
    seed: int
    n: int
    r: int

    def __post_init__(self):
        if not is_admissible(self.graph):
            raise AssertionError("generator returned an inadmissible graph")


def _check(n, r):
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if r < 2:
        raise ValueError(f"r must be at least 2, got {r}")


def random_admissible_graph(n: int, r: int, table: InjectionTable, src: RandomSource,
                            method: str = "guided",
                            max_attempts: int = MAX_ATTEMPTS) -> GenerationReport:
    _check(n, r)
    for attempt in range(max_attempts):
        letters = [random_partial_injection(n, table, src, method) for _ in range(r)]
        g = assemble(letters, n)
        if is_admissible(g):
            return GenerationReport(g, attempt, src.seed, n, r)
    raise GenerationError(f"no admissible graph after {max_attempts} attempts")


def random_finite_index_graph(n: int, r: int, src: RandomSource,
                              max_attempts: int = MAX_ATTEMPTS) -> GenerationReport:
    _check(n, r)
    for attempt in range(max_attempts):
        letters = [random_permutation(n, src).as_injection() for _ in range(r)]
        g = assemble(letters, n)
        if is_connected(g):
            return GenerationReport(g, attempt, src.seed, n, r)
    raise GenerationError(f"no connected permutation graph after {max_attempts} attempts")


def sample_batch(n: int, r: int, count: int, table: InjectionTable | None, seed: int,
                 finite_index: bool = False, method: str = "guided") -> list:
    """``count`` independent draws; draw ``i`` uses ``RandomSource(seed, i)``.

    With ``finite_index=True`` the table is not used and may be ``None``.
    """
    if count < 1:
        raise ValueError("count must be positive")
    out = []
    for i in range(count):
        src = RandomSource(seed, i)
        if finite_index:
            out.append(random_finite_index_graph(n, r, src))
        else:
            out.append(random_admissible_graph(n, r, table, src, method))
    return out
