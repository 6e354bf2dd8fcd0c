"""Uniform random partial injections by the recursive method.

A partial injection of ``{1..n}`` is a disjoint union of cycles and
non-empty sequences (simple paths).  A uniform one is drawn in three steps:

1. repeatedly draw the size ``k`` of a component of the remaining ``m``
   points, with probability ``p_k = (k+1) (m-1)!/(m-k)! I_{m-k} / I_m``;
2. make it a sequence with probability ``k/(k+1)``, a cycle otherwise;
3. label the resulting shape list with a uniform random permutation.

Two interchangeable implementations of step 1 are provided; both produce
the exact distribution.

``method="integer"``
    The textbook loop: one uniform integer below ``I_m`` and running exact
    partial sums.  Each draw costs ``k`` big-integer multiplications, which
    is fine up to a few thousand points.

``method="guided"`` (default)
    A uniform real ``U`` is revealed 64 bits at a time
    (:class:`~stallings.randomness.LazyUniform`).  The cumulative
    distribution is evaluated in float64 from the table's precomputed ratios
    and located by binary search; the answer is accepted only if ``U`` is
    separated from both neighbouring cumulative values by a margin far larger
    than the float error.  Otherwise the component is decided with exact
    integers, using the same ``U``.  Cost is ``O(log m)`` float operations
    per component.
"""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .counting import InjectionTable
from .randomness import LazyUniform, RandomSource, uniform_below, uniform_index

__all__ = [
    "Kind",
    "ComponentShape",
    "ShapeSequence",
    "PartialInjection",
    "Permutation",
    "draw_component_size",
    "draw_component_kind",
    "random_shape_sequence",
    "random_permutation",
    "label_shapes",
    "random_partial_injection",
    "decompose",
    "count_sequences",
    "sequence_count_batch",
    "METHODS",
]

METHODS = ("guided", "integer")

# float-vs-exact safety margin; the float evaluation is good to ~1e-12
_TOL = 1e-9
_TINY = 1e-300
_TWO64 = 2.0 ** -64


class Kind(enum.Enum):
    SEQUENCE = "sequence"
    CYCLE = "cycle"


@dataclass(frozen=True)
class ComponentShape:
    kind: Kind
    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"component size must be positive, got {self.size}")

    def __lt__(self, other):
        return (self.kind.value, self.size) < (other.kind.value, other.size)

    def __str__(self):
        return f"{'seq' if self.kind is Kind.SEQUENCE else 'cyc'}({self.size})"


@dataclass(frozen=True)
class ShapeSequence:
    """Unlabeled partial injection: components in draw order."""

    shapes: tuple
    total: int

    def __post_init__(self):
        if sum(s.size for s in self.shapes) != self.total:
            raise ValueError("shape sizes do not add up to total")

    def __len__(self):
        return len(self.shapes)

    def count(self, kind: Kind) -> int:
        return sum(1 for s in self.shapes if s.kind is kind)


@dataclass(frozen=True)
class PartialInjection:
    """Injective partial map on ``{1..n}``.

    ``image[u - 1]`` is the image of ``u`` or ``None`` when ``u`` is outside
    the domain.
    """

    image: tuple

    def __post_init__(self):
        n = len(self.image)
        seen = set()
        for v in self.image:
            if v is None:
                continue
            if not 1 <= v <= n:
                raise ValueError(f"image value {v} outside 1..{n}")
            if v in seen:
                raise ValueError(f"value {v} has two preimages")
            seen.add(v)

    @classmethod
    def from_pairs(cls, n: int, pairs) -> "PartialInjection":
        image = [None] * n
        for u, v in pairs:
            if image[u - 1] is not None:
                raise ValueError(f"{u} mapped twice")
            image[u - 1] = v
        return cls(tuple(image))

    @classmethod
    def empty(cls, n: int) -> "PartialInjection":
        return cls((None,) * n)

    @classmethod
    def identity(cls, n: int) -> "PartialInjection":
        return cls(tuple(range(1, n + 1)))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, u: int):
        return self.image[u - 1]

    def pairs(self):
        """Defined ``(u, v)`` pairs in increasing ``u``."""
        return [(u, v) for u, v in enumerate(self.image, 1) if v is not None]

    def inverse_image(self) -> list:
        inv = [None] * self.n
        for u, v in enumerate(self.image, 1):
            if v is not None:
                inv[v - 1] = u
        return inv

    @property
    def domain_size(self) -> int:
        return sum(1 for v in self.image if v is not None)

    @property
    def is_total(self) -> bool:
        return all(v is not None for v in self.image)


@dataclass(frozen=True)
class Permutation:
    image: tuple

    def __post_init__(self):
        if sorted(self.image) != list(range(1, len(self.image) + 1)):
            raise ValueError("not a permutation of 1..n")

    @property
    def n(self) -> int:
        return len(self.image)

    def as_injection(self) -> PartialInjection:
        return PartialInjection(self.image)


# -- component sizes -----------------------------------------------------------

def _check_n(n, table):
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    if n > table.n_max:
        raise ValueError(f"n={n} exceeds table n_max={table.n_max}")


def draw_component_size(n: int, table: InjectionTable, src: RandomSource) -> int:
    """Size of the pointed component of a uniform size-``n`` partial injection.

    Exact integer version: ``dice`` is uniform below ``I_n`` and ``S`` runs
    through ``I_n (p_1 + ... + p_k)``.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    _check_n(n, table)
    dice = uniform_below(table[n], src)
    k = 1
    t = 1
    s = 2 * table[n - 1]
    while dice >= s:
        k += 1
        t *= n - k + 1
        s += (k + 1) * t * table[n - k]
    return k


def _exact_size(m: int, table: InjectionTable, u: LazyUniform) -> int:
    # smallest k with U >= 1 - S_k / I_m, i.e. U >= (I_m - S_k) / I_m
    i_m = table[m]
    k = 1
    t = 1
    s = 2 * table[m - 1]
    while u.less_than(i_m - s, i_m):
        k += 1
        t *= m - k + 1
        s += (k + 1) * t * table[m - k]
    return k


def _guided_size(m: int, table: InjectionTable, src: RandomSource) -> int:
    # Probability that the remainder m - k falls below t:
    #   R(t) = ((m+1-t) head[t] + head2[t]) * exp(lg[t] - lg[m]) / m,
    # with R(0) = 0 and R(m) = 1.  The remainder is the largest t with R(t) <= U.
    lg, h, h2 = table._log_egs, table._head, table._head2
    lgm = lg[m]
    word = src.next_word()
    uf = word * _TWO64
    lo, hi = 0, m
    r_lo, r_hi = 0.0, 1.0
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        r = ((m + 1 - mid) * h[mid] + h2[mid]) * math.exp(lg[mid] - lgm) / m
        if r <= uf:
            lo, r_lo = mid, r
        else:
            hi, r_hi = mid, r
    ok = True
    if lo > 0:
        ok = r_lo * (1 + _TOL) + _TINY <= uf * (1 - _TOL)
    if ok and hi < m:
        ok = r_hi * (1 - _TOL) - _TINY >= (word + 1) * _TWO64 * (1 + _TOL)
    if ok:
        return m - lo
    return _exact_size(m, table, LazyUniform(src, word))


def draw_component_kind(k: int, src: RandomSource) -> ComponentShape:
    """Sequence with probability ``k/(k+1)``, cycle otherwise."""
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    kind = Kind.SEQUENCE if uniform_index(k + 1, src) < k else Kind.CYCLE
    return ComponentShape(kind, k)


def random_shape_sequence(n: int, table: InjectionTable, src: RandomSource,
                          method: str = "guided") -> ShapeSequence:
    _check_n(n, table)
    if method == "guided":
        draw = _guided_size
    elif method == "integer":
        draw = draw_component_size
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    shapes = []
    m = n
    while m > 0:
        k = draw(m, table, src)
        shapes.append(draw_component_kind(k, src))
        m -= k
    return ShapeSequence(tuple(shapes), n)


# -- labeling ------------------------------------------------------------------

def random_permutation(n: int, src: RandomSource) -> Permutation:
    """Uniform permutation of ``1..n`` (Fisher-Yates)."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    p = list(range(1, n + 1))
    for i in range(1, n):
        j = uniform_index(i + 1, src)
        p[i], p[j] = p[j], p[i]
    return Permutation(tuple(p))


def label_shapes(shapes: ShapeSequence, perm: Permutation) -> PartialInjection:
    """Turn a shape list into a partial injection.

    Labels are taken from ``perm`` left to right; inside a component with
    labels ``v_1..v_k`` the edges are ``v_i -> v_{i+1}``, plus ``v_k -> v_1``
    for a cycle.
    """
    if perm.n != shapes.total:
        raise ValueError(f"permutation size {perm.n} != shape total {shapes.total}")
    image = [None] * perm.n
    labels = perm.image
    pos = 0
    for shape in shapes.shapes:
        vs = labels[pos:pos + shape.size]
        for a, b in zip(vs, vs[1:]):
            image[a - 1] = b
        if shape.kind is Kind.CYCLE:
            image[vs[-1] - 1] = vs[0]
        pos += shape.size
    return PartialInjection(tuple(image))


def random_partial_injection(n: int, table: InjectionTable, src: RandomSource,
                             method: str = "guided") -> PartialInjection:
    """Uniform random partial injection of ``{1..n}``."""
    shapes = random_shape_sequence(n, table, src, method)
    return label_shapes(shapes, random_permutation(n, src))


# -- structure -----------------------------------------------------------------

def decompose(inj: PartialInjection) -> Counter:
    """Multiset of components of the functional graph of ``inj``."""
    n = inj.n
    image = inj.image
    inv = inj.inverse_image()
    seen = [False] * n
    comps = Counter()
    for start in range(1, n + 1):
        if inv[start - 1] is not None:
            continue
        size = 0
        v = start
        while v is not None:
            seen[v - 1] = True
            size += 1
            v = image[v - 1]
        comps[ComponentShape(Kind.SEQUENCE, size)] += 1
    for start in range(1, n + 1):
        if seen[start - 1]:
            continue
        size = 0
        v = start
        while not seen[v - 1]:
            seen[v - 1] = True
            size += 1
            v = image[v - 1]
            if v is None:
                raise ValueError("inconsistent partial injection")
        comps[ComponentShape(Kind.CYCLE, size)] += 1
    return comps


def count_sequences(inj: PartialInjection) -> int:
    """Number of sequence components (points without a preimage)."""
    return inj.n - inj.domain_size


# -- batched sequence counts ---------------------------------------------------

def _bit_lengths(values):
    bits = np.zeros(values.shape, dtype=np.int64)
    v = values.copy()
    while np.any(v > 0):
        bits += v > 0
        v >>= 1
    return bits


def _uniform_index_vec(bounds, src):
    # bit-level rejection, one 64-bit word per attempt (bounds >= 2)
    shift = (64 - _bit_lengths(bounds - 1)).astype(np.uint64)
    out = np.empty(bounds.shape, dtype=np.int64)
    todo = np.arange(bounds.size)
    while todo.size:
        x = (src.words(todo.size) >> shift[todo]).astype(np.int64)
        good = x < bounds[todo]
        out[todo[good]] = x[good]
        todo = todo[~good]
    return out


def sequence_count_batch(n: int, trials: int, table: InjectionTable,
                         src: RandomSource) -> np.ndarray:
    """Sequence counts of ``trials`` independent uniform size-``n`` injections.

    Only the shapes are drawn (the count does not depend on labels), all
    trials advancing together in numpy.  Same exactness guarantee as the
    scalar guided sampler.
    """
    _check_n(n, table)
    lg, h, h2 = table.log_egs, table.head, table.head2
    m = np.full(trials, n, dtype=np.int64)
    counts = np.zeros(trials, dtype=np.int64)
    active = np.nonzero(m > 0)[0]

    def ratio(mm, t):
        return ((mm + 1 - t) * h[t] + h2[t]) * np.exp(lg[t] - lg[mm]) / mm

    while active.size:
        ma = m[active]
        words = src.words(active.size)
        uf = words.astype(np.float64) * _TWO64
        lo = np.zeros_like(ma)
        hi = ma.copy()
        while True:
            sel = hi - lo > 1
            if not sel.any():
                break
            mid = (lo + hi) >> 1
            below = ratio(ma, mid) <= uf
            lo = np.where(sel & below, mid, lo)
            hi = np.where(sel & ~below, mid, hi)
        r_lo = np.where(lo > 0, ratio(ma, lo), 0.0)
        r_hi = np.where(hi < ma, ratio(ma, hi), 1.0)
        ok = (lo == 0) | (r_lo * (1 + _TOL) + _TINY <= uf * (1 - _TOL))
        u_top = (words.astype(np.float64) + 1.0) * _TWO64
        ok &= (hi == ma) | (r_hi * (1 - _TOL) - _TINY >= u_top * (1 + _TOL))
        k = ma - lo
        for i in np.nonzero(~ok)[0]:
            k[i] = _exact_size(int(ma[i]), table, LazyUniform(src, int(words[i])))
        seq = _uniform_index_vec(k + 1, src) < k
        counts[active] += seq
        m[active] -= k
        active = active[m[active] > 0]
    return counts
