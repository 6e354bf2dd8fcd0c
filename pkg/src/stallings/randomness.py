"""Seedable random bits and exact uniform integers.

Every sampler in the package draws from a :class:`RandomSource`, a thin
wrapper around numpy's PCG64 generator (period 2**128).  Seeds are expanded
with :class:`numpy.random.SeedSequence`; independent streams for parallel or
batched work are obtained with ``RandomSource(seed, stream=i)``, which is the
same generator as ``SeedSequence(seed).spawn(i + 1)[i]``.

Uniform integers are produced by bit-level rejection only: draw
``bit_length(bound - 1)`` bits and retry while the result is out of range.
No modular reduction and no floating point is involved, so the distribution
is exactly uniform.
"""

from __future__ import annotations

import secrets

import numpy as np

__all__ = [
    "RandomSource",
    "LazyUniform",
    "uniform_below",
    "uniform_index",
    "fresh_seed",
]

_WORD = 64
_BUFFER = 512
_MASK64 = (1 << 64) - 1


def fresh_seed() -> int:
    """Return a 64-bit seed from system entropy."""
    return secrets.randbits(64)


class RandomSource:
    """Reproducible stream of 64-bit words.

    The stream is a pure function of ``(seed, stream)``.  A source is meant
    to be owned by a single consumer; give each worker its own stream.
    """

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or stream < 0:
            raise ValueError("seed and stream must be non-negative")
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
        self._bitgen = np.random.PCG64(ss)
        self._buf: list[int] = []
        self._pos = 0

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, stream={self.stream})"

    def spawn(self, stream: int) -> "RandomSource":
        """Independent source sharing this seed."""
        return RandomSource(self.seed, stream)

    def next_word(self) -> int:
        if self._pos == len(self._buf):
            self._buf = self._bitgen.random_raw(_BUFFER).tolist()
            self._pos = 0
        w = self._buf[self._pos]
        self._pos += 1
        return w

    def words(self, count: int) -> np.ndarray:
        """Next ``count`` words of the stream as a uint64 array."""
        rest = len(self._buf) - self._pos
        take = min(rest, count)
        head = np.array(self._buf[self._pos:self._pos + take], dtype=np.uint64)
        self._pos += take
        if take == count:
            return head
        tail = self._bitgen.random_raw(count - take)
        return np.concatenate([head, tail])

    def getrandbits(self, k: int) -> int:
        """A uniformly random integer with ``k`` bits (``0 <= x < 2**k``)."""
        if k < 0:
            raise ValueError("number of bits must be non-negative")
        if k == 0:
            return 0
        if k <= _WORD:
            return self.next_word() >> (_WORD - k)
        nwords = -(-k // _WORD)
        x = int.from_bytes(self.words(nwords).astype("<u8").tobytes(), "little")
        return x >> (nwords * _WORD - k)


def uniform_below(bound: int, src: RandomSource) -> int:
    """Exactly uniform integer in ``[0, bound)`` for an arbitrary-size bound.

    Expected number of attempts is below 2.
    """
    if bound < 1:
        raise ValueError(f"bound must be positive, got {bound}")
    k = (bound - 1).bit_length()
    while True:
        x = src.getrandbits(k)
        if x < bound:
            return x


def uniform_index(n: int, src: RandomSource) -> int:
    """Exactly uniform machine integer in ``[0, n)``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    k = (n - 1).bit_length()
    if k == 0:
        return 0
    shift = _WORD - k
    while True:
        x = src.next_word() >> shift
        if x < n:
            return x


class LazyUniform:
    """A uniform real ``U`` in ``[0, 1)`` whose bits are revealed on demand.

    ``U`` lies in ``[num / 2**bits, (num + 1) / 2**bits)``.  Comparing ``U``
    against an exact rational draws more words only while the dyadic interval
    straddles the rational, so the outcome has exactly the right probability.
    """

    __slots__ = ("num", "bits", "src")

    def __init__(self, src: RandomSource, num: int | None = None, bits: int = _WORD):
        self.src = src
        if num is None:
            num = src.next_word()
        self.num = num
        self.bits = bits

    def less_than(self, p: int, q: int) -> bool:
        """Decide ``U < p / q`` exactly (``q > 0``)."""
        while True:
            lhs = self.num * q
            rhs = p << self.bits
            if lhs + q <= rhs:
                return True
            if lhs >= rhs:
                return False
            self.num = (self.num << _WORD) | self.src.next_word()
            self.bits += _WORD
