"""Exact counts of partial injections and derived subgroup counts.

``I_n`` is the number of partial injections of ``{1..n}`` into itself
(OEIS A002720).  It satisfies

    I_0 = 1,  I_1 = 2,  I_n = 2n I_{n-1} - (n-1)^2 I_{n-2}.

``I_n`` has about ``n log2 n`` bits, so a dense table up to ``n = 10**5``
would need several gigabytes.  :class:`InjectionTable` therefore stores
exact values densely only for small tables; larger tables keep exact
checkpoint pairs every ``stride`` entries and rebuild a block on demand.

Alongside the exact values the table carries three float64 arrays used by
the fast component-size sampler (``stallings.injections``).  Writing
``a_t = I_t / t!``:

* ``log_egs[t]  = ln a_t``
* ``head[t]     = sum_{j<t} a_j / a_t``            (the mean number of
  sequence components of a uniform size-``t`` partial injection)
* ``head2[t]    = sum_{j<t} (t - j) a_j / a_t``

They are accumulated in 128-bit MPFR arithmetic from the exact integers and
rounded once to double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import gmpy2
import mpmath
import numpy as np
from gmpy2 import mpz

__all__ = [
    "InjectionTable",
    "SubgroupCountEstimate",
    "build_injection_table",
    "verify_pointing_identity",
    "check_injection_bounds",
    "subgroup_count_estimate",
    "save_table",
    "load_table",
    "CACHE_VERSION",
]

CACHE_VERSION = 1
DENSE_LIMIT = 4096
DEFAULT_STRIDE = 256
_MPFR_PREC = 128


class InjectionTable:
    """Immutable table of ``I_0 .. I_{n_max}``.

    Use :func:`build_injection_table` or :func:`load_table` to create one.
    ``table[k]`` returns the exact value ``I_k``.
    """

    def __init__(self, n_max, stride, anchors, log_egs, head, head2):
        self.n_max = n_max
        self.stride = stride
        self._anchors = anchors
        self.log_egs = np.asarray(log_egs, dtype=np.float64)
        self.head = np.asarray(head, dtype=np.float64)
        self.head2 = np.asarray(head2, dtype=np.float64)
        for arr in (self.log_egs, self.head, self.head2):
            arr.setflags(write=False)
        # plain lists are much faster than numpy scalars in the scalar sampler
        self._log_egs = self.log_egs.tolist()
        self._head = self.head.tolist()
        self._head2 = self.head2.tolist()
        self._block: tuple[int, list] | None = None

    def __repr__(self):
        return f"InjectionTable(n_max={self.n_max}, stride={self.stride})"

    def __len__(self):
        return self.n_max + 1

    @property
    def dense(self) -> bool:
        return self.stride == 1

    def __getitem__(self, k: int) -> mpz:
        if not 0 <= k <= self.n_max:
            raise IndexError(f"I_{k} is outside the table (n_max={self.n_max})")
        if self.stride == 1:
            return self._anchors[k]
        start = k - k % self.stride
        block = self._block
        if block is None or block[0] != start:
            block = (start, self._rebuild_block(start))
            self._block = block
        return block[1][k - start]

    def _anchor(self, k):
        v = self._anchors[k]
        if isinstance(v, str):  # loaded from a cache, parsed on first use
            v = self._anchors[k] = mpz(v)
        return v

    def _rebuild_block(self, start):
        stop = min(start + self.stride, self.n_max + 1)
        vals = [self._anchor(start)]
        if start + 1 < stop:
            vals.append(self._anchor(start + 1))
        for n in range(start + 2, stop):
            vals.append(2 * n * vals[-1] - (n - 1) ** 2 * vals[-2])
        return vals

    @property
    def values(self) -> list:
        """All exact values as a list.  Only sensible for modest ``n_max``."""
        return [self[k] for k in range(self.n_max + 1)]

    def anchor_items(self):
        """``(k, I_k)`` pairs actually stored (everything when dense)."""
        if self.stride == 1:
            return list(enumerate(self._anchors))
        return [(k, self._anchor(k)) for k in sorted(self._anchors)]


def build_injection_table(n_max: int, stride: int | None = None) -> InjectionTable:
    """Compute ``I_0 .. I_{n_max}`` with the three-term recurrence.

    >>> [int(v) for v in build_injection_table(5).values]
    [1, 2, 7, 34, 209, 1546]
    """
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    if stride is None:
        stride = 1 if n_max <= DENSE_LIMIT else DEFAULT_STRIDE
    if stride < 1:
        raise ValueError("stride must be positive")

    log_egs = np.zeros(n_max + 1)
    head = np.zeros(n_max + 1)
    head2 = np.zeros(n_max + 1)
    dense = [] if stride == 1 else None
    anchors = {}

    def keep(k, v):
        if dense is not None:
            dense.append(v)
        elif k % stride < 2:
            anchors[k] = v

    prev, cur = None, mpz(1)
    keep(0, cur)
    with gmpy2.context(gmpy2.get_context(), precision=_MPFR_PREC):
        lg = gmpy2.mpfr(0)
        h = gmpy2.mpfr(0)
        h2 = gmpy2.mpfr(0)
        for t in range(1, n_max + 1):
            if t == 1:
                nxt = mpz(2)
            else:
                nxt = 2 * t * cur - (t - 1) ** 2 * prev
            # rho = a_{t-1} / a_t = t I_{t-1} / I_t
            rho = gmpy2.mpfr(t * cur) / gmpy2.mpfr(nxt)
            lg = lg - gmpy2.log(rho)
            h = (h + 1) * rho
            h2 = h2 * rho + h
            log_egs[t] = float(lg)
            head[t] = float(h)
            head2[t] = float(h2)
            prev, cur = cur, nxt
            keep(t, cur)
    return InjectionTable(n_max, stride, dense if dense is not None else anchors,
                          log_egs, head, head2)


def verify_pointing_identity(n: int, table: InjectionTable) -> bool:
    """Exact check of the pointing identity
    ``n I_n / n! = sum_{k=1..n} (k+1) I_{n-k} / (n-k)!``.

    Both sides are multiplied by ``(n-1)!``, giving
    ``I_n = sum_k (k+1) (n-1)!/(n-k)! I_{n-k}``.
    """
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside 1..{table.n_max}")
    total = mpz(0)
    falling = mpz(1)  # (n-1)! / (n-k)!
    for k in range(1, n + 1):
        if k > 1:
            falling *= n - k + 1
        total += (k + 1) * falling * table[n - k]
    return table[n] == total


def _iv(x):
    return mpmath.iv.mpf(int(x))


def check_injection_bounds(n: int, table: InjectionTable) -> bool:
    """Check the chain

        (n+1)! <= (n+1) I_{n-1} <= I_n <= n e^{1/sqrt n} I_{n-1} <= n! e^{2 sqrt n - 1}.

    The integer links are exact.  The transcendental links use interval
    arithmetic and only report ``False`` when the interval evaluation proves
    the inequality wrong.
    """
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside 1..{table.n_max}")
    i_n, i_prev = table[n], table[n - 1]
    fact = gmpy2.fac(n)
    if not (fact * (n + 1) <= (n + 1) * i_prev <= i_n):
        return False
    iv = mpmath.iv
    old = iv.prec
    iv.prec = 128
    try:
        rt = iv.sqrt(iv.mpf(n))
        # I_n / (n I_{n-1}) <= e^{1/sqrt n}
        ratio = _iv(i_n) / _iv(n * i_prev)
        step = iv.exp(1 / rt)
        if not ratio.a <= step.b:
            return False
        # n e^{1/sqrt n} I_{n-1} / n! <= e^{2 sqrt n - 1}
        lhs = step * _iv(n * i_prev) / _iv(fact)
        rhs = iv.exp(2 * rt - 1)
        if not lhs.a <= rhs.b:
            return False
    finally:
        iv.prec = old
    return True


@dataclass(frozen=True)
class SubgroupCountEstimate:
    """Leading-order estimate of the number of size-``n`` subgroups.

    ``leading`` is the exact rational ``I_n**r / (n-1)!``; ``stirling_log``
    is the natural log of the closed Stirling form of the same asymptotic.
    """

    n: int
    r: int
    numerator: int
    denominator: int
    stirling_log: mpmath.mpf

    @property
    def leading(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def leading_log(self) -> mpmath.mpf:
        return mpmath.log(self.numerator) - mpmath.log(self.denominator)


def subgroup_count_estimate(n: int, r: int, table: InjectionTable) -> SubgroupCountEstimate:
    if not 1 <= n <= table.n_max:
        raise ValueError(f"n={n} outside 1..{table.n_max}")
    if r < 2:
        raise ValueError("r must be at least 2")
    num = table[n] ** r
    den = gmpy2.fac(n - 1)
    g = gmpy2.gcd(num, den)
    num, den = int(num // g), int(den // g)
    with mpmath.workprec(128):
        nn = mpmath.mpf(n)
        slog = (-mpmath.mpf(r) / 2 * mpmath.log(2 * mpmath.e)
                - mpmath.log(2 * mpmath.pi) / 2
                + (-(r - 1) * nn + 2 * r * mpmath.sqrt(nn))
                + ((r - 1) * nn + mpmath.mpf(r + 2) / 4) * mpmath.log(nn))
    return SubgroupCountEstimate(n, r, num, den, slog)


# -- cache -------------------------------------------------------------------

_MAGIC = "# stallings injection table"


def save_table(table: InjectionTable, path) -> None:
    """Write a table cache: versioned header, then one ``k I_k`` line per
    stored exact value (decimal), then one line per float row (hex)."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w") as fh:
        fh.write(f"{_MAGIC}\nversion {CACHE_VERSION}\n")
        fh.write(f"n_max {table.n_max}\nstride {table.stride}\n")
        items = table.anchor_items()
        fh.write(f"exact {len(items)}\n")
        for k, v in items:
            fh.write(f"{k} {gmpy2.digits(v)}\n")
        fh.write("float\n")
        for t in range(table.n_max + 1):
            fh.write(f"{table.log_egs[t].hex()} {table.head[t].hex()} "
                     f"{table.head2[t].hex()}\n")
        fh.write("end\n")
    tmp.replace(path)


def load_table(path) -> InjectionTable:
    """Read a cache written by :func:`save_table`.

    Raises ``ValueError`` on any malformed or inconsistent content.
    """
    try:
        with open(path) as fh:
            lines = fh.read().split("\n")
        if lines[0] != _MAGIC:
            raise ValueError("not an injection table cache")
        if lines[1] != f"version {CACHE_VERSION}":
            raise ValueError(f"unsupported cache version: {lines[1]!r}")
        n_max = int(lines[2].removeprefix("n_max "))
        stride = int(lines[3].removeprefix("stride "))
        count = int(lines[4].removeprefix("exact "))
        pos = 5
        exact = {}
        for line in lines[pos:pos + count]:
            k, v = line.split(" ")
            if not v.isdigit():
                raise ValueError(f"bad exact value for I_{k}")
            # big checkpoints stay as text until a block needs them
            exact[int(k)] = mpz(v) if stride == 1 else v
        pos += count
        if lines[pos] != "float":
            raise ValueError("missing float section")
        rows = lines[pos + 1:pos + 2 + n_max]
        if len(rows) != n_max + 1 or lines[pos + 2 + n_max] != "end":
            raise ValueError("truncated float section")
        cols = [[float.fromhex(x) for x in row.split(" ")] for row in rows]
        if stride < 1:
            raise ValueError(f"bad stride {stride}")
        if any(len(c) != 3 for c in cols):
            raise ValueError("float rows need three columns")
        need = [k for k in range(n_max + 1) if stride == 1 or k % stride < 2]
        if sorted(exact) != need:
            raise ValueError("exact section does not match the stride")
    except (IndexError, ValueError) as exc:
        raise ValueError(f"corrupt table cache {path}: {exc}") from exc
    arr = np.array(cols, dtype=np.float64).reshape(n_max + 1, 3)
    if stride == 1:
        anchors = [exact[k] for k in range(n_max + 1)]
    else:
        anchors = exact
    table = InjectionTable(n_max, stride, anchors, arr[:, 0], arr[:, 1], arr[:, 2])
    _spot_check(table)
    return table


def _spot_check(table):
    want = (1, 2, 7, 34, 209)
    for k in range(min(len(want), table.n_max + 1)):
        if table[k] != want[k]:
            raise ValueError(f"corrupt table cache: I_{k} = {table[k]}")
    n = table.n_max
    if n >= 2 and table[n] != 2 * n * table[n - 1] - (n - 1) ** 2 * table[n - 2]:
        raise ValueError("corrupt table cache: recurrence fails at n_max")
    if not np.all(np.isfinite(table.log_egs)):
        raise ValueError("corrupt table cache: float section")
    want_log = math.log(int(table[n])) - math.lgamma(n + 1)
    if not math.isclose(table.log_egs[n], want_log, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError("corrupt table cache: float section disagrees with I_n_max")
