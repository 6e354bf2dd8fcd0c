"""A-graphs: candidate Stallings graphs of subgroups of a free group.

An A-graph on vertices ``1..n`` over letters ``a_1..a_r`` is an r-tuple of
partial injections; letter ``i`` has an edge ``u -a_i-> v`` exactly when its
injection maps ``u`` to ``v``.  Vertex 1 is the base.  The pair is
*admissible* (a graphical representation of a subgroup) when the graph is
connected and no vertex other than the base is a leaf.

Words over ``a_1..a_r`` and their inverses are tuples of ``(letter, sign)``
pairs with ``letter`` in ``1..r`` and ``sign`` in ``{1, -1}``; the text syntax
is ``"a1 a2 a1' a2'"``.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .injections import PartialInjection

__all__ = [
    "AGraph",
    "assemble",
    "is_connected",
    "is_one_trim",
    "is_admissible",
    "rank_of",
    "is_finite_index",
    "canonical_form",
    "fold",
    "accepts_word",
    "basis_words",
    "parse_word",
    "format_word",
    "reduce_word",
    "to_json",
    "from_json",
    "to_dot",
]

Word = tuple


@dataclass(frozen=True)
class AGraph:
    n: int
    r: int
    letters: tuple
    base: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("an A-graph needs at least one vertex")
        if self.r < 1 or len(self.letters) != self.r:
            raise ValueError(f"expected {self.r} letters, got {len(self.letters)}")
        if self.base != 1:
            raise ValueError("the base vertex is always 1")
        for inj in self.letters:
            if inj.n != self.n:
                raise ValueError(f"letter acts on {inj.n} points, graph has {self.n}")

    @property
    def edge_count(self) -> int:
        return sum(inj.domain_size for inj in self.letters)

    def edges(self) -> list:
        """``(u, letter, v)`` triples sorted by letter then source."""
        return [(u, a, v) for a, inj in enumerate(self.letters, 1)
                for u, v in inj.pairs()]

    def inverses(self) -> list:
        return [inj.inverse_image() for inj in self.letters]

    def relabel(self, perm: Sequence[int]) -> "AGraph":
        """Rename vertex ``u`` to ``perm[u - 1]`` (``perm[0]`` must be 1)."""
        letters = []
        for inj in self.letters:
            image = [None] * self.n
            for u, v in inj.pairs():
                image[perm[u - 1] - 1] = perm[v - 1]
            letters.append(PartialInjection(tuple(image)))
        return AGraph(self.n, self.r, tuple(letters))


def assemble(injections: Sequence[PartialInjection], n: int) -> AGraph:
    if not injections:
        raise ValueError("need at least one letter")
    for inj in injections:
        if inj.n != n:
            raise ValueError(f"injection on {inj.n} points, expected {n}")
    return AGraph(n, len(injections), tuple(injections))


def _reach(g: AGraph) -> list:
    fwd = [inj.image for inj in g.letters]
    inv = g.inverses()
    seen = [False] * (g.n + 1)
    seen[1] = True
    order = [1]
    stack = [1]
    while stack:
        v = stack.pop()
        for table in fwd:
            w = table[v - 1]
            if w is not None and not seen[w]:
                seen[w] = True
                order.append(w)
                stack.append(w)
        for table in inv:
            w = table[v - 1]
            if w is not None and not seen[w]:
                seen[w] = True
                order.append(w)
                stack.append(w)
    return order


def is_connected(g: AGraph) -> bool:
    return len(_reach(g)) == g.n


def _occurrences(g: AGraph) -> list:
    occ = [0] * (g.n + 1)
    for inj in g.letters:
        for u, v in enumerate(inj.image, 1):
            if v is not None:
                occ[u] += 1
                occ[v] += 1
    return occ


def is_one_trim(g: AGraph) -> bool:
    """No vertex other than the base occurs at most once among the edges.

    A loop counts twice for its vertex.
    """
    occ = _occurrences(g)
    return all(occ[v] >= 2 for v in range(2, g.n + 1))


def is_admissible(g: AGraph) -> bool:
    return is_one_trim(g) and is_connected(g)


def rank_of(g: AGraph) -> int:
    """Rank of the represented subgroup, ``|E| - |V| + 1``."""
    if not is_admissible(g):
        raise ValueError("rank is only defined for admissible graphs")
    return g.edge_count - g.n + 1


def is_finite_index(g: AGraph) -> bool:
    if not is_admissible(g):
        raise ValueError("finite index is only defined for admissible graphs")
    total = all(inj.is_total for inj in g.letters)
    by_rank = rank_of(g) == (g.r - 1) * g.n + 1
    if total != by_rank:
        raise AssertionError("finite-index criteria disagree")
    return total


def canonical_form(g: AGraph) -> bytes:
    """Isomorphism-invariant encoding of a connected rooted A-graph.

    Vertices are renumbered in breadth-first order from the base, trying
    ``a_1..a_r`` forward and then backward at each vertex.  Determinism in
    both directions makes this order independent of the original labels.
    """
    fwd = [inj.image for inj in g.letters]
    inv = g.inverses()
    new = [0] * (g.n + 1)
    new[1] = 1
    queue = deque([1])
    count = 1
    while queue:
        v = queue.popleft()
        for table in (*fwd, *inv):
            w = table[v - 1]
            if w is not None and not new[w]:
                count += 1
                new[w] = count
                queue.append(w)
    if count != g.n:
        raise ValueError("canonical form requires a connected graph")
    edges = sorted((new[u], a, new[v]) for u, a, v in g.edges())
    body = ";".join(f"{u},{a},{v}" for u, a, v in edges)
    return f"{g.n}:{g.r}:{body}".encode("ascii")


# -- words -----------------------------------------------------------------------

def parse_word(text: str) -> Word:
    """``"a1 a2 a1'"`` -> ``((1, 1), (2, 1), (1, -1))``."""
    word = []
    for tok in text.split():
        sign = 1
        if tok.endswith("'"):
            sign = -1
            tok = tok[:-1]
        if not (tok.startswith("a") and tok[1:].isdigit() and int(tok[1:]) >= 1):
            raise ValueError(f"bad letter {tok!r}")
        word.append((int(tok[1:]), sign))
    return tuple(word)


def format_word(word: Word) -> str:
    return " ".join(f"a{a}" + ("'" if e < 0 else "") for a, e in word)


def reduce_word(word: Iterable) -> Word:
    out = []
    for a, e in word:
        if out and out[-1] == (a, -e):
            out.pop()
        else:
            out.append((a, e))
    return tuple(out)


def _as_word(w) -> Word:
    return parse_word(w) if isinstance(w, str) else tuple(tuple(x) for x in w)


def accepts_word(g: AGraph, word) -> bool:
    """Does the word label a closed path at the base, i.e. lie in the subgroup?"""
    word = _as_word(word)
    fwd = [inj.image for inj in g.letters]
    inv = None
    v = 1
    for a, e in word:
        if not 1 <= a <= g.r:
            return False
        if e > 0:
            v = fwd[a - 1][v - 1]
        else:
            if inv is None:
                inv = g.inverses()
            v = inv[a - 1][v - 1]
        if v is None:
            return False
    return v == 1


def basis_words(g: AGraph) -> list:
    """A free basis of the represented subgroup.

    One word per edge outside a breadth-first spanning tree: go to the
    source along the tree, cross the edge, come back along the tree.
    """
    fwd = [inj.image for inj in g.letters]
    inv = g.inverses()
    path = {1: ()}
    tree = set()
    queue = deque([1])
    while queue:
        v = queue.popleft()
        for a in range(g.r):
            w = fwd[a][v - 1]
            if w is not None and w not in path:
                path[w] = path[v] + ((a + 1, 1),)
                tree.add((v, a + 1, w))
                queue.append(w)
        for a in range(g.r):
            w = inv[a][v - 1]
            if w is not None and w not in path:
                path[w] = path[v] + ((a + 1, -1),)
                tree.add((w, a + 1, v))
                queue.append(w)
    words = []
    for u, a, v in g.edges():
        if (u, a, v) in tree:
            continue
        back = tuple((b, -e) for b, e in reversed(path[v]))
        words.append(reduce_word(path[u] + ((a, 1),) + back))
    return words


def fold(words, r: int | None = None) -> AGraph:
    """Stallings graph of the subgroup generated by ``words``.

    Builds the bouquet of word loops at the base and merges vertices while
    some letter has two edges out of (or into) the same vertex.  Quadratic
    in the total word length.
    """
    words = [_as_word(w) for w in words]
    letters_used = [a for w in words for a, _ in w]
    if r is None:
        if not letters_used:
            raise ValueError("cannot infer the alphabet size from no letters")
        r = max(letters_used)
    for w in words:
        if not w:
            raise ValueError("generators must be non-empty")
        if reduce_word(w) != w:
            raise ValueError(f"word {format_word(w)!r} is not freely reduced")
        for a, e in w:
            if not 1 <= a <= r or e not in (1, -1):
                raise ValueError(f"bad letter {(a, e)} for r={r}")

    edges = []
    nv = 1
    for w in words:
        cur = 0
        for i, (a, e) in enumerate(w):
            if i == len(w) - 1:
                nxt = 0
            else:
                nxt = nv
                nv += 1
            edges.append((cur, a, nxt) if e > 0 else (nxt, a, cur))
            cur = nxt

    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        x, y = find(x), find(y)
        if x == y:
            return False
        if x == find(0) or (y != find(0) and x < y):
            parent[y] = x
        else:
            parent[x] = y
        return True

    while True:
        edges = sorted({(find(u), a, find(v)) for u, a, v in edges})
        out, inn = {}, {}
        merged = False
        for u, a, v in edges:
            w = out.setdefault((u, a), v)
            if w != v:
                merged |= union(w, v)
            w = inn.setdefault((a, v), u)
            if w != u:
                merged |= union(w, u)
        if not merged:
            break

    root = find(0)
    # drop hanging trees: non-base vertices met by at most one edge
    while True:
        occ = {}
        for u, a, v in edges:
            occ[u] = occ.get(u, 0) + 1
            occ[v] = occ.get(v, 0) + 1
        leaves = {x for x, c in occ.items() if c <= 1 and x != root}
        if not leaves:
            break
        edges = [e for e in edges if e[0] not in leaves and e[2] not in leaves]

    verts = {root} | {u for u, _, _ in edges} | {v for _, _, v in edges}
    names = {root: 1}
    for x in sorted(verts - {root}):
        names[x] = len(names) + 1
    n = len(names)
    images = [[None] * n for _ in range(r)]
    for u, a, v in edges:
        images[a - 1][names[u] - 1] = names[v]
    g = AGraph(n, r, tuple(PartialInjection(tuple(im)) for im in images))
    return g.relabel(_bfs_names(g))


def _bfs_names(g: AGraph) -> list:
    order = _reach(g)
    perm = [0] * g.n
    for i, v in enumerate(order, 1):
        perm[v - 1] = i
    return perm


# -- serialization ------------------------------------------------------------

def to_json(g: AGraph) -> dict:
    return {
        "n": g.n,
        "r": g.r,
        "base": 1,
        "edges": [[u, f"a_{a}", v] for u, a, v in g.edges()],
    }


def from_json(data) -> AGraph:
    if isinstance(data, str):
        data = json.loads(data)
    n, r = int(data["n"]), int(data["r"])
    if data.get("base", 1) != 1:
        raise ValueError("base must be 1")
    images = [[None] * n for _ in range(r)]
    for u, name, v in data["edges"]:
        if not name.startswith("a_"):
            raise ValueError(f"bad letter name {name!r}")
        a = int(name[2:])
        if not 1 <= a <= r:
            raise ValueError(f"letter {name} outside a_1..a_{r}")
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"edge {[u, name, v]} leaves the vertex set 1..{n}")
        if images[a - 1][u - 1] is not None:
            raise ValueError(f"vertex {u} has two {name} edges")
        images[a - 1][u - 1] = v
    return AGraph(n, r, tuple(PartialInjection(tuple(im)) for im in images))


def to_dot(g: AGraph, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    lines.append('  1 [shape=doublecircle];')
    for v in range(2, g.n + 1):
        lines.append(f"  {v} [shape=circle];")
    for u, a, v in g.edges():
        lines.append(f'  {u} -> {v} [label="a{a}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
