"""Simple undirected graphs, Erdos-Renyi sampling, and exact motif counts.

Vertices are the integers ``0..N-1``. A :class:`Graph` stores sorted,
symmetric neighbor lists and is immutable once built.

Random graphs use numpy's PCG64 bit generator seeded directly with the
caller's integer seed, so ``er_generate(n, p, seed)`` is reproducible across
platforms and numpy versions that keep PCG64 stable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .errors import ParseError


@dataclass(frozen=True)
class Graph:
    n_vertices: int
    adjacency: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.n_vertices < 1:
            raise ValueError("graph needs at least one vertex")
        if len(self.adjacency) != self.n_vertices:
            raise ValueError("adjacency must have one entry per vertex")
        for r, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ValueError(f"neighbors of {r} must be sorted and unique")
            for c in nbrs:
                if not 0 <= c < self.n_vertices:
                    raise ValueError(f"neighbor {c} of {r} out of range")
                if c == r:
                    raise ValueError(f"self-loop at vertex {r}")
                if r not in self.adjacency[c]:
                    raise ValueError(f"edge {r}-{c} is not symmetric")

    @classmethod
    def from_edges(cls, n_vertices: int, edges) -> Graph:
        nbrs: list[set[int]] = [set() for _ in range(n_vertices)]
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n_vertices and 0 <= v < n_vertices):
                raise ValueError(f"edge {u}-{v} out of range for N={n_vertices}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n_vertices, tuple(tuple(sorted(s)) for s in nbrs))

    @classmethod
    def complete(cls, n_vertices: int) -> Graph:
        return cls.from_edges(n_vertices, combinations(range(n_vertices), 2))

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def degree(self, r: int) -> int:
        return len(self.adjacency[r])

    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.adjacency]

    def neighbors(self, r: int) -> tuple[int, ...]:
        return self.adjacency[r]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._neighbor_sets[u]

    def edges(self) -> list[tuple[int, int]]:
        """Undirected edges as ``(u, v)`` with ``u < v``, sorted."""
        return [(u, v) for u, nbrs in enumerate(self.adjacency) for v in nbrs if u < v]

    def adjacency_matrix(self) -> np.ndarray:
        a = np.zeros((self.n_vertices, self.n_vertices), dtype=np.int64)
        for u, v in self.edges():
            a[u, v] = a[v, u] = 1
        return a

    def relabel(self, perm) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n_vertices, ((perm[u], perm[v]) for u, v in self.edges()))

    @property
    def _neighbor_sets(self) -> tuple[frozenset[int], ...]:
        cached = self.__dict__.get("_nbr_sets")
        if cached is None:
            cached = tuple(frozenset(n) for n in self.adjacency)
            object.__setattr__(self, "_nbr_sets", cached)
        return cached


@dataclass(frozen=True)
class MotifKind:
    """Target subgraph: ``triangle``, ``cycle`` of length k, or ``clique`` on m vertices."""

    variant: str
    size: int = 3

    def __post_init__(self) -> None:
        if self.variant == "triangle":
            if self.size != 3:
                raise ValueError("a triangle has 3 vertices")
        elif self.variant == "cycle":
            if self.size < 3:
                raise ValueError("cycles need k >= 3")
        elif self.variant == "clique":
            if self.size < 2:
                raise ValueError("cliques need m >= 2")
        else:
            raise ValueError(f"unknown motif variant {self.variant!r}")

    @classmethod
    def triangle(cls) -> MotifKind:
        return cls("triangle", 3)

    @classmethod
    def cycle(cls, k: int) -> MotifKind:
        return cls("cycle", k)

    @classmethod
    def clique(cls, m: int) -> MotifKind:
        return cls("clique", m)

    @classmethod
    def parse(cls, text: str) -> MotifKind:
        """Parse ``triangle``, ``cycle:k`` or ``clique:m``."""
        m = re.fullmatch(r"\s*(triangle|cycle:(\d+)|clique:(\d+))\s*", text)
        if m is None:
            raise ValueError(f"bad motif {text!r}; expected triangle, cycle:k or clique:m")
        if m.group(2) is not None:
            return cls.cycle(int(m.group(2)))
        if m.group(3) is not None:
            return cls.clique(int(m.group(3)))
        return cls.triangle()

    @property
    def edge_count(self) -> int:
        if self.variant == "clique":
            return comb(self.size, 2)
        return self.size

    def __str__(self) -> str:
        return "triangle" if self.variant == "triangle" else f"{self.variant}:{self.size}"


def er_generate(n: int, edge_prob: float, seed: int) -> Graph:
    """Sample G(n, p): each pair ``u < v`` is an edge with probability ``edge_prob``.

    Pairs are visited in lexicographic order and consume one uniform draw
    each, so the graph is a pure function of ``(n, edge_prob, seed)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 <= edge_prob <= 1.0:
        raise ValueError("edge_prob must lie in [0, 1]")
    rng = np.random.Generator(np.random.PCG64(seed))
    pairs = list(combinations(range(n), 2))
    draws = rng.random(len(pairs))
    return Graph.from_edges(n, (pair for pair, x in zip(pairs, draws) if x < edge_prob))


def parse_edge_list(text: str) -> Graph:
    """Read the ``n <N>`` + ``u v`` edge-list format; ``#`` starts a comment."""
    n_vertices = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if n_vertices is None:
            if len(tokens) != 2 or tokens[0] != "n" or not tokens[1].isdigit():
                raise ParseError(f"line {lineno}: expected header 'n <N>', got {raw!r}")
            n_vertices = int(tokens[1])
            if n_vertices < 1:
                raise ParseError(f"line {lineno}: vertex count must be positive")
            continue
        if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
            raise ParseError(f"line {lineno}: expected two vertex indices, got {raw!r}")
        u, v = int(tokens[0]), int(tokens[1])
        if u == v:
            raise ParseError(f"line {lineno}: self-loop at vertex {u}")
        if u >= n_vertices or v >= n_vertices:
            raise ParseError(f"line {lineno}: vertex index out of range for N={n_vertices}")
        edges.append((u, v))
    if n_vertices is None:
        raise ParseError("missing 'n <N>' header")
    return Graph.from_edges(n_vertices, edges)


def format_edge_list(g: Graph) -> str:
    lines = [f"n {g.n_vertices}"] + [f"{u} {v}" for u, v in g.edges()]
    return "\n".join(lines) + "\n"


def read_edge_list(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read())


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


def hamming(a: int, b: int, bits: int) -> int:
    if a < 0 or b < 0 or a >= 1 << bits or b >= 1 << bits:
        raise ValueError(f"{a}, {b} do not fit in {bits} bits")
    return (a ^ b).bit_count()


def count_motifs(g: Graph, kind: MotifKind) -> int:
    """Exact number of occurrences of ``kind`` in ``g``.

    Cliques (and triangles) are counted once per vertex subset. A k-cycle is
    counted once regardless of starting vertex or direction.
    """
    if kind.variant == "triangle" or (kind.variant in ("cycle", "clique") and kind.size == 3):
        return _count_triangles(g)
    if kind.variant == "clique":
        return _count_cliques(g, kind.size)
    return _count_cycles(g, kind.size)


def _count_triangles(g: Graph) -> int:
    sets = g._neighbor_sets
    total = 0
    for u in range(g.n_vertices):
        for v in g.adjacency[u]:
            if v <= u:
                continue
            total += sum(1 for w in g.adjacency[v] if w > v and w in sets[u])
    return total


def _count_cliques(g: Graph, m: int) -> int:
    sets = g._neighbor_sets

    def extend(depth: int, candidates: list[int]) -> int:
        if depth == m:
            return 1
        if depth + len(candidates) < m:
            return 0
        return sum(
            extend(depth + 1, [w for w in candidates[i + 1:] if w in sets[v]])
            for i, v in enumerate(candidates)
        )

    return extend(0, list(range(g.n_vertices)))


def _count_cycles(g: Graph, k: int) -> int:
    # Each cycle is seen from its minimum vertex s, walked toward the smaller
    # of s's two cycle-neighbors; the path[1] < path[-1] test picks that walk.
    sets = g._neighbor_sets
    total = 0
    for s in range(g.n_vertices):
        path = [s]
        on_path = {s}

        def walk() -> None:
            nonlocal total
            tail = path[-1]
            if len(path) == k:
                if s in sets[tail] and path[1] < tail:
                    total += 1
                return
            for w in g.adjacency[tail]:
                if w > s and w not in on_path:
                    path.append(w)
                    on_path.add(w)
                    walk()
                    on_path.discard(w)
                    path.pop()

        walk()
    return total
