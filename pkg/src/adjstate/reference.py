"""Closed-form graph states and exact motif success probabilities.

Basis layout for two-register states: ``|r>|c>`` has index ``r * 2**n + c``
with ``n = ceil(log2 N)``. Vertex counts that are not powers of two are
padded with zero-amplitude labels.

Every state built here has rational squared amplitudes, which are kept
alongside the float amplitudes so probabilities can be compared exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations, product
from math import sqrt

import numpy as np

from .errors import EmptyGraphError, ResourceError
from .graph import Graph, MotifKind, count_motifs
from .statevec import Statevector, check_budget, DEFAULT_MEMORY_BUDGET

DEFAULT_ENUMERATION_BUDGET = 10**8


def label_bits(n_vertices: int) -> int:
    """Qubits per vertex label, ``ceil(log2 N)``, and at least one."""
    return max(1, (n_vertices - 1).bit_length())


@dataclass
class SparseState:
    num_qubits: int
    amplitudes: dict[int, complex]
    probabilities: dict[int, Fraction] = field(default_factory=dict)

    def norm(self) -> float:
        return sum(abs(a) ** 2 for a in self.amplitudes.values())

    def to_dense(self, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> Statevector:
        check_budget(self.num_qubits, memory_budget)
        amps = np.zeros(1 << self.num_qubits, dtype=complex)
        for i, a in self.amplitudes.items():
            amps[i] = a
        return Statevector(self.num_qubits, amps)

    def to_vector(self) -> np.ndarray:
        return self.to_dense().amplitudes

    def items(self):
        return sorted(self.amplitudes.items())


def _require_edges(g: Graph) -> None:
    if g.edge_count == 0:
        raise EmptyGraphError("graph has no edges")


def adjacency_state(g: Graph) -> SparseState:
    """Normalized vectorized adjacency matrix over ``2 * ceil(log2 N)`` qubits.

    Both orientations of every edge are present, so the normalization is
    ``sqrt(2|E|)``. See :func:`directed_adjacency_state` for digraphs.
    """
    n = label_bits(g.n_vertices)
    arcs = [(r, c) for r in range(g.n_vertices) for c in g.neighbors(r)]
    if not arcs:
        raise EmptyGraphError("graph has no edges")
    weight = Fraction(1, len(arcs))
    amp = 1.0 / sqrt(len(arcs))
    idx = [(r << n) | c for r, c in arcs]
    return SparseState(2 * n, {i: amp for i in idx}, {i: weight for i in idx})


def directed_adjacency_state(n_vertices: int, arcs) -> SparseState:
    """Adjacency state of an unweighted digraph given as ``(r, c)`` arcs.

    The normalization is ``sqrt(|E|)`` with ``|E|`` the number of arcs.
    """
    arcs = sorted(set(arcs))
    if not arcs:
        raise EmptyGraphError("digraph has no arcs")
    n = label_bits(n_vertices)
    weight = Fraction(1, len(arcs))
    amp = 1.0 / sqrt(len(arcs))
    idx = [(r << n) | c for r, c in arcs]
    return SparseState(2 * n, {i: amp for i in idx}, {i: weight for i in idx})


def neighborhood_state(g: Graph, r: int) -> SparseState:
    d = g.degree(r)
    if d == 0:
        raise EmptyGraphError(f"vertex {r} is isolated")
    n = label_bits(g.n_vertices)
    return SparseState(
        n,
        {c: 1.0 / sqrt(d) for c in g.neighbors(r)},
        {c: Fraction(1, d) for c in g.neighbors(r)},
    )


def degree_state(g: Graph) -> SparseState:
    _require_edges(g)
    n = label_bits(g.n_vertices)
    two_e = 2 * g.edge_count
    degs = g.degrees()
    return SparseState(
        n,
        {r: sqrt(d / two_e) for r, d in enumerate(degs) if d},
        {r: Fraction(d, two_e) for r, d in enumerate(degs) if d},
    )


def degree_amplitudes(g: Graph) -> np.ndarray:
    """Dense real amplitude vector ``sqrt(d_r / 2|E|)`` padded to ``2**n``."""
    return degree_state(g).to_vector().real


@dataclass(frozen=True)
class SuccessProbability:
    numerator: int
    denominator: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    @property
    def value(self) -> float:
        return float(self.fraction)

    def __str__(self) -> str:
        return f"{self.numerator}/{self.denominator}"


def success_probability(g: Graph, kind: MotifKind) -> SuccessProbability:
    """``#S / (2|E|)**e_s``, the chance that ``P_S`` fires on ``e_s`` copies of the state."""
    _require_edges(g)
    return SuccessProbability(count_motifs(g, kind), (2 * g.edge_count) ** kind.edge_count)


def canonical_patterns(n_vertices: int, kind: MotifKind):
    """Yield the edge-tuple patterns whose projectors make up ``P_S``.

    Generated from vertex combinatorics on ``[N]`` alone:

    * clique: the ``u < v`` pairs of an m-subset in lexicographic order;
    * triangle: ``(i, j), (j, k), (k, i)`` with ``i < j < k``;
    * cycle: start at the smallest vertex, step to its smaller cycle-neighbor,
      and close the loop back to the start.
    """
    verts = range(n_vertices)
    if kind.variant == "clique":
        for subset in combinations(verts, kind.size):
            yield tuple(combinations(subset, 2))
        return
    k = kind.size
    for subset in combinations(verts, k):
        first, rest = subset[0], subset[1:]
        for order in permutations(rest):
            if order[0] > order[-1]:
                continue
            cyc = (first,) + order
            yield tuple((cyc[i], cyc[(i + 1) % k]) for i in range(k))


def projector_expectation_oracle(
    g: Graph,
    kind: MotifKind,
    budget: int = DEFAULT_ENUMERATION_BUDGET,
    exhaustive: bool = False,
) -> Fraction:
    """``<G|^{e_s} P_S |G>^{e_s}`` by enumerating the support of the product state.

    Each e_s-tuple of directed edges is a basis state of the product with
    squared amplitude ``(2|E|)**-e_s``; the tuples matching a projector
    pattern are summed. Tuples are grown one factor at a time and a prefix
    is dropped once no pattern starts with it, which leaves the sum
    unchanged. ``exhaustive=True`` walks the full Cartesian product instead.

    ``budget`` caps the number of tuples visited (plus patterns generated).
    """
    state = adjacency_state(g)
    n = label_bits(g.n_vertices)
    e_s = kind.edge_count
    support = sorted(state.probabilities)
    work = 0

    patterns = set()
    for pat in canonical_patterns(g.n_vertices, kind):
        patterns.add(tuple((u << n) | v for u, v in pat))
        work += 1
        if work > budget:
            raise ResourceError(f"projector has more than {budget} terms")

    total = Fraction(0)
    if exhaustive:
        if len(support) ** e_s + work > budget:
            raise ResourceError(f"{len(support)}**{e_s} tuples exceed budget {budget}")
        for tup in product(support, repeat=e_s):
            if tup in patterns:
                p = Fraction(1)
                for b in tup:
                    p *= state.probabilities[b]
                total += p
        return total

    prefixes = {pat[:t] for pat in patterns for t in range(1, e_s)}

    def grow(prefix: tuple, weight: Fraction) -> None:
        nonlocal total, work
        last = len(prefix) + 1 == e_s
        for b in support:
            work += 1
            if work > budget:
                raise ResourceError(f"enumeration exceeded budget of {budget} tuples")
            ext = prefix + (b,)
            if last:
                if ext in patterns:
                    total += weight * state.probabilities[b]
            elif ext in prefixes:
                grow(ext, weight * state.probabilities[b])

    grow((), Fraction(1))
    return total


def dense_triangle_expectation(g: Graph, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> float:
    """Triangle projector expectation on an explicit dense three-copy tensor product."""
    n = label_bits(g.n_vertices)
    check_budget(6 * n, memory_budget)
    psi = adjacency_state(g).to_vector()
    big = np.kron(np.kron(psi, psi), psi)
    dim = 1 << (2 * n)
    total = 0.0
    for i, j, k in combinations(range(g.n_vertices), 3):
        ij, jk, ki = (i << n) | j, (j << n) | k, (k << n) | i
        total += abs(big[(ij * dim + jk) * dim + ki]) ** 2
    return total
