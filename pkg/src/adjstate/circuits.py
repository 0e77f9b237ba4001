"""Circuit plans that prepare the degree, neighborhood and adjacency states.

A :class:`CircuitPlan` is an ordered list of pattern-controlled gates on a
named register layout. Three builders are provided:

* :func:`build_u_sp` loads an arbitrary amplitude vector with one ancilla,
  one controlled rotation per nonzero amplitude;
* :func:`build_u_r` loads the uniform superposition over a vertex's
  neighbors;
* :func:`build_adjacency_circuit` chains the two, running every neighbor
  circuit under a control on the first register's vertex label.

Every builder ends by postselecting its ancillas on ``|1>``. The
construction makes that outcome certain, so :func:`simulate` treats a
low-probability postselection as a bug, not as bad luck.

Adjacency-circuit layout (little-endian, qubit 0 lowest)::

    qr2_work  0 .. n-1     column label c
    qr1_work  n .. 2n-1    row label r
    qr1_anc   2n
    qr2_anc   2n+1

so the working register reads ``r * 2**n + c`` once both ancillas are set.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import sqrt

import numpy as np

from .errors import EmptyGraphError
from .graph import Graph, hamming
from .reference import degree_amplitudes, label_bits
from .statevec import (
    DEFAULT_MEMORY_BUDGET,
    Statevector,
    apply_1q,
    apply_mcx,
    is_unitary,
    measure_prob,
    postselect,
    zero_state,
)

UNITARY, MCX, MEASURE, POSTSELECT = "unitary", "mcx", "measure", "postselect"


@dataclass(frozen=True, eq=False)
class GateOp:
    kind: str
    target: int
    controls: tuple[tuple[int, int], ...] = ()
    matrix: np.ndarray | None = None
    outcome: int | None = None
    label: str = ""

    def qubits(self) -> list[int]:
        return [self.target] + [q for q, _ in self.controls]


@dataclass(frozen=True, eq=False)
class CircuitPlan:
    num_qubits: int
    registers: dict[str, tuple[int, ...]]
    ops: tuple[GateOp, ...]

    def __post_init__(self) -> None:
        anc = self.ancillas
        for op in self.ops:
            if any(not 0 <= q < self.num_qubits for q in op.qubits()):
                raise ValueError(f"{op.label or op.kind} touches a qubit outside the register")
            if op.kind in (MEASURE, POSTSELECT) and op.target not in anc:
                raise ValueError("measurements are only allowed on ancilla qubits")
            if op.kind == UNITARY and not is_unitary(op.matrix):
                raise ValueError(f"{op.label} is not unitary within 1e-10")

    @property
    def ancillas(self) -> frozenset[int]:
        return frozenset(q for name, qs in self.registers.items() if name.endswith("_anc") for q in qs)

    @property
    def working(self) -> tuple[int, ...]:
        return tuple(sorted(q for name, qs in self.registers.items() if name.endswith("_work") for q in qs))


@dataclass
class GateCounts:
    controlled_2q_unitaries: int = 0
    toffoli_by_control_width: dict[int, int] = field(default_factory=dict)
    cnot: int = 0

    @property
    def toffoli(self) -> int:
        return sum(self.toffoli_by_control_width.values())

    def __add__(self, other: GateCounts) -> GateCounts:
        widths = Counter(self.toffoli_by_control_width)
        widths.update(other.toffoli_by_control_width)
        return GateCounts(
            self.controlled_2q_unitaries + other.controlled_2q_unitaries,
            {w: c for w, c in widths.items() if c},
            self.cnot + other.cnot,
        )


def neighbor_rotation(m: int) -> np.ndarray:
    """Rotation sending ``|0>`` to ``sqrt((m-1)/m)|0> + sqrt(1/m)|1>``."""
    c, s = sqrt((m - 1) / m), sqrt(1 / m)
    return np.array([[c, -s], [s, c]], dtype=complex)


def amplitude_rotation(alpha: complex, remaining: float) -> np.ndarray:
    """Rotation peeling amplitude ``alpha`` off a branch of weight ``remaining``.

    ``remaining`` is the squared norm still parked on ``|0>|0...0>``.
    """
    s = sqrt(remaining)
    c = sqrt(max(0.0, remaining - abs(alpha) ** 2)) / s
    return np.array([[c, -np.conj(alpha) / s], [alpha / s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def degree_rotation_angles(g: Graph) -> dict[int, float]:
    """``theta_j`` with ``G_alpha_j == ry(theta_j)`` for the degree amplitudes."""
    two_e = 2 * g.edge_count
    degs = g.degrees()
    angles = {}
    used = 0
    for j in range(1, len(degs)):
        if degs[j] == 0:
            continue
        used += degs[j]
        rest = two_e - used
        angles[j] = np.pi if rest == 0 else 2 * np.arctan(sqrt(degs[j] / rest))
    return angles


def _pattern(qubits, value: int) -> tuple[tuple[int, int], ...]:
    return tuple((q, (value >> l) & 1) for l, q in enumerate(qubits))


def _load_ops(target_index: int, matrix, work, anc, block, label) -> list[GateOp]:
    """Rotate onto the lowest set bit, fan out with CNOTs, flag with the ancilla, fan in."""
    bits = [l for l in range(len(work)) if (target_index >> l) & 1]
    on_free = ((anc, 0),) + block
    cnots = [GateOp(MCX, work[l], on_free, label=label) for l in bits[1:]]
    return (
        [GateOp(UNITARY, work[bits[0]], on_free, matrix=matrix, label=label)]
        + cnots
        + [GateOp(MCX, anc, _pattern(work, target_index) + block, label=label)]
        + cnots
    )


def _u_r_ops(neighbors, work, anc, block=(), vertex=None) -> list[GateOp]:
    d = len(neighbors)
    ops = []
    for j, c in enumerate(sorted(neighbors, reverse=True)):
        label = f"U^({vertex},{c})"
        if c == 0:
            # sorted descending, so vertex 0 is last and takes all remaining weight
            ops.append(GateOp(MCX, anc, _pattern(work, 0) + block, label=label))
        else:
            ops += _load_ops(c, neighbor_rotation(d - j), work, anc, block, label)
    return ops


def _u_sp_ops(alphas: np.ndarray, work, anc, block=()) -> list[GateOp]:
    probs = np.abs(alphas) ** 2
    # weight left on the unflagged branch before step j: |a_0|^2 + sum_{l>=j} |a_l|^2
    tail = np.cumsum(probs[::-1])[::-1]
    ops = []
    for j in range(1, len(alphas)):
        if alphas[j] == 0:
            continue
        remaining = float(probs[0] + tail[j])
        g = amplitude_rotation(complex(alphas[j]), remaining)
        ops += _load_ops(j, g, work, anc, block, f"G_alpha_{j}")
    if alphas[0] != 0:
        ops.append(GateOp(MCX, anc, _pattern(work, 0) + block, label="G_alpha_0"))
    return ops


def _validate_alphas(alphas) -> np.ndarray:
    alphas = np.asarray(alphas, dtype=complex)
    size = len(alphas)
    if size < 2 or size & (size - 1):
        raise ValueError("alphas must have length 2**n with n >= 1")
    norm = float(np.sum(np.abs(alphas) ** 2))
    if abs(norm - 1.0) > 1e-10:
        raise ValueError(f"alphas must have unit norm, got {norm!r}")
    if abs(alphas[0].imag) > 1e-12 or alphas[0].real < 0:
        raise ValueError("alphas[0] must be real and nonnegative")
    alphas[0] = alphas[0].real
    return alphas


def build_u_sp(alphas) -> CircuitPlan:
    """Plan mapping ``|0>|0^n>`` to ``|1> sum_j alphas[j] |j>`` (ancilla is qubit n)."""
    alphas = _validate_alphas(alphas)
    n = len(alphas).bit_length() - 1
    work, anc = tuple(range(n)), n
    ops = _u_sp_ops(alphas, work, anc)
    ops.append(GateOp(POSTSELECT, anc, outcome=1, label="measure ancilla"))
    return CircuitPlan(n + 1, {"qr1_work": work, "qr1_anc": (anc,)}, tuple(ops))


def build_u_d(g: Graph) -> CircuitPlan:
    """Degree-distribution loader: :func:`build_u_sp` on ``sqrt(d_r / 2|E|)``."""
    return build_u_sp(degree_amplitudes(g))


def build_u_r(g: Graph, r: int) -> CircuitPlan:
    """Plan mapping ``|0>|0^n>`` to ``|1> sum_{c ~ r} |c> / sqrt(d_r)``."""
    if g.degree(r) == 0:
        raise EmptyGraphError(f"vertex {r} is isolated")
    n = label_bits(g.n_vertices)
    work, anc = tuple(range(n)), n
    ops = _u_r_ops(g.neighbors(r), work, anc, vertex=r)
    ops.append(GateOp(POSTSELECT, anc, outcome=1, label="measure ancilla"))
    return CircuitPlan(n + 1, {"qr1_work": work, "qr1_anc": (anc,)}, tuple(ops))


def build_adjacency_circuit(g: Graph) -> CircuitPlan:
    if g.edge_count == 0:
        raise EmptyGraphError("graph has no edges")
    n = label_bits(g.n_vertices)
    qr2_work = tuple(range(n))
    qr1_work = tuple(range(n, 2 * n))
    qr1_anc, qr2_anc = 2 * n, 2 * n + 1
    ops = _u_sp_ops(_validate_alphas(degree_amplitudes(g)), qr1_work, qr1_anc)
    ops.append(GateOp(POSTSELECT, qr1_anc, outcome=1, label="measure QR1 ancilla"))
    for r in range(g.n_vertices):
        if g.degree(r) == 0:
            continue
        ops += _u_r_ops(g.neighbors(r), qr2_work, qr2_anc, block=_pattern(qr1_work, r), vertex=r)
    ops.append(GateOp(POSTSELECT, qr2_anc, outcome=1, label="measure QR2 ancilla"))
    registers = {
        "qr1_work": qr1_work,
        "qr1_anc": (qr1_anc,),
        "qr2_work": qr2_work,
        "qr2_anc": (qr2_anc,),
    }
    return CircuitPlan(2 * n + 2, registers, tuple(ops))


def tally_gates(plan: CircuitPlan) -> GateCounts:
    """Count gates by category; Toffolis are keyed by their number of controls.

    An X gate aimed at an ancilla is a Toffoli (it flags a basis pattern);
    an X gate aimed at a working qubit is a CNOT. Extra controls added when
    a sub-circuit is embedded keep the category but widen the key.
    """
    counts = GateCounts()
    widths: Counter = Counter()
    anc = plan.ancillas
    for op in plan.ops:
        if op.kind == UNITARY:
            counts.controlled_2q_unitaries += 1
        elif op.kind == MCX:
            if op.target in anc:
                widths[len(op.controls)] += 1
            else:
                counts.cnot += 1
    counts.toffoli_by_control_width = dict(widths)
    return counts


def _loader_counts(indices, n: int, width: int) -> GateCounts:
    indices = list(indices)
    nonzero = [c for c in indices if c != 0]
    return GateCounts(
        controlled_2q_unitaries=len(nonzero),
        toffoli_by_control_width={width: len(indices)} if indices else {},
        cnot=sum(2 * (hamming(0, c, n) - 1) for c in nonzero),
    )


def predicted_sp_counts(alphas) -> GateCounts:
    alphas = np.asarray(alphas, dtype=complex)
    n = len(alphas).bit_length() - 1
    return _loader_counts((j for j, a in enumerate(alphas) if a != 0), n, n)


def predicted_counts(g: Graph, which: str, vertex: int | None = None) -> GateCounts:
    """Closed-form gate counts for ``which`` in ``{"UD", "Ur", "Adjacency"}``.

    Per loaded label ``c``: one controlled rotation and ``2 (H(0, c) - 1)``
    CNOTs if ``c != 0``, and one Toffoli always. Label 0 needs only the
    Toffoli, which is why these totals fall below :func:`closed_form_counts`
    whenever 0 is loaded.
    """
    n = label_bits(g.n_vertices)
    if which == "UD":
        return _loader_counts((j for j, d in enumerate(g.degrees()) if d), n, n)
    if which == "Ur":
        if vertex is None:
            raise ValueError("Ur needs a vertex")
        return _loader_counts(g.neighbors(vertex), n, n)
    if which == "Adjacency":
        total = _loader_counts((j for j, d in enumerate(g.degrees()) if d), n, n)
        for r in range(g.n_vertices):
            total = total + _loader_counts(g.neighbors(r), n, 2 * n)
        return total
    raise ValueError(f"unknown circuit family {which!r}")


def closed_form_counts(g: Graph, which: str, vertex: int | None = None) -> dict[str, int]:
    """Textbook totals that charge every loaded label a rotation and ``2 H(0, c)``
    CNOTs, and count all ``N`` vertices in the degree loader.

    Kept for reporting only; :func:`predicted_counts` is what the built
    plans match.
    """
    n = label_bits(g.n_vertices)
    h = lambda c: hamming(0, c, n)  # noqa: E731
    degs = g.degrees()
    if which == "UD":
        d = sum(1 for x in degs if x)
        return {"controlled_2q_unitaries": d, "toffoli": d,
                "cnot": 2 * sum(h(j) for j in range(1, len(degs)) if degs[j])}
    if which == "Ur":
        nbrs = g.neighbors(vertex)
        d = len(nbrs)
        return {"controlled_2q_unitaries": d, "toffoli": d,
                "cnot": 2 * sum(h(c) for c in nbrs) - 2 * d}
    if which == "Adjacency":
        return {"toffoli": g.n_vertices + 2 * g.edge_count,
                "cnot": 2 * sum(h(r) for r in range(1, g.n_vertices))
                + 2 * sum(h(c) for r in range(g.n_vertices) for c in g.neighbors(r))
                - 4 * g.edge_count}
    raise ValueError(f"unknown circuit family {which!r}")


@dataclass
class SimulationResult:
    state: Statevector
    postselections: list[tuple[int, float]]
    measurements: list[tuple[int, tuple[float, float]]]


def simulate(
    plan: CircuitPlan,
    state: Statevector | None = None,
    tol: float = 1e-9,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> SimulationResult:
    if state is None:
        state = zero_state(plan.num_qubits, memory_budget)
    post, meas = [], []
    for op in plan.ops:
        if op.kind == UNITARY:
            apply_1q(state, op.matrix, op.target, op.controls)
        elif op.kind == MCX:
            apply_mcx(state, op.controls, op.target)
        elif op.kind == POSTSELECT:
            post.append((op.target, postselect(state, op.target, op.outcome, tol)))
        elif op.kind == MEASURE:
            meas.append((op.target, measure_prob(state, op.target)))
        else:
            raise ValueError(f"unknown op kind {op.kind!r}")
    return SimulationResult(state, post, meas)


def working_amplitudes(plan: CircuitPlan, state: Statevector) -> np.ndarray:
    """Amplitudes of the working register on the all-ancillas-one branch."""
    n_work = len(plan.working)
    if plan.working != tuple(range(n_work)) or plan.ancillas != frozenset(range(n_work, plan.num_qubits)):
        raise ValueError("expected working qubits below the ancillas")
    lo = ((1 << (plan.num_qubits - n_work)) - 1) << n_work
    return state.amplitudes[lo:lo + (1 << n_work)].copy()


def format_plan(plan: CircuitPlan) -> str:
    """One line per op, for diffing against hand-drawn circuit diagrams."""
    names = {q: f"{name}[{i}]" for name, qs in plan.registers.items() for i, q in enumerate(qs)}
    lines = [f"# {plan.num_qubits} qubits: "
             + ", ".join(f"{k}={list(v)}" for k, v in plan.registers.items())]
    for i, op in enumerate(plan.ops):
        ctrl = " ".join(f"{names[q]}={v}" for q, v in op.controls)
        if op.kind == UNITARY:
            m = op.matrix
            body = "U " + np.array2string(m.real if not np.iscomplexobj(m) or not m.imag.any() else m,
                                          precision=6, separator=",").replace("\n", "")
        elif op.kind == MCX:
            body = "X"
        elif op.kind == POSTSELECT:
            body = f"POSTSELECT={op.outcome}"
        else:
            body = "MEASURE"
        lines.append(f"{i:5d}  {op.label:<14} {body} -> {names[op.target]}"
                     + (f"  if {ctrl}" if ctrl else ""))
    return "\n".join(lines) + "\n"
