"""Dense statevector simulation with pattern-controlled single-qubit gates.

Index convention: qubit ``q`` is bit ``q`` of the basis-state index
(little-endian), so ``|q2 q1 q0>`` has index ``4*q2 + 2*q1 + q0``.
Gates are applied in place on strided views of the amplitude array; no
matrix larger than 2x2 is ever formed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import PostselectionError, ResourceError

BYTES_PER_AMPLITUDE = 16
DEFAULT_MAX_QUBITS = 26
DEFAULT_MEMORY_BUDGET = BYTES_PER_AMPLITUDE << DEFAULT_MAX_QUBITS  # 1 GiB

X = np.array([[0, 1], [1, 0]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


@dataclass
class Statevector:
    num_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ValueError("amplitude vector length must be 2**num_qubits")

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def copy(self) -> Statevector:
        return Statevector(self.num_qubits, self.amplitudes.copy())


def check_budget(num_qubits: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> None:
    required = BYTES_PER_AMPLITUDE << num_qubits
    if required > memory_budget:
        raise ResourceError(
            f"{num_qubits} qubits need {required} bytes, budget is {memory_budget} bytes"
        )


def zero_state(num_qubits: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> Statevector:
    if num_qubits < 1:
        raise ValueError("num_qubits must be >= 1")
    check_budget(num_qubits, memory_budget)
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = 1.0
    return Statevector(num_qubits, amps)


def basis_state(num_qubits: int, index: int) -> Statevector:
    sv = zero_state(num_qubits)
    sv.amplitudes[0] = 0.0
    sv.amplitudes[index] = 1.0
    return sv


def _check_qubits(state: Statevector, target: int, controls) -> None:
    qubits = [q for q, _ in controls]
    if len(set(qubits)) != len(qubits):
        raise ValueError("control qubits must be distinct")
    if target in qubits:
        raise ValueError(f"target {target} is also a control")
    for q in qubits + [target]:
        if not 0 <= q < state.num_qubits:
            raise ValueError(f"qubit {q} outside register of {state.num_qubits}")
    for _, v in controls:
        if v not in (0, 1):
            raise ValueError("control values must be 0 or 1")


def _target_views(state: Statevector, target: int, controls):
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n)
    idx: list = [slice(None)] * n
    for q, v in controls:
        idx[n - 1 - q] = slice(v, v + 1)
    # length-1 slices keep the result a view even when every axis is fixed
    idx[n - 1 - target] = slice(0, 1)
    a0 = psi[tuple(idx)]
    idx[n - 1 - target] = slice(1, 2)
    a1 = psi[tuple(idx)]
    return a0, a1


def is_unitary(u: np.ndarray, atol: float = 1e-10) -> bool:
    u = np.asarray(u)
    return u.shape == (2, 2) and np.allclose(u.conj().T @ u, np.eye(2), atol=atol)


def apply_1q(state: Statevector, u, target: int, controls=()) -> Statevector:
    """Apply the 2x2 unitary ``u`` to ``target`` where every control matches."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("gate matrix is not unitary within 1e-10")
    _check_qubits(state, target, controls)
    a0, a1 = _target_views(state, target, controls)
    t0 = a0.copy()
    a0 *= u[0, 0]
    a0 += u[0, 1] * a1
    a1 *= u[1, 1]
    a1 += u[1, 0] * t0
    return state


def apply_mcx(state: Statevector, controls, target: int) -> Statevector:
    """Flip ``target`` where every ``(qubit, value)`` control matches."""
    _check_qubits(state, target, controls)
    a0, a1 = _target_views(state, target, controls)
    t0 = a0.copy()
    a0[...] = a1
    a1[...] = t0
    return state


def measure_prob(state: Statevector, qubit: int) -> tuple[float, float]:
    n = state.num_qubits
    probs = np.abs(state.amplitudes.reshape((2,) * n)) ** 2
    axes = tuple(a for a in range(n) if a != n - 1 - qubit)
    marg = probs.sum(axis=axes)
    total = marg.sum()
    return float(marg[0] / total), float(marg[1] / total)


def postselect(state: Statevector, qubit: int, outcome: int, tol: float = 1e-9) -> float:
    """Condition ``state`` in place on ``qubit == outcome``; return that outcome's probability."""
    if outcome not in (0, 1):
        raise ValueError("outcome must be 0 or 1")
    prob = measure_prob(state, qubit)[outcome]
    if prob < tol:
        raise PostselectionError(
            f"outcome {outcome} on qubit {qubit} has probability {prob:.3g} < {tol:g}"
        )
    n = state.num_qubits
    psi = state.amplitudes.reshape((2,) * n)
    idx: list = [slice(None)] * n
    idx[n - 1 - qubit] = 1 - outcome
    psi[tuple(idx)] = 0.0
    state.amplitudes /= np.sqrt(state.norm())
    return prob


def fidelity(a: Statevector, b: Statevector) -> float:
    if a.num_qubits != b.num_qubits:
        raise ValueError("states live on different registers")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def write_amplitudes_csv(path, num_qubits: int, items) -> None:
    """Write ``index,basis_bits,re,im`` rows for ``(index, amplitude)`` pairs."""
    if num_qubits > 20:
        raise ResourceError("amplitude dumps are limited to 2**20 entries")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "basis_bits", "re", "im"])
        for index, amp in items:
            amp = complex(amp)
            w.writerow([index, format(index, f"0{num_qubits}b"),
                        format(amp.real, ".17g"), format(amp.imag, ".17g")])


def dump_statevector(state: Statevector, path) -> None:
    write_amplitudes_csv(path, state.num_qubits, enumerate(state.amplitudes))
