import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adjstate.errors import PostselectionError, ResourceError
from adjstate.statevec import (
    H,
    X,
    Statevector,
    apply_1q,
    apply_mcx,
    basis_state,
    fidelity,
    measure_prob,
    postselect,
    write_amplitudes_csv,
    zero_state,
)


def plus() -> Statevector:
    s = zero_state(1)
    apply_1q(s, H, 0)
    return s


def test_zero_state():
    assert np.array_equal(zero_state(1).amplitudes, [1, 0])
    assert np.array_equal(zero_state(2).amplitudes, [1, 0, 0, 0])


def test_budget():
    with pytest.raises(ResourceError, match="bytes"):
        zero_state(30, memory_budget=1 << 30)
    with pytest.raises(ResourceError):
        zero_state(5, memory_budget=100)


def test_single_qubit_gates():
    s = zero_state(1)
    apply_1q(s, X, 0)
    assert np.allclose(s.amplitudes, [0, 1])
    s = plus()
    assert np.allclose(s.amplitudes, [2**-0.5, 2**-0.5])
    assert s.norm() == pytest.approx(1)


def test_unsatisfied_control():
    s = basis_state(2, 0b00)
    apply_1q(s, X, 0, controls=((1, 1),))
    assert np.array_equal(s.amplitudes, basis_state(2, 0).amplitudes)


def test_non_unitary_rejected():
    with pytest.raises(ValueError):
        apply_1q(zero_state(1), np.array([[1, 1], [0, 1]]), 0)


def test_bad_qubits_rejected():
    with pytest.raises(ValueError):
        apply_1q(zero_state(2), X, 2)
    with pytest.raises(ValueError):
        apply_mcx(zero_state(2), ((0, 1),), 0)


@pytest.mark.parametrize("controls, before, after", [
    (((1, 1), (2, 1)), 0b110, 0b111),
    (((1, 0), (2, 0)), 0b000, 0b001),
    (((1, 1),), 0b001, 0b001),
])
def test_mcx(controls, before, after):
    s = basis_state(3, before)
    apply_mcx(s, controls, 0)
    assert np.array_equal(s.amplitudes, basis_state(3, after).amplitudes)


def test_measure_prob():
    assert measure_prob(zero_state(1), 0) == (1, 0)
    assert measure_prob(plus(), 0) == pytest.approx((0.5, 0.5))
    assert measure_prob(basis_state(1, 1), 0) == (0, 1)


def test_postselect():
    s = plus()
    assert postselect(s, 0, 1) == pytest.approx(0.5)
    assert np.allclose(s.amplitudes, [0, 1])
    s = basis_state(1, 1)
    assert postselect(s, 0, 1) == 1.0
    with pytest.raises(PostselectionError):
        postselect(zero_state(1), 0, 1, tol=1e-9)


def test_fidelity():
    s = plus()
    assert fidelity(s, s) == pytest.approx(1)
    assert fidelity(basis_state(2, 1), basis_state(2, 2)) == 0
    assert fidelity(zero_state(1), s) == pytest.approx(0.5)


def test_amplitude_csv(tmp_path):
    out = tmp_path / "a.csv"
    write_amplitudes_csv(out, 2, [(1, 0.5 + 0j), (2, -0.5j)])
    lines = out.read_text().splitlines()
    assert lines[0] == "index,basis_bits,re,im"
    assert lines[1].startswith("1,01,0.5,")
    assert lines[2].startswith("2,10,")


def random_unitary(rng) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


def random_state(rng, n) -> Statevector:
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return Statevector(n, v / np.linalg.norm(v))


def dense_controlled(u, n, target, controls) -> np.ndarray:
    """Brute-force 2^n x 2^n matrix of a pattern-controlled single-qubit gate."""
    dim = 2**n
    m = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        if all((col >> q) & 1 == v for q, v in controls):
            b = (col >> target) & 1
            for a in (0, 1):
                row = (col & ~(1 << target)) | (a << target)
                m[row, col] += u[a, b]
        else:
            m[col, col] = 1
    return m


gate_spec = st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.just(n),
    st.permutations(range(n)),
    st.integers(0, n - 1),
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.integers(0, 2**32 - 1),
))


@settings(max_examples=150, deadline=None)
@given(gate_spec)
def test_controlled_gate_matches_dense_matrix(spec):
    n, order, n_controls, values, seed = spec
    rng = np.random.default_rng(seed)
    target, ctrl_qubits = order[0], order[1:1 + n_controls]
    controls = tuple((q, values[q]) for q in ctrl_qubits)
    u = random_unitary(rng)
    s = random_state(rng, n)
    expected = dense_controlled(u, n, target, controls) @ s.amplitudes
    apply_1q(s, u, target, controls)
    assert np.allclose(s.amplitudes, expected, atol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2**32 - 1))
def test_norm_preservation_and_adjoint(n, seed):
    rng = np.random.default_rng(seed)
    s = random_state(rng, n)
    original = s.amplitudes.copy()
    history = []
    for _ in range(20):
        qubits = rng.permutation(n)
        target = int(qubits[0])
        controls = tuple((int(q), int(rng.integers(2))) for q in qubits[1:1 + rng.integers(n)])
        if rng.random() < 0.5:
            u = random_unitary(rng)
            apply_1q(s, u, target, controls)
            history.append((u, target, controls))
        else:
            apply_mcx(s, controls, target)
            history.append((X, target, controls))
        assert abs(s.norm() - 1) < 1e-12
    for u, target, controls in reversed(history):
        apply_1q(s, u.conj().T, target, controls)
    assert np.allclose(s.amplitudes, original, atol=1e-12)
