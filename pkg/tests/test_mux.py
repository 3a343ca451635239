import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bqdsynth import lamat
from bqdsynth.circuit import GateKind, circuit_matrix, count_gates
from bqdsynth.errors import DimensionError, RangeError, UnsupportedError, ValidationError
from bqdsynth.mux import (
    Axis,
    DiagonalSpec,
    MuxGate,
    cascade_controls,
    diagonal_cascade,
    expand_mux_rotation,
    expand_mux_u2,
    gray,
    ruler,
    synth_diagonal,
    walsh_angles,
)


def test_ruler_and_gray():
    assert [ruler(i) for i in range(1, 9)] == [0, 1, 0, 2, 0, 1, 0, 3]
    assert [gray(i) for i in range(8)] == [0, 1, 3, 2, 6, 7, 5, 4]
    # consecutive Gray codes differ in the bit the ruler function names
    for i in range(1, 64):
        assert gray(i) ^ gray(i - 1) == 1 << ruler(i)


def test_cascade_controls_ends_on_first_control():
    ctl = cascade_controls((5, 6, 7))
    assert len(ctl) == 8
    assert ctl[-1] == 5
    assert ctl[:4] == [7, 6, 7, 5]


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_walsh_angles_solve_the_gray_system(k, rng):
    theta = rng.uniform(-3, 3, 2**k)
    a = walsh_angles(theta)
    # Independent route: build the sign matrix and solve it directly.
    size = 2**k
    m = np.array([[(-1) ** bin(x & gray(i)).count("1") for i in range(size)] for x in range(size)])
    assert np.allclose(np.linalg.solve(m, theta), a)


def _embed_diag(spec, n):
    return spec.matrix(n)


@pytest.mark.parametrize("axis", [Axis.Z, Axis.Y])
@pytest.mark.parametrize("k", [0, 1, 2, 3, 4])
def test_rotation_mux_exact(axis, k, rng):
    n = k + 1
    wires = list(rng.permutation(np.arange(1, n + 1)))
    m = MuxGate(axis, int(wires[0]), tuple(int(w) for w in wires[1:]), rng.uniform(-4, 4, 2**k))
    e = expand_mux_rotation(m, n=n)
    assert e.residual.is_trivial()
    assert np.allclose(circuit_matrix(e.circuit), m.matrix(n), atol=1e-12)
    c = count_gates(e.circuit)
    assert c.one_qubit == 2**k
    assert c.cnot == (2**k if k else 0)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_z_mux_cnot_first_variant(k, rng):
    m = MuxGate(Axis.Z, 1, tuple(range(2, k + 2)), rng.uniform(-4, 4, 2**k))
    e = expand_mux_rotation(m, cnot_first=True)
    assert e.circuit.gates[0].kind is GateKind.CNOT
    assert np.allclose(circuit_matrix(e.circuit), m.matrix(k + 1), atol=1e-12)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_y_mux_up_to_diagonal(k, rng):
    n = k + 1
    m = MuxGate(Axis.Y, n, tuple(range(1, n)), rng.uniform(-4, 4, 2**k))
    e = expand_mux_rotation(m, up_to_diagonal=True)
    c = count_gates(e.circuit)
    assert (c.cnot, c.one_qubit) == (2**k - 1, 2**k)
    lhs = _embed_diag(e.residual, n) @ circuit_matrix(e.circuit)
    assert np.allclose(lhs, m.matrix(n), atol=1e-12)
    # residual phases are +-1 signs only
    assert np.allclose(np.abs(e.residual.phases.imag), 0)


def test_rotation_mux_rejections():
    m = MuxGate(Axis.Z, 1, (2,), [0.1, 0.2])
    with pytest.raises(UnsupportedError):
        expand_mux_rotation(m, up_to_diagonal=True)
    with pytest.raises(UnsupportedError):
        expand_mux_rotation(MuxGate(Axis.Y, 1, (2,), [0.1, 0.2]), cnot_first=True)
    with pytest.raises(DimensionError):
        MuxGate(Axis.Y, 1, (2,), [0.1, 0.2, 0.3])
    with pytest.raises(RangeError):
        MuxGate(Axis.Y, 1, (1,), [0.1, 0.2])


def _generic(k, seed, target=None, controls=None):
    blocks = np.array([lamat.haar_random_unitary(1, seed * 100 + j) for j in range(2**k)])
    target = k + 1 if target is None else target
    controls = tuple(range(1, k + 1)) if controls is None else controls
    return MuxGate(Axis.GENERIC, target, controls, blocks)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_u2_mux_counts_and_residual(k):
    m = _generic(k, k)
    e = expand_mux_u2(m)
    c = count_gates(e.circuit)
    assert (c.cnot, c.one_qubit) == (2**k - 1, 2**k)
    lhs = e.residual.matrix(k + 1) @ circuit_matrix(e.circuit)
    assert np.allclose(lhs, m.matrix(k + 1), atol=1e-11)


def test_u2_mux_with_scrambled_wires():
    m = _generic(3, 7, target=2, controls=(4, 1, 3))
    e = expand_mux_u2(m)
    lhs = e.residual.matrix(4) @ circuit_matrix(e.circuit)
    assert np.allclose(lhs, m.matrix(4), atol=1e-11)


def test_u2_mux_identity_payload():
    m = MuxGate(Axis.GENERIC, 3, (1, 2), np.array([np.eye(2)] * 4, dtype=complex))
    e = expand_mux_u2(m)
    assert np.allclose(e.residual.matrix(3) @ circuit_matrix(e.circuit), np.eye(8), atol=1e-12)
    assert count_gates(e.circuit).cnot == 3


def test_u2_mux_rejects_non_unitary_payload():
    blocks = np.array([np.eye(2), 1.5 * np.eye(2)], dtype=complex)
    with pytest.raises(ValidationError):
        expand_mux_u2(MuxGate(Axis.GENERIC, 2, (1,), blocks))
    with pytest.raises(UnsupportedError):
        expand_mux_u2(MuxGate(Axis.Z, 2, (1,), [0.0, 1.0]))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4), st.integers(0, 2**31))
def test_u2_mux_property(k, seed):
    m = _generic(k, seed % 100_000)
    e = expand_mux_u2(m)
    lhs = e.residual.matrix(k + 1) @ circuit_matrix(e.circuit)
    assert lamat.phase_invariant_distance(lhs, m.matrix(k + 1)) < 1e-10


# -- diagonals --------------------------------------------------------------------

def _random_diag(k, seed, wires=None):
    r = np.random.default_rng(seed)
    wires = tuple(range(1, k + 1)) if wires is None else wires
    return DiagonalSpec(wires, np.exp(1j * r.uniform(-math.pi, math.pi, 2**k)))


def test_diagonal_spec_reorder_and_embed():
    d = DiagonalSpec((2, 1), [1, 1j, -1, -1j])
    # index with wire 2 as the MSB: (w2, w1) = (0,1) -> 1j
    full = d.full_phases(2)  # index with wire 1 as MSB
    assert full[0b10] == 1j and full[0b01] == -1
    assert np.allclose(d.reordered((1, 2)).phases, full)
    assert np.allclose(d.matrix(3), np.kron(np.diag(full), np.eye(2)))


def test_diagonal_compose():
    a = DiagonalSpec((1,), [1, 1j])
    b = DiagonalSpec((2,), [1, -1])
    assert np.allclose(a.compose(b).matrix(2), a.matrix(2) @ b.matrix(2))


def test_diagonal_spec_validation():
    with pytest.raises(DimensionError):
        DiagonalSpec((1, 2), [1, 1])
    with pytest.raises(ValidationError):
        DiagonalSpec((1,), [1, 2])
    with pytest.raises(RangeError):
        DiagonalSpec((1, 1), [1, 1, 1, 1])


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5, 6])
def test_synth_diagonal_counts(k):
    d = _random_diag(k, k)
    c = synth_diagonal(d)
    counts = count_gates(c)
    assert counts.cnot == max(0, 2**k - 2)
    assert counts.one_qubit == 2**k - 1
    assert np.allclose(circuit_matrix(c), d.matrix(k), atol=1e-12)


def test_synth_diagonal_orders():
    d = _random_diag(3, 1, wires=(3, 1, 4))
    for order in [(1, 3, 4), (4, 3, 1), None]:
        c = synth_diagonal(d, n=4, order=order)
        assert np.allclose(circuit_matrix(c), d.matrix(4), atol=1e-12)


def test_diagonal_cascade_reproduces_phases():
    d = _random_diag(3, 4)
    muxes, phase = diagonal_cascade(d, (2, 3, 1))
    m = np.exp(1j * phase) * np.eye(8)
    for mx in muxes:
        m = mx.matrix(3) @ m
    assert np.allclose(m, d.matrix(3))
    assert [mx.target for mx in muxes] == [2, 3, 1]
    assert [mx.controls for mx in muxes] == [(), (2,), (2, 3)]


def test_trivial_diagonal_is_a_phase():
    d = DiagonalSpec((1, 2), np.full(4, np.exp(0.3j)))
    c = synth_diagonal(d)
    assert len(c) == 0
    assert c.global_phase == pytest.approx(0.3)
