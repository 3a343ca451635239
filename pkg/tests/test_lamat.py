import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from bqdsynth import lamat
from bqdsynth.errors import DimensionError, RangeError, ValidationError

angles = st.floats(-4 * math.pi, 4 * math.pi, allow_nan=False)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0 + 0j, -1.0])


@given(angles)
def test_rotations_match_exponentials(t):
    # Rx and Ry here are the inverses of the textbook exp(-i t P/2).
    assert np.allclose(lamat.rx(t), expm(0.5j * t * X))
    assert np.allclose(lamat.ry(t), expm(0.5j * t * Y))
    assert np.allclose(lamat.rz(t), expm(-0.5j * t * Z))


def test_ry_literal():
    t = 0.7
    c, s = math.cos(t / 2), math.sin(t / 2)
    assert np.allclose(lamat.ry(t), [[c, s], [-s, c]])


def test_num_qubits_rejects_bad_shapes():
    assert lamat.num_qubits(np.eye(8)) == 3
    with pytest.raises(DimensionError):
        lamat.num_qubits(np.eye(6))
    with pytest.raises(DimensionError):
        lamat.num_qubits(np.ones((2, 4)))


def test_require_unitary():
    with pytest.raises(ValidationError):
        lamat.require_unitary(np.diag([1.0, 1.1]))
    u = lamat.require_unitary(np.eye(2) * (1 + 1e-12))
    assert u.dtype == complex


def test_haar_unitary_is_deterministic_and_unitary():
    a = lamat.haar_random_unitary(3, 5)
    b = lamat.haar_random_unitary(3, 5)
    assert np.array_equal(a, b)
    assert lamat.unitarity_error(a) < 1e-13
    assert not np.allclose(a, lamat.haar_random_unitary(3, 6))
    for bad in (0, 13):
        with pytest.raises(RangeError):
            lamat.haar_random_unitary(bad, 0)


def test_haar_phases_are_spread():
    # Eigenphases of Haar unitaries repel; crude check that the mean trace is near zero.
    tr = [np.trace(lamat.haar_random_unitary(2, s)) for s in range(400)]
    assert abs(np.mean(tr)) < 0.2


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000), angles)
def test_distance_ignores_global_phase(seed, phi):
    u = lamat.haar_random_unitary(2, seed)
    assert lamat.phase_invariant_distance(u, np.exp(1j * phi) * u) < 1e-13


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_distance_against_phase_scan(s1, s2):
    u, v = lamat.haar_random_unitary(2, s1), lamat.haar_random_unitary(2, s2)
    # Independent route: minimize the Frobenius gap over a dense phase grid, then refine.
    grid = np.linspace(0, 2 * math.pi, 2001)
    gaps = [np.linalg.norm(u - np.exp(1j * p) * v) for p in grid]
    p0 = grid[int(np.argmin(gaps))]
    fine = np.linspace(p0 - 0.01, p0 + 0.01, 4001)
    best = min(np.linalg.norm(u - np.exp(1j * p) * v) for p in fine)
    assert lamat.phase_invariant_distance(u, v) == pytest.approx(best, abs=1e-6)


def test_distance_resolves_tiny_perturbations():
    u = lamat.haar_random_unitary(4, 1)
    eps = 1e-12
    h = np.zeros((16, 16), dtype=complex)
    h[0, 1] = h[1, 0] = 1
    v = expm(1j * eps * h) @ u
    # First-order gap is eps * ||h||_F = eps * sqrt(2).
    assert lamat.phase_invariant_distance(u, v) == pytest.approx(eps * math.sqrt(2), rel=1e-3)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_zyz_round_trip(seed):
    u = lamat.haar_random_unitary(1, seed)
    z = lamat.zyz_decompose(u)
    assert np.allclose(z.matrix(), u, atol=1e-12)
    assert 0 <= z.beta <= math.pi + 1e-12


@pytest.mark.parametrize("m", [np.eye(2), X, Y, Z, np.diag([1, 1j]), lamat.ry(math.pi)])
def test_zyz_special_matrices(m):
    z = lamat.zyz_decompose(m)
    assert np.allclose(lamat.zyz_matrix(z.delta, z.alpha, z.beta, z.gamma_angle), m, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_csd_structure(n):
    u = lamat.haar_random_unitary(n, 11 + n)
    r = lamat.cosine_sine_decompose(u)
    half = u.shape[0] // 2
    assert np.allclose(r.reconstruct(), u, atol=1e-12)
    assert np.all(np.diff(r.angles) >= 0)
    assert np.all((r.angles >= 0) & (r.angles <= math.pi / 2))
    for f in (r.l1, r.l2, r.r1, r.r2):
        assert f.shape == (half, half)
        assert lamat.unitarity_error(f) < 1e-12


def test_csd_of_block_diagonal_has_zero_angles():
    a, b = lamat.haar_random_unitary(2, 1), lamat.haar_random_unitary(2, 2)
    u = np.block([[a, np.zeros((4, 4))], [np.zeros((4, 4)), b]])
    r = lamat.cosine_sine_decompose(u)
    assert np.allclose(r.angles, 0, atol=1e-7)
    assert np.allclose(r.reconstruct(), u, atol=1e-12)


def test_csd_of_swap_like_block():
    # [[0, I], [-I, 0]] needs every angle at pi/2.
    z = np.zeros((2, 2))
    u = np.block([[z, np.eye(2)], [-np.eye(2), z]]).astype(complex)
    r = lamat.cosine_sine_decompose(u)
    assert np.allclose(r.angles, math.pi / 2)
    assert np.allclose(r.reconstruct(), u)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_demux(k):
    u1, u2 = lamat.haar_random_unitary(k, 3), lamat.haar_random_unitary(k, 4)
    r = lamat.demux_block_diagonal(u1, u2)
    d = np.diag(r.d_phases)
    assert np.allclose(r.v @ d @ r.w, u1, atol=1e-12)
    assert np.allclose(r.v @ d.conj() @ r.w, u2, atol=1e-12)
    assert lamat.unitarity_error(r.v) < 1e-12


def test_demux_degenerate_spectrum():
    # u1 u2^dag = I: every eigenvalue coincides.
    u = lamat.haar_random_unitary(2, 9)
    r = lamat.demux_block_diagonal(u, u)
    assert np.allclose(r.v @ np.diag(r.d_phases) @ r.w, u, atol=1e-12)
    assert lamat.unitarity_error(r.v) < 1e-12


def test_demux_dimension_mismatch():
    with pytest.raises(DimensionError):
        lamat.demux_block_diagonal(np.eye(2), np.eye(4))
