"""Two-qubit synthesis with the minimal number of CNOTs (at most three).

Any ``U`` in ``U(4)`` factors as ``(A1 x A2) K(a, b, c) (B1 x B2)`` with
``K(a, b, c) = exp(i (a XX + b YY + c ZZ))``.  The factorization is found in
the magic basis, where local gates become real orthogonal matrices and
``K`` becomes diagonal.  The number of nonzero canonical coordinates (after
folding them into ``(-pi/4, pi/4]``) decides between 0, 1, 2 or 3 CNOTs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import lamat
from .circuit import Circuit, Gate, circuit_matrix
from .errors import DecompositionError

_S2 = 1 / math.sqrt(2)
MAGIC = _S2 * np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex
)
_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1.0 + 0j, -1.0])
_H = _S2 * np.array([[1, 1], [1, -1]], dtype=complex)
_S = np.diag([1, 1j])
PAULIS = (_X, _Y, _Z)
_CNOT12 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

# Diagonals of XX, YY, ZZ in the magic basis (each is a +-1 vector).
_MAGIC_DIAG = np.array(
    [np.real(np.diag(MAGIC.conj().T @ np.kron(p, p) @ MAGIC)) for p in PAULIS]
)

SNAP_TOL = 1e-11


def canonical_gate(a: float, b: float, c: float) -> np.ndarray:
    """``exp(i (a XX + b YY + c ZZ))``."""
    phases = np.exp(1j * (_MAGIC_DIAG.T @ np.array([a, b, c])))
    return MAGIC @ np.diag(phases) @ MAGIC.conj().T


def kron_factor(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Split a (near) product ``A (x) B`` into unitary factors; phases land on ``A``."""
    r = m.reshape(2, 2, 2, 2).transpose(0, 2, 1, 3).reshape(4, 4)
    u, s, vh = np.linalg.svd(r)
    a = math.sqrt(s[0]) * u[:, 0].reshape(2, 2)
    b = math.sqrt(s[0]) * vh[0].reshape(2, 2)
    scale = math.sqrt(abs(np.linalg.det(b)))
    a, b = a * scale, b / scale
    return a, b


def _real_orthogonal_eig(m2: np.ndarray) -> np.ndarray:
    """Real orthogonal ``P`` with ``P^T m2 P`` diagonal, for symmetric unitary ``m2``."""
    best, best_err = None, math.inf
    for r in (0.6180339887, 1.4142135624, 2.7182818285, 0.3183098862, 5.1234567):
        _, p = np.linalg.eigh(m2.real + r * m2.imag)
        d = p.T @ m2 @ p
        err = float(np.linalg.norm(d - np.diag(np.diag(d))))
        if err < best_err:
            best, best_err = p, err
        if err < 1e-13:
            break
    if best_err > 1e-9:
        raise DecompositionError(f"could not diagonalize M^T M in the magic basis ({best_err:.3e})", best_err)
    if np.linalg.det(best) < 0:
        best = best.copy()
        best[:, 0] *= -1
    return best


@dataclass(frozen=True)
class KakResult:
    """``U = e^{i phase} (A1 x A2) K(a, b, c) (B1 x B2)`` with coordinates in ``(-pi/4, pi/4]``."""

    phase: float
    left: np.ndarray  # 4x4 local
    right: np.ndarray  # 4x4 local
    coords: tuple[float, float, float]

    def matrix(self) -> np.ndarray:
        return np.exp(1j * self.phase) * self.left @ canonical_gate(*self.coords) @ self.right


def kak_decompose(u: np.ndarray) -> KakResult:
    u = lamat.require_unitary(u)
    if u.shape != (4, 4):
        raise lamat.DimensionError(f"expected a 4x4 matrix, got {u.shape}")
    det = np.linalg.det(u)
    g = np.angle(det) / 4
    us = u * np.exp(-1j * g)
    up = MAGIC.conj().T @ us @ MAGIC
    m2 = up.T @ up
    p = _real_orthogonal_eig(m2)
    theta = np.angle(np.diag(p.T @ m2 @ p)) / 2
    k1 = up @ p @ np.diag(np.exp(-1j * theta))
    if np.linalg.det(k1).real < 0:
        theta[0] += math.pi
        k1[:, 0] *= -1
    k1 = k1.real
    left = MAGIC @ k1 @ MAGIC.conj().T
    right = MAGIC @ p.T @ MAGIC.conj().T
    # theta = a x + b y + c z + phi * 1 with orthogonal +-1 vectors.
    a, b, c = (_MAGIC_DIAG @ theta) / 4
    phi = float(np.sum(theta)) / 4
    coords = [a, b, c]
    fix = np.eye(4, dtype=complex)
    for j in range(3):
        m = math.floor((coords[j] + math.pi / 4) / (math.pi / 2))
        # keep the value in (-pi/4, pi/4]
        cj = coords[j] - m * math.pi / 2
        if cj <= -math.pi / 4 + 1e-15:
            cj += math.pi / 2
            m -= 1
        coords[j] = cj
        if m:
            pp = np.kron(PAULIS[j], PAULIS[j])
            fix = fix @ np.linalg.matrix_power(1j * pp, m % 4)
    right = fix @ right
    for j in range(3):
        if abs(coords[j]) < SNAP_TOL:
            coords[j] = 0.0
        elif abs(abs(coords[j]) - math.pi / 4) < SNAP_TOL:
            if coords[j] < 0:
                pp = np.kron(PAULIS[j], PAULIS[j])
                right = np.linalg.inv(1j * pp) @ right
            coords[j] = math.pi / 4
    res = KakResult(g + phi, left, right, (coords[0], coords[1], coords[2]))
    err = lamat.phase_invariant_distance(res.matrix(), u)
    if err > lamat.RECON_TOL * 2:
        raise DecompositionError(f"KAK reconstruction residual {err:.3e}", err)
    return res


def _clifford_table():
    """Single-qubit Cliffords ``C`` with ``C sigma_j C^dag ~ sigma_{perm[j]}``, one per permutation."""
    table = {}
    words = [()]
    for length in range(1, 4):
        words += list(itertools.product("HS", repeat=length))
    for w in words:
        c = _I2
        for ch in w:
            c = (_H if ch == "H" else _S) @ c
        perm = []
        for p in PAULIS:
            q = c @ p @ c.conj().T
            perm.append(next(k for k, r in enumerate(PAULIS) if abs(abs(np.vdot(r, q)) - 2) < 1e-12))
        table.setdefault(tuple(perm), c)
    return table


_CLIFFORDS = _clifford_table()


def _permuting_clifford(coords, want):
    """Find ``C`` and new coordinates ``a'`` with ``(C x C) K(a') (C x C)^dag = K(coords)``.

    ``want(a')`` is a predicate on the candidate arrangement.
    """
    for perm, c in sorted(_CLIFFORDS.items()):
        ap = tuple(coords[perm[j]] for j in range(3))
        if want(ap):
            return c, ap
    raise DecompositionError("no Clifford arrangement found")


def two_qubit_optimal(u: np.ndarray) -> Circuit:
    """At most 3 CNOTs and 7 one-qubit gates; exact up to global phase."""
    kak = kak_decompose(u)
    coords = kak.coords
    nz = sum(1 for x in coords if x != 0.0)
    circ = Circuit(2)
    if nz == 0:
        a1, a2 = kron_factor(kak.left @ kak.right)
        circ.append(Gate.u2(1, a1))
        circ.append(Gate.u2(2, a2))
        return _fix_phase(circ, u)

    quarter = math.pi / 4
    if nz == 1 and quarter in coords:
        c, _ = _permuting_clifford(coords, lambda ap: ap[0] == quarter)
        core_left = np.kron(_H @ _rz_std(-math.pi / 2), _H @ _rz_std(-math.pi / 2) @ _H)
        core_right = np.kron(_H, _I2)
        inner = [Gate.cnot(1, 2)]
    elif 0.0 in coords:
        c, ap = _permuting_clifford(coords, lambda ap: ap[1] == 0.0)
        # CNOT (e^{iaX} x e^{icZ}) CNOT = K(a, 0, c);  e^{iaX} = Rx(2a), e^{icZ} = Rz(-2c)
        core_left = np.eye(4, dtype=complex)
        core_right = np.eye(4, dtype=complex)
        inner = [Gate.cnot(1, 2), Gate.rx(1, 2 * ap[0]), Gate.rz(2, -2 * ap[2]), Gate.cnot(1, 2)]
    else:
        c, ap = _permuting_clifford(coords, lambda ap: True)
        a, b, cc = ap
        core_left = np.kron(_rz_std(-math.pi / 2), _I2)
        core_right = np.kron(_I2, _rz_std(math.pi / 2))
        inner = [
            Gate.cnot(2, 1),
            Gate.rz(1, math.pi / 2 - 2 * cc),
            Gate.ry(2, -(math.pi / 2 - 2 * a)),
            Gate.cnot(1, 2),
            Gate.ry(2, -(2 * b - math.pi / 2)),
            Gate.cnot(2, 1),
        ]
    cc2 = np.kron(c, c)
    outer_left = kak.left @ cc2 @ core_left
    outer_right = core_right @ cc2.conj().T @ kak.right
    r1, r2 = kron_factor(outer_right)
    l1, l2 = kron_factor(outer_left)
    circ.append(Gate.u2(1, _unitarize(r1)))
    circ.append(Gate.u2(2, _unitarize(r2)))
    circ.extend(inner)
    circ.append(Gate.u2(1, _unitarize(l1)))
    circ.append(Gate.u2(2, _unitarize(l2)))
    return _fix_phase(circ, u)


def _rz_std(t: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * t), np.exp(0.5j * t)])


def _unitarize(m: np.ndarray) -> np.ndarray:
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def _fix_phase(circ: Circuit, u: np.ndarray) -> Circuit:
    m = circuit_matrix(circ)
    ov = np.vdot(m, u)
    circ.global_phase = float(np.angle(ov)) if abs(ov) > 0 else 0.0
    err = lamat.phase_invariant_distance(circuit_matrix(circ), u)
    if err > lamat.RECON_TOL * 2:
        raise DecompositionError(f"two-qubit synthesis residual {err:.3e}", err)
    return circ


def cnot_class(u: np.ndarray) -> int:
    """Minimal CNOT count for ``u`` from its canonical coordinates."""
    coords = kak_decompose(u).coords
    nz = sum(1 for x in coords if x != 0.0)
    if nz == 0:
        return 0
    if nz == 1 and math.pi / 4 in coords:
        return 1
    return 2 if 0.0 in coords else 3
