"""Dense complex linear algebra used by the synthesis backends.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Rotation
matrices follow the sign conventions used throughout the package::

    Rx(t) = [[cos t/2, i sin t/2], [i sin t/2, cos t/2]]
    Ry(t) = [[cos t/2,   sin t/2], [ -sin t/2, cos t/2]]
    Rz(t) = diag(exp(-i t/2), exp(i t/2))

Note that ``Rx`` and ``Ry`` are the inverses of the textbook
``exp(-i t X/2)`` and ``exp(-i t Y/2)``; ``Rz`` agrees with the textbook.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DecompositionError, DimensionError, RangeError, ValidationError

# Internal reconstruction checks use RECON_TOL * sqrt(dim); API-boundary
# unitarity checks use BOUNDARY_TOL * sqrt(dim).
RECON_TOL = 1e-9
BOUNDARY_TOL = 1e-8

MAX_QUBITS = 12


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, 1j * s], [1j * s, c]], dtype=complex)


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, s], [-s, c]], dtype=complex)


def rz(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def _square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    return m


def num_qubits(m: np.ndarray) -> int:
    """Return ``n`` for a ``2^n x 2^n`` matrix, raising on other shapes."""
    dim = _square(m).shape[0]
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two")
    return n


def unitarity_error(m: np.ndarray) -> float:
    m = _square(m)
    return float(np.linalg.norm(m @ m.conj().T - np.eye(m.shape[0])))


def is_unitary(m: np.ndarray, tol: float = 1e-10) -> bool:
    """True iff ``||M M^dag - I||_F <= tol``."""
    return unitarity_error(m) <= tol


def boundary_tolerance(dim: int) -> float:
    return BOUNDARY_TOL * math.sqrt(dim)


def require_unitary(m: np.ndarray, tol: float | None = None) -> np.ndarray:
    m = _square(m)
    if tol is None:
        tol = boundary_tolerance(m.shape[0])
    err = unitarity_error(m)
    if err > tol:
        raise ValidationError(f"matrix is not unitary: ||MM^dag - I|| = {err:.3e} > {tol:.3e}")
    return m


def phase_invariant_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``min_phi ||U - e^{i phi} V||_F`` for unitaries of equal dimension.

    For unitaries this equals ``sqrt(2 dim - 2 |tr(U^dag V)|)``.  That form
    cancels catastrophically near zero (it bottoms out around 1e-7), so the
    minimizing phase is applied explicitly instead.
    """
    u, v = _square(u), _square(v)
    if u.shape != v.shape:
        raise DimensionError(f"dimension mismatch: {u.shape} vs {v.shape}")
    overlap = np.vdot(v, u)  # trace(V^dag U)
    phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
    return float(np.linalg.norm(u - phase * v))


def haar_random_unitary(n: int, seed: int) -> np.ndarray:
    """Haar-distributed ``2^n x 2^n`` unitary, deterministic in ``seed``.

    QR of a complex Ginibre matrix with the phases of ``diag(R)`` divided
    out (Mezzadri's correction).
    """
    if not 1 <= n <= MAX_QUBITS:
        raise RangeError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    dim = 1 << n
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


@dataclass(frozen=True)
class ZyzResult:
    """``U = e^{i delta} Rz(alpha) Ry(beta) Rz(gamma_angle)``."""

    delta: float
    alpha: float
    beta: float
    gamma_angle: float

    def matrix(self) -> np.ndarray:
        return zyz_matrix(self.delta, self.alpha, self.beta, self.gamma_angle)


def zyz_matrix(delta: float, alpha: float, beta: float, lam: float) -> np.ndarray:
    c, s = math.cos(beta / 2), math.sin(beta / 2)
    p, m = (alpha + lam) / 2, (alpha - lam) / 2
    g = np.exp(1j * delta)
    return g * np.array(
        [
            [np.exp(-1j * p) * c, np.exp(-1j * m) * s],
            [-np.exp(1j * m) * s, np.exp(1j * p) * c],
        ]
    )


def zyz_decompose(u: np.ndarray) -> ZyzResult:
    u = _square(u)
    if u.shape != (2, 2):
        raise DimensionError(f"ZYZ needs a 2x2 matrix, got {u.shape}")
    require_unitary(u)
    delta = float(np.angle(np.linalg.det(u))) / 2
    v = u * np.exp(-1j * delta)
    c, s = abs(v[0, 0]), abs(v[0, 1])
    beta = 2 * math.atan2(s, c)
    total = -2 * float(np.angle(v[0, 0]))
    diff = -2 * float(np.angle(v[0, 1]))
    if s < 1e-14:
        alpha, lam = total, 0.0
    elif c < 1e-14:
        alpha, lam = diff, 0.0
    else:
        alpha, lam = (total + diff) / 2, (total - diff) / 2
    return ZyzResult(delta, alpha, beta, lam)


@dataclass(frozen=True)
class CsdResult:
    """``U = (l1 + l2) [[C, S], [-S, C]] (r1 + r2)`` with ``C = diag(cos angles)``."""

    l1: np.ndarray
    l2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    angles: np.ndarray

    def cs_matrix(self) -> np.ndarray:
        c, s = np.diag(np.cos(self.angles)), np.diag(np.sin(self.angles))
        return np.block([[c, s], [-s, c]]).astype(complex)

    def reconstruct(self) -> np.ndarray:
        left = scipy.linalg.block_diag(self.l1, self.l2)
        right = scipy.linalg.block_diag(self.r1, self.r2)
        return left @ self.cs_matrix() @ right


def cosine_sine_decompose(u: np.ndarray) -> CsdResult:
    """Balanced cosine-sine decomposition with ascending angles in ``[0, pi/2]``."""
    u = require_unitary(u)
    num_qubits(u)
    dim = u.shape[0]
    if dim < 2:
        raise DimensionError("CSD needs dimension >= 2")
    half = dim // 2
    (u1, u2), theta, (v1h, v2h) = scipy.linalg.cossin(u, p=half, q=half, separate=True)
    # LAPACK returns the middle factor as [[C, -S], [S, C]]; negating the
    # second block row/column turns it into [[C, S], [-S, C]].
    theta = np.clip(np.asarray(theta, dtype=float), 0.0, math.pi / 2)
    order = np.argsort(theta, kind="stable")
    res = CsdResult(
        l1=np.ascontiguousarray(u1[:, order]),
        l2=np.ascontiguousarray(-u2[:, order]),
        r1=np.ascontiguousarray(v1h[order, :]),
        r2=np.ascontiguousarray(-v2h[order, :]),
        angles=theta[order],
    )
    residual = float(np.linalg.norm(res.reconstruct() - u))
    if residual > RECON_TOL * math.sqrt(dim):
        raise DecompositionError(f"CSD reconstruction residual {residual:.3e}", residual)
    return res


@dataclass(frozen=True)
class DemuxResult:
    """``u1 = v D w`` and ``u2 = v D^dag w`` with ``D = diag(d_phases)``."""

    v: np.ndarray
    w: np.ndarray
    d_phases: np.ndarray


def demux_block_diagonal(u1: np.ndarray, u2: np.ndarray) -> DemuxResult:
    """Split ``diag(u1, u2)`` into ``(I x v)(D + D^dag)(I x w)``.

    ``D^2`` and ``v`` come from a complex Schur form of ``u1 u2^dag``; for a
    normal matrix the triangular factor is diagonal up to rounding, and the
    Schur vectors are orthonormal even inside degenerate eigenspaces.
    """
    u1, u2 = require_unitary(u1), require_unitary(u2)
    if u1.shape != u2.shape:
        raise DimensionError(f"dimension mismatch: {u1.shape} vs {u2.shape}")
    dim = u1.shape[0]
    t, z = scipy.linalg.schur(u1 @ u2.conj().T, output="complex")
    lam = np.diag(t)
    lam = lam / np.abs(lam)
    d = np.exp(0.5j * np.angle(lam))
    w = d[:, None] * (z.conj().T @ u2)
    res = DemuxResult(v=z, w=w, d_phases=d)
    tol = RECON_TOL * math.sqrt(dim)
    r1 = float(np.linalg.norm((z * d) @ w - u1))
    r2 = float(np.linalg.norm((z * d.conj()) @ w - u2))
    if max(r1, r2) > tol:
        raise DecompositionError(f"demultiplexing residual {max(r1, r2):.3e}", max(r1, r2))
    return res
