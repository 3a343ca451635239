"""Multiplexed (uniformly controlled) gates and diagonal gates.

A multiplexor applies ``payload[x]`` to its target, where ``x`` is the bit
pattern of the control wires read with ``controls[0]`` as the most
significant bit.  Expansions return the primitive circuit together with a
residual diagonal ``D`` such that ``matrix(D) @ matrix(circuit)`` equals the
multiplexor.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import lamat
from .circuit import Circuit, Gate
from .errors import DimensionError, RangeError, UnsupportedError, ValidationError

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SDG = np.diag([1, -1j])


class Axis(str, enum.Enum):
    Z = "Z"
    Y = "Y"
    GENERIC = "GENERIC"


def ruler(i: int) -> int:
    """Zero-based index of the least significant set bit of ``i``."""
    if i < 1:
        raise RangeError(f"ruler is defined for i >= 1, got {i}")
    return (i & -i).bit_length() - 1


def gray(i: int) -> int:
    return i ^ (i >> 1)


def _log2_exact(size: int) -> int:
    k = size.bit_length() - 1
    if size < 1 or 1 << k != size:
        raise DimensionError(f"length {size} is not a power of two")
    return k


def walsh_angles(thetas: Sequence[float]) -> np.ndarray:
    """Angles for the Gray-code CNOT cascade of a multiplexed rotation.

    ``a[i] = 2^-k * sum_x (-1)^popcount(x & gray(i)) * thetas[x]``.  The
    cascade applies ``a[0]``, CNOT, ``a[1]``, CNOT, ... so that after step
    ``i`` the target has been flipped by the control bits selected by
    ``gray(i)``.
    """
    t = np.asarray(thetas, dtype=float)
    k = _log2_exact(t.size)
    # Fast Walsh-Hadamard transform in natural (Hadamard) order.
    h = t.copy()
    step = 1
    while step < t.size:
        h = h.reshape(-1, 2, step)
        h = np.stack([h[:, 0] + h[:, 1], h[:, 0] - h[:, 1]], axis=1).reshape(-1)
        step *= 2
    idx = np.array([gray(i) for i in range(t.size)], dtype=int)
    return h[idx] / (1 << k)


def cascade_controls(controls: Sequence[int]) -> list[int]:
    """Control wire of each CNOT in a Gray-code cascade over ``controls``."""
    k = len(controls)
    m = 1 << k
    out = [controls[k - 1 - ruler(i)] for i in range(1, m)]
    if k:
        out.append(controls[0])
    return out


@dataclass(frozen=True)
class DiagonalSpec:
    """Diagonal gate on ``wires``; ``phases`` indexed with ``wires[0]`` as MSB."""

    wires: tuple[int, ...]
    phases: np.ndarray

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=complex).reshape(-1)
        object.__setattr__(self, "wires", tuple(int(w) for w in self.wires))
        object.__setattr__(self, "phases", ph)
        if ph.size != 1 << len(self.wires):
            raise DimensionError(f"{len(self.wires)} wires need {1 << len(self.wires)} phases, got {ph.size}")
        if len(set(self.wires)) != len(self.wires):
            raise RangeError(f"repeated wire in {self.wires}")
        if np.any(np.abs(np.abs(ph) - 1) > 1e-8):
            raise ValidationError("diagonal phases must have unit modulus")

    @staticmethod
    def trivial(wires: Sequence[int]) -> "DiagonalSpec":
        return DiagonalSpec(tuple(wires), np.ones(1 << len(wires), dtype=complex))

    def is_trivial(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.phases - self.phases[0]) <= tol))

    def reordered(self, wires: Sequence[int]) -> "DiagonalSpec":
        """Same operator with phases re-indexed for a permutation of the wires."""
        wires = tuple(wires)
        if sorted(wires) != sorted(self.wires):
            raise RangeError(f"{wires} is not a permutation of {self.wires}")
        k = len(wires)
        t = self.phases.reshape([2] * k) if k else self.phases.reshape(())
        perm = [self.wires.index(w) for w in wires]
        return DiagonalSpec(wires, np.transpose(t, perm).reshape(-1))

    def full_phases(self, n: int) -> np.ndarray:
        """Diagonal of the ``2^n`` embedding."""
        for w in self.wires:
            if not 1 <= w <= n:
                raise RangeError(f"wire {w} outside 1..{n}")
        k = len(self.wires)
        t = self.phases.reshape([2] * k) if k else self.phases.reshape(())
        shape = [2 if w in self.wires else 1 for w in range(1, n + 1)]
        order = sorted(range(k), key=lambda i: self.wires[i])
        t = np.transpose(t, order).reshape(shape)
        return np.broadcast_to(t, [2] * n).reshape(-1).copy()

    def matrix(self, n: int) -> np.ndarray:
        return np.diag(self.full_phases(n))

    def compose(self, other: "DiagonalSpec") -> "DiagonalSpec":
        """``self * other`` on the union of the two wire sets."""
        wires = tuple(sorted(set(self.wires) | set(other.wires)))
        k = len(wires)
        local = {w: i + 1 for i, w in enumerate(wires)}
        a = DiagonalSpec(tuple(local[w] for w in self.wires), self.phases).full_phases(k)
        b = DiagonalSpec(tuple(local[w] for w in other.wires), other.phases).full_phases(k)
        return DiagonalSpec(wires, a * b)


@dataclass(frozen=True)
class MuxGate:
    """Multiplexed rotation (``Z``/``Y``: payload of angles) or generic gate (payload of 2x2 unitaries)."""

    axis: Axis
    target: int
    controls: tuple[int, ...]
    payload: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "controls", tuple(int(c) for c in self.controls))
        if self.target in self.controls:
            raise RangeError(f"target {self.target} is also a control")
        if len(set(self.controls)) != len(self.controls):
            raise RangeError(f"repeated control in {self.controls}")
        size = 1 << len(self.controls)
        if self.axis is Axis.GENERIC:
            p = np.asarray(self.payload, dtype=complex)
            if p.shape != (size, 2, 2):
                raise DimensionError(f"generic payload must have shape ({size}, 2, 2), got {p.shape}")
        else:
            p = np.asarray(self.payload, dtype=float).reshape(-1)
            if p.size != size:
                raise DimensionError(f"{len(self.controls)} controls need {size} angles, got {p.size}")
        object.__setattr__(self, "payload", p)

    @property
    def wires(self) -> tuple[int, ...]:
        return self.controls + (self.target,)

    def blocks(self) -> np.ndarray:
        """The ``2^k`` 2x2 blocks, shape ``(2^k, 2, 2)``."""
        if self.axis is Axis.GENERIC:
            return self.payload
        rot = lamat.rz if self.axis is Axis.Z else lamat.ry
        return np.array([rot(t) for t in self.payload])

    def matrix(self, n: int) -> np.ndarray:
        wires = self.wires
        for w in wires:
            if not 1 <= w <= n:
                raise RangeError(f"wire {w} outside 1..{n}")
        local = _block_diag(self.blocks())
        # local acts on (controls..., target) with controls[0] as MSB; embed.
        rest = [w for w in range(1, n + 1) if w not in wires]
        order = list(wires) + rest
        full = np.kron(local, np.eye(1 << len(rest)))
        t = full.reshape([2] * (2 * n))
        inv = [order.index(w) for w in range(1, n + 1)]
        t = np.transpose(t, inv + [n + i for i in inv])
        return t.reshape(1 << n, 1 << n)


def _block_diag(blocks: np.ndarray) -> np.ndarray:
    m = blocks.shape[0]
    out = np.zeros((2 * m, 2 * m), dtype=complex)
    for i in range(m):
        out[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = blocks[i]
    return out


@dataclass
class MuxExpansion:
    """``matrix(residual) @ matrix(circuit) == matrix(mux)``."""

    circuit: Circuit
    residual: DiagonalSpec


def _rotation(axis: Axis, target: int, angle: float) -> Gate:
    return Gate.rz(target, angle) if axis is Axis.Z else Gate.ry(target, angle)


def expand_mux_rotation(
    m: MuxGate, up_to_diagonal: bool = False, n: int | None = None, cnot_first: bool = False
) -> MuxExpansion:
    """Gray-code expansion of a multiplexed ``Rz`` or ``Ry``.

    Exact mode emits ``2^k`` CNOTs and ``2^k`` rotations.  With
    ``up_to_diagonal`` (``Y`` axis only) the two CNOTs driven by
    ``controls[0]`` are treated as CZ gates: the last one is left to the
    residual and the middle one becomes ``H CNOT H`` with both Hadamards
    absorbed into neighbouring rotations (emitted as ``U2``).  That gives
    ``2^k - 1`` CNOTs and still ``2^k`` one-qubit gates.

    ``cnot_first`` emits the exact ``Z`` cascade in reverse, which has the
    same matrix because every gate in it is symmetric.
    """
    if m.axis is Axis.GENERIC:
        raise UnsupportedError("generic multiplexors go through expand_mux_u2")
    if up_to_diagonal and m.axis is Axis.Z:
        raise UnsupportedError("a Z multiplexor is already diagonal; no up-to-diagonal saving exists")
    if cnot_first and m.axis is not Axis.Z:
        raise UnsupportedError("the reversed cascade is only valid for the Z axis")
    k = len(m.controls)
    if n is None:
        n = max(m.wires)
    circ = Circuit(n)
    angles = walsh_angles(m.payload)
    ctrls = cascade_controls(m.controls)
    t = m.target
    if k == 0:
        circ.append(_rotation(m.axis, t, angles[0]))
        return MuxExpansion(circ, DiagonalSpec.trivial(m.wires))
    if not up_to_diagonal:
        gates = []
        for a, c in zip(angles, ctrls):
            gates.append(_rotation(m.axis, t, a))
            gates.append(Gate.cnot(c, t))
        if cnot_first:
            gates.reverse()
        circ.extend(gates)
        return MuxExpansion(circ, DiagonalSpec.trivial(m.wires))

    size = 1 << k
    mid = size // 2  # CNOT index (1-based) of the first controls[0] step
    for i in range(size):
        u = lamat.ry(angles[i])
        if i == mid - 1:
            circ.append(Gate.u2(t, _H @ u))
        elif i == mid:
            circ.append(Gate.u2(t, u @ _H))
        else:
            circ.append(Gate.ry(t, angles[i]))
        if i < size - 1:
            circ.append(Gate.cnot(ctrls[i], t))
    # The omitted final CZ(controls[0], t) plus a sign from reordering the
    # X and Z flips: X^a Z X^a Z = (-1)^a on patterns with controls[0] = 1,
    # where a is the controls[1] bit.
    x = np.arange(size)
    top = (x >> (k - 1)) & 1
    sign = np.ones(size)
    if k >= 2:
        sign = np.where(top & ((x >> (k - 2)) & 1), -1.0, 1.0)
    ph = np.empty((size, 2), dtype=complex)
    ph[:, 0] = sign
    ph[:, 1] = sign * np.where(top, -1.0, 1.0)
    return MuxExpansion(circ, DiagonalSpec(m.wires, ph.reshape(-1)))


def _split_pair(a: np.ndarray, b: np.ndarray):
    """Batched solve of ``a (+) b = (r^dag (+) r) e^{i pi/4} Sdg_c (u Sdg) CZ w``.

    Returns ``(r, u, w)`` with ``r`` of shape ``(m, 2)`` (diagonals) and
    ``u``, ``w`` of shape ``(m, 2, 2)``.
    """
    x = a @ np.conj(np.swapaxes(b, 1, 2))
    det = x[:, 0, 0] * x[:, 1, 1] - x[:, 0, 1] * x[:, 1, 0]
    arg_det = np.angle(det)
    big = np.abs(x[:, 0, 0]) > 1e-12
    arg_ratio = np.where(big, np.angle(-x[:, 0, 0] * np.conj(x[:, 1, 1])), 0.0)
    rho1 = (-arg_det - arg_ratio) / 2
    rho2 = rho1 + arg_ratio
    r = np.exp(0.5j * np.stack([rho1, rho2], axis=1))
    y = r[:, :, None] * x * r[:, None, :]
    herm = -1j * y
    herm = 0.5 * (herm + np.conj(np.swapaxes(herm, 1, 2)))
    _, vecs = np.linalg.eigh(herm)
    u = vecs[:, :, ::-1]  # eigenvalue +1 of -iy first, i.e. y = u diag(i, -i) u^dag
    d = np.array([np.exp(0.25j * math.pi), np.exp(-0.25j * math.pi)])
    bp = np.conj(r)[:, :, None] * b
    w = d[None, :, None] * (np.conj(np.swapaxes(u, 1, 2)) @ bp)
    return r, u, w


def _mux_u2_rec(blocks: np.ndarray):
    """Returns (gates (2^k,2,2), cz control indices, residual phases (2^k, 2))."""
    size = blocks.shape[0]
    if size == 1:
        return blocks.copy(), [], np.ones((1, 2), dtype=complex)
    half = size // 2
    r, u, w = _split_pair(blocks[:half], blocks[half:])
    us_w, cz_w, res_w = _mux_u2_rec(w)
    vv = (u @ _SDG) * res_w[:, None, :]
    us_v, cz_v, res_v = _mux_u2_rec(vv)
    gates = np.concatenate([us_w, us_v])
    cz = [c + 1 for c in cz_w] + [0] + [c + 1 for c in cz_v]
    res = np.empty((size, 2), dtype=complex)
    res[:half] = np.exp(0.25j * math.pi) * np.conj(r) * res_v
    res[half:] = np.exp(-0.25j * math.pi) * r * res_v
    return gates, cz, res


def expand_mux_u2(m: MuxGate, n: int | None = None) -> MuxExpansion:
    """Generic multiplexor with ``2^k - 1`` CNOTs and ``2^k`` one-qubit gates.

    Splitting on ``controls[0]`` writes the gate as a diagonal, two
    multiplexors over the remaining controls and a CZ between them.  The
    diagonal left by the right-hand half commutes through the CZ and is
    folded into the left-hand half before it is expanded, so one residual
    survives per level.  Each CZ is finally turned into a CNOT with the
    surrounding Hadamards merged into the neighbouring one-qubit gates.
    """
    if m.axis is not Axis.GENERIC:
        raise UnsupportedError("expand_mux_u2 needs a generic multiplexor")
    k = len(m.controls)
    if k < 1:
        raise RangeError("expand_mux_u2 needs at least one control")
    blocks = m.payload
    errs = np.linalg.norm(blocks @ np.conj(np.swapaxes(blocks, 1, 2)) - np.eye(2), axis=(1, 2))
    if np.max(errs) > lamat.boundary_tolerance(2):
        raise ValidationError(f"payload is not unitary (error {np.max(errs):.3e})")
    gates, cz, res = _mux_u2_rec(blocks)
    for i in range(len(cz)):
        gates[i] = _H @ gates[i]
        gates[i + 1] = gates[i + 1] @ _H
    if n is None:
        n = max(m.wires)
    circ = Circuit(n)
    t = m.target
    for i, g in enumerate(gates):
        circ.append(Gate.u2(t, g))
        if i < len(cz):
            circ.append(Gate.cnot(m.controls[cz[i]], t))
    return MuxExpansion(circ, DiagonalSpec(m.wires, res.reshape(-1)))


def diagonal_cascade(d: DiagonalSpec, order: Sequence[int] | None = None):
    """Solve a diagonal as a cascade of multiplexed ``Rz`` gates.

    Returns ``(muxes, phase)`` where ``muxes[j]`` targets ``order[j]`` with
    controls ``order[:j]``, and ``exp(i phase) * prod(muxes)`` equals the
    diagonal.
    """
    order = tuple(d.wires if order is None else order)
    ph = d.reordered(order).phases
    if np.any(np.abs(ph) < 1e-300):
        raise ValidationError("zero-modulus phase")
    phi = np.angle(ph)
    muxes = []
    for j in range(len(order) - 1, -1, -1):
        pairs = phi.reshape(-1, 2)
        theta = pairs[:, 1] - pairs[:, 0]
        phi = (pairs[:, 0] + pairs[:, 1]) / 2
        muxes.append(MuxGate(Axis.Z, order[j], order[:j], theta))
    muxes.reverse()
    return muxes, float(phi[0])


def synth_diagonal(d: DiagonalSpec, n: int | None = None, order: Sequence[int] | None = None) -> Circuit:
    """Exact circuit for a diagonal on ``k`` wires: ``2^k - 2`` CNOTs, ``2^k - 1`` rotations."""
    if len(d.wires) < 1:
        raise RangeError("synth_diagonal needs at least one wire")
    if n is None:
        n = max(d.wires)
    circ = Circuit(n)
    if d.is_trivial():
        circ.global_phase = float(np.angle(d.phases[0]))
        return circ
    muxes, phase = diagonal_cascade(d, order)
    for mx in muxes:
        circ.compose(expand_mux_rotation(mx, n=n).circuit)
    circ.global_phase = phase
    return circ
