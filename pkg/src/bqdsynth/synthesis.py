"""Synthesis backends: improved CSD, QSD and block-based (BQD) decomposition.

All three share one skeleton.  A unitary on wires ``w..n`` is split by a
cosine-sine decomposition into ``(L1 + L2) CS (R1 + R2)``.

* The basic block recursion keeps splitting the block-diagonal factors,
  ending in ``2^l - 1`` generic multiplexors on ``l`` wires.  Each is
  expanded up to a diagonal, and the diagonal is pushed into the next one.
  That leaves ``U = Delta_l Q``.
* The Shannon recursion instead demultiplexes each block-diagonal factor
  into two half-size unitaries around a multiplexed ``Rz``.  It recurses
  down to a leaf size: 2 qubits for QSD, ``l`` qubits for BQD.

BQD runs the Shannon recursion down to ``l`` qubits and replaces every
leaf by a basic block.  The diagonal of each leaf commutes past the
multiplexors that separate it from the next leaf, because their targets
lie above the leaf, and is multiplied into that leaf's matrix.  Only the
last diagonal is synthesized, using the cheaper tail described in
:func:`_emit_final_diagonal`.
"""

from __future__ import annotations

import enum
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import lamat
from .circuit import Circuit, Gate, GateCounts, GateKind, circuit_matrix, count_gates
from .errors import DecompositionError, RangeError, ValidationError
from .mux import (
    Axis,
    DiagonalSpec,
    MuxGate,
    diagonal_cascade,
    expand_mux_rotation,
    expand_mux_u2,
)
from .twoqubit import two_qubit_optimal

_X = np.array([[0, 1], [1, 0]], dtype=complex)


class MethodKind(str, enum.Enum):
    CSD_IMPROVED = "csd"
    QSD = "qsd"
    BQD = "bqd"


@dataclass(frozen=True)
class SynthMethod:
    kind: MethodKind = MethodKind.BQD
    level: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", MethodKind(self.kind))
        if self.level is not None and self.kind is not MethodKind.BQD:
            raise RangeError("a level only applies to BQD")

    def resolved_level(self, n: int) -> int | None:
        if self.kind is not MethodKind.BQD:
            return None
        level = choose_level(n) if self.level is None else self.level
        if not 2 <= level <= n:
            raise RangeError(f"level must be in [2, {n}], got {level}")
        return level


def choose_level(n: int) -> int:
    """``ceil(2n/3)`` clamped to ``[2, n]``."""
    if n < 2:
        raise RangeError(f"need at least 2 qubits, got {n}")
    return min(n, max(2, -(-2 * n // 3)))


@dataclass
class BasicBlockResult:
    """``matrix(delta) @ matrix(q_circuit)`` equals the input block."""

    q_circuit: Circuit
    delta: DiagonalSpec


# -- basic block -----------------------------------------------------------


def _csd_sequence(blocks: np.ndarray, w: int, l: int, out: list) -> None:
    """Flatten the CSD recursion into multiplexors listed in circuit order.

    ``blocks[p]`` is the operator on wires ``w..l`` selected by the pattern
    ``p`` of wires ``1..w-1``.  Every multiplexor produced is controlled by
    all other wires in ascending order.
    """
    dim = blocks.shape[1]
    if dim == 2:
        out.append(MuxGate(Axis.GENERIC, l, tuple(range(1, l)), blocks))
        return
    half = dim // 2
    count = blocks.shape[0]
    ls = np.empty((count, 2, half, half), dtype=complex)
    rs = np.empty_like(ls)
    angles = np.empty((count, half))
    for p in range(count):
        csd = lamat.cosine_sine_decompose(blocks[p])
        ls[p, 0], ls[p, 1], rs[p, 0], rs[p, 1] = csd.l1, csd.l2, csd.r1, csd.r2
        angles[p] = csd.angles
    controls = tuple(x for x in range(1, l + 1) if x != w)
    _csd_sequence(rs.reshape(2 * count, half, half), w + 1, l, out)
    out.append(MuxGate(Axis.Y, w, controls, 2 * angles.reshape(-1)))
    _csd_sequence(ls.reshape(2 * count, half, half), w + 1, l, out)


def _absorb(m: MuxGate, d: DiagonalSpec) -> MuxGate:
    """Generic multiplexor equal to ``m`` followed (in matrix order, preceded) by ``d``."""
    d = d.reordered(m.controls + (m.target,))
    pairs = d.phases.reshape(-1, 2)
    return MuxGate(Axis.GENERIC, m.target, m.controls, m.blocks() * pairs[:, None, :])


def basic_block_q(u: np.ndarray) -> BasicBlockResult:
    """Factor ``U(2^l) = Delta_l Q`` with ``Q`` built from ``2^l - 1`` multiplexors.

    Each multiplexor costs ``2^(l-1) - 1`` CNOTs and ``2^(l-1)`` one-qubit
    gates after the residual of its predecessor has been folded in.
    """
    u = lamat.require_unitary(u)
    l = lamat.num_qubits(u)
    if l < 2:
        raise RangeError("the basic block needs at least 2 qubits")
    muxes: list[MuxGate] = []
    _csd_sequence(u[None], 1, l, muxes)
    circ = Circuit(l)
    residual = DiagonalSpec.trivial(tuple(range(1, l + 1)))
    for m in muxes:
        exp = expand_mux_u2(_absorb(m, residual), n=l)
        circ.compose(exp.circuit)
        residual = exp.residual
    return BasicBlockResult(circ, residual.reordered(tuple(range(1, l + 1))))


# -- merging helpers ---------------------------------------------------------


def _fold_after(gates: list[Gate], wire: int, m: np.ndarray) -> None:
    """Left-multiply the last one-qubit gate on ``wire`` by diagonal ``m``.

    Everything after that gate may touch ``wire`` only as a CNOT control,
    which commutes with a diagonal.
    """
    for i in range(len(gates) - 1, -1, -1):
        g = gates[i]
        if g.kind is GateKind.CNOT:
            if g.target == wire:
                break
            continue
        if g.target == wire:
            gates[i] = Gate.u2(wire, m @ g.local_matrix())
            return
    raise DecompositionError(f"no one-qubit gate on wire {wire} to absorb a diagonal into")


def _emit_final_diagonal(gates: list[Gate], delta: DiagonalSpec, c: int, t: int) -> float:
    """Append a diagonal after a basic block whose last gates are ``u0, CNOT(c, t), u1`` on ``t``.

    The diagonal is cascaded with ``c`` first and ``t`` second.  The lone
    ``Rz`` on ``c`` and the first rotation of every later multiplexor fold
    into earlier one-qubit gates.  The ``t`` multiplexor joins ``u0, CNOT,
    u1`` to form a ``c``-controlled generic gate, which is demultiplexed
    again with two CNOTs.  Returns the global phase left over.
    """
    rest = tuple(w for w in sorted(delta.wires) if w not in (c, t))
    muxes, phase = diagonal_cascade(delta, (c, t) + rest)
    u1, cx, u0 = gates[-1], gates[-2], gates[-3]
    if not (
        cx.kind is GateKind.CNOT and cx.control == c and cx.target == t
        and u0.is_one_qubit and u0.target == t and u1.is_one_qubit and u1.target == t
    ):
        raise DecompositionError("basic block does not end in the expected pattern")
    del gates[-3:]
    th0, th1 = muxes[1].payload
    m0, m1 = u0.local_matrix(), u1.local_matrix()
    a0 = lamat.rz(th0) @ m1 @ m0
    a1 = lamat.rz(th1) @ m1 @ _X @ m0
    dm = lamat.demux_block_diagonal(a0, a1)
    arg = np.angle(dm.d_phases)
    psi = (arg[0] + arg[1]) / 2
    theta = arg[1] - arg[0]
    on_c = np.diag([np.exp(1j * psi), np.exp(-1j * psi)]) @ lamat.rz(muxes[0].payload[0])
    _fold_after(gates, c, on_c)
    gates.append(Gate.u2(t, dm.w))
    gates.append(Gate.cnot(c, t))
    gates.append(Gate.rz(t, theta))
    gates.append(Gate.cnot(c, t))
    gates.append(Gate.u2(t, dm.v))
    for m in muxes[2:]:
        exp = expand_mux_rotation(m, n=max(delta.wires)).circuit.gates
        _fold_after(gates, m.target, exp[0].local_matrix())
        gates.extend(exp[1:])
    return phase


# -- Shannon recursion ---------------------------------------------------------


@dataclass
class _Leaf:
    matrix: np.ndarray
    wires: tuple[int, ...]


def _shannon_items(u: np.ndarray, w: int, n: int, leaf: int, items: list) -> None:
    """Append circuit-ordered items (gate lists and leaves) for ``u`` on wires ``w..n``."""
    size = n - w + 1
    if size == leaf:
        items.append(_Leaf(u, tuple(range(w, n + 1))))
        return
    csd = lamat.cosine_sine_decompose(u)
    lower = tuple(range(w + 1, n + 1))
    dm_r = lamat.demux_block_diagonal(csd.r1, csd.r2)
    ry = expand_mux_rotation(MuxGate(Axis.Y, w, lower, 2 * csd.angles), up_to_diagonal=True, n=n)
    res = ry.residual.reordered((w,) + lower).phases.reshape(2, -1)
    dm_l = lamat.demux_block_diagonal(csd.l1 * res[0][None, :], csd.l2 * res[1][None, :])
    rz_r = expand_mux_rotation(
        MuxGate(Axis.Z, w, lower, -2 * np.angle(dm_r.d_phases)), n=n, cnot_first=True
    ).circuit.gates
    rz_l = expand_mux_rotation(MuxGate(Axis.Z, w, lower, -2 * np.angle(dm_l.d_phases)), n=n).circuit.gates
    mid = list(ry.circuit.gates)
    # The outer rotations of the two Rz cascades sit next to the Ry cascade
    # on wire w (only lower-wire unitaries lie in between).
    mid[0] = Gate.u2(w, mid[0].local_matrix() @ rz_r.pop().local_matrix())
    mid[-1] = Gate.u2(w, rz_l.pop(0).local_matrix() @ mid[-1].local_matrix())
    _shannon_items(dm_r.w, w + 1, n, leaf, items)
    items.append(rz_r)
    _shannon_items(dm_r.v, w + 1, n, leaf, items)
    items.append(mid)
    _shannon_items(dm_l.w, w + 1, n, leaf, items)
    items.append(rz_l)
    _shannon_items(dm_l.v, w + 1, n, leaf, items)


def _check_input(u: np.ndarray, min_qubits: int = 1) -> int:
    u = lamat.require_unitary(u)
    n = lamat.num_qubits(u)
    if n < min_qubits:
        raise RangeError(f"need at least {min_qubits} qubits, got {n}")
    return n


def _single_qubit(u: np.ndarray) -> Circuit:
    return Circuit(1, [Gate.u2(1, u)])


def synth_qsd(u: np.ndarray) -> Circuit:
    """Shannon recursion with optimal two-qubit leaves."""
    n = _check_input(u)
    if n == 1:
        return _single_qubit(u)
    items: list = []
    _shannon_items(np.asarray(u, dtype=complex), 1, n, 2, items)
    circ = Circuit(n)
    for it in items:
        if isinstance(it, _Leaf):
            sub = two_qubit_optimal(it.matrix)
            circ.compose(sub, {1: it.wires[0], 2: it.wires[1]})
        else:
            circ.extend(it)
    return circ


def synth_bqd(u: np.ndarray, l: int | None = None) -> Circuit:
    """Block-based decomposition with basic blocks on ``l`` qubits."""
    n = _check_input(u)
    if n == 1:
        return _single_qubit(u)
    if l is None:
        l = choose_level(n)
    if not 2 <= l <= n:
        raise RangeError(f"level must be in [2, {n}], got {l}")
    items: list = []
    _shannon_items(np.asarray(u, dtype=complex), 1, n, l, items)
    gates: list[Gate] = []
    offset = n - l
    mapping = {i: i + offset for i in range(1, l + 1)}
    carry: np.ndarray | None = None
    delta = None
    for it in items:
        if isinstance(it, _Leaf):
            m = it.matrix if carry is None else it.matrix * carry[None, :]
            block = basic_block_q(m)
            gates.extend(g.remap(mapping) for g in block.q_circuit.gates)
            delta = block.delta
            carry = delta.phases
        else:
            gates.extend(it)
    glob = DiagonalSpec(tuple(mapping[w] for w in delta.wires), delta.phases)
    phase = _emit_final_diagonal(gates, glob, n - 1, n)
    return Circuit(n, gates, phase)


def synth_csd_improved(u: np.ndarray) -> Circuit:
    """Improved CSD: a single basic block on all ``n`` wires plus its diagonal."""
    n = _check_input(u)
    if n == 1:
        return _single_qubit(u)
    return synth_bqd(u, n)


def push_diagonal(d: DiagonalSpec, m: MuxGate) -> tuple[MuxGate, DiagonalSpec]:
    """Move a diagonal past a multiplexor whose target it does not touch.

    Both operators are block diagonal with respect to the target, and on
    every block the diagonal acts as a scalar, so the two commute.
    """
    if m.target in d.wires:
        raise ValidationError(f"diagonal acts on the multiplexor target {m.target}")
    return m, d


# -- driver -----------------------------------------------------------------


@dataclass
class SynthReport:
    method: str
    n: int
    level: int | None
    counts: GateCounts
    error: float | None
    seconds: float
    lnn_estimate: float | None = None
    extra: dict = field(default_factory=dict)

    def lines(self) -> list[str]:
        out = [
            f"method={self.method}",
            f"n={self.n}",
            f"level={self.level if self.level is not None else '-'}",
            f"cnot={self.counts.cnot}",
            f"one_qubit={self.counts.one_qubit}",
            f"total={self.counts.total}",
        ]
        if self.error is not None:
            out.append(f"error={self.error:.3e}")
        if self.lnn_estimate is not None:
            out.append(f"lnn_cnot_estimate={self.lnn_estimate:.4f}")
        return out


def nearest_unitary(m: np.ndarray) -> np.ndarray:
    """Polar factor of ``m``: the closest unitary in Frobenius norm."""
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def synthesize(
    u: np.ndarray, method: SynthMethod = SynthMethod(), verify: bool = True, tol: float | None = None
) -> tuple[Circuit, SynthReport]:
    """Run one backend and measure the result.

    ``tol`` loosens the unitarity check on the input; an input accepted only
    under the looser bound is replaced by its polar factor before synthesis,
    and the reported error is still measured against ``u`` itself.
    """
    u = lamat.require_unitary(u, tol)
    target = u if lamat.is_unitary(u, lamat.boundary_tolerance(u.shape[0])) else nearest_unitary(u)
    n = _check_input(target)
    level = method.resolved_level(n) if n >= 2 else None
    start = time.perf_counter()
    if method.kind is MethodKind.QSD:
        circ = synth_qsd(target)
    elif method.kind is MethodKind.CSD_IMPROVED:
        circ = synth_csd_improved(target)
        level = n if n >= 2 else None
    else:
        circ = synth_bqd(target, level)
    elapsed = time.perf_counter() - start
    err = lamat.phase_invariant_distance(circuit_matrix(circ), u) if verify else None
    lnn = None
    if level is not None and n >= 4:
        from .cost import lnn_inflation_report

        lnn = float(lnn_inflation_report(n, level).lnn_cnots)
    report = SynthReport(method.kind.value, n, level, count_gates(circ), err, elapsed, lnn)
    return circ, report
