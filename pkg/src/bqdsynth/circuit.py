"""Gate-level circuit representation, matrix reconstruction and QASM I/O.

Wires are numbered ``1..n`` from the top.  Wire 1 is the most significant
bit of a matrix index, so a one-qubit gate ``U`` on wire ``q`` acts as
``I_{2^(q-1)} (x) U (x) I_{2^(n-q)}``.  For gates ``g1, ..., gk`` listed in
circuit order the circuit matrix is ``M_k ... M_1`` times the global phase.
"""

from __future__ import annotations

import ast
import enum
import math
import operator
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import lamat
from .errors import ParseError, RangeError


class GateKind(str, enum.Enum):
    RX = "RX"
    RY = "RY"
    RZ = "RZ"
    U2 = "U2"
    CNOT = "CNOT"


ROTATIONS = (GateKind.RX, GateKind.RY, GateKind.RZ)


@dataclass(frozen=True)
class Gate:
    """A primitive gate.

    ``angle`` is used by the rotation kinds, ``params = (delta, alpha, beta,
    lam)`` by ``U2`` (matrix ``e^{i delta} Rz(alpha) Ry(beta) Rz(lam)``), and
    ``control`` only by ``CNOT``.
    """

    kind: GateKind
    target: int
    control: int | None = None
    angle: float = 0.0
    params: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if self.kind is GateKind.CNOT:
            if self.control is None or self.control == self.target:
                raise RangeError(f"CNOT needs a control distinct from target {self.target}")
        elif self.control is not None:
            raise RangeError(f"{self.kind.value} takes no control wire")
        if self.kind is GateKind.U2 and (self.params is None or len(self.params) != 4):
            raise RangeError("U2 needs four ZYZ parameters")

    @staticmethod
    def rx(target: int, angle: float) -> "Gate":
        return Gate(GateKind.RX, target, angle=float(angle))

    @staticmethod
    def ry(target: int, angle: float) -> "Gate":
        return Gate(GateKind.RY, target, angle=float(angle))

    @staticmethod
    def rz(target: int, angle: float) -> "Gate":
        return Gate(GateKind.RZ, target, angle=float(angle))

    @staticmethod
    def cnot(control: int, target: int) -> "Gate":
        return Gate(GateKind.CNOT, target, control=control)

    @staticmethod
    def u2(target: int, matrix) -> "Gate":
        """Generic one-qubit gate from a raw 2x2 unitary (normalized via ZYZ)."""
        z = lamat.zyz_decompose(matrix)
        return Gate(GateKind.U2, target, params=(z.delta, z.alpha, z.beta, z.gamma_angle))

    @property
    def is_one_qubit(self) -> bool:
        return self.kind is not GateKind.CNOT

    @property
    def wires(self) -> tuple[int, ...]:
        return (self.control, self.target) if self.kind is GateKind.CNOT else (self.target,)

    def local_matrix(self) -> np.ndarray:
        """The 2x2 matrix of a one-qubit gate."""
        if self.kind is GateKind.RX:
            return lamat.rx(self.angle)
        if self.kind is GateKind.RY:
            return lamat.ry(self.angle)
        if self.kind is GateKind.RZ:
            return lamat.rz(self.angle)
        if self.kind is GateKind.U2:
            return lamat.zyz_matrix(*self.params)
        raise TypeError("CNOT has no 2x2 matrix")

    def remap(self, mapping: Mapping[int, int] | Sequence[int]) -> "Gate":
        def m(w):
            return None if w is None else mapping[w]

        return Gate(self.kind, m(self.target), m(self.control), self.angle, self.params)


@dataclass(frozen=True)
class GateCounts:
    cnot: int
    one_qubit: int

    @property
    def total(self) -> int:
        return self.cnot + self.one_qubit

    def __add__(self, other: "GateCounts") -> "GateCounts":
        return GateCounts(self.cnot + other.cnot, self.one_qubit + other.one_qubit)


@dataclass
class Circuit:
    """Ordered gate list over ``n`` wires plus a global phase in radians."""

    n: int
    gates: list[Gate] = field(default_factory=list)
    global_phase: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise RangeError(f"wire count must be positive, got {self.n}")
        self.gates = list(self.gates)
        for g in self.gates:
            _check_wires(g, self.n)

    def append(self, gate: Gate) -> None:
        _check_wires(gate, self.n)
        self.gates.append(gate)

    def extend(self, gates: Iterable[Gate]) -> None:
        for g in gates:
            self.append(g)

    def compose(self, other: "Circuit", mapping: Mapping[int, int] | Sequence[int] | None = None) -> None:
        """Append ``other`` (after this circuit), optionally relabelling its wires."""
        for g in other.gates:
            self.append(g if mapping is None else g.remap(mapping))
        self.global_phase += other.global_phase

    def __len__(self) -> int:
        return len(self.gates)


def _check_wires(g: Gate, n: int) -> None:
    for w in g.wires:
        if not 1 <= w <= n:
            raise RangeError(f"wire {w} outside 1..{n}")


def gate_matrix(g: Gate, n: int) -> np.ndarray:
    """Full ``2^n x 2^n`` embedding of a single gate."""
    _check_wires(g, n)
    c = Circuit(n, [g])
    return circuit_matrix(c)


def _apply(state: np.ndarray, g: Gate, n: int) -> None:
    """Left-multiply ``state`` (rows indexed by the wire basis) by gate ``g`` in place."""
    cols = state.shape[1]
    if g.kind is GateKind.CNOT:
        c, t = g.control, g.target
        view = state.reshape([2] * n + [cols])
        idx_a = [slice(None)] * (n + 1)
        idx_b = [slice(None)] * (n + 1)
        idx_a[c - 1] = idx_b[c - 1] = 1
        idx_a[t - 1], idx_b[t - 1] = 0, 1
        a, b = tuple(idx_a), tuple(idx_b)
        tmp = view[a].copy()
        view[a] = view[b]
        view[b] = tmp
        return
    u = g.local_matrix()
    q = g.target
    view = state.reshape(1 << (q - 1), 2, (1 << (n - q)) * cols)
    top = view[:, 0, :].copy()
    bot = view[:, 1, :]
    view[:, 0, :] = u[0, 0] * top + u[0, 1] * bot
    view[:, 1, :] = u[1, 0] * top + u[1, 1] * bot


def apply_circuit(c: Circuit, state: np.ndarray) -> np.ndarray:
    """Return ``matrix(c) @ state`` without forming gate embeddings."""
    state = np.asarray(state)
    if state.shape[0] != 1 << c.n:
        raise RangeError(f"state has {state.shape[0]} rows, circuit needs {1 << c.n}")
    out = np.array(state.reshape(state.shape[0], -1), dtype=complex, copy=True, order="C")
    for g in c.gates:
        _apply(out, g, c.n)
    out *= np.exp(1j * c.global_phase)
    return out.reshape(np.shape(state))


def circuit_matrix(c: Circuit) -> np.ndarray:
    if c.n > lamat.MAX_QUBITS:
        raise RangeError(f"refusing to build a {c.n}-qubit matrix (limit {lamat.MAX_QUBITS})")
    return apply_circuit(c, np.eye(1 << c.n, dtype=complex))


def count_gates(c: Circuit) -> GateCounts:
    cnot = sum(1 for g in c.gates if g.kind is GateKind.CNOT)
    return GateCounts(cnot, len(c.gates) - cnot)


# -- QASM -----------------------------------------------------------------

_QASM_NOTE = """\
// Rotation conventions of the source circuit:
//   Rx(t) = [[cos t/2, i sin t/2], [i sin t/2, cos t/2]]  -> emitted as rx(-t)
//   Ry(t) = [[cos t/2, sin t/2], [-sin t/2, cos t/2]]     -> emitted as ry(-t)
//   Rz(t) = diag(e^{-it/2}, e^{it/2})                     -> emitted as rz(t)
// A generic gate e^{id} Rz(a) Ry(b) Rz(c) is emitted as u3(b, a+pi, c-pi);
// the scalar e^{i(d-(a+c)/2)} is folded into the global_phase line.
// Wire k of the circuit is q[k-1]."""


def _fmt(x: float) -> str:
    return repr(float(x))


def export_qasm(c: Circuit) -> str:
    lines = ["OPENQASM 2.0;", _QASM_NOTE, f"qreg q[{c.n}];"]
    phase = c.global_phase
    body = []
    for g in c.gates:
        q = g.target - 1
        if g.kind is GateKind.CNOT:
            body.append(f"cx q[{g.control - 1}],q[{q}];")
        elif g.kind is GateKind.RZ:
            body.append(f"rz({_fmt(g.angle)}) q[{q}];")
        elif g.kind is GateKind.RY:
            body.append(f"ry({_fmt(-g.angle)}) q[{q}];")
        elif g.kind is GateKind.RX:
            body.append(f"rx({_fmt(-g.angle)}) q[{q}];")
        else:
            d, a, b, lam = g.params
            phase += d - (a + lam) / 2
            body.append(f"u3({_fmt(b)},{_fmt(a + math.pi)},{_fmt(lam - math.pi)}) q[{q}];")
    lines.append(f"// global_phase {_fmt(math.remainder(phase, 2 * math.pi))}")
    lines.extend(body)
    return "\n".join(lines) + "\n"


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def _eval_angle(text: str) -> float:
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"bad angle expression {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ParseError(f"unsupported angle expression {text!r}")

    return ev(tree)


_GATE_RE = re.compile(r"^(\w+)\s*(?:\(([^)]*)\))?\s+(.+);$")
_QUBIT_RE = re.compile(r"^q\[(\d+)\]$")


def parse_qasm(text: str) -> Circuit:
    """Read back the subset written by :func:`export_qasm`."""
    n = None
    phase = 0.0
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line.startswith("// global_phase"):
            phase = float(line.split()[-1])
            continue
        line = line.split("//", 1)[0].strip()
        if not line or line.startswith("OPENQASM") or line.startswith("include"):
            continue
        m = re.match(r"^qreg\s+q\[(\d+)\];$", line)
        if m:
            n = int(m.group(1))
            continue
        m = _GATE_RE.match(line)
        if not m or n is None:
            raise ParseError(f"line {lineno}: cannot parse {raw!r}")
        name, args, operands = m.group(1), m.group(2), m.group(3)
        wires = []
        for op in operands.split(","):
            qm = _QUBIT_RE.match(op.strip())
            if not qm:
                raise ParseError(f"line {lineno}: bad operand {op!r}")
            wires.append(int(qm.group(1)) + 1)
        params = [_eval_angle(a) for a in args.split(",")] if args else []
        try:
            if name == "cx" and len(wires) == 2 and not params:
                gates.append(Gate.cnot(wires[0], wires[1]))
            elif name in ("rx", "ry", "rz") and len(wires) == 1 and len(params) == 1:
                t = params[0]
                if name == "rz":
                    gates.append(Gate.rz(wires[0], t))
                elif name == "ry":
                    gates.append(Gate.ry(wires[0], -t))
                else:
                    gates.append(Gate.rx(wires[0], -t))
            elif name == "u3" and len(wires) == 1 and len(params) == 3:
                b, phi, lam = params
                # u3(b, phi, lam) = e^{i(phi+lam)/2} Rz(phi) Ry_std(b) Rz(lam)
                #                 = e^{i(phi+lam)/2} Rz(phi-pi) Ry(b) Rz(lam+pi)
                gates.append(Gate(GateKind.U2, wires[0], params=((phi + lam) / 2, phi - math.pi, b, lam + math.pi)))
            else:
                raise ParseError(f"line {lineno}: unsupported gate {raw!r}")
        except RangeError as exc:
            raise ParseError(f"line {lineno}: {exc}") from exc
    if n is None:
        raise ParseError("missing qreg declaration")
    try:
        return Circuit(n, gates, phase)
    except RangeError as exc:
        raise ParseError(str(exc)) from exc
