"""Unitary-to-circuit synthesis with CNOT and one-qubit gates.

Three backends are provided: improved CSD, QSD and the block-based
decomposition (BQD), together with exact gate-count formulas.
"""

from .circuit import Circuit, Gate, GateCounts, GateKind, circuit_matrix, count_gates, export_qasm, parse_qasm
from .errors import (
    DecompositionError,
    DimensionError,
    ParseError,
    RangeError,
    SynthesisError,
    UnsupportedError,
    ValidationError,
)
from .lamat import (
    cosine_sine_decompose,
    demux_block_diagonal,
    haar_random_unitary,
    is_unitary,
    phase_invariant_distance,
    zyz_decompose,
)
from .mux import DiagonalSpec, MuxExpansion, MuxGate, expand_mux_rotation, expand_mux_u2, ruler, synth_diagonal, walsh_angles
from .synthesis import (
    BasicBlockResult,
    MethodKind,
    SynthMethod,
    SynthReport,
    basic_block_q,
    choose_level,
    push_diagonal,
    synth_bqd,
    synth_csd_improved,
    synth_qsd,
    synthesize,
)
from .twoqubit import two_qubit_optimal

__version__ = "0.1.0"
