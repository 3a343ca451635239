"""Synthesize the same 5-qubit unitary with every backend and level."""

import time

from bqdsynth import lamat
from bqdsynth.circuit import export_qasm
from bqdsynth.synthesis import MethodKind, SynthMethod, synthesize

u = lamat.haar_random_unitary(5, seed=7)

print(f"{'method':<8}{'l':>3}{'cnot':>7}{'1q':>7}{'total':>7}{'error':>11}{'sec':>7}")
runs = [SynthMethod(MethodKind.QSD), SynthMethod(MethodKind.CSD_IMPROVED)]
runs += [SynthMethod(MethodKind.BQD, l) for l in range(2, 6)]
for m in runs:
    t0 = time.perf_counter()
    circ, rep = synthesize(u, m)
    c = rep.counts
    lvl = "-" if rep.level is None else rep.level
    print(f"{rep.method:<8}{lvl:>3}{c.cnot:>7}{c.one_qubit:>7}{c.total:>7}{rep.error:>11.2e}{time.perf_counter() - t0:>7.2f}")

# The default picks l = ceil(2n/3); here that is 4.
circ, rep = synthesize(u)
text = export_qasm(circ)
print()
print("\n".join(text.splitlines()[:14]))
print(f"... {len(text.splitlines())} lines of QASM")
