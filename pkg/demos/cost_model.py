"""Gate counts without building circuits, up to twelve qubits."""

from bqdsynth import cost

print("n  best-l      cnot   one-qubit   qsd-cnot   qsd-1q")
for n in range(4, 13):
    l = cost.best_level(n)
    qc = cost.comparison_counts(cost.CostQuery(n, cost.CostMethod.QSD_CITED))
    qo = cost.comparison_onequbit_counts(cost.CostQuery(n, cost.CostMethod.QSD_CITED))
    print(f"{n:<3}{l:>4}{cost.cnot_count_bqd(n, l):>12}{cost.onequbit_count_bqd(n, l):>12}{qc:>11}{qo:>9}")

for pooled in (True, False):
    p = cost.improvement_percentages(pooled=pooled)
    label = "pooled over n" if pooled else "mean of per-n"
    print(f"\nsaving vs QSD, {label}: " + ", ".join(f"{k} {v:+.2f}%" for k, v in p.items()))

# Trading CNOTs for one-qubit gates at n = 8
print("\nn=8 by level:")
for l in range(2, 9):
    print(f"  l={l}: cnot={cost.cnot_count_bqd(8, l)}, one_qubit={cost.onequbit_count_bqd(8, l)}")

print("\nnearest-neighbour estimate (adjacent CNOTs / unconstrained CNOTs):")
for n in (6, 9, 12):
    l = cost.best_level(n)
    r = cost.lnn_inflation_report(n, l)
    print(f"  n={n}, l={l}: {float(r.lnn_cnots):.0f} / {r.cnots} = {float(r.ratio):.3f}")
