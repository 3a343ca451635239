"""Closed-form gate counts, comparison formulas and nearest-neighbour estimates.

Everything is computed with :class:`fractions.Fraction` and converted to
``int`` only after checking integrality.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass
from fractions import Fraction as F

from .errors import RangeError, UnsupportedError
from .mux import ruler

TABLE_MIN_N, TABLE_MAX_N = 4, 12
TABLE_MIN_L = 3
CSV_HEADER = ("n", "l", "cnot", "one_qubit", "total")


class CostMethod(str, enum.Enum):
    BQD = "bqd"
    CSD_IMPROVED = "csd-improved"
    CSD_ORIGINAL = "csd-original"
    QSD_CITED = "qsd-cited"
    QSD_CONSTRUCTED = "qsd-constructed"
    LOWER_BOUND = "lower-bound"


# Methods that only have asymptotic bounds; asking for a number is an error.
ASYMPTOTIC_ONLY = {
    "barenco": "O(n^3 4^n)",
    "knill": "O(n 4^n)",
    "qr": "O(4^n)",
}


@dataclass(frozen=True)
class CostQuery:
    n: int
    method: CostMethod
    l: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "method", CostMethod(self.method))
        if self.n < 2:
            raise RangeError(f"n must be >= 2, got {self.n}")
        if (self.l is not None) != (self.method is CostMethod.BQD):
            raise RangeError("a level is required for BQD and only for BQD")


def _as_int(x: F) -> int:
    if x.denominator != 1:
        raise ArithmeticError(f"expected an integer count, got {x}")
    return int(x)


def _check_level(n: int, l: int) -> None:
    if n < 2 or not 2 <= l <= n:
        raise RangeError(f"need 2 <= l <= n, got n={n}, l={l}")


def cnot_count_bqd(n: int, l: int) -> int:
    _check_level(n, l)
    x = F(4) ** n * (F(2, 3 * 4**l) + F(1, 2)) - 3 * F(2) ** (n - 1) + 2**l - F(8, 3)
    return _as_int(x)


def onequbit_count_bqd(n: int, l: int) -> int:
    _check_level(n, l)
    x = F(4) ** n * (F(-2, 3 * 4**l) + F(1, 2**l) + F(1, 2)) - 3 * F(2) ** (n - 1) + 2**l - l - F(1, 3)
    return _as_int(x)


def basic_block_counts(l: int) -> tuple[int, int]:
    """CNOT and one-qubit counts of ``Q(2^l)``: ``2^l - 1`` multiplexors on ``l`` wires."""
    return (2**l - 1) * (2 ** (l - 1) - 1), (2**l - 1) * 2 ** (l - 1)


def recursive_counts_bqd(n: int, l: int) -> tuple[int, int]:
    """Unroll the level recursion and add the terminal diagonal with its savings."""
    _check_level(n, l)
    c, o = basic_block_counts(l)
    for i in range(l + 1, n + 1):
        c = 4 * c + 3 * 2 ** (i - 1) - 1
        o = 4 * o + 3 * 2 ** (i - 1) - 2
    c += (2**l - 2) - 1
    o += (2**l - 1) - l
    return c, o


def closed_form_counts(n: int) -> tuple[int, int]:
    """BQD counts at ``l = ceil(2n/3)`` from the level-free closed forms."""
    if n < 2:
        raise RangeError(f"n must be >= 2, got {n}")
    k = -(-2 * n // 3)
    c = F(1, 2) * 4**n - F(3, 2) * 2**n + F(2, 3) * F(4) ** (n - k) + 2**k - F(8, 3)
    o = F(1, 2) * 4**n + F(2) ** (2 * n - k) - F(3, 2) * 2**n - F(2, 3) * F(4) ** (n - k) + 2**k - k - F(1, 3)
    return _as_int(c), _as_int(o)


def _qsd_constructed(n: int) -> tuple[int, int]:
    c, o = 3, 7
    for i in range(3, n + 1):
        c = 4 * c + 3 * 2 ** (i - 1) - 1
        o = 4 * o + 3 * 2 ** (i - 1) - 2
    return c, o


def comparison_counts(q: CostQuery) -> int:
    """CNOT count of a comparison method."""
    n = q.n
    if q.method is CostMethod.BQD:
        return cnot_count_bqd(n, q.l)
    if q.method is CostMethod.CSD_ORIGINAL:
        return 4**n - 2 ** (n + 1)
    if q.method is CostMethod.CSD_IMPROVED:
        return _as_int(F(4**n, 2) - F(2**n, 2) - 2)
    if q.method is CostMethod.QSD_CITED:
        return _as_int(F(23, 48) * 4**n - F(3, 2) * 2**n + F(4, 3))
    if q.method is CostMethod.QSD_CONSTRUCTED:
        return _qsd_constructed(n)[0]
    if q.method is CostMethod.LOWER_BOUND:
        return math.ceil(F(4**n - 3 * n - 1, 4))
    raise UnsupportedError(str(q.method))


def comparison_onequbit_counts(q: CostQuery) -> int:
    n = q.n
    if q.method is CostMethod.BQD:
        return onequbit_count_bqd(n, q.l)
    if q.method is CostMethod.CSD_IMPROVED:
        return _as_int(F(4**n, 2) + F(2**n, 2) - n - 1)
    if q.method is CostMethod.QSD_CITED:
        return _as_int(F(17, 24) * 4**n - F(3, 2) * 2**n - F(1, 3))
    if q.method is CostMethod.QSD_CONSTRUCTED:
        return _qsd_constructed(n)[1]
    raise UnsupportedError(f"no one-qubit count is defined for {q.method.value}")


def asymptotic_only(name: str) -> str:
    """Raise for methods that only come with a big-O bound."""
    bound = ASYMPTOTIC_ONLY.get(name)
    if bound is None:
        raise KeyError(name)
    raise UnsupportedError(f"{name} has only an asymptotic CNOT bound {bound}")


# -- nearest neighbour -----------------------------------------------------------


def lnn_block_cost(l: int, s: int) -> F:
    """Adjacent-CNOT cost of a multiplexor with ``l - 1`` controls, target at depth ``s``."""
    if l < 2:
        raise RangeError(f"l must be >= 2, got {l}")
    if not 1 <= s <= -(-l // 2):
        raise RangeError(f"s must be in [1, {-(-l // 2)}], got {s}")
    return F(5, 6) * 2**l + 2 * l - 6 * s - (F(1, 3) if l % 2 == 0 else F(5, 3))


def lnn_mux_costs(n: int) -> tuple[F, F]:
    """Adjacent-CNOT costs of top-target generic and ``Rz`` multiplexors on ``n`` wires."""
    if n < 2:
        raise RangeError(f"n must be >= 2, got {n}")
    even = n % 2 == 0
    c_b = F(5, 6) * 2**n + 2 * n - (F(19, 3) if even else F(23, 3))
    c_r = F(5, 6) * 2**n + 3 * n - (F(22, 3) if even else F(23, 3))
    return c_b, c_r


def lnn_diagonal_cost(l: int) -> F:
    """Adjacent-CNOT cost of a diagonal on ``l`` wires; the branch follows the parity of ``l``."""
    if l < 2:
        raise RangeError(f"l must be >= 2, got {l}")
    base = F(5, 3) * 2**l + F(3, 2) * l * l
    if l % 2 == 0:
        return base - (F(35, 6) * l - F(41, 3))
    return base - (F(37, 6) * l - F(42, 3))


def target_depth(t: int, l: int) -> int:
    """Distance class ``s`` of wire ``t`` from the nearer end of an ``l``-wire line."""
    return min(t, l + 1 - t)


@dataclass(frozen=True)
class LnnReport:
    n: int
    l: int
    lnn_cnots: F
    cnots: int

    @property
    def ratio(self) -> F:
        return self.lnn_cnots / self.cnots

    @property
    def within_bound(self) -> bool:
        return self.ratio <= F(5, 3)


def lnn_inflation_report(n: int, l: int) -> LnnReport:
    """Estimate adjacent-only CNOTs of a BQD circuit by summing per-component costs.

    Each basic block contributes its ``2^l - 1`` multiplexors with the target
    depth of each, each Shannon level ``i`` two ``Rz`` multiplexors and one
    ``Ry`` multiplexor, and the terminal diagonal its own cost.  This is a
    count estimate, not a routed circuit.
    """
    _check_level(n, l)
    # The formula dips below the unconstrained count for tiny l (l=3, s=2 gives -1).
    floor = 2 ** (l - 1) - 1
    block = sum(max(lnn_block_cost(l, target_depth(l - ruler(i), l)), F(floor)) for i in range(1, 2**l))
    total = F(4) ** (n - l) * block
    for i in range(l + 1, n + 1):
        c_b, c_r = lnn_mux_costs(i)
        total += F(4) ** (n - i) * (2 * c_r + c_b)
    total += lnn_diagonal_cost(l)
    return LnnReport(n, l, total, cnot_count_bqd(n, l))


# -- tables -----------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    n: int
    l: int | str
    cnot: int
    one_qubit: int

    @property
    def total(self) -> int:
        return self.cnot + self.one_qubit


def bqd_rows(max_n: int = TABLE_MAX_N) -> list[TableRow]:
    return [
        TableRow(n, l, cnot_count_bqd(n, l), onequbit_count_bqd(n, l))
        for n in range(TABLE_MIN_N, max_n + 1)
        for l in range(TABLE_MIN_L, n + 1)
    ]


def qsd_rows(max_n: int = TABLE_MAX_N) -> list[TableRow]:
    out = []
    for n in range(TABLE_MIN_N, max_n + 1):
        c = comparison_counts(CostQuery(n, CostMethod.QSD_CITED))
        o = comparison_onequbit_counts(CostQuery(n, CostMethod.QSD_CITED))
        out.append(TableRow(n, "qsd", c, o))
    return out


def best_level(n: int) -> int:
    """Level with the fewest CNOTs, ties broken by fewer one-qubit gates."""
    levels = range(TABLE_MIN_L, n + 1)
    return min(levels, key=lambda l: (cnot_count_bqd(n, l), onequbit_count_bqd(n, l)))


def improvement_percentages(
    min_n: int = TABLE_MIN_N, max_n: int = TABLE_MAX_N, pooled: bool = True
) -> dict[str, float]:
    """Relative saving of BQD (at the best level) over the cited QSD counts.

    Positive means BQD uses fewer gates.  ``pooled`` compares the gate totals
    summed over ``n``; otherwise the per-``n`` percentages are averaged, which
    weights the small, atypical sizes as heavily as the large ones.
    """
    acc = {"cnot": [], "one_qubit": [], "total": []}
    for n in range(min_n, max_n + 1):
        l = best_level(n)
        b = TableRow(n, l, cnot_count_bqd(n, l), onequbit_count_bqd(n, l))
        q = qsd_rows(n)[-1]
        acc["cnot"].append((b.cnot, q.cnot))
        acc["one_qubit"].append((b.one_qubit, q.one_qubit))
        acc["total"].append((b.total, q.total))
    out = {}
    for k, pairs in acc.items():
        if pooled:
            bs, qs = sum(p[0] for p in pairs), sum(p[1] for p in pairs)
            out[k] = float(100 * F(qs - bs, qs))
        else:
            out[k] = float(100 * sum(F(q - b, q) for b, q in pairs) / len(pairs))
    return out


def generate_tables(max_n: int = TABLE_MAX_N) -> dict[int, str]:
    """CSV text for the CNOT (1), one-qubit (2) and total (3) tables.

    The three share the same columns; rows are the BQD levels followed by
    the cited QSD row for each ``n``.  :func:`best_level` gives the
    highlighted entry.
    """
    rows = bqd_rows(max_n) + qsd_rows(max_n)
    rows.sort(key=lambda r: (r.n, 1 if r.l == "qsd" else 0, 0 if r.l == "qsd" else r.l))
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow((r.n, r.l, r.cnot, r.one_qubit, r.total))
    text = buf.getvalue()
    return {1: text, 2: text, 3: text}


def _fmt_rational(x: F) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def lnn_table(max_n: int = TABLE_MAX_N) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("component", "size", "cnot"))
    for l in range(TABLE_MIN_N, max_n + 1):
        for s in range(1, -(-l // 2) + 1):
            w.writerow(("block", f"l={l};s={s}", _fmt_rational(lnn_block_cost(l, s))))
    for n in range(2, max_n + 1):
        c_b, c_r = lnn_mux_costs(n)
        w.writerow(("mux_u2", f"n={n}", _fmt_rational(c_b)))
        w.writerow(("mux_rz", f"n={n}", _fmt_rational(c_r)))
    for l in range(2, max_n + 1):
        w.writerow(("delta", f"l={l}", _fmt_rational(lnn_diagonal_cost(l))))
    for n in range(TABLE_MIN_N, max_n + 1):
        for l in range(TABLE_MIN_L, n + 1):
            rep = lnn_inflation_report(n, l)
            w.writerow(("ratio", f"n={n};l={l}", f"{float(rep.ratio):.6f}"))
    return buf.getvalue()
