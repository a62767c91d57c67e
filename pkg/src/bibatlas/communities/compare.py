"""Partition alignment: NMI, ARI, and variation of information.

All three run off one pair-counting contingency table. Entropies and
mutual information use log base 2, so VI is in bits. Identical partitions
produce exactly (1, 1, 0): the NMI denominator reuses H when H(P) == H(Q)
and the information terms accumulate in the same order as the entropies.
"""

from __future__ import annotations

import math
from collections import Counter


def _check_same_nodes(p: dict[str, int], q: dict[str, int]) -> None:
    if set(p) != set(q):
        raise ValueError("partitions cover different node sets")
    if not p:
        raise ValueError("empty partitions")


def _contingency(p: dict[str, int], q: dict[str, int]):
    joint: Counter = Counter()
    rows: Counter = Counter()
    cols: Counter = Counter()
    for key, cp in p.items():
        cq = q[key]
        joint[(cp, cq)] += 1
        rows[cp] += 1
        cols[cq] += 1
    return joint, rows, cols, len(p)


def _entropy_bits(counts: Counter, n: int) -> float:
    h = 0.0
    for cid in sorted(counts):
        pr = counts[cid] / n
        h += -(pr * math.log2(pr))
    return h


def _same_partition(p: dict[str, int], q: dict[str, int]) -> bool:
    groups_p = {}
    groups_q = {}
    for key in p:
        groups_p.setdefault(p[key], set()).add(key)
        groups_q.setdefault(q[key], set()).add(key)
    return set(map(frozenset, groups_p.values())) == set(map(frozenset, groups_q.values()))


def nmi(p: dict[str, int], q: dict[str, int]) -> float:
    _check_same_nodes(p, q)
    joint, rows, cols, n = _contingency(p, q)
    hp = _entropy_bits(rows, n)
    hq = _entropy_bits(cols, n)
    if hp == 0.0 or hq == 0.0:
        # Single-community degenerate case: defined 1 when both partitions
        # are the single community over the same set, else 0.
        return 1.0 if (len(rows) == 1 and len(cols) == 1) else 0.0
    info = 0.0
    for cp, cq in sorted(joint):
        pr = joint[(cp, cq)] / n
        info += pr * (math.log2(pr) - math.log2(rows[cp] / n) - math.log2(cols[cq] / n))
    denom = hp if hp == hq else math.sqrt(hp * hq)
    return info / denom


def ari(p: dict[str, int], q: dict[str, int]) -> float:
    _check_same_nodes(p, q)
    joint, rows, cols, n = _contingency(p, q)
    sum_joint = sum(c * (c - 1) // 2 for c in joint.values())
    sum_rows = sum(c * (c - 1) // 2 for c in rows.values())
    sum_cols = sum(c * (c - 1) // 2 for c in cols.values())
    total_pairs = n * (n - 1) // 2
    if total_pairs == 0:
        return 1.0 if _same_partition(p, q) else 0.0
    expected = sum_rows * sum_cols / total_pairs
    maximum = 0.5 * (sum_rows + sum_cols)
    if maximum == expected:
        return 1.0 if _same_partition(p, q) else 0.0
    return (sum_joint - expected) / (maximum - expected)


def vi(p: dict[str, int], q: dict[str, int]) -> float:
    """H(P|Q) + H(Q|P) in bits, via 2 H(P,Q) - H(P) - H(Q)."""
    _check_same_nodes(p, q)
    joint, rows, cols, n = _contingency(p, q)
    h_joint = 0.0
    for cp, cq in sorted(joint):
        pr = joint[(cp, cq)] / n
        h_joint += -(pr * math.log2(pr))
    hp = _entropy_bits(rows, n)
    hq = _entropy_bits(cols, n)
    return 2.0 * h_joint - hp - hq
