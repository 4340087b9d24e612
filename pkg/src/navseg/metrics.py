"""Agreement metrics for partitions and per-hyperlink extraction scores.

Partition agreement uses the two chance-adjusted standards: the adjusted
Rand index, computed from contingency-table pair counts in exact integer
arithmetic (one final float division), and adjusted mutual information
under the hypergeometric permutation model with natural logarithms,
normalized by the arithmetic mean of the two entropies.  Identical
partitions score exactly 1 in both by convention, which also resolves
the degenerate 0/0 cases (e.g. single block vs. single block).

Extraction quality is precision/recall/F1 over individual hyperlinks
identified by DFS index, so repeated targets still count separately.
Empty predictions score vacuous precision 1; empty truth scores vacuous
recall 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, exp, lgamma, log

from .clustering import BlockPartition
from .errors import ContractViolation


@dataclass(frozen=True)
class PartitionScore:
    ari: float
    ami: float


@dataclass(frozen=True)
class ExtractionScore:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


def _contingency(a: BlockPartition, b: BlockPartition):
    elements = a.elements()
    if elements != b.elements():
        raise ContractViolation(
            "partitions cover different element sets: "
            f"{sorted(elements ^ b.elements())[:8]} ...")
    if not elements:
        raise ContractViolation("partitions must cover at least one element")
    label_b = b.labels()
    table: dict[tuple[int, int], int] = {}
    for row, block in enumerate(a.blocks):
        for element in block:
            key = (row, label_b[element])
            table[key] = table.get(key, 0) + 1
    row_sums = [len(block) for block in a.blocks]
    col_sums = [len(block) for block in b.blocks]
    return table, row_sums, col_sums, len(elements)


def adjusted_rand_index(a: BlockPartition, b: BlockPartition) -> float:
    """Chance-adjusted Rand index; 1 for identical partitions, ~0 for random."""
    table, row_sums, col_sums, n = _contingency(a, b)
    index = sum(comb(v, 2) for v in table.values())
    sum_rows = sum(comb(v, 2) for v in row_sums)
    sum_cols = sum(comb(v, 2) for v in col_sums)
    pairs = comb(n, 2)
    # (index - expected) / (max - expected) cleared of the /pairs division,
    # all in exact integers; one float division at the end.
    numerator = pairs * 2 * index - 2 * sum_rows * sum_cols
    denominator = pairs * (sum_rows + sum_cols) - 2 * sum_rows * sum_cols
    if denominator == 0:
        return 1.0  # both partitions trivial (and therefore identical)
    return numerator / denominator


def _entropy(sizes, n: int) -> float:
    return -sum((s / n) * log(s / n) for s in sizes if s)


def mutual_information(a: BlockPartition, b: BlockPartition) -> float:
    table, row_sums, col_sums, n = _contingency(a, b)
    mi = 0.0
    for (row, col), nij in table.items():
        mi += (nij / n) * log(n * nij / (row_sums[row] * col_sums[col]))
    return mi


def expected_mutual_information(row_sums, col_sums, n: int) -> float:
    """E[MI] over random partitions with these fixed block sizes."""
    gln = [lgamma(k + 1) for k in range(n + 1)]
    total = 0.0
    for ai in row_sums:
        for bj in col_sums:
            start = max(1, ai + bj - n)
            stop = min(ai, bj)
            for nij in range(start, stop + 1):
                log_prob = (gln[ai] + gln[bj] + gln[n - ai] + gln[n - bj]
                            - gln[n] - gln[nij] - gln[ai - nij] - gln[bj - nij]
                            - gln[n - ai - bj + nij])
                total += (nij / n) * log(n * nij / (ai * bj)) * exp(log_prob)
    return total


def adjusted_mutual_information(a: BlockPartition, b: BlockPartition) -> float:
    """AMI = (MI - E[MI]) / (mean(H(a), H(b)) - E[MI]); identical -> exactly 1."""
    table, row_sums, col_sums, n = _contingency(a, b)
    if a.as_sets() == b.as_sets():
        return 1.0
    mi = 0.0
    for (row, col), nij in table.items():
        mi += (nij / n) * log(n * nij / (row_sums[row] * col_sums[col]))
    emi = expected_mutual_information(row_sums, col_sums, n)
    normalizer = (_entropy(row_sums, n) + _entropy(col_sums, n)) / 2.0
    denominator = normalizer - emi
    if abs(denominator) < 1e-14:
        # Remaining 0/0 shapes behave like identical trivial partitions.
        return 1.0
    return (mi - emi) / denominator


def extraction_scores(predicted_nav: set[int], truth_nav: set[int],
                      all_links: set[int]) -> ExtractionScore:
    """Per-hyperlink precision/recall/F1 with totals-preserving conventions."""
    if not predicted_nav <= all_links or not truth_nav <= all_links:
        raise ContractViolation(
            "predicted and truth sets must be subsets of the page's hyperlinks")
    tp = len(predicted_nav & truth_nav)
    fp = len(predicted_nav - truth_nav)
    fn = len(truth_nav - predicted_nav)
    precision = tp / (tp + fp) if (tp + fp) else 1.0
    recall = tp / (tp + fn) if (tp + fn) else 1.0
    f1 = (2 * precision * recall / (precision + recall)
          if (precision + recall) > 0 else 0.0)
    return ExtractionScore(precision, recall, f1, tp, fp, fn)
