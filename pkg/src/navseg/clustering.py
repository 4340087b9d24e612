"""Partition a page's hyperlinks into blocks.

The main clusterer walks the DOM bottom-up and left-to-right.  Each
subtree reports whether all of its hyperlinks still form one undecided
group; a parent then scans its children in order, accumulating pending
groups, and commits the accumulated block whenever (a) a child has
already split internally, (b) the index gap to the previous link-bearing
child exceeds the gap threshold, or (c) the hyperlink density of the
subtrees accumulated since the last commit falls below the density
threshold.  If the root reports one undecided group, the whole page is a
single block.  With the density test disabled (gamma = 0) only the gap
rule splits.

Three reference clusterers over the same index distance are provided
for comparison: single-linkage agglomeration cut at the gap threshold,
density components (DBSCAN with eps = threshold and a minimum
neighborhood of one point), and 1-D k-means with k given externally.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .dom import DomNode, IndexedDom
from .errors import ContractViolation
from .geometry import ClusteringConfig, block_gap, hyperlink_density


@dataclass(frozen=True)
class BlockPartition:
    """Assignment of every hyperlink on a page to exactly one block."""

    page_id: str
    blocks: tuple[frozenset[int], ...]

    @staticmethod
    def from_blocks(page_id: str, blocks) -> "BlockPartition":
        normalized = tuple(sorted((frozenset(b) for b in blocks if b), key=min))
        return BlockPartition(page_id, normalized)

    def elements(self) -> frozenset[int]:
        out: set[int] = set()
        for b in self.blocks:
            out.update(b)
        return frozenset(out)

    def as_sets(self) -> set[frozenset[int]]:
        return set(self.blocks)

    def labels(self) -> dict[int, int]:
        """Element -> block position, for contingency-table metrics."""
        out: dict[int, int] = {}
        for pos, block in enumerate(self.blocks):
            for element in block:
                out[element] = pos
        return out


def cluster_chd(dom: IndexedDom, config: ClusteringConfig,
                page_id: str = "") -> BlockPartition:
    """Cluster hyperlinks on the DOM tree (gap rule, plus density rule if hdt > 0).

    Anchors are treated as atomic units: the walk never descends into an
    anchor, so (recovered) anchors nested inside another stay with it.
    """
    if not dom.hyperlinks:
        return BlockPartition.from_blocks(page_id, [])
    committed: list[list[int]] = []

    def walk(node: DomNode) -> bool:
        links_here = dom.hyperlinks_in(node)
        if not links_here:
            return True
        if node.is_anchor:
            return True
        child_state = [walk(child) for child in node.children]
        pending: list[int] = []
        accumulated: list[DomNode] = []   # child subtrees since the last commit
        is_one = True
        prev_linked: DomNode | None = None
        for child, child_is_one in zip(node.children, child_state):
            accumulated.append(child)
            child_links = dom.hyperlinks_in(child)
            if not child_links:
                continue
            if not child_is_one:
                # The child already committed its own blocks; anything
                # accumulated before it can no longer grow.
                if pending:
                    committed.append(pending)
                pending = []
                accumulated = []
                is_one = False
                prev_linked = child
                continue
            if pending:
                g = block_gap(dom.hyperlinks_in(prev_linked), child_links)
                hd = hyperlink_density(dom, accumulated, config.epsilon)
                if g > config.gt or hd < config.hdt:
                    committed.append(pending)
                    pending = []
                    accumulated = [child]
                    is_one = False
            pending.extend(link.index for link in child_links)
            prev_linked = child
        if not is_one and pending:
            committed.append(pending)
        return is_one

    if walk(dom.root):
        committed.append([link.index for link in dom.hyperlinks])
    return BlockPartition.from_blocks(page_id, committed)


def cluster_agglomerative(dom: IndexedDom, gt: int,
                          page_id: str = "") -> BlockPartition:
    """Single-linkage agglomeration over index distances, cut at gt.

    Starts from singletons and repeatedly merges the two closest clusters
    until the smallest inter-cluster single-linkage distance exceeds gt.
    On 1-D indices the closest pair is always adjacent in index order, so
    clusters are kept as ordered contiguous runs.
    """
    indices = [h.index for h in dom.hyperlinks]
    if not indices:
        return BlockPartition.from_blocks(page_id, [])
    runs: list[list[int]] = [[i] for i in indices]
    while len(runs) > 1:
        gaps = [runs[k + 1][0] - runs[k][-1] for k in range(len(runs) - 1)]
        k = min(range(len(gaps)), key=lambda p: (gaps[p], p))
        if gaps[k] > gt:
            break
        runs[k] = runs[k] + runs[k + 1]
        del runs[k + 1]
    return BlockPartition.from_blocks(page_id, runs)


def cluster_density(dom: IndexedDom, gt: int, page_id: str = "") -> BlockPartition:
    """Density clustering: eps-neighborhood components with eps = gt.

    With a minimum neighborhood of one point every hyperlink is a core
    point, so clusters are exactly the connected components of the
    "distance <= gt" graph.  Implemented as classic region growing.
    """
    indices = [h.index for h in dom.hyperlinks]
    if not indices:
        return BlockPartition.from_blocks(page_id, [])
    assignment: dict[int, int] = {}
    cluster_id = 0
    for start in indices:
        if start in assignment:
            continue
        frontier = [start]
        assignment[start] = cluster_id
        while frontier:
            point = frontier.pop()
            lo = bisect_left(indices, point - gt)
            hi = bisect_right(indices, point + gt)
            for neighbor in indices[lo:hi]:
                if neighbor not in assignment:
                    assignment[neighbor] = cluster_id
                    frontier.append(neighbor)
        cluster_id += 1
    blocks: list[set[int]] = [set() for _ in range(cluster_id)]
    for index, cid in assignment.items():
        blocks[cid].add(index)
    return BlockPartition.from_blocks(page_id, blocks)


def cluster_kmeans(dom: IndexedDom, k: int, seed: int = 0,
                   page_id: str = "", restarts: int = 10) -> BlockPartition:
    """1-D k-means over hyperlink indices, k-means++ seeding, best of `restarts`."""
    indices = [h.index for h in dom.hyperlinks]
    if k < 1 or k > len(indices):
        raise ContractViolation(
            f"k must be in 1..{len(indices)} (got {k})")
    xs = np.asarray(indices, dtype=float)
    rng = np.random.default_rng(seed)
    best_labels = None
    best_inertia = np.inf
    for _ in range(restarts):
        centers = _kmeanspp_init(xs, k, rng)
        labels, inertia = _lloyd(xs, centers)
        if inertia < best_inertia:
            best_inertia = inertia
            best_labels = labels
    blocks: dict[int, set[int]] = {}
    for index, label in zip(indices, best_labels):
        blocks.setdefault(int(label), set()).add(index)
    return BlockPartition.from_blocks(page_id, blocks.values())


def _kmeanspp_init(xs: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    centers = np.empty(k)
    centers[0] = xs[rng.integers(len(xs))]
    d2 = (xs - centers[0]) ** 2
    for j in range(1, k):
        total = d2.sum()
        if total == 0:
            centers[j:] = centers[0]
            break
        centers[j] = xs[rng.choice(len(xs), p=d2 / total)]
        d2 = np.minimum(d2, (xs - centers[j]) ** 2)
    return centers


def _lloyd(xs: np.ndarray, centers: np.ndarray,
           max_iter: int = 300) -> tuple[np.ndarray, float]:
    labels = None
    for _ in range(max_iter):
        dists = (xs[:, None] - centers[None, :]) ** 2
        new_labels = dists.argmin(axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(len(centers)):
            members = xs[labels == j]
            if len(members):
                centers[j] = members.mean()
    inertia = float(((xs - centers[labels]) ** 2).sum())
    return labels, inertia
