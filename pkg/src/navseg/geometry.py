"""Link geometry: index distances, block gaps, densities, and thresholds.

All quantities are derived from the depth-first node indices of a parsed
page.  The distance between two hyperlinks is the absolute difference of
their indices; the gap between two link groups is the minimum distance
across the groups.  Density of a region is anchor words over all words,
smoothed so that text-free regions count as fully dense.

Both clustering thresholds are adaptive per page: the gap threshold is
picked from the sorted profile of neighbor-link distances by trading
off gap size against block count, and the density threshold is a scaled
copy of the whole-body density.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .dom import DomNode, HyperlinkRef, IndexedDom
from .errors import ContractViolation

DEFAULT_EPSILON = 1e-10
DEFAULT_BETA = 1.0
DEFAULT_GAMMA = 1.0


@dataclass(frozen=True)
class GapProfile:
    """All neighbor-hyperlink distances of a page plus a 0, sorted decreasing."""

    dl: tuple[int, ...]

    def __post_init__(self):
        if not self.dl:
            raise ContractViolation("gap profile must contain at least the 0 entry")
        if any(a < b for a, b in zip(self.dl, self.dl[1:])):
            raise ContractViolation("gap profile must be sorted non-increasing")
        if self.dl[-1] != 0:
            raise ContractViolation("gap profile must end with 0")


@dataclass(frozen=True)
class ClusteringConfig:
    """Resolved per-page clustering parameters.

    gamma = 0 disables the density test (the gap-only clustering variant);
    gt/hdt are the resolved thresholds for this page.
    """

    epsilon: float = DEFAULT_EPSILON
    beta: float = DEFAULT_BETA
    gamma: float = DEFAULT_GAMMA
    gt: int = 0
    hdt: float = 0.0

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ContractViolation("epsilon must be positive")
        if self.beta < 0 or self.gamma < 0:
            raise ContractViolation("beta and gamma must be non-negative")


def dom_distance(a: HyperlinkRef, b: HyperlinkRef) -> int:
    """Tree distance between two hyperlinks of one page: |index(a) - index(b)|."""
    return abs(a.index - b.index)


def block_gap(b1: Iterable[HyperlinkRef], b2: Iterable[HyperlinkRef]) -> int:
    """Minimum index distance across two non-empty hyperlink groups.

    Equivalent to the minimum of dom_distance over all cross pairs,
    computed by a merge walk over the sorted index lists.
    """
    ia = sorted(h.index for h in b1)
    ib = sorted(h.index for h in b2)
    if not ia or not ib:
        raise ContractViolation("block_gap requires two non-empty blocks")
    best = None
    i = j = 0
    while i < len(ia) and j < len(ib):
        d = abs(ia[i] - ib[j])
        if best is None or d < best:
            best = d
        if ia[i] <= ib[j]:
            i += 1
        else:
            j += 1
    return best


def hyperlink_density(dom: IndexedDom, roots: Iterable[DomNode],
                      epsilon: float = DEFAULT_EPSILON) -> float:
    """(anchor_words + eps) / (all_words + eps) over disjoint subtrees."""
    anchor_words, all_words = dom.subtree_word_counts(roots)
    return (anchor_words + epsilon) / (all_words + epsilon)


def gap_profile(dom: IndexedDom) -> GapProfile:
    """Distances between consecutive hyperlinks plus a 0, sorted decreasing."""
    links = dom.hyperlinks
    distances = [links[i + 1].index - links[i].index for i in range(len(links) - 1)]
    distances.append(0)
    distances.sort(reverse=True)
    return GapProfile(tuple(distances))


def select_gap_threshold(profile: GapProfile, beta: float = DEFAULT_BETA) -> int:
    """Pick the gap threshold from a profile.

    Returns dl[i*] where i* (1-based) minimizes dl[i]/dl[1] + beta*i/len(dl);
    ties break toward the smallest i, i.e. the largest gap value.  Scores
    are compared in exact rational arithmetic so that ties and orderings
    never depend on float rounding.  A profile whose largest entry is 0
    (at most one hyperlink) is degenerate and yields 0.
    """
    if beta < 0:
        raise ContractViolation("beta must be non-negative")
    dl = profile.dl
    if dl[0] == 0:
        return 0
    n = len(dl)
    b = Fraction(beta)
    # score_i compares as dl[i]*n*b.den + b.num*i*dl[0] over the common
    # positive denominator dl[0]*n*b.den.
    best_i = 1
    best_key = dl[0] * n * b.denominator + b.numerator * dl[0]
    for i in range(2, n + 1):
        key = dl[i - 1] * n * b.denominator + b.numerator * i * dl[0]
        if key < best_key:
            best_key = key
            best_i = i
    return dl[best_i - 1]


def select_hd_threshold(dom: IndexedDom, gamma: float = DEFAULT_GAMMA,
                        epsilon: float = DEFAULT_EPSILON) -> float:
    """Density threshold: gamma times the density of the body subtree.

    The body element stands in for the page; if the tree somehow lacks
    one, the document root is used.  gamma = 0 yields 0, which every
    region passes.
    """
    if gamma < 0:
        raise ContractViolation("gamma must be non-negative")
    if gamma == 0:
        return 0.0
    scope = dom.body if dom.body is not None else dom.root
    return gamma * hyperlink_density(dom, [scope], epsilon)


def resolve_config(dom: IndexedDom, *, beta: float = DEFAULT_BETA,
                   gamma: float = DEFAULT_GAMMA,
                   epsilon: float = DEFAULT_EPSILON) -> ClusteringConfig:
    """Compute both per-page thresholds and bundle them with the knobs."""
    gt = select_gap_threshold(gap_profile(dom), beta)
    hdt = select_hd_threshold(dom, gamma, epsilon)
    return ClusteringConfig(epsilon=epsilon, beta=beta, gamma=gamma, gt=gt, hdt=hdt)
