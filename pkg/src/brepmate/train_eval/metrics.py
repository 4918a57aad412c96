"""Ranking metrics and inter-rater agreement."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BrepmateError


@dataclass
class RankingResult:
    """One ranked example: candidate order (best first, ties broken by
    ascending candidate index), scores in original index order, and the
    1-based rank of the first correct candidate."""

    order: np.ndarray
    scores: np.ndarray
    rank_of_first_correct: int

    def hit(self, k: int) -> bool:
        return self.rank_of_first_correct <= k


def rank_candidates(scores: np.ndarray, positives) -> RankingResult:
    scores = np.asarray(scores, dtype=float).reshape(-1)
    n = scores.shape[0]
    order = np.lexsort((np.arange(n), -scores))
    positive_set = set(int(i) for i in positives)
    if not positive_set:
        raise BrepmateError("ranking requires at least one positive candidate")
    rank = next(pos + 1 for pos, idx in enumerate(order) if int(idx) in positive_set)
    return RankingResult(order=order, scores=scores, rank_of_first_correct=rank)


def hit_at_k(results: list[RankingResult], k: int) -> float:
    return float(np.mean([r.hit(k) for r in results]))


def ndcg_star(results: list[RankingResult]) -> float:
    """Mean inverse log rank of the first correct candidate."""
    ranks = np.array([r.rank_of_first_correct for r in results], dtype=float)
    return float(np.mean(1.0 / np.log2(1.0 + ranks)))


def mean_hit_over_range(results: list[RankingResult], k_max: int) -> float:
    """Model-selection metric: hit ratio averaged over k = 1 .. k_max."""
    return float(np.mean([hit_at_k(results, k) for k in range(1, k_max + 1)]))


def cohen_kappa(labels_a, labels_b) -> float:
    """Agreement above chance with marginal-product expected agreement.

    Defined as 1.0 when both raters agree perfectly with degenerate
    marginals; any other zero-chance-disagreement case is an error.
    """
    a = list(labels_a)
    b = list(labels_b)
    if len(a) != len(b):
        raise BrepmateError(f"label sequences differ in length: {len(a)} vs {len(b)}")
    if not a:
        raise BrepmateError("cannot compute agreement of empty sequences")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    categories = set(a) | set(b)
    p_e = sum((a.count(c) / n) * (b.count(c) / n) for c in categories)
    if p_e >= 1.0 - 1e-15:
        if p_o >= 1.0 - 1e-15:
            return 1.0
        raise BrepmateError("expected agreement is 1 but observed agreement is not")
    return (p_o - p_e) / (1.0 - p_e)
