"""Ad-hoc baselines and the regress-and-snap noise experiment.

Location baselines: a random ranking, origin-type pair frequency fitted
on the training split, and snap-to-selection (summed distance between
each candidate origin and the selected face's center of mass). Mate type
gets the label-distribution baseline. The noisy oracle predicts each
part's true origin plus Gaussian noise scaled to a fraction of the
per-example spread of candidate origins, then snaps to the nearest
candidate; its hit@1 per noise level is the accuracy curve.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ..brep.model import MATE_TYPES, Part
from ..errors import BrepmateError
from ..forge.examples import SelectionExample
from ..mcf import enumerate_mcfs, resolve_frame
from .metrics import RankingResult, rank_candidates


@dataclass
class ExampleGeometry:
    """Resolved candidate origins and selected-face centers for one example."""

    origins_a: np.ndarray  # (n_candidates, 3)
    origins_b: np.ndarray
    face_com_a: np.ndarray
    face_com_b: np.ndarray
    gt_origin_a: np.ndarray
    gt_origin_b: np.ndarray


def example_geometry(example: SelectionExample, parts: dict[str, Part]) -> ExampleGeometry:
    part_a = parts[example.part_a]
    part_b = parts[example.part_b]
    mcfs_a = enumerate_mcfs(part_a, example.face_a)
    mcfs_b = enumerate_mcfs(part_b, example.face_b)
    n = len(example.candidates)
    if len(mcfs_a) * len(mcfs_b) == n:
        ua = np.vstack([m.frame.origin for m in mcfs_a])
        ub = np.vstack([m.frame.origin for m in mcfs_b])
        idx = np.arange(n)
        origins_a = ua[idx // len(mcfs_b)]
        origins_b = ub[idx % len(mcfs_b)]
    else:
        origins_a = np.vstack([
            resolve_frame(part_a, ra.origin_ref, ra.origin_type, ra.orient_ref).origin
            for ra, _ in example.candidates])
        origins_b = np.vstack([
            resolve_frame(part_b, rb.origin_ref, rb.origin_type, rb.orient_ref).origin
            for _, rb in example.candidates])
    first_pos = example.positives[0]
    return ExampleGeometry(
        origins_a=origins_a, origins_b=origins_b,
        face_com_a=part_a.entity(example.face_a).summary.center_of_mass,
        face_com_b=part_b.entity(example.face_b).summary.center_of_mass,
        gt_origin_a=origins_a[first_pos], gt_origin_b=origins_b[first_pos],
    )


# ---------------------------------------------------------------------------
# Location baselines
# ---------------------------------------------------------------------------

def random_baseline(examples: list[SelectionExample], seed: int) -> list[RankingResult]:
    rng = np.random.default_rng(seed)
    return [rank_candidates(rng.random(len(ex.candidates)), ex.positives) for ex in examples]


def fit_origin_type_table(train_examples: list[SelectionExample]) -> Counter:
    """Frequency of ordered origin-type pairs among ground-truth locations."""
    table: Counter = Counter()
    for ex in train_examples:
        for i in ex.positives:
            ra, rb = ex.candidates[i]
            table[(ra.origin_type, rb.origin_type)] += 1
    return table


def origin_type_baseline(examples: list[SelectionExample], table: Counter) -> list[RankingResult]:
    out = []
    for ex in examples:
        scores = np.array([float(table.get((ra.origin_type, rb.origin_type), 0))
                           for ra, rb in ex.candidates])
        out.append(rank_candidates(scores, ex.positives))
    return out


def snap_to_selection_baseline(examples: list[SelectionExample], parts: dict[str, Part],
                               geometries: list[ExampleGeometry] | None = None) -> list[RankingResult]:
    out = []
    for i, ex in enumerate(examples):
        geo = geometries[i] if geometries else example_geometry(ex, parts)
        dist = (np.linalg.norm(geo.origins_a - geo.face_com_a, axis=1)
                + np.linalg.norm(geo.origins_b - geo.face_com_b, axis=1))
        out.append(rank_candidates(-dist, ex.positives))
    return out


# ---------------------------------------------------------------------------
# Mate-type baseline
# ---------------------------------------------------------------------------

def label_distribution_ranking(labels: list[str]) -> list[str]:
    """Types ordered by frequency in the given split, ties by type order."""
    counts = Counter(labels)
    return sorted(MATE_TYPES, key=lambda t: (-counts.get(t, 0), MATE_TYPES.index(t)))


def label_distribution_baseline(examples: list[SelectionExample]) -> list[RankingResult]:
    ranking = label_distribution_ranking([ex.mate_type for ex in examples])
    out = []
    for ex in examples:
        scores = np.array([-float(ranking.index(t)) for t in MATE_TYPES])
        out.append(rank_candidates(scores, [MATE_TYPES.index(ex.mate_type)]))
    return out


# ---------------------------------------------------------------------------
# Noisy oracle (regress-and-snap stress test)
# ---------------------------------------------------------------------------

def noisy_oracle_curve(examples: list[SelectionExample], parts: dict[str, Part],
                       lambdas: list[float], seed: int,
                       geometries: list[ExampleGeometry] | None = None):
    """hit@1 per noise fraction; sigma is per-axis over candidate origins."""
    if not examples:
        raise BrepmateError("noisy oracle needs at least one example")
    if geometries is None:
        geometries = [example_geometry(ex, parts) for ex in examples]
    accuracies = []
    for li, lam in enumerate(lambdas):
        rng = np.random.default_rng((seed, li))
        hits = 0
        for ex, geo in zip(examples, geometries):
            sigma_a = geo.origins_a.std(axis=0)
            sigma_b = geo.origins_b.std(axis=0)
            pred_a = geo.gt_origin_a + lam * sigma_a * rng.standard_normal(3)
            pred_b = geo.gt_origin_b + lam * sigma_b * rng.standard_normal(3)
            dist = (np.linalg.norm(geo.origins_a - pred_a, axis=1)
                    + np.linalg.norm(geo.origins_b - pred_b, axis=1))
            result = rank_candidates(-dist, ex.positives)
            hits += result.hit(1)
        accuracies.append(hits / len(examples))
    return accuracies


def write_noise_curve_csv(lambdas: list[float], accuracies: list[float], path: str) -> None:
    with open(path, "w") as fh:
        fh.write("lambda,accuracy\n")
        for lam, acc in zip(lambdas, accuracies):
            fh.write(f"{lam},{acc}\n")
