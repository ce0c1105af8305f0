"""ROI-level aggregation of pairwise causality and test-retest scoring.

The ROI-to-ROI causality is the mean of the pairwise causality over all
ordered voxel pairs between the two ROIs.  Voxel pairs are independent;
they are evaluated in deterministic (row-major) order and failing pairs
are reported rather than silently dropped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .core import (
    ChangePointSet,
    Direction,
    EmptyRoi,
    GcEstimate,
    GcKind,
    LabelMismatch,
    StgcError,
    TimeSeriesPair,
)
from . import causality
from .changepoint import SearchConfig, search_optimal_partition
from .stats import pearson_correlation


@dataclass(frozen=True)
class RoiMatrix:
    """Time-by-voxel data matrix with an ROI label per voxel column."""

    series: np.ndarray
    roi_of: tuple[str, ...]
    dt: float = 1.0

    def __post_init__(self) -> None:
        arr = np.asarray(self.series, dtype=float)
        object.__setattr__(self, "series", arr)
        object.__setattr__(self, "roi_of", tuple(self.roi_of))
        if arr.ndim != 2:
            raise StgcError("series must be a 2-d (time x voxel) matrix")
        if arr.shape[1] != len(self.roi_of):
            raise LabelMismatch(
                f"{arr.shape[1]} voxels but {len(self.roi_of)} ROI labels"
            )

    def voxels(self, roi: str) -> list[int]:
        idx = [i for i, r in enumerate(self.roi_of) if r == roi]
        if not idx:
            raise EmptyRoi(f"ROI {roi!r} has no voxels")
        return idx

    def pair(self, i: int, j: int) -> TimeSeriesPair:
        return TimeSeriesPair(
            self.series[:, i], self.series[:, j], dt=self.dt,
            labels=(f"v{i}", f"v{j}"),
        )


@dataclass(frozen=True)
class PairOutcome:
    """Result of one voxel pair: either a value or an error message."""

    voxel_a: int
    voxel_b: int
    value: float | None
    error: str | None = None


@dataclass(frozen=True)
class RoiGcResult:
    """Aggregate causality with the per-pair breakdown."""

    estimate: GcEstimate
    pairs: tuple[PairOutcome, ...]
    n_failed: int


def _aggregate(
    data: RoiMatrix,
    roi_a: str,
    roi_b: str,
    kind: GcKind,
    direction: Direction,
    pair_value,
) -> RoiGcResult:
    outcomes = []
    values = []
    for i in data.voxels(roi_a):
        for j in data.voxels(roi_b):
            try:
                v = pair_value(data.pair(i, j))
            except StgcError as exc:
                outcomes.append(
                    PairOutcome(i, j, None, f"{type(exc).__name__}: {exc}")
                )
                continue
            outcomes.append(PairOutcome(i, j, v))
            values.append(v)
    if not values:
        raise EmptyRoi(
            f"every voxel pair between {roi_a!r} and {roi_b!r} failed"
        )
    estimate = GcEstimate(float(np.mean(values)), kind, direction)
    return RoiGcResult(
        estimate=estimate,
        pairs=tuple(outcomes),
        n_failed=len(outcomes) - len(values),
    )


def voxel_level_gc(
    data: RoiMatrix, roi_a: str, roi_b: str
) -> RoiGcResult:
    """Mean single-window causality over all ordered voxel pairs A -> B."""

    def value(pair: TimeSeriesPair) -> float:
        return causality.classic_gc(pair, Direction.X_TO_Y).value

    return _aggregate(data, roi_a, roi_b, GcKind.CLASSIC, Direction.X_TO_Y, value)


def stgc(
    data: RoiMatrix,
    roi_a: str,
    roi_b: str,
    flavor: GcKind = GcKind.AVERAGE,
    changepoints: ChangePointSet | None = None,
    search_config: SearchConfig | None = None,
    n_draws: int = causality.DEFAULT_MC_DRAWS,
    seed: int = 0,
) -> RoiGcResult:
    """Spatio-temporal causality: mean time-varying causality over pairs.

    Pass a fixed ``changepoints`` to share one partition, or leave it None
    to run the optimal-partition search independently per pair.
    """
    if flavor not in (GcKind.AVERAGE, GcKind.CUMULATIVE):
        raise ValueError(f"flavor must be average or cumulative, got {flavor}")

    def value(pair: TimeSeriesPair) -> float:
        s = changepoints
        if s is None:
            best, _ = search_optimal_partition(pair, search_config)
            s = best.changepoints
        est = causality.gc_for_partition(
            pair, s, Direction.X_TO_Y, flavor, n_draws=n_draws, seed=seed
        )
        return est.value

    return _aggregate(data, roi_a, roi_b, flavor, Direction.X_TO_Y, value)


def reliability(
    session1: Mapping[str, float], session2: Mapping[str, float]
) -> float:
    """Pearson correlation of label-aligned causality values."""
    if set(session1) != set(session2):
        raise LabelMismatch("sessions carry different label sets")
    labels = sorted(session1)
    u = [session1[k] for k in labels]
    v = [session2[k] for k in labels]
    return pearson_correlation(u, v)
