"""Shared domain types for time-varying Granger causality analysis.

Time index convention
---------------------
Time points are 1-based: a record of T regression steps carries T+1 samples
indexed t = 1, ..., T+1, and a change-point set is an increasing integer
sequence 1 = t_0 < t_1 < ... < t_m = T+1.  The k-th window covers
t in [t_{k-1}, t_k) and contributes the regression pairs (t -> t+1) for
those t, so the terminal sample t = T+1 appears only as a response.
Mapping to 0-based numpy arrays: time point t lives at array index t - 1.
This is the single place the mapping is documented; all other modules rely
on it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

#: Default minimum window length: smallest window that leaves a nontrivial
#: residual dof for a 3-parameter per-window fit.
DEFAULT_MIN_WINDOW = 10


class StgcError(Exception):
    """Base class for all errors raised by this package."""


class NotIncreasing(StgcError):
    """Change-point sequence is not strictly increasing."""


class EndpointMismatch(StgcError):
    """Change-point sequence does not start at 1 or end at T+1."""


class WindowTooShort(StgcError):
    """A window is shorter than the configured minimum length."""


class LengthMismatch(StgcError):
    """Inputs refer to records of different lengths."""


class DegenerateInput(StgcError):
    """A series has zero variance (or is otherwise uninformative)."""


class NearCollinear(StgcError):
    """Two channels are too correlated to orthogonalize."""


class SingularDesign(StgcError):
    """A window design matrix is rank deficient beyond recovery."""


class InsufficientData(StgcError):
    """Not enough observations for the requested degrees of freedom."""


class InvalidDof(StgcError):
    """Nonpositive degrees of freedom."""


class InfeasibleConstraint(StgcError):
    """No partition satisfies the minimum-window-length constraint."""


class EmptyRoi(StgcError):
    """A referenced ROI contains no voxels."""


class LabelMismatch(StgcError):
    """Two labeled collections do not carry identical label sets."""


class DelayTooLarge(StgcError):
    """A realignment delay exceeds half the record length."""


class InvalidConfig(StgcError):
    """A configuration object violates its invariants."""


class NumericalDivergence(StgcError):
    """An iterative numerical procedure lost stability."""


class Direction(str, Enum):
    """Direction of a causality test; X_TO_Y tests whether x drives y."""

    X_TO_Y = "x_to_y"
    Y_TO_X = "y_to_x"

    @property
    def source(self) -> str:
        return "x" if self is Direction.X_TO_Y else "y"

    @property
    def target(self) -> str:
        return "y" if self is Direction.X_TO_Y else "x"


class GcKind(str, Enum):
    CLASSIC = "classic"
    LOCAL = "local"
    AVERAGE = "average"
    CUMULATIVE = "cumulative"
    DKF = "dkf"


def _as_float_array(values: Sequence[float], name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InvalidConfig(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise InvalidConfig(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class TimeSeriesPair:
    """Two aligned scalar series; the unit of all estimation.

    ``x`` and ``y`` carry T+1 samples for T regression steps.  ``dt`` is the
    sampling interval in seconds.
    """

    x: np.ndarray
    y: np.ndarray
    dt: float = 1.0
    labels: tuple[str, str] = ("x", "y")

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _as_float_array(self.x, "x"))
        object.__setattr__(self, "y", _as_float_array(self.y, "y"))
        self.x.setflags(write=False)
        self.y.setflags(write=False)
        if len(self.x) != len(self.y):
            raise LengthMismatch(
                f"x has {len(self.x)} samples, y has {len(self.y)}"
            )
        if len(self.x) < 5:
            raise DegenerateInput("series must have at least 5 samples")
        if not (self.dt > 0):
            raise InvalidConfig("dt must be positive")

    @property
    def n_samples(self) -> int:
        return len(self.x)

    @property
    def n_steps(self) -> int:
        """Number of regression pairs T (one fewer than the sample count)."""
        return len(self.x) - 1

    def channel(self, name: str) -> np.ndarray:
        if name == "x":
            return self.x
        if name == "y":
            return self.y
        raise KeyError(name)

    def swapped(self) -> "TimeSeriesPair":
        return TimeSeriesPair(
            self.y, self.x, dt=self.dt, labels=(self.labels[1], self.labels[0])
        )


@dataclass(frozen=True)
class ChangePointSet:
    """Ordered integer partition 1 = t_0 < ... < t_m = T+1.

    Construct through :func:`validate_changepoints`; the constructor only
    re-checks structural invariants (increasing, >= 2 elements).
    """

    points: tuple[int, ...]

    def __post_init__(self) -> None:
        pts = tuple(int(p) for p in self.points)
        object.__setattr__(self, "points", pts)
        if len(pts) < 2:
            raise NotIncreasing("need at least two change-points")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise NotIncreasing(f"points not strictly increasing: {pts}")
        if pts[0] != 1:
            raise EndpointMismatch(f"first change-point must be 1, got {pts[0]}")

    @property
    def n_windows(self) -> int:
        return len(self.points) - 1

    @property
    def n_steps(self) -> int:
        """T: the total number of regression pairs covered."""
        return self.points[-1] - 1

    @property
    def window_lengths(self) -> np.ndarray:
        return np.diff(np.asarray(self.points))

    def windows(self) -> list[tuple[int, int]]:
        """Half-open windows [t_{k-1}, t_k) in 1-based time points."""
        return list(zip(self.points[:-1], self.points[1:]))


def validate_changepoints(
    points: Sequence[int], T: int, l0: int = DEFAULT_MIN_WINDOW
) -> ChangePointSet:
    """Validate a candidate change-point sequence for a record of T steps.

    Raises :class:`NotIncreasing`, :class:`EndpointMismatch`, or
    :class:`WindowTooShort`.
    """
    pts = [int(p) for p in points]
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise NotIncreasing(f"points not strictly increasing: {pts}")
    if not pts or pts[0] != 1 or pts[-1] != T + 1:
        raise EndpointMismatch(
            f"points must start at 1 and end at {T + 1}, got {pts}"
        )
    for a, b in zip(pts, pts[1:]):
        if b - a < l0:
            raise WindowTooShort(
                f"window [{a}, {b}) has length {b - a} < minimum {l0}"
            )
    return ChangePointSet(tuple(pts))


def refinement_of(fine: ChangePointSet, coarse: ChangePointSet) -> bool:
    """True iff every point of ``coarse`` appears in ``fine`` (same record)."""
    if fine.points[-1] != coarse.points[-1]:
        raise LengthMismatch(
            f"sets cover different records: T+1 = {fine.points[-1]} "
            f"vs {coarse.points[-1]}"
        )
    return set(coarse.points) <= set(fine.points)


@dataclass(frozen=True)
class GcEstimate:
    """A causality value (log residual-sum ratio, nats) with significance.

    ``df`` holds the degree-of-freedom descriptors of the associated test
    statistic; ``p_value`` is None when no test applies (e.g. noiseless
    deterministic data).
    """

    value: float
    kind: GcKind
    direction: Direction
    df: tuple = ()
    p_value: float | None = None
    _TOL: float = field(default=1e-12, repr=False)

    def __post_init__(self) -> None:
        if not np.isfinite(self.value):
            raise InvalidConfig("causality value must be finite")
        tol = 1e-9 if self.kind is GcKind.DKF else self._TOL
        if self.value < -tol:
            raise InvalidConfig(
                f"causality value {self.value} below zero beyond tolerance"
            )
        if self.value < 0:
            object.__setattr__(self, "value", 0.0)
        if self.p_value is not None and not (0.0 <= self.p_value <= 1.0):
            raise InvalidConfig(f"p-value {self.p_value} outside [0, 1]")


@dataclass(frozen=True)
class CoefficientSchedule:
    """Known per-step trajectories a1(t), b1(t), sigma2(t), t = 1..T.

    Used for closed-form (population) causality evaluation; assumes
    unit-variance, mutually uncorrelated channels.
    """

    a1: np.ndarray
    b1: np.ndarray
    sigma2: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "a1", _as_float_array(self.a1, "a1"))
        object.__setattr__(self, "b1", _as_float_array(self.b1, "b1"))
        object.__setattr__(self, "sigma2", _as_float_array(self.sigma2, "sigma2"))
        for arr in (self.a1, self.b1, self.sigma2):
            arr.setflags(write=False)
        if not (len(self.a1) == len(self.b1) == len(self.sigma2)):
            raise LengthMismatch("a1, b1, sigma2 must have equal length")
        if np.any(self.sigma2 <= 0):
            raise InvalidConfig("sigma2 must be strictly positive")

    @property
    def n_steps(self) -> int:
        return len(self.a1)
