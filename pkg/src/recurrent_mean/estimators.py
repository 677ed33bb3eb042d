"""Mean event count, occupancy probabilities and variance bound.

The mean count at ``t`` is accumulated over the pooled event-time grid as

    mu(t) = sum_j sum_{t_i <= t} h_j(t_i) * p_j(t_i-)

where ``h_j(t_i) = d_j(t_i) / r_j(t_i)`` is the order-``j`` hazard increment
from the stratified risk sets and ``p_j`` is the probability of having
exactly ``j`` events. ``p_j`` is a chain product of conditional
product-limit curves,

    p_0 = 1 - F_1,   p_j = (1 - F_{j+1}) * F_1 * ... * F_j,

with ``F_{J+1} = 0`` beyond the largest observed order ``J``, so that the
``p_j`` sum to one at every time.

``F_j(t)`` estimates P(j-th event by t | (j-1)-th event by t). It is the
product-limit failure probability of the j-th event, evaluated at ``t`` in
the subpopulation of subjects whose (j-1)-th event happened by ``t``; each
member stays at risk until its j-th event or end of observation. Without
censoring before ``t`` this is exactly the fraction of that subpopulation
that has had the j-th event, which makes ``mu`` coincide with the
Nelson-Aalen mean when nobody drops out.
"""

from __future__ import annotations

import enum
import io
import csv
import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from recurrent_mean._io import atomic_write_text, format_decimal
from recurrent_mean.event_data import CohortDataset, counts_at
from recurrent_mean.risk_model import (
    EventTimeGrid,
    at_risk_total,
    event_time_grid,
    events_total,
    stratum_intervals,
    stratum_table,
)
from recurrent_mean.stepfunction import StepFunction

ESTIMATE_HEADER = ("time", "mean", "na_mean", "variance_bound", "ci_low", "ci_high")


class BoundMode(enum.Enum):
    """Count reference used in the variance bound.

    MAX_COUNT takes the largest per-subject count observed by ``t`` and is
    a genuine upper bound. MIN_COUNT takes the smallest; it can fall below
    the mean, in which case the bound degenerates to 0.
    """

    MAX_COUNT = "max"
    MIN_COUNT = "min"


@dataclass(frozen=True)
class MeanEstimate:
    mean: StepFunction
    per_stratum_contributions: dict = field(default_factory=dict)


@dataclass(frozen=True)
class VarianceBound:
    """Upper bound ``mu_hat * (count_reference - mu_hat)`` on Var(X_t).

    This bounds the variance; it is not an estimate of it.
    """

    time: float
    mu_hat: float
    count_reference: int
    bound: float
    mode: BoundMode
    degenerate: bool = False


@dataclass(frozen=True)
class IncidenceRateCI:
    """Asymptotic normal interval for the incidence rate at ``time``.

    The normal approximation needs the per-subject counts (or ``n``) to be
    large; nothing here checks that.
    """

    low: float
    high: float
    point: float
    half_width: float
    level: float
    n_subjects: int
    variance: VarianceBound

    @property
    def degenerate(self) -> bool:
        return self.variance.degenerate

    def __iter__(self):
        return iter((self.low, self.high, self.point))


def _grid(cohort, grid):
    return event_time_grid(cohort) if grid is None else grid


def _conditional_failure_values(cohort: CohortDataset, j: int, grid: EventTimeGrid) -> np.ndarray:
    times = grid.times
    out_surv = np.ones(times.size)
    if j > cohort.max_order:
        return 1.0 - out_surv
    entry, exit_, transition = stratum_intervals(cohort, j - 1)
    # members of the conditioning subpopulation at each grid time
    members = np.searchsorted(np.sort(entry), times, side="right")
    s, d = np.unique(exit_[transition], return_counts=True)
    # at time t the risk set at s <= t is members(t) - #{exit < s}
    left = np.searchsorted(np.sort(exit_), s, side="left")
    upper = left + d
    starts = np.flatnonzero(np.r_[True, left[1:] != upper[:-1]])
    stops = np.r_[starts[1:] - 1, s.size - 1]
    last = np.searchsorted(s, times, side="right") - 1
    for i0, i1 in zip(starts, stops):
        g0 = int(np.searchsorted(times, s[i0]))
        if g0 == times.size:
            break
        m = members[g0:]
        k = np.minimum(last[g0:], i1)
        out_surv[g0:] *= (m - upper[k]) / (m - left[i0])
    return 1.0 - out_surv


def _failure_matrix(cohort, grid):
    """Rows F_1 .. F_J evaluated at every grid time."""
    J = cohort.max_order
    out = np.empty((J, len(grid)))
    for j in range(1, J + 1):
        out[j - 1] = _conditional_failure_values(cohort, j, grid)
    return out


def _occupancy_matrix(cohort, grid):
    """Rows p_0 .. p_J at every grid time, plus their values at time 0."""
    F = _failure_matrix(cohort, grid)
    J = F.shape[0]
    reached = np.vstack([np.ones(len(grid)), np.cumprod(F, axis=0)])
    stay = np.vstack([1.0 - F, np.ones(len(grid))])
    initial = np.zeros(J + 1)
    initial[0] = 1.0
    return reached * stay, initial


def km_conditional_failure(cohort: CohortDataset, j: int, grid: EventTimeGrid | None = None) -> StepFunction:
    """Product-limit estimate of P(j-th event by t | (j-1)-th event by t).

    For ``j == 1`` this is the ordinary Kaplan-Meier failure curve of the
    first event. Orders above the largest observed one give the zero
    function.
    """
    if j < 1:
        raise ValueError("order must be >= 1")
    grid = _grid(cohort, grid)
    return StepFunction(grid.times, _conditional_failure_values(cohort, j, grid), 0.0)


def occupancy_probability(cohort: CohortDataset, j: int, grid: EventTimeGrid | None = None) -> StepFunction:
    """Estimated probability of having exactly ``j`` events by ``t``."""
    if j < 0:
        raise ValueError("order must be >= 0")
    grid = _grid(cohort, grid)
    if j > cohort.max_order:
        return StepFunction(grid.times, np.zeros(len(grid)), 0.0)
    occ, initial = _occupancy_matrix(cohort, grid)
    return StepFunction(grid.times, occ[j], initial[j])


def stratum_hazard_increments(cohort: CohortDataset, j: int, grid: EventTimeGrid | None = None):
    """``[(t, d_j(t) / r_j(t)), ...]`` over grid times with a non-empty risk set."""
    grid = _grid(cohort, grid)
    at_risk, events = stratum_table(cohort, j, grid)
    keep = at_risk > 0
    return list(zip(grid.times[keep].tolist(), (events[keep] / at_risk[keep]).tolist()))


def proposed_mean(cohort: CohortDataset, grid: EventTimeGrid | None = None) -> MeanEstimate:
    """History-stratified estimate of the mean event count over time."""
    grid = _grid(cohort, grid)
    times = grid.times
    occ, initial = _occupancy_matrix(cohort, grid)
    contributions = {}
    total = np.zeros(times.size)
    for j in range(cohort.max_order + 1):
        at_risk, events = stratum_table(cohort, j, grid)
        hazard = np.divide(events, at_risk, out=np.zeros(times.size), where=at_risk > 0)
        occ_before = np.r_[initial[j], occ[j, :-1]]
        curve = np.cumsum(hazard * occ_before)
        contributions[j] = StepFunction(times, curve, 0.0)
        total = total + curve
    return MeanEstimate(StepFunction(times, total, 0.0), contributions)


def nelson_aalen_mean(cohort: CohortDataset, grid: EventTimeGrid | None = None) -> StepFunction:
    """Nelson-Aalen mean count: cumulative events / subjects under observation."""
    grid = _grid(cohort, grid)
    inc = events_total(cohort, grid) / at_risk_total(cohort, grid)
    return StepFunction(grid.times, np.cumsum(inc), 0.0)


def count_reference(cohort: CohortDataset, t: float, mode: BoundMode = BoundMode.MAX_COUNT) -> int:
    counts = counts_at(cohort, t)
    return int(counts.max() if BoundMode(mode) is BoundMode.MAX_COUNT else counts.min())


def count_reference_curve(cohort: CohortDataset, times, mode: BoundMode = BoundMode.MAX_COUNT) -> np.ndarray:
    """:func:`count_reference` at many times at once."""
    times = np.asarray(times, dtype=np.float64)
    out = np.zeros(times.shape, dtype=np.int64)
    mode = BoundMode(mode)
    for j in range(1, cohort.max_order + 1):
        subj, tj = cohort.order_times(j)
        if mode is BoundMode.MAX_COUNT:
            out += times >= tj.min()
        elif subj.size == len(cohort):
            out += times >= tj.max()
        else:
            break
    return out


def _bound(mu, ref):
    mu = np.asarray(mu, dtype=np.float64)
    degenerate = ref < mu
    return np.where(degenerate, 0.0, mu * (ref - mu)), degenerate


def _check_time(cohort, t):
    if not 0 <= t <= cohort.horizon:
        raise ValueError(f"time {t!r} outside [0, {cohort.horizon!r}]")


def variance_upper_bound(
    cohort: CohortDataset,
    t: float,
    mode: BoundMode = BoundMode.MAX_COUNT,
    estimate: MeanEstimate | None = None,
) -> VarianceBound:
    """Upper bound on the variance of the event count at ``t``.

    Parameters
    ----------
    cohort : CohortDataset
    t : float
        Evaluation time, at most the cohort horizon.
    mode : BoundMode
        Which per-subject observed count to use as reference.
    estimate : MeanEstimate, optional
        Precomputed :func:`proposed_mean` of the same cohort.

    Returns
    -------
    VarianceBound
        ``degenerate`` is set when the reference count is below the mean
        and the bound was clamped to 0.
    """
    _check_time(cohort, t)
    mode = BoundMode(mode)
    if estimate is None:
        estimate = proposed_mean(cohort)
    mu = estimate.mean(t)
    ref = count_reference(cohort, t, mode)
    bound, degenerate = _bound(mu, ref)
    return VarianceBound(float(t), mu, ref, float(bound), mode, bool(degenerate))


def normal_quantile(p: float) -> float:
    return NormalDist().inv_cdf(p)


def incidence_rate_ci(
    cohort: CohortDataset,
    t: float,
    level: float = 0.95,
    mode: BoundMode = BoundMode.MAX_COUNT,
    estimate: MeanEstimate | None = None,
) -> IncidenceRateCI:
    """Normal-approximation interval ``mu_hat +/- z * sqrt(bound / n)``, floored at 0."""
    if not 0 < level < 1:
        raise ValueError("level must lie strictly between 0 and 1")
    vb = variance_upper_bound(cohort, t, mode, estimate)
    n = cohort.n_subjects
    half = normal_quantile((1 + level) / 2) * math.sqrt(vb.bound) / math.sqrt(n)
    return IncidenceRateCI(
        max(vb.mu_hat - half, 0.0), vb.mu_hat + half, vb.mu_hat, half, level, n, vb
    )


@dataclass(frozen=True)
class EstimateTable:
    time: np.ndarray
    mean: np.ndarray
    na_mean: np.ndarray
    variance_bound: np.ndarray
    ci_low: np.ndarray
    ci_high: np.ndarray
    degenerate: np.ndarray

    def rows(self):
        return zip(self.time, self.mean, self.na_mean, self.variance_bound, self.ci_low, self.ci_high)


def estimate_table(
    cohort: CohortDataset,
    horizon: float | None = None,
    level: float = 0.95,
    mode: BoundMode = BoundMode.MAX_COUNT,
) -> EstimateTable:
    """Estimates at every grid time up to ``horizon`` and at ``horizon`` itself.

    The horizon row is not repeated when the horizon is a grid time.
    """
    if horizon is None:
        horizon = cohort.horizon
    _check_time(cohort, horizon)
    if not 0 < level < 1:
        raise ValueError("level must lie strictly between 0 and 1")
    grid = event_time_grid(cohort)
    est = proposed_mean(cohort, grid)
    na = nelson_aalen_mean(cohort, grid)
    times = grid.times[grid.times <= horizon]
    if times.size == 0 or times[-1] != horizon:
        times = np.r_[times, horizon]
    mu = est.mean(times)
    bound, degenerate = _bound(mu, count_reference_curve(cohort, times, mode))
    half = normal_quantile((1 + level) / 2) * np.sqrt(bound) / math.sqrt(cohort.n_subjects)
    return EstimateTable(
        times, mu, na(times), bound, np.maximum(mu - half, 0.0), mu + half, degenerate
    )


def estimate_csv(table: EstimateTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ESTIMATE_HEADER)
    for row in table.rows():
        w.writerow([format_decimal(x) for x in row])
    return buf.getvalue()


def write_estimate_csv(table: EstimateTable, path) -> None:
    atomic_write_text(path, estimate_csv(table))


def read_estimate_csv(path) -> dict:
    """Columns of an estimate export as float arrays, keyed by header name."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != ESTIMATE_HEADER:
            raise ValueError(f"unexpected header {header}")
        data = np.array([[float(x) for x in row] for row in reader if row], dtype=np.float64)
    data = data.reshape(-1, len(ESTIMATE_HEADER))
    return {name: data[:, i] for i, name in enumerate(ESTIMATE_HEADER)}
