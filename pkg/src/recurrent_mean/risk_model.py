"""Pooled event-time grid and order-stratified risk sets.

Stratum ``j`` holds the subjects that currently have exactly ``j`` events.
A subject enters stratum ``j`` at its j-th event (stratum 0 at time 0) and
leaves it at its (j+1)-th event or at the end of observation, whichever is
first. Membership at time ``t`` uses "j events strictly before t" and
"observation end >= t", so a subject is at risk at its own transition time
and a subject censored at ``t`` is still at risk at ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from recurrent_mean.event_data import CohortDataset


@dataclass(frozen=True)
class EventTimeGrid:
    """Distinct times at which at least one event of any order occurs."""

    times: np.ndarray

    def __len__(self):
        return self.times.size

    def __iter__(self):
        return iter(self.times.tolist())

    def index(self, t: float) -> int:
        i = int(np.searchsorted(self.times, t))
        if i == self.times.size or self.times[i] != t:
            raise KeyError(f"{t!r} is not a grid time")
        return i


@dataclass(frozen=True)
class StratumSnapshot:
    stratum: int
    time: float
    at_risk: int
    events: int


def event_time_grid(cohort: CohortDataset) -> EventTimeGrid:
    times = np.unique(cohort.event_times)
    times.flags.writeable = False
    return EventTimeGrid(times)


def stratum_intervals(cohort: CohortDataset, j: int):
    """Entry and exit times of every subject that ever reaches stratum ``j``.

    Returns
    -------
    entry, exit, transition : ndarray
        ``transition`` is True where the exit is the (j+1)-th event rather
        than the end of observation.
    """
    subj, entry = cohort.order_times(j)
    counts = cohort.event_counts[subj]
    transition = counts >= j + 1
    exit_ = cohort.observation_end[subj].copy()
    idx = cohort.offsets[subj[transition]] + j
    exit_[transition] = cohort.event_times[idx]
    return entry, exit_, transition


def stratum_snapshot(cohort: CohortDataset, j: int, t: float) -> StratumSnapshot:
    """At-risk and event counts of stratum ``j`` at time ``t``.

    ``at_risk`` counts subjects with exactly ``j`` events strictly before
    ``t`` whose observation has not ended before ``t``; ``events`` counts
    subjects whose (j+1)-th event is at ``t``.
    """
    if j < 0:
        raise ValueError("stratum must be non-negative")
    entry, exit_, transition = stratum_intervals(cohort, j)
    at_risk = int(np.count_nonzero((entry < t) & (t <= exit_)))
    events = int(np.count_nonzero(transition & (exit_ == t)))
    return StratumSnapshot(j, float(t), at_risk, events)


def stratum_table(cohort: CohortDataset, j: int, grid: EventTimeGrid | None = None):
    """Vectorised :func:`stratum_snapshot` over every grid time.

    Returns ``(at_risk, events)`` integer arrays aligned with ``grid.times``.
    """
    if grid is None:
        grid = event_time_grid(cohort)
    times = grid.times
    entry, exit_, transition = stratum_intervals(cohort, j)
    # #{entry < t <= exit} = #{entry < t} - #{exit < t}, as entry <= exit
    at_risk = np.searchsorted(np.sort(entry), times, side="left") - np.searchsorted(
        np.sort(exit_), times, side="left"
    )
    hit = np.searchsorted(times, exit_[transition])
    events = np.bincount(hit, minlength=times.size)[: times.size]
    return at_risk.astype(np.int64), events.astype(np.int64)


def at_risk_total(cohort: CohortDataset, grid: EventTimeGrid | None = None) -> np.ndarray:
    """Subjects still under observation (end >= t) at every grid time."""
    if grid is None:
        grid = event_time_grid(cohort)
    ends = np.sort(cohort.observation_end)
    return ends.size - np.searchsorted(ends, grid.times, side="left")


def events_total(cohort: CohortDataset, grid: EventTimeGrid | None = None) -> np.ndarray:
    """Events of any order at every grid time."""
    if grid is None:
        grid = event_time_grid(cohort)
    hit = np.searchsorted(grid.times, cohort.event_times)
    return np.bincount(hit, minlength=len(grid))[: len(grid)]
