"""Subject and cohort data model for recurrent-event records.

A cohort is stored column-wise: one entry per subject for the identifier,
end of observation and end kind, plus a flat array of event times indexed
by per-subject offsets (CSR layout). This keeps million-subject simulated
cohorts cheap while still exposing per-subject ``SubjectHistory`` views.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from recurrent_mean._io import atomic_write_text, format_time

CSV_HEADER = ("subject_id", "time", "kind")


class EndKind(enum.Enum):
    DROPOUT = "DROPOUT"
    ADMINISTRATIVE = "ADMINISTRATIVE"


class RecordKind(enum.Enum):
    EVENT = "EVENT"
    CENSOR = "CENSOR"


class CohortValidationError(ValueError):
    """Base class for invalid cohort input. ``str(err)`` is a one-line diagnostic."""

    def __str__(self):
        return f"{type(self).__name__}: {super().__str__()}"


class MissingCensor(CohortValidationError):
    pass


class MultipleCensor(CohortValidationError):
    pass


class EventAfterCensor(CohortValidationError):
    pass


class DuplicateEventTime(CohortValidationError):
    pass


class NonPositiveTime(CohortValidationError):
    pass


class EmptyCohort(CohortValidationError):
    pass


class DuplicateSubject(CohortValidationError):
    pass


class MalformedRecord(CohortValidationError):
    pass


@dataclass(frozen=True)
class SubjectHistory:
    """One subject's ordered event times and end of observation (days).

    The k-th entry of ``event_times`` is the subject's event of order k
    (1-based).
    """

    subject_id: object
    event_times: tuple[float, ...]
    observation_end: float
    end_kind: EndKind = EndKind.ADMINISTRATIVE

    def __post_init__(self):
        times = tuple(float(t) for t in self.event_times)
        object.__setattr__(self, "event_times", times)
        object.__setattr__(self, "observation_end", float(self.observation_end))
        _check_subject(self.subject_id, times, self.observation_end)

    @property
    def n_events(self) -> int:
        return len(self.event_times)


def _check_subject(sid, times, end):
    if not math.isfinite(end) or end <= 0:
        raise NonPositiveTime(f"subject {sid}: observation end {end!r} is not a positive time")
    for t in times:
        if not math.isfinite(t) or t <= 0:
            raise NonPositiveTime(f"subject {sid}: event time {t!r} is not a positive time")
    for a, b in zip(times, times[1:]):
        if b == a:
            raise DuplicateEventTime(f"subject {sid}: two events at time {a!r}")
        if b < a:
            raise ValueError(f"subject {sid}: event times are not sorted")
    if times and times[-1] > end:
        raise EventAfterCensor(
            f"subject {sid}: event at {times[-1]!r} after end of observation {end!r}"
        )


@dataclass(frozen=True)
class CountPath:
    """Counting path X_t of one subject: 0 before the first breakpoint,
    ``counts[i]`` on ``[breakpoints[i], breakpoints[i+1])``."""

    breakpoints: tuple[float, ...]
    counts: tuple[int, ...]

    def __call__(self, t: float) -> int:
        return int(np.searchsorted(self.breakpoints, t, side="right"))


class CohortDataset:
    """Immutable, validated collection of subjects sharing time origin 0.

    Parameters
    ----------
    subjects : iterable of SubjectHistory
        Subject order is preserved.

    Use :meth:`from_arrays` to build large cohorts without materialising
    per-subject objects.
    """

    __slots__ = ("_ids", "_obs_end", "_dropout", "_offsets", "_times", "_subjects")

    def __init__(self, subjects: Iterable[SubjectHistory]):
        subjects = tuple(subjects)
        offsets = np.zeros(len(subjects) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([s.n_events for s in subjects])
        times = np.fromiter(
            (t for s in subjects for t in s.event_times), dtype=np.float64, count=int(offsets[-1])
        )
        self._init(
            [s.subject_id for s in subjects],
            np.array([s.observation_end for s in subjects], dtype=np.float64),
            np.array([s.end_kind is EndKind.DROPOUT for s in subjects], dtype=bool),
            offsets,
            times,
            check_subjects=False,
        )
        self._subjects = subjects

    @classmethod
    def from_arrays(cls, subject_ids, observation_end, dropout, offsets, event_times):
        """Build a cohort from columnar arrays.

        ``event_times[offsets[i]:offsets[i+1]]`` are subject ``i``'s event
        times in increasing order; ``dropout[i]`` is True when the subject's
        observation ended by drop-out rather than administratively.
        """
        self = cls.__new__(cls)
        self._init(subject_ids, observation_end, dropout, offsets, event_times, check_subjects=True)
        self._subjects = None
        return self

    def _init(self, ids, obs_end, dropout, offsets, times, check_subjects):
        ids = tuple(ids)
        if not ids:
            raise EmptyCohort("cohort has no subjects")
        if len(set(ids)) != len(ids):
            raise DuplicateSubject("subject identifiers are not unique")
        obs_end = np.array(obs_end, dtype=np.float64)
        dropout = np.array(dropout, dtype=bool)
        offsets = np.array(offsets, dtype=np.int64)
        times = np.array(times, dtype=np.float64)
        n = len(ids)
        if obs_end.shape != (n,) or dropout.shape != (n,) or offsets.shape != (n + 1,):
            raise ValueError("column lengths do not match the number of subjects")
        if offsets[0] != 0 or offsets[-1] != times.size or np.any(np.diff(offsets) < 0):
            raise ValueError("offsets do not index event_times")
        if check_subjects:
            _check_columns(ids, obs_end, offsets, times)
        for arr in (obs_end, dropout, offsets, times):
            arr.flags.writeable = False
        self._ids = ids
        self._obs_end = obs_end
        self._dropout = dropout
        self._offsets = offsets
        self._times = times

    # columnar views (read-only arrays)

    @property
    def subject_ids(self) -> tuple:
        return self._ids

    @property
    def observation_end(self) -> np.ndarray:
        return self._obs_end

    @property
    def dropout(self) -> np.ndarray:
        return self._dropout

    @property
    def offsets(self) -> np.ndarray:
        return self._offsets

    @property
    def event_times(self) -> np.ndarray:
        """All event times, grouped by subject."""
        return self._times

    @property
    def event_counts(self) -> np.ndarray:
        return np.diff(self._offsets)

    @property
    def event_subject(self) -> np.ndarray:
        """Subject index of each entry of :attr:`event_times`."""
        return np.repeat(np.arange(len(self)), self.event_counts)

    @property
    def event_order(self) -> np.ndarray:
        """1-based order of each entry of :attr:`event_times` within its subject."""
        idx = np.arange(self._times.size)
        return idx - np.repeat(self._offsets[:-1], self.event_counts) + 1

    def order_times(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Subjects with at least ``j`` events and the time of their j-th event.

        For ``j == 0`` every subject is returned with time 0.
        """
        if j == 0:
            return np.arange(len(self)), np.zeros(len(self))
        subj = np.flatnonzero(self.event_counts >= j)
        return subj, self._times[self._offsets[subj] + (j - 1)]

    # summary attributes

    @property
    def n_subjects(self) -> int:
        return len(self._ids)

    @property
    def max_order(self) -> int:
        return int(self.event_counts.max())

    @property
    def horizon(self) -> float:
        return float(self._obs_end.max())

    @property
    def subjects(self) -> tuple[SubjectHistory, ...]:
        if self._subjects is None:
            kinds = np.where(self._dropout, EndKind.DROPOUT, EndKind.ADMINISTRATIVE)
            off = self._offsets
            subjects = tuple(
                SubjectHistory(
                    self._ids[i], tuple(self._times[off[i] : off[i + 1]].tolist()),
                    float(self._obs_end[i]), kinds[i],
                )
                for i in range(len(self))
            )
            object.__setattr__(self, "_subjects", subjects)
        return self._subjects

    def __setattr__(self, name, value):
        if hasattr(self, "_subjects"):
            raise AttributeError("CohortDataset is immutable")
        object.__setattr__(self, name, value)

    def __len__(self):
        return len(self._ids)

    def __iter__(self) -> Iterator[SubjectHistory]:
        return iter(self.subjects)

    def __eq__(self, other):
        if not isinstance(other, CohortDataset):
            return NotImplemented
        return (
            self._ids == other._ids
            and np.array_equal(self._obs_end, other._obs_end)
            and np.array_equal(self._dropout, other._dropout)
            and np.array_equal(self._offsets, other._offsets)
            and np.array_equal(self._times, other._times)
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"CohortDataset(n_subjects={len(self)}, events={self._times.size}, "
            f"max_order={self.max_order}, horizon={self.horizon:g})"
        )


def _check_columns(ids, obs_end, offsets, times):
    if not np.all(np.isfinite(obs_end) & (obs_end > 0)):
        i = int(np.flatnonzero(~(np.isfinite(obs_end) & (obs_end > 0)))[0])
        raise NonPositiveTime(f"subject {ids[i]}: observation end {obs_end[i]!r} is not a positive time")
    subj = np.repeat(np.arange(len(ids)), np.diff(offsets))
    bad = ~(np.isfinite(times) & (times > 0))
    if bad.any():
        k = int(np.flatnonzero(bad)[0])
        raise NonPositiveTime(f"subject {ids[subj[k]]}: event time {times[k]!r} is not a positive time")
    late = times > obs_end[subj]
    if late.any():
        k = int(np.flatnonzero(late)[0])
        raise EventAfterCensor(
            f"subject {ids[subj[k]]}: event at {times[k]!r} after end of observation {obs_end[subj[k]]!r}"
        )
    same = subj[1:] == subj[:-1]
    step = np.diff(times)
    if np.any(same & (step == 0)):
        k = int(np.flatnonzero(same & (step == 0))[0])
        raise DuplicateEventTime(f"subject {ids[subj[k]]}: two events at time {times[k]!r}")
    if np.any(same & (step < 0)):
        raise ValueError("event times are not sorted within subject")


def count_at(subject: SubjectHistory, t: float) -> int:
    """Number of the subject's events at or before ``t``."""
    return int(np.searchsorted(subject.event_times, t, side="right"))


def count_path(subject: SubjectHistory) -> CountPath:
    return CountPath(subject.event_times, tuple(range(1, subject.n_events + 1)))


def counts_at(cohort: CohortDataset, t: float) -> np.ndarray:
    """Vectorised :func:`count_at` over every subject of the cohort."""
    hit = cohort.event_times <= t
    return np.bincount(cohort.event_subject[hit], minlength=len(cohort))


def _parse_kind(kind) -> RecordKind:
    if isinstance(kind, RecordKind):
        return kind
    try:
        return RecordKind(kind)
    except ValueError:
        raise MalformedRecord(f"kind {kind!r} is not one of EVENT, CENSOR") from None


def validate_cohort(records: Iterable[Sequence]) -> CohortDataset:
    """Validate raw ``(subject_id, time, kind)`` records into a cohort.

    Record order is irrelevant: subjects are sorted by identifier and event
    times within a subject are sorted. Every subject needs exactly one
    CENSOR record, whose time becomes its end of observation. Subjects whose
    observation ends before the latest end in the cohort are marked as
    drop-outs; the rest as administratively censored.
    """
    events: dict = {}
    censor: dict = {}
    for rec in records:
        sid, time, kind = rec
        kind = _parse_kind(kind)
        time = float(time)
        if not math.isfinite(time):
            raise MalformedRecord(f"subject {sid}: time {time!r} is not finite")
        events.setdefault(sid, [])
        if kind is RecordKind.EVENT:
            events[sid].append(time)
        elif sid in censor:
            raise MultipleCensor(f"subject {sid}: more than one CENSOR record")
        else:
            censor[sid] = time
    if not events:
        raise EmptyCohort("no records")
    ids = sorted(events, key=lambda s: (str(type(s)), s))
    for sid in ids:
        if sid not in censor:
            raise MissingCensor(f"subject {sid}: no CENSOR record")
    horizon = max(censor.values())
    subjects = []
    for sid in ids:
        end = censor[sid]
        kind = EndKind.DROPOUT if end < horizon else EndKind.ADMINISTRATIVE
        subjects.append(SubjectHistory(sid, tuple(sorted(events[sid])), end, kind))
    return CohortDataset(subjects)


def iter_records(cohort: CohortDataset) -> Iterator[tuple[object, float, RecordKind]]:
    """Inverse of :func:`validate_cohort`: event records then one CENSOR per subject."""
    for s in cohort:
        for t in s.event_times:
            yield s.subject_id, t, RecordKind.EVENT
        yield s.subject_id, s.observation_end, RecordKind.CENSOR


def cohort_to_csv(cohort: CohortDataset) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    ids, off, times, ends = cohort.subject_ids, cohort.offsets, cohort.event_times, cohort.observation_end
    for i, sid in enumerate(ids):
        for t in times[off[i] : off[i + 1]]:
            w.writerow((sid, format_time(t), "EVENT"))
        w.writerow((sid, format_time(ends[i]), "CENSOR"))
    return buf.getvalue()


def write_cohort_csv(cohort: CohortDataset, path) -> None:
    atomic_write_text(path, cohort_to_csv(cohort))


def parse_cohort_csv(text: str) -> CohortDataset:
    """Parse the ``subject_id,time,kind`` format. Errors name the offending line."""
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
        raise MalformedRecord(f"line 1: header must be {','.join(CSV_HEADER)}")
    records = []
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise MalformedRecord(f"line {lineno}: expected 3 fields, got {len(row)}")
        sid, time, kind = row
        if kind not in ("EVENT", "CENSOR"):
            raise MalformedRecord(f"line {lineno}: kind {kind!r} is not one of EVENT, CENSOR")
        try:
            value = float(time)
        except ValueError:
            raise MalformedRecord(f"line {lineno}: time {time!r} is not a number") from None
        if not math.isfinite(value):
            raise MalformedRecord(f"line {lineno}: time {time!r} is not finite")
        if value < 0:
            raise MalformedRecord(f"line {lineno}: time {time!r} is negative")
        records.append((sid, value, kind))
    return validate_cohort(records)


def read_cohort_csv(path: str | os.PathLike) -> CohortDataset:
    with open(path, newline="") as fh:
        return parse_cohort_csv(fh.read())
