import numpy as np
import pytest
from hypothesis import strategies as st

from recurrent_mean.event_data import CohortDataset, EndKind, SubjectHistory, validate_cohort


def records(rows):
    return [(sid, t, kind) for sid, t, kind in rows]


@pytest.fixture
def d1():
    return validate_cohort([
        ("S1", 1, "EVENT"), ("S1", 3, "CENSOR"),
        ("S2", 2, "EVENT"), ("S2", 3, "CENSOR"),
        ("S3", 3, "CENSOR"),
    ])


@pytest.fixture
def d2():
    return validate_cohort([
        ("A", 1, "EVENT"), ("A", 2, "EVENT"), ("A", 3, "CENSOR"),
        ("B", 3, "CENSOR"),
    ])


@pytest.fixture
def d3():
    return validate_cohort([
        ("S1", 1, "EVENT"), ("S1", 1.5, "CENSOR"),
        ("S2", 2, "EVENT"), ("S2", 3, "CENSOR"),
        ("S3", 3, "CENSOR"),
    ])


def as_plain(cohort):
    return [(s.event_times, s.observation_end) for s in cohort]


@st.composite
def cohorts(draw, max_subjects=8, max_events=4, lattice=12, dropout=True):
    """Small cohorts on a half-day lattice so that cross-subject ties are common."""
    n = draw(st.integers(1, max_subjects))
    cutoff = lattice / 2 + 0.5
    subjects = []
    for i in range(n):
        k = draw(st.integers(0, max_events))
        times = sorted(draw(st.sets(st.integers(1, lattice), min_size=k, max_size=k)))
        times = [x / 2 for x in times]
        if dropout and draw(st.booleans()):
            lo = int(times[-1] * 2) if times else 1
            end = draw(st.integers(lo, lattice)) / 2
        else:
            end = cutoff
        kind = EndKind.DROPOUT if end < cutoff else EndKind.ADMINISTRATIVE
        subjects.append(SubjectHistory(f"S{i}", tuple(times), end, kind))
    return CohortDataset(subjects)


def random_cohort(rng, n, max_events, dropout_prob=0.0, lattice=None, cutoff=10.0):
    """Cohort from a numpy Generator; ``lattice`` rounds times to force ties."""
    subjects = []
    for i in range(n):
        k = int(rng.integers(0, max_events + 1))
        if lattice:
            pts = rng.choice(np.arange(1, int(cutoff * lattice) + 1), size=k, replace=False) / lattice
        else:
            pts = rng.uniform(0, cutoff, size=k)
        times = tuple(sorted(float(x) for x in pts))
        end = cutoff
        if rng.random() < dropout_prob:
            end = float(rng.uniform(times[-1] if times else 0.0, cutoff))
            if lattice:
                end = max(np.ceil(end * lattice) / lattice, 1 / lattice)
        kind = EndKind.DROPOUT if end < cutoff else EndKind.ADMINISTRATIVE
        subjects.append(SubjectHistory(f"S{i:03d}", times, end, kind))
    return CohortDataset(subjects)


_acceptance = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    _acceptance[marker.args[0]] = (item.name, call.excinfo is None, call.duration)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        name, ok, dur = _acceptance[number]
        terminalreporter.write_line(
            f"criterion {number}: {'PASS' if ok else 'FAIL'}  {name}  ({dur:.2f} s)"
        )
