"""Synthetic recurrent-event cohorts and replicate studies.

Random numbers
--------------
All draws come from Philox4x64-10, the counter-based generator shipped as
``numpy.random.Philox``. A cohort seed (0 <= seed < 2**64) is expanded to
the 128-bit Philox key with ``numpy.random.SeedSequence(seed)``.
Subject ``i`` owns the Philox counter blocks ``[i*B, (i+1)*B)``, where
``B = ceil((max_events + 1) / 4)``; each block yields four 64-bit words, so
a subject's substream depends only on (seed, i). Word ``w`` is turned into
a uniform ``u = ((w >> 11) + 0.5) / 2**53`` in (0, 1) and into a unit
exponential ``-log(u)``. Subject ``i`` uses words ``0..max_events-1`` of
its substream for the inter-event gaps and word ``max_events`` for the
drop-out time, whatever the parameters; unused draws are discarded.

Replicate ``r`` of a study with base seed ``s`` simulates with cohort seed
``SeedSequence(s, spawn_key=(r,)).generate_state(1, uint64)[0]``.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from recurrent_mean._io import atomic_write_text, format_decimal
from recurrent_mean.estimators import nelson_aalen_mean, proposed_mean
from recurrent_mean.event_data import CohortDataset, EmptyCohort

REPLICATE_HEADER = ("replicate", "na_at_horizon", "proposed_at_horizon", "max_count")
PRNG_ALGORITHM = "Philox4x64-10 (numpy.random.Philox), key from SeedSequence"
_WORDS_PER_BLOCK = 4
_TWO_POW_53 = float(2**53)


@dataclass(frozen=True)
class ScenarioParams:
    """Cohort design. Rates are per day; times are in days.

    ``gap_rates[k]`` is the exponential rate of the gap between event ``k``
    and event ``k+1`` (event 0 being time 0). A rate of 0 means the next
    event never happens.
    """

    n_subjects: int
    gap_rates: tuple[float, ...]
    dropout_rate: float = 0.0
    admin_cutoff: float = 370.0

    def __post_init__(self):
        object.__setattr__(self, "gap_rates", tuple(float(r) for r in self.gap_rates))
        if int(self.n_subjects) != self.n_subjects or self.n_subjects < 0:
            raise ValueError("n_subjects must be a positive integer")
        if self.n_subjects == 0:
            raise EmptyCohort("n_subjects is 0")
        if not self.gap_rates:
            raise ValueError("at least one gap rate is required")
        rates = self.gap_rates + (self.dropout_rate,)
        if any(not math.isfinite(r) or r < 0 for r in rates):
            raise ValueError("rates must be finite and non-negative")
        if not (math.isfinite(self.admin_cutoff) and self.admin_cutoff > 0):
            raise ValueError("admin_cutoff must be a positive time")

    @property
    def max_events(self) -> int:
        return len(self.gap_rates)


def poisson_scenario(n_subjects: int = 100) -> ScenarioParams:
    """Constant rate 0.003/day for both of up to two events, no drop-out, cut at day 370."""
    return ScenarioParams(n_subjects, (0.003, 0.003), 0.0, 370.0)


def event_dependent_scenario(n_subjects: int = 100) -> ScenarioParams:
    """Rate 0.002/day to the first event, 0.001/day to the second, drop-out 0.001/day."""
    return ScenarioParams(n_subjects, (0.002, 0.001), 0.001, 370.0)


@dataclass(frozen=True)
class ReplicateSummary:
    replicate_index: int
    na_at_horizon: float
    proposed_at_horizon: float
    max_count_observed: int


def _check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be in [0, 2**64)")
    return seed


def philox_key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(_check_seed(seed)).generate_state(2, np.uint64)


def replicate_seed(base_seed: int, replicate: int) -> int:
    ss = np.random.SeedSequence(_check_seed(base_seed), spawn_key=(int(replicate),))
    return int(ss.generate_state(1, np.uint64)[0])


def subject_exponentials(seed: int, start: int, stop: int, width: int) -> np.ndarray:
    """Unit exponentials of subjects ``start..stop-1``, shape ``(stop-start, width)``."""
    blocks = -(-width // _WORDS_PER_BLOCK)
    bg = np.random.Philox(key=philox_key(seed), counter=[start * blocks, 0, 0, 0])
    words = bg.random_raw((stop - start) * blocks * _WORDS_PER_BLOCK)
    words = words.reshape(stop - start, blocks * _WORDS_PER_BLOCK)[:, :width]
    u = ((words >> np.uint64(11)).astype(np.float64) + 0.5) / _TWO_POW_53
    return -np.log(u)


def _subject_ids(n):
    width = len(str(n))
    return [f"S{i:0{width}d}" for i in range(1, n + 1)]


def simulate_cohort(params: ScenarioParams, seed: int) -> CohortDataset:
    """Draw one cohort; identical ``(params, seed)`` give identical cohorts."""
    n, m = params.n_subjects, params.max_events
    e = subject_exponentials(seed, 0, n, m + 1)
    rates = np.array(params.gap_rates)
    with np.errstate(divide="ignore"):
        gaps = np.where(rates > 0, e[:, :m] / np.where(rates > 0, rates, 1.0), np.inf)
        dropout = e[:, m] / params.dropout_rate if params.dropout_rate > 0 else np.full(n, np.inf)
    times = np.cumsum(gaps, axis=1)
    end = np.minimum(dropout, params.admin_cutoff)
    kept = times <= end[:, None]
    counts = kept.sum(axis=1)
    offsets = np.r_[0, np.cumsum(counts)]
    return CohortDataset.from_arrays(
        _subject_ids(n), end, dropout < params.admin_cutoff, offsets, times[kept]
    )


def summarize_replicate(params: ScenarioParams, base_seed: int, replicate: int) -> ReplicateSummary:
    cohort = simulate_cohort(params, replicate_seed(base_seed, replicate))
    t = params.admin_cutoff
    return ReplicateSummary(
        replicate,
        nelson_aalen_mean(cohort)(t),
        proposed_mean(cohort).mean(t),
        int(cohort.event_counts.max()),
    )


def run_replicates(
    params: ScenarioParams, n_replicates: int, base_seed: int, workers: int = 1
) -> list[ReplicateSummary]:
    """Simulate and estimate ``n_replicates`` cohorts, both estimators at the cutoff.

    Results are ordered by replicate index and do not depend on ``workers``.
    """
    if n_replicates < 1:
        raise ValueError("n_replicates must be >= 1")
    _check_seed(base_seed)
    if workers <= 1:
        return [summarize_replicate(params, base_seed, r) for r in range(n_replicates)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda r: summarize_replicate(params, base_seed, r), range(n_replicates)))


def replicates_csv(summaries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(REPLICATE_HEADER)
    for s in summaries:
        w.writerow(
            (s.replicate_index, format_decimal(s.na_at_horizon),
             format_decimal(s.proposed_at_horizon), s.max_count_observed)
        )
    return buf.getvalue()


def write_replicates_csv(summaries, path) -> None:
    atomic_write_text(path, replicates_csv(summaries))


def read_replicates_csv(path) -> list[ReplicateSummary]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != REPLICATE_HEADER:
            raise ValueError(f"unexpected header {header}")
        return [
            ReplicateSummary(int(r), float(na), float(p), int(c)) for r, na, p, c in reader
        ]
