"""
Constant-rate process without drop-out
======================================

Subjects have up to two events, each gap exponential with rate 0.003/day,
and everyone is followed to day 370. With no drop-out the proposed mean
and the Nelson-Aalen mean coincide replicate by replicate.
"""

import math

from recurrent_mean import nelson_aalen_mean, poisson_scenario, proposed_mean, run_replicates, simulate_cohort

summaries = run_replicates(poisson_scenario(100), n_replicates=100, base_seed=31)
gaps = [abs(s.proposed_at_horizon - s.na_at_horizon) for s in summaries]
print("largest |proposed - Nelson-Aalen| over 100 replicates:", max(gaps))
print("average proposed mean at day 370:", sum(s.proposed_at_horizon for s in summaries) / 100)

###############################################################################
# The process is stopped after two events, so its mean at day 370 is
# P(first by 370) + P(second by 370), not rate * time = 1.11.

rt = 0.003 * 370
truncated = (1 - math.exp(-rt)) + (1 - math.exp(-rt) * (1 + rt))
print(f"mean of the two-event process at 370: {truncated:.6f}  (rate x time = {rt:.2f})")

###############################################################################
# One large cohort pins the estimate down.

big = simulate_cohort(poisson_scenario(1_000_000), seed=2024)
print(f"n = 10^6: proposed {proposed_mean(big).mean(370):.5f}, Nelson-Aalen {nelson_aalen_mean(big)(370):.5f}")
