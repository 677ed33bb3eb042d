"""
Stratified risk sets and the mean count on three tiny cohorts
==============================================================

Three cohorts small enough to check by hand. Each subject has at most a
couple of events; everyone is followed to day 3 except, in the third
cohort, a subject who drops out at day 1.5.
"""

from recurrent_mean import (
    event_time_grid,
    km_conditional_failure,
    nelson_aalen_mean,
    occupancy_probability,
    proposed_mean,
    stratum_snapshot,
    validate_cohort,
)

cohorts = {
    "one event each, no drop-out": validate_cohort([
        ("S1", 1, "EVENT"), ("S1", 3, "CENSOR"),
        ("S2", 2, "EVENT"), ("S2", 3, "CENSOR"),
        ("S3", 3, "CENSOR"),
    ]),
    "two events in one subject": validate_cohort([
        ("A", 1, "EVENT"), ("A", 2, "EVENT"), ("A", 3, "CENSOR"),
        ("B", 3, "CENSOR"),
    ]),
    "drop-out after a first event": validate_cohort([
        ("S1", 1, "EVENT"), ("S1", 1.5, "CENSOR"),
        ("S2", 2, "EVENT"), ("S2", 3, "CENSOR"),
        ("S3", 3, "CENSOR"),
    ]),
}

###############################################################################
# Risk sets by event order. Stratum j holds subjects that currently have
# exactly j events; a subject enters it at its j-th event.

for name, cohort in cohorts.items():
    print(f"\n== {name}")
    for t in event_time_grid(cohort):
        for j in range(cohort.max_order + 1):
            snap = stratum_snapshot(cohort, j, t)
            print(f"  t={t:g} stratum {j}: at risk {snap.at_risk}, events {snap.events}")

###############################################################################
# The conditional failure curves and the occupancy probabilities built from
# them. Occupancies sum to one at every time.

for name, cohort in cohorts.items():
    grid = event_time_grid(cohort)
    print(f"\n== {name}")
    for j in range(1, cohort.max_order + 1):
        f = km_conditional_failure(cohort, j, grid)
        print(f"  F_{j}:", [round(f(t), 4) for t in (0.5, 1, 2, 3)])
    occ = [occupancy_probability(cohort, j, grid) for j in range(cohort.max_order + 1)]
    for t in (0.5, 1, 2, 3):
        print(f"  t={t}: P(N=j) =", [round(p(t), 4) for p in occ], " sum =", sum(p(t) for p in occ))

###############################################################################
# Mean count at day 3 against Nelson-Aalen. They agree without drop-out;
# with the drop-out the subject's stratum loses a member and the estimates
# part ways (2/3 against 5/6).

for name, cohort in cohorts.items():
    mu = proposed_mean(cohort).mean(3)
    na = nelson_aalen_mean(cohort)(3)
    print(f"{name:32s} proposed {mu:.6f}   Nelson-Aalen {na:.6f}")
