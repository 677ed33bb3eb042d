"""
Variance bound and incidence-rate interval
==========================================

The variance of the count is only bounded, by mu * (C - mu), where C is a
per-subject observed count: the largest (default) or the smallest. The
interval uses that bound as if it were the variance, scaled by 1/sqrt(n).
"""

from recurrent_mean import BoundMode, event_dependent_scenario, incidence_rate_ci, simulate_cohort, variance_upper_bound
from recurrent_mean.estimators import estimate_table

cohort = simulate_cohort(event_dependent_scenario(400), seed=5)

for mode in BoundMode:
    vb = variance_upper_bound(cohort, 370, mode)
    ci = incidence_rate_ci(cohort, 370, 0.95, mode)
    flag = " (degenerate)" if vb.degenerate else ""
    print(f"{mode.name:9s} C={vb.count_reference} bound={vb.bound:.4f}{flag}  "
          f"95% CI [{ci.low:.4f}, {ci.high:.4f}] around {ci.point:.4f}")

###############################################################################
# Width shrinks like 1/sqrt(n).

for n in (100, 400, 1600, 6400):
    ci = incidence_rate_ci(simulate_cohort(event_dependent_scenario(n), seed=5), 370)
    print(f"n={n:5d} half-width {ci.half_width:.4f}  half-width*sqrt(n) {ci.half_width * n ** 0.5:.3f}")

###############################################################################
# The export table holds the same quantities at every event time.

table = estimate_table(cohort, 370)
for row in list(table.rows())[-3:]:
    print(["%.6g" % x for x in row])
