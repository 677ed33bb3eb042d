"""Non-parametric mean event count for recurrent events whose intensity
changes with each successive event, with a variance upper bound and
incidence-rate confidence intervals."""

from recurrent_mean.event_data import (
    CohortDataset,
    CohortValidationError,
    CountPath,
    DuplicateEventTime,
    EmptyCohort,
    EndKind,
    EventAfterCensor,
    MalformedRecord,
    MissingCensor,
    NonPositiveTime,
    RecordKind,
    SubjectHistory,
    count_at,
    count_path,
    read_cohort_csv,
    validate_cohort,
    write_cohort_csv,
)
from recurrent_mean.estimators import (
    BoundMode,
    IncidenceRateCI,
    MeanEstimate,
    VarianceBound,
    estimate_table,
    incidence_rate_ci,
    km_conditional_failure,
    nelson_aalen_mean,
    occupancy_probability,
    proposed_mean,
    stratum_hazard_increments,
    variance_upper_bound,
)
from recurrent_mean.risk_model import EventTimeGrid, StratumSnapshot, event_time_grid, stratum_snapshot
from recurrent_mean.simulator import (
    ReplicateSummary,
    ScenarioParams,
    event_dependent_scenario,
    poisson_scenario,
    run_replicates,
    simulate_cohort,
)
from recurrent_mean.stepfunction import StepFunction

__version__ = "0.1.0"
