"""Ground-truth construction from eye-tracker fixation logs."""

from camobench.builder.delays import (
    DelayOutcome,
    aggregate_instance_delay,
    median,
    normalize_delays,
    per_observer_delay,
)
from camobench.builder.logs import (
    read_delay_table,
    read_fixation_log,
    write_delay_table,
    write_fixation_log,
)
from camobench.builder.pipeline import BuildResult, build_dataset
from camobench.builder.ranks import assign_ranks, rank_distribution
from camobench.builder.render import fixation_density, render_fixation_map, render_rank_map

__all__ = [
    "BuildResult",
    "DelayOutcome",
    "aggregate_instance_delay",
    "assign_ranks",
    "build_dataset",
    "fixation_density",
    "median",
    "normalize_delays",
    "per_observer_delay",
    "rank_distribution",
    "read_delay_table",
    "read_fixation_log",
    "render_fixation_map",
    "render_rank_map",
    "write_delay_table",
    "write_fixation_log",
]
