"""Graphons over sigma-finite measure spaces: sampling, metrics, densities."""

__version__ = "0.1.0"

from .graphon_core import (  # noqa: F401
    AnalyticGraphon,
    CaronFoxGraphon,
    GraphonError,
    InfiniteBlockGraphon,
    MixedMembershipGraphon,
    Partition,
    RegionIndicatorGraphon,
    StepGraphon,
    Truncation,
    average_over_partition,
    constant_graphon,
    degree_profile,
    discretize,
    evaluate,
    flatten_to_line,
    l1_norm,
    load_graphon_file,
    load_graphon_spec,
    save_graphon_file,
    stretch,
    truncate_tail,
    zero_graphon,
)
