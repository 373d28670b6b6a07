"""Level-based flooding search simulator.

Thin convenience layer over the compiled core: topology generation, the
packet codec, level building, and the experiment driver.
"""

from ._core import (
    NO_TARGET,
    ExperimentSpec,
    ScenarioConfig,
    Topology,
    __version__,
    average_degree,
    compare,
    csv_header,
    decode,
    default_threshold_p,
    encode,
    expected_average_degree,
    generate_topology,
    hop_distance_oracle,
    is_connected,
    level_building_levels,
    run_experiment,
    run_experiment_csv,
    scenario_preset,
)

__all__ = [
    "NO_TARGET",
    "ExperimentSpec",
    "ScenarioConfig",
    "Topology",
    "__version__",
    "average_degree",
    "compare",
    "csv_header",
    "decode",
    "default_threshold_p",
    "encode",
    "expected_average_degree",
    "generate_topology",
    "hop_distance_oracle",
    "is_connected",
    "level_building_levels",
    "run_experiment",
    "run_experiment_csv",
    "scenario_preset",
]
