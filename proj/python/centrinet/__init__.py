"""Information-centrality anomaly detection experiments on simulated meshes."""

from ._core import (
    AdmissionPolicy,
    ConfigError,
    DomainError,
    ExperimentConfig,
    ParseError,
    Topology,
    UsageError,
    betweenness_centrality,
    config_keys,
    connected_unit_disk,
    degree_centrality,
    information_centrality,
    is_connected,
    load_config,
    pairwise_information,
    parse_config,
    preset_config,
    rank_descending,
    run_experiment,
    run_in_memory,
    shortest_path_lengths,
    top_fraction,
)


def config(preset="paper", **overrides):
    """Preset values with keyword overrides, validated."""
    values = {"preset": preset}
    values.update({k: str(v) for k, v in overrides.items()})
    return parse_config("", values)


__all__ = [
    "AdmissionPolicy",
    "ConfigError",
    "DomainError",
    "ExperimentConfig",
    "ParseError",
    "Topology",
    "UsageError",
    "betweenness_centrality",
    "config",
    "config_keys",
    "connected_unit_disk",
    "degree_centrality",
    "information_centrality",
    "is_connected",
    "load_config",
    "pairwise_information",
    "parse_config",
    "preset_config",
    "rank_descending",
    "run_experiment",
    "run_in_memory",
    "shortest_path_lengths",
    "top_fraction",
]
