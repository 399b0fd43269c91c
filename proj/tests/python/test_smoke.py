import math

import pytest

import centrinet as cn


def path_graph(n):
    return cn.Topology(n, [(i, i + 1) for i in range(n - 1)])


def test_topology_basics():
    t = path_graph(4)
    assert len(t) == 4
    assert t.edges == [(0, 1), (1, 2), (2, 3)]
    assert t.neighbors(1) == [0, 2]
    assert t.degree(3) == 1
    assert t.has_edge(2, 1)
    assert not t.has_edge(0, 3)
    assert cn.shortest_path_lengths(t, 0) == [0, 1, 2, 3]


def test_unreachable_is_none():
    t = cn.Topology(3, [(0, 1)])
    assert not cn.is_connected(t)
    assert cn.shortest_path_lengths(t, 0) == [0, 1, None]


def test_topology_text_round_trip():
    t = cn.connected_unit_disk(15, 100.0, 100.0, 40.0, 7)
    assert cn.is_connected(t)
    again = cn.Topology.from_text(t.to_text())
    assert again == t
    assert len(again.positions) == 15


def test_path_center_is_most_central():
    t = path_graph(3)
    scores = cn.information_centrality(t, cn.AdmissionPolicy.all_paths(3))
    assert scores[1] > scores[0]
    assert math.isclose(scores[0], scores[2])
    assert cn.rank_descending(scores)[0] == 1
    assert cn.top_fraction(scores, 0.3) == [1]


def test_pairwise_information_is_symmetric():
    t = cn.connected_unit_disk(10, 100.0, 100.0, 45.0, 3)
    m = cn.pairwise_information(t)
    for i in range(10):
        for j in range(10):
            assert math.isclose(m[i][j], m[j][i], rel_tol=1e-12, abs_tol=1e-15)


def test_betweenness_and_degree_on_star():
    t = cn.Topology(4, [(0, 1), (0, 2), (0, 3)])
    assert cn.degree_centrality(t)[0] == 3
    b = cn.betweenness_centrality(t)
    assert b[0] > 0 and b[1] == 0


def test_config_layers_and_errors():
    cfg = cn.config("desk", num_runs=3)
    assert cfg.preset == "desk"
    assert cfg.num_runs == 3
    assert cn.parse_config("num_runs = 4\n").num_runs == 4
    assert "seed" in cn.config_keys()
    with pytest.raises(cn.ConfigError, match="central_fraction"):
        cn.config(central_fraction=1.5)
    with pytest.raises(ValueError):
        cn.parse_config("no_such_key = 1\n")
    assert cn.parse_config(cfg.to_text()) == cfg


def small_config():
    return cn.config(
        "desk",
        num_nodes=15,
        radio_range_m=40,
        sim_time_s=8,
        num_runs=1,
        num_connections=3,
        anomaly_inject_time_s=3,
        anomaly_size_bytes=20000,
        seed=5,
    )


def test_in_memory_matches_on_disk(tmp_path):
    cfg = small_config()
    mem = cn.run_in_memory(cfg)
    disk = cn.run_experiment(cfg, tmp_path / "out")
    assert mem["summary"] == disk["summary"]
    assert mem["summary"]["status"] == "ok"
    assert (tmp_path / "out" / "topology.txt").exists()
    primary = mem["fractions"][mem["primary_fraction"]]
    assert 0.0 <= primary["agreement"] <= 1.0
    assert len(primary["empirical_top"]) <= len(primary["ic_top"])


def test_experiment_is_deterministic():
    cfg = small_config()
    assert cn.run_in_memory(cfg) == cn.run_in_memory(cfg, jobs=2)
