#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "centrinet/centrality.hpp"
#include "centrinet/config.hpp"
#include "centrinet/errors.hpp"
#include "centrinet/experiment.hpp"
#include "centrinet/graph.hpp"

namespace py = pybind11;
using namespace centrinet;

namespace {

Topology topology_from_edges(std::size_t n, const std::vector<Edge>& edges) {
  return Topology(n, std::span<const Edge>(edges));
}

std::string topology_text(const Topology& t) {
  std::ostringstream out;
  save_topology(t, out);
  return out.str();
}

Topology topology_parse(const std::string& text) {
  std::istringstream in(text);
  return load_topology(in);
}

py::dict summary_dict(const Summary& s) {
  py::dict d;
  for (const auto& [key, value] : s.entries()) d[py::str(key)] = value;
  return d;
}

py::list curve_list(const DetectionCurve& curve) {
  py::list out;
  for (const DetectionSample& s : curve) {
    out.append(py::make_tuple(static_cast<double>(s.t) / kTicksPerMs, s.central, s.noncentral));
  }
  return out;
}

py::dict report_dict(const ExperimentConfig& cfg, const ExperimentReport& r) {
  py::dict d;
  d["summary"] = summary_dict(make_summary(cfg, r));
  py::dict fractions;
  for (const FractionOutcome& f : r.fractions) {
    py::dict entry;
    entry["ic_top"] = f.ic_top;
    entry["empirical_top"] = f.empirical_top;
    entry["agreement"] = f.agreement;
    entry["curve"] = curve_list(f.curve);
    entry["central_final_by_run"] = f.central_final_by_run;
    entry["noncentral_final_by_run"] = f.noncentral_final_by_run;
    fractions[py::float_(f.fraction)] = entry;
  }
  d["fractions"] = fractions;
  d["primary_fraction"] = r.primary_fraction().fraction;
  return d;
}

RunOptions options(unsigned jobs) {
  RunOptions opts;
  opts.jobs = jobs == 0 ? 1 : jobs;
  return opts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Information-centrality anomaly detection experiments";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);

  py::class_<ExperimentConfig> cfg(m, "ExperimentConfig");
  cfg.def(py::init<>())
      .def_readwrite("preset", &ExperimentConfig::preset)
      .def_readwrite("num_nodes", &ExperimentConfig::num_nodes)
      .def_readwrite("area_width_m", &ExperimentConfig::area_width_m)
      .def_readwrite("area_height_m", &ExperimentConfig::area_height_m)
      .def_readwrite("radio_range_m", &ExperimentConfig::radio_range_m)
      .def_readwrite("sim_time_s", &ExperimentConfig::sim_time_s)
      .def_readwrite("num_runs", &ExperimentConfig::num_runs)
      .def_readwrite("num_connections", &ExperimentConfig::num_connections)
      .def_readwrite("packet_rate_per_ms", &ExperimentConfig::packet_rate_per_ms)
      .def_readwrite("packet_size_bytes", &ExperimentConfig::packet_size_bytes)
      .def_readwrite("queue_capacity", &ExperimentConfig::queue_capacity)
      .def_readwrite("bandwidth_bps", &ExperimentConfig::bandwidth_bps)
      .def_readwrite("per_hop_latency_ms", &ExperimentConfig::per_hop_latency_ms)
      .def_readwrite("anomaly_size_bytes", &ExperimentConfig::anomaly_size_bytes)
      .def_readwrite("anomaly_origin_fraction", &ExperimentConfig::anomaly_origin_fraction)
      .def_readwrite("anomaly_inject_time_s", &ExperimentConfig::anomaly_inject_time_s)
      .def_readwrite("detector_threshold_factor", &ExperimentConfig::detector_threshold_factor)
      .def_readwrite("central_fraction", &ExperimentConfig::central_fraction)
      .def_readwrite("ic_k_paths", &ExperimentConfig::ic_k_paths)
      .def_readwrite("ic_len_slack", &ExperimentConfig::ic_len_slack)
      .def_readwrite("seed", &ExperimentConfig::seed)
      .def("validate", [](const ExperimentConfig& c) { validate(c); })
      .def("to_text", [](const ExperimentConfig& c) { return to_config_text(c); })
      .def(py::self == py::self)
      .def("__repr__", [](const ExperimentConfig& c) {
        return "<ExperimentConfig preset=" + c.preset + " num_nodes=" +
               std::to_string(c.num_nodes) + " seed=" + std::to_string(c.seed) + ">";
      });

  m.def("preset_config", &preset_config, py::arg("name"));
  m.def("parse_config", &parse_config, py::arg("text"),
        py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("load_config", &load_config, py::arg("path"),
        py::arg("overrides") = std::map<std::string, std::string>{});
  m.def("config_keys", &config_keys);

  py::class_<Topology>(m, "Topology")
      .def(py::init(&topology_from_edges), py::arg("n"), py::arg("edges"))
      .def_static("from_text", &topology_parse, py::arg("text"))
      .def("to_text", &topology_text)
      .def("__len__", &Topology::size)
      .def_property_readonly("edges", &Topology::edges)
      .def_property_readonly("radio_range", &Topology::radio_range)
      .def_property_readonly("positions",
                             [](const Topology& t) {
                               std::vector<std::pair<double, double>> out;
                               for (const Position& p : t.positions()) out.emplace_back(p.x, p.y);
                               return out;
                             })
      .def("neighbors",
           [](const Topology& t, NodeId v) {
             const auto span = t.neighbors(v);
             return std::vector<NodeId>(span.begin(), span.end());
           })
      .def("has_edge", &Topology::has_edge)
      .def("degree", &Topology::degree)
      .def(py::self == py::self);

  m.def("connected_unit_disk", &connected_unit_disk, py::arg("n"), py::arg("width"),
        py::arg("height"), py::arg("radio_range"), py::arg("seed"), py::arg("max_attempts") = 100);
  m.def("is_connected", &is_connected);
  m.def("shortest_path_lengths",
        [](const Topology& t, NodeId src) {
          py::list out;
          for (std::size_t d : shortest_path_lengths(t, src)) {
            out.append(d == kUnreachable ? py::object(py::none()) : py::object(py::int_(d)));
          }
          return out;
        });

  py::class_<AdmissionPolicy>(m, "AdmissionPolicy")
      .def(py::init([](std::size_t max_paths, std::optional<std::size_t> length_slack,
                       std::optional<std::size_t> max_length) {
             return AdmissionPolicy{max_paths, length_slack, max_length};
           }),
           py::arg("max_paths") = 5, py::arg("length_slack") = 2,
           py::arg("max_length") = py::none())
      .def_static("all_paths", &AdmissionPolicy::all_paths, py::arg("max_length"))
      .def_static("geodesics_only", &AdmissionPolicy::geodesics_only)
      .def_readwrite("max_paths", &AdmissionPolicy::max_paths)
      .def_readwrite("length_slack", &AdmissionPolicy::length_slack)
      .def_readwrite("max_length", &AdmissionPolicy::max_length);

  m.def(
      "pairwise_information",
      [](const Topology& t, const AdmissionPolicy& policy, unsigned threads) {
        const InformationMatrix im = pairwise_information(t, policy, threads);
        std::vector<std::vector<double>> out(im.size(), std::vector<double>(im.size(), 0.0));
        for (NodeId i = 0; i < im.size(); ++i) {
          for (NodeId j = 0; j < im.size(); ++j) out[i][j] = im.info(i, j);
        }
        return out;
      },
      py::arg("topology"), py::arg("policy") = AdmissionPolicy{}, py::arg("threads") = 1);
  m.def(
      "information_centrality",
      [](const Topology& t, const AdmissionPolicy& policy, unsigned threads) {
        return information_centrality(pairwise_information(t, policy, threads));
      },
      py::arg("topology"), py::arg("policy") = AdmissionPolicy{}, py::arg("threads") = 1);
  m.def("betweenness_centrality", &betweenness_centrality);
  m.def("degree_centrality", &degree_centrality);
  m.def("rank_descending", &rank_descending, py::arg("scores"));
  m.def("top_fraction", &top_fraction, py::arg("scores"), py::arg("fraction"));

  m.def(
      "run_experiment",
      [](const ExperimentConfig& c, const std::filesystem::path& out, unsigned jobs) {
        ExperimentReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment(c, out, options(jobs));
        }
        return report_dict(c, r);
      },
      py::arg("config"), py::arg("out_dir"), py::arg("jobs") = 1,
      "Runs every stage, writing artifacts under out_dir.");
  m.def(
      "run_in_memory",
      [](const ExperimentConfig& c, unsigned jobs) {
        ExperimentReport r;
        {
          py::gil_scoped_release release;
          r = run_experiment_in_memory(c, options(jobs));
        }
        return report_dict(c, r);
      },
      py::arg("config"), py::arg("jobs") = 1, "Runs the pipeline without writing files.");
}
