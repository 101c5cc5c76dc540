#pragma once

// JSON model description files.
//
//   {"kind": "oscillator",   "graph": G, "omega": [...]}
//   {"kind": "kuramoto",     "K": 3.0, "omega": [...]}
//   {"kind": "second_order", "graph": G, "omega": [...], "inertia": [...], "damping": [...]}
//   {"kind": "power",        "graph": G, "buses": ["load", "generator", "inverter", ...],
//                            "power": [...], "damping": [...], "inertia": [...]}
//   {"kind": "vehicles",     "graph": G, "K": 1.0, "omega0": 1.0}
//   {"kind": "clock",        "graph": G, "periods": [...], "K": -0.5, "coupling": "sin"}
//
// G is either an inline graph object ({"n": .., "edges": [[i, j, w], ...]}) or
// given through "graph_file" as a path relative to the model file. Power
// "inertia" may be omitted when there are no generators. Unknown fields are
// rejected.

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "syncnet/models.hpp"

namespace syncnet {

/// Complete-graph Kuramoto network with gain K.
struct KuramotoModel {
  double coupling = 0.0;
  std::vector<double> omega;
};

using ModelDescription =
    std::variant<OscillatorNetwork, KuramotoModel, SecondOrderNetwork, PowerNetwork, VehicleSwarm, ClockNetwork>;

/// `base_dir` resolves relative "graph_file" references.
ModelDescription model_from_json(const nlohmann::json& j, const std::string& base_dir = "");
ModelDescription load_model(const std::string& path);

/// Kind tag as used in model files.
std::string model_kind(const ModelDescription& model);

/// Frequency vector file: a bare JSON array, or {"omega": [...]}.
std::vector<double> omega_from_json(const nlohmann::json& j);
std::vector<double> load_omega(const std::string& path);

/// Reads a whole JSON file; InvalidArgument on I/O or parse errors.
nlohmann::json read_json_file(const std::string& path);

}  // namespace syncnet
