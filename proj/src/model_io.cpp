#include "syncnet/model_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "syncnet/errors.hpp"

namespace syncnet {

namespace {

using nlohmann::json;

void require_fields(const json& j, const std::set<std::string>& required, const std::set<std::string>& optional) {
  for (const auto& name : required) {
    if (!j.contains(name)) {
      throw InvalidArgument("model json: missing field '" + name + "'");
    }
  }
  for (const auto& [key, _] : j.items()) {
    if (!required.count(key) && !optional.count(key)) {
      throw InvalidArgument("model json: unknown field '" + key + "'");
    }
  }
}

std::vector<double> number_array(const json& j, const std::string& field) {
  const json& a = j.at(field);
  if (!a.is_array()) {
    throw InvalidArgument("model json: '" + field + "' must be an array of numbers");
  }
  std::vector<double> out;
  out.reserve(a.size());
  for (const auto& x : a) {
    if (!x.is_number()) {
      throw InvalidArgument("model json: '" + field + "' must be an array of numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

double number(const json& j, const std::string& field) {
  const json& x = j.at(field);
  if (!x.is_number() || !std::isfinite(x.get<double>())) {
    throw InvalidArgument("model json: '" + field + "' must be a finite number");
  }
  return x.get<double>();
}

WeightedGraph read_graph(const json& j, const std::string& base_dir) {
  const bool inline_graph = j.contains("graph");
  const bool file_graph = j.contains("graph_file");
  if (inline_graph == file_graph) {
    throw InvalidArgument("model json: give exactly one of 'graph' and 'graph_file'");
  }
  if (inline_graph) {
    return graph_from_json(j["graph"]);
  }
  if (!j["graph_file"].is_string()) {
    throw InvalidArgument("model json: 'graph_file' must be a string");
  }
  std::filesystem::path p = j["graph_file"].get<std::string>();
  if (p.is_relative() && !base_dir.empty()) {
    p = std::filesystem::path(base_dir) / p;
  }
  return load_graph(p.string());
}

BusKind bus_kind(const json& x) {
  if (x == "load") return BusKind::load;
  if (x == "generator") return BusKind::generator;
  if (x == "inverter") return BusKind::inverter;
  throw InvalidArgument("model json: bus kind must be 'load', 'generator' or 'inverter'");
}

}  // namespace

ModelDescription model_from_json(const json& j, const std::string& base_dir) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InvalidArgument("model json: expected an object with a string 'kind'");
  }
  const std::string kind = j["kind"].get<std::string>();
  const std::set<std::string> graph_fields{"graph", "graph_file"};
  auto with_graph = [&](std::set<std::string> optional) {
    optional.insert(graph_fields.begin(), graph_fields.end());
    return optional;
  };

  if (kind == "oscillator") {
    require_fields(j, {"kind", "omega"}, with_graph({}));
    return OscillatorNetwork(read_graph(j, base_dir), number_array(j, "omega"));
  }
  if (kind == "kuramoto") {
    require_fields(j, {"kind", "K", "omega"}, {});
    KuramotoModel m{number(j, "K"), number_array(j, "omega")};
    if (!(m.coupling > 0.0)) {
      throw InvalidArgument("model json: Kuramoto gain K must be positive");
    }
    if (m.omega.size() < 2) {
      throw InvalidArgument("model json: Kuramoto model needs at least two oscillators");
    }
    return m;
  }
  if (kind == "second_order") {
    require_fields(j, {"kind", "omega", "inertia", "damping"}, with_graph({}));
    return SecondOrderNetwork(read_graph(j, base_dir), number_array(j, "omega"), number_array(j, "inertia"),
                              number_array(j, "damping"));
  }
  if (kind == "power") {
    require_fields(j, {"kind", "buses", "power", "damping"}, with_graph({"inertia"}));
    if (!j["buses"].is_array()) {
      throw InvalidArgument("model json: 'buses' must be an array");
    }
    std::vector<BusKind> kinds;
    for (const auto& b : j["buses"]) {
      kinds.push_back(bus_kind(b));
    }
    std::vector<double> inertia = j.contains("inertia") ? number_array(j, "inertia")
                                                        : std::vector<double>(kinds.size(), 0.0);
    return PowerNetwork(read_graph(j, base_dir), std::move(kinds), number_array(j, "power"),
                        number_array(j, "damping"), std::move(inertia));
  }
  if (kind == "vehicles") {
    require_fields(j, {"kind", "K"}, with_graph({"omega0"}));
    VehicleSwarm swarm;
    swarm.graph = read_graph(j, base_dir);
    swarm.gain = number(j, "K");
    const double w0 = j.contains("omega0") ? number(j, "omega0") : 0.0;
    swarm.omega0 = [w0](double) { return w0; };
    return swarm;
  }
  if (kind == "clock") {
    require_fields(j, {"kind", "periods", "K"}, with_graph({"coupling"}));
    if (j.contains("coupling") && j["coupling"] != "sin") {
      throw InvalidArgument("model json: only 'sin' clock coupling can be described in a file");
    }
    return ClockNetwork(read_graph(j, base_dir), number_array(j, "periods"), number(j, "K"),
                        [](double x) { return std::sin(x); });
  }
  throw InvalidArgument("model json: unknown kind '" + kind + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open '" + path + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("'" + path + "': " + e.what());
  }
}

ModelDescription load_model(const std::string& path) {
  return model_from_json(read_json_file(path), std::filesystem::path(path).parent_path().string());
}

std::string model_kind(const ModelDescription& model) {
  static const char* const names[] = {"oscillator", "kuramoto", "second_order", "power", "vehicles", "clock"};
  return names[model.index()];
}

std::vector<double> omega_from_json(const json& j) {
  const json* arr = &j;
  if (j.is_object()) {
    if (j.size() != 1 || !j.contains("omega")) {
      throw InvalidArgument("omega json: expected an array or {\"omega\": [...]}");
    }
    arr = &j["omega"];
  }
  if (!arr->is_array() || arr->empty()) {
    throw InvalidArgument("omega json: expected a non-empty array of numbers");
  }
  std::vector<double> out;
  for (const auto& x : *arr) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      throw InvalidArgument("omega json: entries must be finite numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<double> load_omega(const std::string& path) { return omega_from_json(read_json_file(path)); }

}  // namespace syncnet
