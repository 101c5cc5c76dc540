#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "syncnet/conditions.hpp"
#include "syncnet/errors.hpp"
#include "syncnet/experiments.hpp"
#include "syncnet/graph.hpp"
#include "syncnet/integrate.hpp"
#include "syncnet/model_io.hpp"
#include "syncnet/models.hpp"
#include "syncnet/rng.hpp"
#include "syncnet/svg.hpp"
#include "syncnet/torus.hpp"

namespace syncnet::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Config files may be TOML (CLI11's own reader) or a flat JSON object whose
// keys are long option names without the dashes. Unsectioned keys apply to the
// subcommand being run; TOML sections named after other subcommands are
// skipped, so one file can hold settings for several of them.
class JsonOrTomlConfig : public CLI::ConfigBase {
 public:
  explicit JsonOrTomlConfig(const CLI::App* app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    const std::string text((std::istreambuf_iterator<char>(input)), std::istreambuf_iterator<char>());
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<CLI::ConfigItem> items;
    if (first != std::string::npos && text[first] == '{') {
      items = parse_json(text);
    } else {
      std::istringstream toml(text);
      items = CLI::ConfigBase::from_config(toml);
    }
    const auto active = app_->get_subcommands();
    if (active.empty()) {
      return items;
    }
    const std::string sub = active.front()->get_name();
    std::vector<CLI::ConfigItem> routed;
    for (CLI::ConfigItem& item : items) {
      if (item.name == "++" || item.name == "--") continue;
      if (item.parents.empty()) {
        item.parents = {sub};
      } else if (item.parents.front() != sub) {
        continue;
      }
      routed.push_back(std::move(item));
    }
    return routed;
  }

 private:
  static std::vector<CLI::ConfigItem> parse_json(const std::string& text) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      throw InvalidArgument(std::string("config: malformed JSON: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : j.items()) {
      CLI::ConfigItem item;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar_text(key, v));
      } else {
        item.inputs.push_back(scalar_text(key, value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

  static std::string scalar_text(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw InvalidArgument("config: value of '" + key + "' must be a string, number, boolean or array of those");
  }

  const CLI::App* app_;
};

std::ofstream open_output(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  const fs::path path = fs::path(dir) / name;
  std::ofstream out(path);
  if (!out) {
    throw InvalidArgument("cannot write " + path.string());
  }
  return out;
}

void write_json_file(const std::string& dir, const std::string& name, const json& j) {
  std::ofstream out = open_output(dir, name);
  out << j.dump(2) << '\n';
}

void add_integrator_options(CLI::App* cmd, IntegratorConfig& cfg) {
  cmd->add_option("--step", cfg.step, "RK4 step h")->capture_default_str();
  cmd->add_option("--horizon", cfg.horizon, "integration horizon T")->capture_default_str();
  cmd->add_option("--stride", cfg.stride, "record every stride-th step")->capture_default_str();
}

// The config option lives on the top-level app (CLI11 only reads config files
// there); subcommands fall through to it so it can follow the subcommand name.
void add_config_option(CLI::App* cmd) { cmd->fallthrough(); }

json verdict_json(const SyncVerdict& v) {
  json j;
  j["frequency_synced"] = v.frequency_synced;
  j["sync_frequency"] = v.sync_frequency;
  j["settle_time"] = std::isnan(v.settle_time) ? json(nullptr) : json(v.settle_time);
  j["final_arc"] = v.final_arc;
  j["final_order"] = v.final_order;
  return j;
}

std::vector<double> read_theta0(const std::string& path) {
  const json j = read_json_file(path);
  if (j.is_array()) return j.get<std::vector<double>>();
  if (j.is_object() && j.contains("theta0")) return j.at("theta0").get<std::vector<double>>();
  throw InvalidArgument(path + ": expected an array of phases or {\"theta0\": [...]}");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string model;
  std::optional<double> coupling;
  std::string graph;
  std::string omega;
  std::string theta0;
  std::uint64_t seed = 0;
  IntegratorConfig integrator{1e-2, 100.0, 10};
  double tol = 1e-4;
  double window = 10.0;
  std::string out = ".";
};

ModelDescription simulate_model(const SimulateArgs& a) {
  if (fs::is_regular_file(a.model)) {
    return load_model(a.model);
  }
  auto need = [&](const std::string& value, const char* flag) {
    if (value.empty()) {
      throw InvalidArgument("simulate: --model " + a.model + " needs " + flag);
    }
  };
  if (a.model == "kuramoto") {
    need(a.omega, "--omega");
    if (!a.coupling) {
      throw InvalidArgument("simulate: --model kuramoto needs --K");
    }
    return KuramotoModel{*a.coupling, load_omega(a.omega)};
  }
  if (a.model == "oscillator") {
    need(a.graph, "--graph");
    need(a.omega, "--omega");
    return OscillatorNetwork(load_graph(a.graph), load_omega(a.omega));
  }
  throw InvalidArgument("simulate: --model must be a model file or one of kuramoto, oscillator, balance");
}

void run_simulate(const SimulateArgs& a) {
  PhaseModel model;
  std::string kind;
  if (a.model == "balance" && !fs::is_regular_file(a.model)) {
    if (a.graph.empty()) {
      throw InvalidArgument("simulate: --model balance needs --graph");
    }
    WeightedGraph g = load_graph(a.graph);
    const std::size_t n = g.node_count();
    model = balance_model(OscillatorNetwork(std::move(g), std::vector<double>(n, 0.0)));
    kind = "balance";
  } else {
    const ModelDescription desc = simulate_model(a);
    model = phase_model(desc);
    kind = model_kind(desc);
  }

  std::vector<double> theta0;
  if (!a.theta0.empty()) {
    theta0 = read_theta0(a.theta0);
    if (theta0.size() != model.phases) {
      throw InvalidArgument("simulate: --theta0 has " + std::to_string(theta0.size()) + " entries, model has " +
                            std::to_string(model.phases));
    }
  } else {
    Rng rng(trial_seed(a.seed, model.phases, 0));
    theta0 = rng.uniform_vector(model.phases, 0.0, 2.0 * std::numbers::pi);
  }
  const std::vector<double> aux0(model.aux, 0.0);

  const Trajectory traj = integrate(model, theta0, aux0, a.integrator);
  const SyncVerdict verdict = detect_frequency_sync(traj, a.tol, a.window);
  {
    std::ofstream out = open_output(a.out, "trajectory.csv");
    write_trajectory_csv(out, traj);
  }
  json j = verdict_json(verdict);
  j["model"] = kind;
  write_json_file(a.out, "verdict.json", j);
  std::cout << j.dump(2) << '\n';
}

// ------------------------------------------------------------------- check

struct CheckArgs {
  std::string graph;
  std::string omega;
  double gamma = std::numbers::pi / 2.0;
  bool gamma_given = false;
  std::optional<double> coupling;
};

void run_check(const CheckArgs& a) {
  const OscillatorNetwork net(load_graph(a.graph), load_omega(a.omega));
  json reports = json::array();
  reports.push_back(to_json(necessary_absolute(net, a.gamma)));
  reports.push_back(to_json(necessary_incremental(net, a.gamma)));
  reports.push_back(to_json(
      pairwise_spectral_check(net, a.gamma_given ? std::optional<double>(a.gamma) : std::nullopt)));
  reports.push_back(to_json(edge_spectral_check(net)));
  if (a.coupling) {
    reports.push_back(to_json(kuramoto_check(*a.coupling, net.omega())));
  }
  std::cout << reports.dump(2) << '\n';
}

// ------------------------------------------------------------- equilibrium

struct EquilibriumArgs {
  std::string graph;
  std::string omega;
  double alpha = 0.5;
  std::size_t max_iterations = 10000;
};

void run_equilibrium(const EquilibriumArgs& a) {
  const OscillatorNetwork net(load_graph(a.graph), load_omega(a.omega));
  const Equilibrium eq = solve_equilibrium(net, a.alpha, a.max_iterations);
  json j;
  j["theta"] = std::vector<double>(eq.theta.values().begin(), eq.theta.values().end());
  j["residual"] = eq.residual;
  j["iterations"] = eq.iterations;
  j["stability"] = to_string(eq.stability);
  j["within_half_pi"] = eq.within_half_pi;
  j["edge_difference_norm"] = edge_difference_norm(net.graph(), eq.theta);
  j["sync_frequency"] = sync_frequency(net.omega());
  std::cout << j.dump(2) << '\n';
}

// -------------------------------------------------------------------- fig7

struct Fig7Args {
  std::string n_grid = "2:300:log";
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string dist = "uniform:-1:1";
  std::size_t threads = 1;
  bool svg = false;
};

void run_fig7_command(const Fig7Args& a) {
  ExperimentConfig cfg;
  cfg.kind = "fig7";
  cfg.n_grid = parse_n_grid(a.n_grid);
  cfg.trials = a.trials;
  cfg.seed = a.seed;
  cfg.distribution = parse_distribution(a.dist);
  cfg.out_dir = a.out;
  cfg.threads = a.threads;
  cfg.svg = a.svg;
  const std::vector<Fig7Row> rows = run_fig7(cfg);
  {
    std::ofstream out = open_output(a.out, "fig7.csv");
    write_fig7_csv(out, rows);
  }
  write_fig7_csv(std::cout, rows);
  if (a.svg) {
    PlotSeries necessary{"necessary", {}, {}};
    PlotSeries exact{"exact", {}, {}};
    PlotSeries sufficient{"sufficient", {}, {}};
    for (const Fig7Row& r : rows) {
      const auto n = static_cast<double>(r.n);
      necessary.x.push_back(n);
      necessary.y.push_back(r.mean_necessary);
      exact.x.push_back(n);
      exact.y.push_back(r.mean_exact);
      sufficient.x.push_back(n);
      sufficient.y.push_back(r.mean_sufficient);
    }
    PlotOptions opt;
    opt.title = "Critical coupling bounds";
    opt.x_label = "n";
    opt.y_label = "mean K";
    opt.log_x = true;
    write_line_plot((fs::path(a.out) / "fig7.svg").string(), {necessary, exact, sufficient}, opt);
  }
}

// ------------------------------------------------------------ bifurcation2

struct BifurcationArgs {
  std::string kappa = "0.5:1.5:lin:11";
  std::string delta0 = "0.1,1.5,3.0,4.5";
  IntegratorConfig integrator{1e-2, 100.0, 10};
  std::string out;
};

void run_bifurcation_command(const BifurcationArgs& a) {
  const auto rows = run_bifurcation2(parse_real_grid(a.kappa), parse_real_grid(a.delta0), a.integrator);
  std::ofstream out = open_output(a.out, "bifurcation2.csv");
  write_bifurcation_csv(out, rows);
  write_bifurcation_csv(std::cout, rows);
}

// ---------------------------------------------------------------- vehicles

struct VehiclesArgs {
  double gain = 1.0;
  std::size_t n = 6;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  IntegratorConfig integrator{1e-2, 100.0, 10};
  std::string out;
};

void run_vehicles_command(const VehiclesArgs& a) {
  if (a.trials < 1) {
    throw InvalidArgument("vehicles: --trials must be at least 1");
  }
  ExperimentConfig cfg;
  cfg.kind = "vehicles";
  cfg.seed = a.seed;
  cfg.integrator = a.integrator;
  std::ofstream summary = open_output(a.out, "vehicles.csv");
  summary << "trial,final_order\n";
  std::cout << "trial,final_order\n";
  for (std::size_t trial = 0; trial < a.trials; ++trial) {
    const VehicleRun run = run_vehicles(a.gain, a.n, cfg, trial);
    std::ofstream traj = open_output(a.out, "vehicles_trial" + std::to_string(trial) + ".csv");
    write_vehicle_csv(traj, run.trajectory);
    std::ostringstream line;
    line.precision(17);
    line << trial << ',' << run.final_order << '\n';
    summary << line.str();
    std::cout << line.str();
  }
}

// --------------------------------------------------------------- powergrid

struct PowerGridArgs {
  std::string model;
  std::string theta0;
  IntegratorConfig integrator{1e-2, 100.0, 10};
  double tol = 1e-4;
  double window = 10.0;
  std::string out;
};

void run_powergrid_command(const PowerGridArgs& a) {
  const ModelDescription desc = load_model(a.model);
  const auto* grid = std::get_if<PowerNetwork>(&desc);
  if (grid == nullptr) {
    throw InvalidArgument("powergrid: " + a.model + " is a " + model_kind(desc) + " model, expected power");
  }
  std::vector<double> theta0;
  if (!a.theta0.empty()) theta0 = read_theta0(a.theta0);
  const PowerGridRun run = run_powergrid(*grid, a.integrator, a.tol, a.window, theta0);
  {
    std::ofstream out = open_output(a.out, "trajectory.csv");
    write_trajectory_csv(out, run.trajectory);
  }
  json j = verdict_json(run.verdict);
  j["expected_frequency"] = run.expected_frequency;
  j["first_order"] = run.first_order;
  write_json_file(a.out, "verdict.json", j);
  std::cout << j.dump(2) << '\n';
}

// ----------------------------------------------------------------- balance

struct BalanceArgs {
  std::string graph;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::optional<double> perturbation;
  IntegratorConfig integrator{1e-2, 200.0, 100};
  std::string out;
};

void run_balance_command(const BalanceArgs& a) {
  BalanceOptions opt;
  opt.trials = a.trials;
  opt.seed = a.seed;
  opt.integrator = a.integrator;
  opt.splay_perturbation = a.perturbation;
  const BalanceRun run = run_balance(load_graph(a.graph), opt);
  if (!run.circulant) {
    std::cerr << "warning: graph is not circulant; balancing is not guaranteed\n";
  }
  {
    std::ofstream out = open_output(a.out, "balance.csv");
    write_balance_csv(out, run.rows);
  }
  {
    std::ofstream out = open_output(a.out, "trajectory.csv");
    write_trajectory_csv(out, run.first);
  }
  write_balance_csv(std::cout, run.rows);
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Simulation and synchronization analysis of coupled phase oscillators", "syncnet"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or JSON file with option values; flags override it");
  app.config_formatter(std::make_shared<JsonOrTomlConfig>(&app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "integrate a model and write trajectory.csv and verdict.json");
  add_config_option(sim_cmd);
  sim_cmd->add_option("--model", sim.model, "model file, or one of kuramoto, oscillator, balance")->required();
  sim_cmd->add_option("--K", sim.coupling, "Kuramoto gain");
  sim_cmd->add_option("--graph", sim.graph, "graph JSON file");
  sim_cmd->add_option("--omega", sim.omega, "natural frequencies JSON file");
  sim_cmd->add_option("--theta0", sim.theta0, "initial phases JSON file (default: uniform random)");
  sim_cmd->add_option("--seed", sim.seed, "seed for random initial phases")->capture_default_str();
  add_integrator_options(sim_cmd, sim.integrator);
  sim_cmd->add_option("--tol", sim.tol, "frequency spread tolerance")->capture_default_str();
  sim_cmd->add_option("--window", sim.window, "trailing window for sync detection")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "output directory")->capture_default_str();

  CheckArgs chk;
  auto* chk_cmd = app.add_subcommand("check", "evaluate the synchronization conditions and print JSON reports");
  add_config_option(chk_cmd);
  chk_cmd->add_option("--graph", chk.graph, "graph JSON file")->required();
  chk_cmd->add_option("--omega", chk.omega, "natural frequencies JSON file")->required();
  auto* gamma_opt = chk_cmd->add_option("--gamma", chk.gamma, "arc or edge bound gamma")->capture_default_str();
  chk_cmd->add_option("--K", chk.coupling, "also check the complete-graph Kuramoto condition at this gain");

  EquilibriumArgs eqa;
  auto* eq_cmd = app.add_subcommand("equilibrium", "solve for a phase-locked equilibrium");
  add_config_option(eq_cmd);
  eq_cmd->add_option("--graph", eqa.graph, "graph JSON file")->required();
  eq_cmd->add_option("--omega", eqa.omega, "natural frequencies JSON file")->required();
  eq_cmd->add_option("--alpha", eqa.alpha, "fixed-point damping")->capture_default_str();
  eq_cmd->add_option("--max-iterations", eqa.max_iterations, "iteration cap")->capture_default_str();

  Fig7Args f7;
  auto* f7_cmd = app.add_subcommand("fig7", "Monte-Carlo comparison of critical-coupling bounds");
  add_config_option(f7_cmd);
  f7_cmd->add_option("--n", f7.n_grid, "n grid: a:b:log[:count], a:b:lin[:count] or a list")->capture_default_str();
  f7_cmd->add_option("--trials", f7.trials, "trials per n")->required();
  f7_cmd->add_option("--seed", f7.seed, "base seed")->required();
  f7_cmd->add_option("--out", f7.out, "output directory")->required();
  f7_cmd->add_option("--dist", f7.dist, "uniform:a:b, bipolar:c or list:w0,w1,...")->capture_default_str();
  f7_cmd->add_option("--threads", f7.threads, "worker threads")->capture_default_str();
  f7_cmd->add_flag("--svg", f7.svg, "also write fig7.svg");

  BifurcationArgs bif;
  auto* bif_cmd = app.add_subcommand("bifurcation2", "sweep the two-oscillator phase difference dynamics");
  add_config_option(bif_cmd);
  bif_cmd->add_option("--kappa", bif.kappa, "kappa grid: a:b:lin:count or a list")->capture_default_str();
  bif_cmd->add_option("--delta0", bif.delta0, "initial difference grid")->capture_default_str();
  add_integrator_options(bif_cmd, bif.integrator);
  bif_cmd->add_option("--out", bif.out, "output directory")->required();

  VehiclesArgs veh;
  auto* veh_cmd = app.add_subcommand("vehicles", "steer planar vehicles by heading coupling");
  add_config_option(veh_cmd);
  veh_cmd->add_option("--K", veh.gain, "steering gain (positive aligns, negative balances)")->required();
  veh_cmd->add_option("--n", veh.n, "number of vehicles")->capture_default_str();
  veh_cmd->add_option("--seed", veh.seed, "base seed")->required();
  veh_cmd->add_option("--trials", veh.trials, "number of runs")->required();
  add_integrator_options(veh_cmd, veh.integrator);
  veh_cmd->add_option("--out", veh.out, "output directory")->required();

  PowerGridArgs pg;
  auto* pg_cmd = app.add_subcommand("powergrid", "integrate a power network model file");
  add_config_option(pg_cmd);
  pg_cmd->add_option("--model", pg.model, "power model JSON file")->required();
  pg_cmd->add_option("--theta0", pg.theta0, "initial phases JSON file (default: zeros)");
  add_integrator_options(pg_cmd, pg.integrator);
  pg_cmd->add_option("--tol", pg.tol, "frequency spread tolerance")->capture_default_str();
  pg_cmd->add_option("--window", pg.window, "trailing window for sync detection")->capture_default_str();
  pg_cmd->add_option("--out", pg.out, "output directory")->required();

  BalanceArgs bal;
  auto* bal_cmd = app.add_subcommand("balance", "run the phase-balancing flow on a graph");
  add_config_option(bal_cmd);
  bal_cmd->add_option("--graph", bal.graph, "graph JSON file")->required();
  bal_cmd->add_option("--seed", bal.seed, "base seed")->required();
  bal_cmd->add_option("--trials", bal.trials, "number of runs")->required();
  bal_cmd->add_option("--perturbation", bal.perturbation, "start near splay with this noise amplitude");
  add_integrator_options(bal_cmd, bal.integrator);
  bal_cmd->add_option("--out", bal.out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  chk.gamma_given = gamma_opt->count() > 0;
  const std::vector<std::pair<CLI::App*, std::function<void()>>> handlers = {
      {sim_cmd, [&] { run_simulate(sim); }},
      {chk_cmd, [&] { run_check(chk); }},
      {eq_cmd, [&] { run_equilibrium(eqa); }},
      {f7_cmd, [&] { run_fig7_command(f7); }},
      {bif_cmd, [&] { run_bifurcation_command(bif); }},
      {veh_cmd, [&] { run_vehicles_command(veh); }},
      {pg_cmd, [&] { run_powergrid_command(pg); }},
      {bal_cmd, [&] { run_balance_command(bal); }},
  };
  for (const auto& [cmd, handler] : handlers) {
    if (cmd->parsed()) {
      handler();
      break;
    }
  }
  return 0;
}

}  // namespace

int cli_main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}

int cli_main(const std::vector<std::string>& args) {
  std::vector<std::string> copy = args;
  std::vector<char*> argv;
  for (std::string& s : copy) argv.push_back(s.data());
  argv.push_back(nullptr);
  return cli_main(static_cast<int>(copy.size()), argv.data());
}

}  // namespace syncnet::cli
