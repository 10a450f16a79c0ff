// Command-line front end: loads system/set/distribution/network files, runs
// the requested analysis, and writes JSON/CSV/DOT artifacts with a
// provenance header. Exit status: 0 success, 2 solver error, 3 input error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flexkit/centers.hpp"
#include "flexkit/json_io.hpp"

using namespace flexkit;
using nlohmann::json;

namespace {

constexpr int kExitSolver = 2;
constexpr int kExitInput = 3;

struct Options {
  std::vector<std::string> systems;
  std::vector<std::string> sets;
  std::string dist;
  std::string network;
  long samples = 10000;
  unsigned long long seed = 0;
  int levels = 4;
  std::string method = "feasible";
  std::string format = "json";
  std::string out;
  double tol_feas = 1e-8;
  double tol_gap = 1e-9;
  double big_m = -1.0;
};

BnBConfig bnb_config(const Options& opt) {
  BnBConfig cfg;
  cfg.rel_gap = opt.tol_gap;
  cfg.abs_gap = opt.tol_gap;
  cfg.big_m = opt.big_m;
  return cfg;
}

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::string text_header(const std::string& prefix, const std::string& command,
                        const Options& opt) {
  std::ostringstream os;
  os << prefix << " flexkit " << FLEXKIT_VERSION << " command=" << command
     << " seed=" << opt.seed << " tol_feas=" << opt.tol_feas
     << " tol_gap=" << opt.tol_gap << " big_m=" << opt.big_m << "\n";
  return os.str();
}

json provenance(const std::string& command, const Options& opt) {
  json j;
  j["tool"] = "flexkit";
  j["version"] = FLEXKIT_VERSION;
  j["command"] = command;
  j["seed"] = opt.seed;
  j["tolerances"] = {{"feas", opt.tol_feas},
                     {"gap", opt.tol_gap},
                     {"big_m", opt.big_m}};
  return j;
}

void write_artifact(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(opt.out, std::ios::binary);
  if (!f) throw InputError("cannot open output file '" + opt.out + "'");
  f << text;
}

void require_format(const Options& opt,
                    const std::vector<std::string>& allowed) {
  for (const auto& a : allowed)
    if (opt.format == a) return;
  std::string msg = "unsupported format '" + opt.format + "'; expected";
  for (const auto& a : allowed) msg += " " + a;
  throw InputError(msg);
}

int run_index(const Options& opt) {
  const LinearSystem sys = load_system(opt.systems.at(0));
  const UncertaintySetSpec set = load_set(opt.sets.at(0));
  const FlexSolution sol =
      flexibility_index(sys, set, bnb_config(opt), opt.tol_feas);
  const VerificationReport rep =
      verify_solution(sys, sol, opt.samples, opt.seed);
  require_format(opt, {"json"});
  json j = to_json(sol, sys);
  j["provenance"] = provenance("index", opt);
  j["verification"] = to_json(rep);
  write_artifact(opt, j.dump(2) + "\n");
  if (sol.status == SolveStatus::NodeLimit) {
    std::cerr << "flexkit: node limit reached; result carries a nonzero gap\n";
    return kExitSolver;
  }
  if (rep.violations_at_F > 0) {
    std::cerr << "flexkit: verification found boundary violations\n";
    return kExitSolver;
  }
  return 0;
}

int run_sf(const Options& opt) {
  const LinearSystem sys = load_system(opt.systems.at(0));
  const GaussianSpec dist = load_dist(opt.dist);
  const auto t0 = std::chrono::steady_clock::now();
  const SFEstimate est =
      stochastic_flexibility(sys, dist, opt.samples, opt.seed);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  require_format(opt, {"json"});
  json j = to_json(est, elapsed);
  j["provenance"] = provenance("sf", opt);
  write_artifact(opt, j.dump(2) + "\n");
  return 0;
}

int run_center(const Options& opt) {
  const LinearSystem sys = load_system(opt.systems.at(0));
  CenterResult center;
  if (opt.method == "analytic") {
    center = analytic_center(sys);
  } else if (opt.method == "arithmetic") {
    center = arithmetic_center(sys);
  } else if (opt.method == "feasible") {
    center = feasible_center(sys);
  } else {
    throw InputError("unknown center method '" + opt.method +
                     "'; expected analytic, arithmetic or feasible");
  }
  require_format(opt, {"json"});
  json j = to_json(center, sys);
  j["provenance"] = provenance("center", opt);
  write_artifact(opt, j.dump(2) + "\n");
  return 0;
}

int run_rank(const Options& opt) {
  const LinearSystem sys = load_system(opt.systems.at(0));
  const UncertaintySetSpec set = load_set(opt.sets.at(0));
  const RankResult result =
      rank_constraints(sys, set, opt.levels, bnb_config(opt));
  require_format(opt, {"json", "csv"});
  if (opt.format == "csv") {
    write_artifact(opt, text_header("#", "rank", opt) + rank_csv(result));
  } else {
    json j = to_json(result);
    j["provenance"] = provenance("rank", opt);
    write_artifact(opt, j.dump(2) + "\n");
  }
  return 0;
}

int run_compare(const Options& opt) {
  std::vector<DesignEntry> designs;
  for (const auto& path : opt.systems)
    designs.push_back({file_stem(path), load_system(path)});
  std::vector<UncertaintySetSpec> sets;
  int box_col = -1;
  int ellip_col = -1;
  for (const auto& path : opt.sets) {
    UncertaintySetSpec spec = load_set(path);
    const std::string type = set_type_name(spec);
    const int col = static_cast<int>(sets.size());
    if (type == "hyperbox" && box_col < 0) box_col = col;
    if (type == "ellipsoid" && ellip_col < 0) ellip_col = col;
    sets.push_back(std::move(spec));
  }
  GaussianSpec dist;
  const bool with_mc = !opt.dist.empty();
  if (with_mc) dist = load_dist(opt.dist);
  const std::vector<CompareRow> rows =
      compare_designs(designs, sets, with_mc ? &dist : nullptr, opt.samples,
                      opt.seed, bnb_config(opt));
  require_format(opt, {"csv"});
  write_artifact(opt, text_header("#", "compare", opt) +
                          compare_csv(rows, box_col, ellip_col));
  return 0;
}

int run_network_build(const Options& opt) {
  const NetworkModel net = load_network(opt.network);
  const LinearSystem sys = build_system(net);
  require_format(opt, {"json"});
  json j;
  j["provenance"] = provenance("network build", opt);
  j["network"] = to_json(net);
  j["system"] = to_json(sys);
  write_artifact(opt, j.dump(2) + "\n");
  return 0;
}

int run_network_rank(const Options& opt) {
  const NetworkModel net = load_network(opt.network);
  const LinearSystem sys = build_system(net);
  const UncertaintySetSpec set = load_set(opt.sets.at(0));
  const RankResult result =
      rank_constraints(sys, set, opt.levels, bnb_config(opt));
  const ComponentRankMap map = component_rank_map(net, result.levels);
  require_format(opt, {"json", "csv", "dot"});
  if (opt.format == "dot") {
    write_artifact(opt,
                   text_header("//", "network rank", opt) + emit_dot(net, map));
  } else if (opt.format == "csv") {
    write_artifact(opt,
                   text_header("#", "network rank", opt) + rank_csv(result));
  } else {
    json j = to_json(result);
    j["provenance"] = provenance("network rank", opt);
    j["components"] = to_json(map);
    write_artifact(opt, j.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  CLI::App app{"flexibility analysis of linear constrained systems"};
  app.require_subcommand(1);

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", opt.out, "output file (stdout when omitted)");
    cmd->add_option("--format", opt.format, "json, csv or dot");
    cmd->add_option("--seed", opt.seed, "random seed (default 0)");
    cmd->add_option("--samples", opt.samples, "Monte Carlo sample count");
    cmd->add_option("--tol-feas", opt.tol_feas, "feasibility tolerance");
    cmd->add_option("--tol-gap", opt.tol_gap, "relative optimality gap");
    cmd->add_option("--big-m", opt.big_m,
                    "slack big-M (non-positive selects automatically)");
  };

  CLI::App* index = app.add_subcommand("index", "flexibility index");
  index->add_option("--system", opt.systems)->required();
  index->add_option("--set", opt.sets)->required();
  add_common(index);

  CLI::App* sf = app.add_subcommand("sf", "stochastic flexibility");
  sf->add_option("--system", opt.systems)->required();
  sf->add_option("--dist", opt.dist)->required();
  add_common(sf);

  CLI::App* center = app.add_subcommand("center", "centering point");
  center->add_option("--system", opt.systems)->required();
  center->add_option("--method", opt.method,
                     "analytic, arithmetic or feasible");
  add_common(center);

  CLI::App* rank = app.add_subcommand("rank", "limiting-constraint ranking");
  rank->add_option("--system", opt.systems)->required();
  rank->add_option("--set", opt.sets)->required();
  rank->add_option("--levels", opt.levels, "maximum rank levels");
  add_common(rank);

  CLI::App* compare = app.add_subcommand("compare", "multi-design table");
  compare->add_option("--system", opt.systems)->required();
  compare->add_option("--set", opt.sets)->required();
  compare->add_option("--dist", opt.dist,
                      "enables the Monte Carlo column");
  add_common(compare);
  compare->get_option("--format")->default_str("csv");

  CLI::App* network = app.add_subcommand("network", "network front end");
  network->require_subcommand(1);
  CLI::App* nbuild = network->add_subcommand("build", "emit the system");
  nbuild->add_option("--network", opt.network)->required();
  add_common(nbuild);
  CLI::App* nrank = network->add_subcommand("rank", "rank components");
  nrank->add_option("--network", opt.network)->required();
  nrank->add_option("--set", opt.sets)->required();
  nrank->add_option("--levels", opt.levels, "maximum rank levels");
  add_common(nrank);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "flexkit: " << e.what() << "\n";
    return kExitInput;
  }
  if (compare->parsed() && !compare->get_option("--format")->count())
    opt.format = "csv";

  try {
    if (index->parsed()) return run_index(opt);
    if (sf->parsed()) return run_sf(opt);
    if (center->parsed()) return run_center(opt);
    if (rank->parsed()) return run_rank(opt);
    if (compare->parsed()) return run_compare(opt);
    if (nbuild->parsed()) return run_network_build(opt);
    if (nrank->parsed()) return run_network_rank(opt);
  } catch (const InputError& e) {
    std::cerr << "flexkit: " << e.what() << "\n";
    return kExitInput;
  } catch (const FlexError& e) {
    std::cerr << "flexkit: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "flexkit: " << e.what() << "\n";
    return kExitSolver;
  }
  return 0;
}
