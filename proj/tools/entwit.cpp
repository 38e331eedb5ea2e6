// Copyright 2026 The entwit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: witnessing and discrimination runs, sweeps, figure
// data and the dense cross-check.
//
// Exit codes: 0 ok, 2 usage, 3 unsupported family/protocol combination,
// 4 oracle mismatch.

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entwit/entwit.hpp"

namespace {

using namespace entwit;

constexpr int kExitUsage = 2;
constexpr int kExitUnsupported = 3;
constexpr int kExitOracle = 4;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Config {
  std::string protocol = "p0";
  std::string family = "amp";
  std::optional<int> n;
  std::optional<double> F;
  std::string F_grid;
  double F0 = 0.95;
  std::optional<double> F1;
  std::optional<double> F2;
  double delta = 0.5;
  int delta0 = 0;
  int d = 0;
  int m = 0;
  std::optional<int> r;
  bool auto_r = false;
  int rounds = 1;
  long long trials = 0;
  std::optional<std::uint64_t> seed;
  bool oracle = false;
  std::string out;
  std::string trials_out;
  std::string format;
  std::vector<double> weights;
  std::string which;
  bool corrupt_grouping = false;
  std::string config_file;  // read before parsing, see apply_config_file
};

// Keys mirror the long flag names with '-' replaced by '_'.
void apply_config_file(const std::string& path, Config& c) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read config file " + path);
  nlohmann::json j;
  try {
    f >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "protocol") c.protocol = v.get<std::string>();
      else if (key == "family") c.family = v.get<std::string>();
      else if (key == "n") c.n = v.get<int>();
      else if (key == "F") c.F = v.get<double>();
      else if (key == "F_grid") c.F_grid = v.get<std::string>();
      else if (key == "F0") c.F0 = v.get<double>();
      else if (key == "F1") c.F1 = v.get<double>();
      else if (key == "F2") c.F2 = v.get<double>();
      else if (key == "delta") c.delta = v.get<double>();
      else if (key == "delta0") c.delta0 = v.get<int>();
      else if (key == "d") c.d = v.get<int>();
      else if (key == "m") c.m = v.get<int>();
      else if (key == "r") c.r = v.get<int>();
      else if (key == "auto_r") c.auto_r = v.get<bool>();
      else if (key == "rounds") c.rounds = v.get<int>();
      else if (key == "trials") c.trials = v.get<long long>();
      else if (key == "seed") c.seed = v.get<std::uint64_t>();
      else if (key == "oracle") c.oracle = v.get<bool>();
      else if (key == "out") c.out = v.get<std::string>();
      else if (key == "trials_out") c.trials_out = v.get<std::string>();
      else if (key == "format") c.format = v.get<std::string>();
      else if (key == "weights") c.weights = v.get<std::vector<double>>();
      else throw UsageError("unknown config key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      throw UsageError("config key '" + key + "': " + e.what());
    }
  }
}

std::optional<std::string> config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--config") == 0 && i + 1 < argc) return argv[i + 1];
    if (std::strncmp(argv[i], "--config=", 9) == 0) return std::string(argv[i] + 9);
  }
  return std::nullopt;
}

// lo:hi:steps, all inside [0, 1], at least one point.
std::vector<double> parse_grid(const std::string& spec) {
  const auto a = spec.find(':');
  const auto b = spec.find(':', a == std::string::npos ? a : a + 1);
  if (a == std::string::npos || b == std::string::npos) {
    throw UsageError("--F-grid expects lo:hi:steps, got '" + spec + "'");
  }
  double lo = 0.0;
  double hi = 0.0;
  long steps = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(spec.substr(0, a), &used);
    hi = std::stod(spec.substr(a + 1, b - a - 1), &used);
    steps = std::stol(spec.substr(b + 1), &used);
    if (used != spec.size() - b - 1) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw UsageError("--F-grid expects lo:hi:steps, got '" + spec + "'");
  }
  if (steps < 1) throw UsageError("--F-grid needs at least one point");
  if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) {
    throw UsageError("--F-grid bounds must satisfy 0 <= lo <= hi <= 1");
  }
  return linear_grid(lo, hi, static_cast<int>(steps));
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
}

// Runs the dense cross-check at its default scale; used by --oracle.
bool oracle_passes(std::ostream& log) {
  bool ok = true;
  for (const auto& r : oracle::run_oracle_suite()) {
    if (!r.passed()) {
      ok = false;
      log << "oracle mismatch: " << r.name << " (" << format_number(r.mismatch) << ")\n";
    }
  }
  return ok;
}

StateSpec state_at(const Config& c, Family family, double F) {
  if (family == Family::BellDiagonal) {
    if (c.weights.size() != 4) throw UsageError("bell_diagonal needs --weights p00 p01 p10 p11");
    return make_bell_diagonal({c.weights[0], c.weights[1], c.weights[2], c.weights[3]});
  }
  return make_state(family, Fidelity(F));
}

std::string decision_line(Decision d, int statistic) {
  return "decision: " + std::string(decision_name(d)) + " (statistic " +
         std::to_string(statistic) + ")\n";
}

// ---------------------------------------------------------------------------

int cmd_witness(const Config& c) {
  const Family family = parse_family(c.family);
  WitnessSetup s;
  s.protocol = parse_protocol(c.protocol);
  s.family = family;
  if (!c.n) throw UsageError("witness needs --n");
  s.n = *c.n;
  s.F0 = Fidelity(c.F0);
  s.delta = c.delta;
  s.d = c.d;
  s.m = c.m;
  s.delta0 = c.delta0;
  s.r = c.r.value_or(2);
  s.rounds = c.rounds;
  if (c.auto_r) {
    if (s.protocol != ProtocolId::P3) throw UsageError("--auto-r applies to p3 only");
    s.r = optimize_block_size(WitnessObjective{s.F0, s.n, s.delta, family}, 2,
                              std::min(s.n, 100));
    std::cout << "r*=" << s.r << "\n";
  }
  if (c.trials > 0 && !c.seed) throw UsageError("--trials needs --seed");
  if (c.trials < 0) throw UsageError("--trials must be >= 0");
  if (!c.F_grid.empty() && c.F) throw UsageError("give either --F or --F-grid");
  if (c.oracle && !oracle_passes(std::cerr)) return kExitOracle;

  const bool grid_mode = !c.F_grid.empty();
  if (!grid_mode && !c.F && family != Family::BellDiagonal) {
    throw UsageError("witness needs --F or --F-grid");
  }
  s = prepare_witness(s);

  if (grid_mode) {
    if (family == Family::BellDiagonal) throw UsageError("--F-grid needs a one-parameter family");
    const auto grid = parse_grid(c.F_grid);
    const bool mc = c.seed && c.trials > 0;
    struct Point {
      double ps = 0.0;
      double mc = 0.0;
      double err = 0.0;
    };
    // Analytic points go to the pool; MC points run in order, each on its own
    // point_seed stream with the trials spread over the pool.
    std::vector<Point> pts = parallel_map<Point>(grid.size(), [&](std::size_t i) {
      const auto spec = state_at(c, family, grid[i]);
      Point p;
      p.ps = run_witness(spec, s).success_probability;
      return p;
    });
    if (mc) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto spec = state_at(c, family, grid[i]);
        const bool above = grid[i] > s.F0.value();
        const auto hits = run_trials<int>(c.trials, point_seed(*c.seed, i), [&](Rng& rng) {
          return (decide(s, sample_statistic(spec, s, rng)) == Decision::Above) == above ? 1 : 0;
        });
        double k = 0.0;
        for (int h : hits) k += h;
        const double p = k / static_cast<double>(c.trials);
        pts[i].mc = p;
        pts[i].err = std::sqrt(p * (1.0 - p) / static_cast<double>(c.trials));
      }
    }
    if (c.format == "json") {
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        nlohmann::json row{{"F", grid[i]}, {"P_s", pts[i].ps}};
        if (mc) {
          row["P_s_mc"] = pts[i].mc;
          row["mc_stderr"] = pts[i].err;
        }
        rows.push_back(row);
      }
      emit(rows.dump(2) + "\n", c.out);
      return 0;
    }
    CsvTable t(mc ? std::vector<std::string>{"F", "P_s", "P_s_mc", "mc_stderr"}
                  : std::vector<std::string>{"F", "P_s"});
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (mc) {
        t.add(grid[i], pts[i].ps, pts[i].mc, pts[i].err);
      } else {
        t.add(grid[i], pts[i].ps);
      }
    }
    emit(t.str(), c.out);
    return 0;
  }

  const auto spec = state_at(c, family, c.F.value_or(0.0));
  if (c.format == "csv") throw UsageError("a single witnessing run reports JSON; use --F-grid for CSV");
  ProtocolReport report;
  if (c.seed) {
    Rng rng = make_stream(*c.seed, 0);
    report = simulate_witness(spec, s, rng);
    std::cout << decision_line(*report.decision, *report.statistic);
  } else {
    report = run_witness(spec, s);
  }
  nlohmann::json j = to_json(report);
  if (c.trials > 0) {
    const auto stats = run_trials<int>(c.trials, point_seed(*c.seed, 1),
                                       [&](Rng& rng) { return sample_statistic(spec, s, rng); });
    long long above = 0;
    CsvTable per_trial({"trial", "statistic", "decision"});
    for (std::size_t t = 0; t < stats.size(); ++t) {
      const Decision d = decide(s, stats[t]);
      if (d == Decision::Above) ++above;
      per_trial.add(static_cast<long long>(t), stats[t], decision_name(d));
    }
    const double frac = static_cast<double>(above) / static_cast<double>(c.trials);
    nlohmann::json summary{{"count", c.trials}, {"fraction_above", frac}};
    const double F = spec.fidelity().value();
    if (F != s.F0.value()) summary["empirical_success"] = F > s.F0.value() ? frac : 1.0 - frac;
    j["trials"] = summary;
    if (!c.trials_out.empty()) per_trial.write(c.trials_out);
  }
  emit(j.dump(2) + "\n", c.out);
  return 0;
}

int cmd_discriminate(const Config& c) {
  const Family family = parse_family(c.family);
  const ProtocolId protocol = parse_protocol(c.protocol);
  if (!c.F1 || !c.F2) throw UsageError("discriminate needs --F1 and --F2");
  if (c.trials > 0 && !c.seed) throw UsageError("--trials needs --seed");
  if (c.format == "csv") throw UsageError("discriminate reports JSON");
  if (c.oracle && !oracle_passes(std::cerr)) return kExitOracle;
  const Fidelity F1(*c.F1);
  const Fidelity F2(*c.F2);

  std::optional<int> r = c.r;
  if (c.auto_r) {
    if (protocol != ProtocolId::P3) throw UsageError("--auto-r applies to p3 only");
    r = optimize_block_size(DiscriminateObjective{F1, F2, family}, 2, 100);
    std::cout << "r*=" << *r << "\n";
  }
  int n = 0;
  if (c.n) {
    n = *c.n;
  } else if (protocol == ProtocolId::P3) {
    n = 20 * r.value_or(2);
  } else {
    throw UsageError("discriminate needs --n");
  }
  if (n < 1) throw UsageError("--n must be >= 1");
  const std::optional<int> d = c.d > 0 ? std::optional<int>(c.d) : std::nullopt;
  auto rep = run_discrimination(protocol, family, n, F1, F2, d, r);
  nlohmann::json j;

  if (c.seed) {
    WitnessSetup s;
    s.protocol = protocol;
    s.family = family;
    s.n = n;
    s.d = d.value_or(protocol == ProtocolId::P1 ? minimum_counter_dimension(family, n) : 0);
    s.r = rep.block_size.value_or(2);
    const auto spec = state_at(c, family, c.F.value_or(*c.F1));
    Rng rng = make_stream(*c.seed, 0);
    const int stat = sample_statistic(spec, s, rng);
    rep.statistic = stat;
    rep.decision = rep.rule.declares_first(stat) ? Decision::First : Decision::Second;
    std::cout << decision_line(*rep.decision, stat);
    j = to_json(rep);
    if (c.trials > 0) {
      const auto stats = run_trials<int>(c.trials, point_seed(*c.seed, 1),
                                         [&](Rng& g) { return sample_statistic(spec, s, g); });
      long long first = 0;
      CsvTable per_trial({"trial", "statistic", "decision"});
      for (std::size_t t = 0; t < stats.size(); ++t) {
        const bool f = rep.rule.declares_first(stats[t]);
        first += f;
        per_trial.add(static_cast<long long>(t), stats[t],
                      decision_name(f ? Decision::First : Decision::Second));
      }
      j["trials"] = {{"count", c.trials},
                     {"fraction_first", static_cast<double>(first) / c.trials},
                     {"true_F", spec.fidelity().value()}};
      if (!c.trials_out.empty()) per_trial.write(c.trials_out);
    }
  } else {
    j = to_json(rep);
  }
  emit(j.dump(2) + "\n", c.out);
  return 0;
}

int cmd_figure(const Config& c) {
  if (c.which.empty()) throw UsageError("figure needs an id: fig3a fig3b fig4 fig5 fig7 fig8");
  const auto files = make_figure(c.which);
  const std::filesystem::path dir = c.out.empty() ? std::filesystem::path(".") : std::filesystem::path(c.out);
  for (const auto& [name, table] : files) {
    table.write(dir / name);
    std::cout << (dir / name).string() << " (" << table.size() << " rows)\n";
  }
  return 0;
}

int cmd_oracle(const Config& c) {
  oracle::OracleOptions opt;
  if (c.n) opt.max_n = *c.n;
  if (c.d > 0) opt.max_d = c.d;
  if (c.corrupt_grouping) opt.symbolic_grouping = Grouping::Interleaved;
  const auto results = oracle::run_oracle_suite(opt);
  int failed = 0;
  for (const auto& r : results) {
    if (!r.passed()) ++failed;
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name
              << " mismatch=" << format_number(r.mismatch)
              << " tol=" << format_number(r.tolerance) << "\n";
  }
  std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? 0 : kExitOracle;
}

void add_run_flags(CLI::App& sub, Config& c) {
  sub.add_option("--protocol", c.protocol, "p0, p1, p2 or p3");
  sub.add_option("--family", c.family, "amp, dephasing, werner or bell_diagonal");
  sub.add_option("--n", c.n, "ensemble size (N for p3)");
  sub.add_option("--F", c.F, "true fidelity");
  sub.add_option("--weights", c.weights, "Bell weights p00 p01 p10 p11 (bell_diagonal)")
      ->expected(4);
  sub.add_option("--delta0", c.delta0, "p2 group cut (0 = automatic)");
  sub.add_option("--d", c.d, "auxiliary dimension (0 = minimum)");
  sub.add_option("--r", c.r, "p3 block size");
  sub.add_flag("--auto-r", c.auto_r, "optimize the p3 block size");
  sub.add_option("--trials", c.trials, "Monte Carlo trials (needs --seed)");
  sub.add_option("--seed", c.seed, "64-bit seed; enables sampling");
  sub.add_flag("--oracle", c.oracle, "run the dense cross-check first");
  sub.add_option("--out", c.out, "output file (default stdout)");
  sub.add_option("--trials-out", c.trials_out, "per-trial CSV");
  sub.add_option("--format", c.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sub.add_option("--config", c.config_file, "JSON config file; flags override its values");
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  try {
    if (const auto path = config_path(argc, argv)) apply_config_file(*path, c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  CLI::App app{"Entanglement witnessing and fidelity discrimination"};
  app.require_subcommand(1);

  auto* witness = app.add_subcommand("witness", "decide whether F is above F0");
  add_run_flags(*witness, c);
  witness->add_option("--F-grid", c.F_grid, "lo:hi:steps sweep");
  witness->add_option("--F0", c.F0, "threshold fidelity");
  witness->add_option("--delta", c.delta, "posterior level");
  witness->add_option("--m", c.m, "p2 register dimension");
  witness->add_option("--rounds", c.rounds, "p3 parity rounds");

  auto* discriminate = app.add_subcommand("discriminate", "decide between F1 and F2");
  add_run_flags(*discriminate, c);
  discriminate->add_option("--F1", c.F1, "first hypothesis");
  discriminate->add_option("--F2", c.F2, "second hypothesis");

  auto* figure = app.add_subcommand("figure", "write figure data as CSV");
  figure->add_option("which,--which", c.which, "fig3a, fig3b, fig4, fig5, fig7 or fig8");
  figure->add_option("--out", c.out, "output directory");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "compare symbolic and dense routes");
  oracle_cmd->add_option("--n", c.n, "largest copy count checked");
  oracle_cmd->add_option("--d", c.d, "largest auxiliary dimension checked");
  oracle_cmd->add_flag("--corrupt-grouping", c.corrupt_grouping,
                       "use a wrong grouping on the symbolic side (must fail)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*witness) return cmd_witness(c);
    if (*discriminate) return cmd_discriminate(c);
    if (*figure) return cmd_figure(c);
    if (*oracle_cmd) return cmd_oracle(c);
  } catch (const UnsupportedCombination& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const DimensionCapExceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitUsage;
}
