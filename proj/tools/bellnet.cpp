// bellnet: exact calculators for segmented Bell operator families on hybrid
// networks. Subcommands cover validation, operator construction, quantum /
// classical / no-signaling evaluation, closed-form bounds, classification,
// and the bundled reproduction suite.

#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bellnet/classical.hpp"
#include "bellnet/hybrid.hpp"
#include "bellnet/mathutil.hpp"
#include "bellnet/nosignal.hpp"
#include "bellnet/quantum.hpp"
#include "bellnet/reproduce.hpp"

using nlohmann::ordered_json;
using namespace bellnet;

namespace {

constexpr uint64_t kDefaultSeed = 0xbe115eed;

struct Output {
  bool json = false;
  uint64_t seed = kDefaultSeed;
  std::chrono::steady_clock::time_point start =
      std::chrono::steady_clock::now();

  ordered_json envelope(const std::string& command) const {
    ordered_json report;
    report["schema"] = 1;
    report["command"] = command;
    report["seed"] = seed;
    return report;
  }

  void emit(ordered_json report) const {
    report["wall_ms"] =
        std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start)
            .count();
    std::cout << report.dump(2) << "\n";
  }
};

int exit_code(const Error& e) {
  switch (e.kind()) {
    case Error::Kind::resource: return 2;
    case Error::Kind::parse:
    case Error::Kind::validation: return 1;
    case Error::Kind::internal: return 70;
  }
  return 70;
}

HybridSplit parse_uvw(const std::string& text) {
  HybridSplit split;
  if (std::sscanf(text.c_str(), "%d,%d,%d", &split.u, &split.v, &split.w) !=
      3) {
    throw Error(Error::Kind::parse,
                "--uvw expects three comma-separated counts, e.g. 0,2,0");
  }
  return split;
}

ordered_json operator_row(const SegmentedBellOperator& op) {
  ordered_json row;
  row["l"] = op.bits();
  row["g"] = op.stabilizer().str();
  row["omega"] = op.weight();
  row["sign"] = op.sign;
  row["b_setting"] = op.b_setting.str();
  row["y"] = op.setting_label;
  return row;
}

int cmd_validate(const std::string& file, const Output& out) {
  const NetworkSpec spec = load_network(file);
  const auto diagnostics = validate(spec);
  if (out.json) {
    ordered_json report = out.envelope("validate");
    report["network"] = file;
    report["digest"] = digest(spec);
    report["diagnostics"] = ordered_json::array();
    for (const auto& d : diagnostics) {
      report["diagnostics"].push_back({{"field", d.field},
                                       {"message", d.message}});
    }
    report["valid"] = diagnostics.empty();
    out.emit(report);
  } else if (diagnostics.empty()) {
    std::cout << file << ": valid (digest " << digest(spec) << ")\n";
  } else {
    for (const auto& d : diagnostics) {
      std::cerr << file << ": " << d.field << ": " << d.message << "\n";
    }
  }
  return diagnostics.empty() ? 0 : 1;
}

int cmd_operators(const std::string& file, const Output& out) {
  const NetworkSpec spec = load_network(file);
  ordered_json report = out.envelope("operators");
  report["network"] = file;
  report["digest"] = digest(spec);
  if (is_virtual_form(normalize_star(spec))) {
    report["family"] = "virtual-pairs";
    report["pairs"] = ordered_json::array();
    for (const auto& pair : virtual_qubit_pairs(spec)) {
      ordered_json jp;
      jp["l"] = pair.plus.setting_label;
      jp["aggregate0"] = pair.plus.a_terms[0].pauli0.str();
      jp["aggregate1"] = pair.plus.a_terms[0].pauli1.str();
      jp["plus"] = operator_row(pair.plus);
      jp["minus"] = operator_row(pair.minus);
      report["pairs"].push_back(std::move(jp));
    }
  } else {
    const OperatorFamily family = build_operators(spec);
    report["family"] = "segmented";
    report["m_a"] = family.m_a;
    report["normalization"] = family.normalization_log;
    report["operators"] = ordered_json::array();
    for (const auto& op : family.ops) {
      report["operators"].push_back(operator_row(op));
    }
  }
  if (out.json) {
    out.emit(report);
    return 0;
  }
  if (report["family"] == "virtual-pairs") {
    for (const auto& jp : report["pairs"]) {
      std::cout << "pair l=" << jp["l"].get<std::string>() << "  ("
                << jp["aggregate0"].get<std::string>() << ", "
                << jp["aggregate1"].get<std::string>() << ")\n";
    }
    return 0;
  }
  std::cout << "l     omega      sign  g_l / B-setting (y)\n";
  for (const auto& row : report["operators"]) {
    std::cout << row["l"].get<std::string>() << "  " << row["omega"].get<double>()
              << "  " << (row["sign"].get<int>() > 0 ? "+" : "-") << "     "
              << row["g"].get<std::string>() << "  "
              << row["b_setting"].get<std::string>() << " (y="
              << row["y"].get<std::string>() << ")\n";
  }
  return 0;
}

int cmd_bounds(const HybridSplit& split, double p, const Output& out) {
  const BoundsReport bounds = closed_form_bounds(split, p);
  const double witness = optimal_witness_value(split, p);
  ordered_json report = out.envelope("bounds");
  report["split"] = {split.u, split.v, split.w};
  report["m_a"] = split.m_a();
  report["p"] = p;
  report["B_C"] = bounds.b_c.value;
  report["B_C_valid"] = bounds.b_c.is_valid_bound;
  if (!bounds.b_c.is_valid_bound) {
    report["B_C_note"] = "NOT-A-BOUND for p > 1; deterministic optimum is 1";
  }
  report["B_Q"] = bounds.b_q;
  report["B_NS"] = bounds.b_ns;
  report["B_max"] = bounds.b_max;
  report["witness_value"] = witness;
  if (out.json) {
    out.emit(report);
  } else {
    std::cout << "N_H^<" << split.u << "," << split.v << "," << split.w
              << ">, p = " << p << "\n"
              << "  B_C   = " << bounds.b_c.value
              << (bounds.b_c.is_valid_bound ? "" : "  [NOT-A-BOUND for p>1]")
              << "\n  B_Q   = " << bounds.b_q << "\n  B_NS  = " << bounds.b_ns
              << "\n  B_max = " << bounds.b_max << " (witness " << witness
              << ")\n";
  }
  return 0;
}

int cmd_quantum(const std::string& file, std::optional<double> p_flag,
                bool dense_check, bool sos, const Output& out) {
  const NetworkSpec spec = load_network(file);
  const double p = p_flag.value_or(spec.p);
  ordered_json report = out.envelope("quantum");
  report["network"] = file;
  report["digest"] = digest(spec);
  report["p"] = p;

  if (is_virtual_form(normalize_star(spec))) {
    std::vector<StabilizerState> states;
    for (const auto& s : spec.sources) states.push_back(*s.state);
    const StabilizerState network = tensor_product(states);
    report["family"] = "virtual-pairs";
    report["pairs"] = ordered_json::array();
    for (const auto& pair : virtual_qubit_pairs(spec)) {
      const double plus = quantum_value(pair.plus, network);
      const double minus = quantum_value(pair.minus, network);
      report["pairs"].push_back(
          {{"l", pair.plus.setting_label},
           {"values", {plus, minus}},
           {"sum", signed_pow(plus, p) + signed_pow(minus, p)},
           {"bound", exp2d(1.0 - p / 2.0)}});
    }
    if (out.json) {
      out.emit(report);
    } else {
      for (const auto& jp : report["pairs"]) {
        std::cout << "pair l=" << jp["l"].get<std::string>() << ": sum = "
                  << jp["sum"].get<double>() << "  (bound "
                  << jp["bound"].get<double>() << ")\n";
      }
    }
    return 0;
  }

  for (const auto& s : spec.sources) {
    if (s.kind != SourceKind::quantum) {
      throw Error(Error::Kind::validation,
                  "quantum evaluation requires a fully-quantum network; use "
                  "`classify` for hybrid networks");
    }
  }
  const OperatorFamily family = build_operators(spec);
  report["m_a"] = family.m_a;
  report["per_l"] = ordered_json::array();
  double sum = 0.0;
  std::optional<DenseState> dense;
  if (dense_check) {
    dense = DenseState::from_stabilizer(family.network_state);
  }
  double worst_gap = 0.0;
  for (const auto& op : family.ops) {
    const double value = quantum_value(op, family.network_state);
    sum += signed_pow(value, p);
    ordered_json row;
    row["l"] = op.bits();
    row["value"] = value;
    row["omega"] = op.weight();
    if (dense) {
      const double oracle = dense_expectation(op, *dense);
      row["dense"] = oracle;
      worst_gap = std::max(worst_gap, std::fabs(value - oracle));
    }
    report["per_l"].push_back(std::move(row));
  }
  report["sum"] = sum;
  report["bound"] = exp2d(family.m_a * (1.0 - p / 2.0));
  if (dense) report["max_dense_gap"] = worst_gap;
  if (sos) {
    const DenseState tailored =
        dense ? *dense : DenseState::from_stabilizer(family.network_state);
    const SosWitness witness = sos_residuals(family, tailored, p);
    report["sos"] = {{"residuals", witness.residuals},
                     {"weights", witness.weights},
                     {"gamma_psd", witness.gamma_psd}};
    if (witness.gamma_min_eigenvalue) {
      report["sos"]["gamma_min_eigenvalue"] = *witness.gamma_min_eigenvalue;
    }
  }
  if (out.json) {
    out.emit(report);
  } else {
    std::cout << "sum_l <B_l>^p = " << sum << "  (quantum bound "
              << report["bound"].get<double>() << ")\n";
    if (dense) std::cout << "max |stabilizer - dense| = " << worst_gap << "\n";
    if (sos) {
      double worst = 0.0;
      for (double r : report["sos"]["residuals"].get<std::vector<double>>()) {
        worst = std::max(worst, r);
      }
      std::cout << "max ||M_l|Psi>|| = " << worst << "\n";
    }
  }
  return 0;
}

int cmd_sweep(const std::string& file, std::optional<double> p_flag, int grid,
              int jobs, const Output& out) {
  const NetworkSpec spec = load_network(file);
  const double p = p_flag.value_or(spec.p);
  const SweepResult sweep = sweep_angles(spec, p, grid, jobs);
  ordered_json report = out.envelope("sweep");
  report["network"] = file;
  report["digest"] = digest(spec);
  report["p"] = p;
  report["grid"] = grid;
  report["max"] = sweep.max_value;
  report["argmax"] = sweep.angles;
  report["bound"] =
      exp2d(spec.a_observers().size() * (1.0 - p / 2.0));
  if (out.json) {
    out.emit(report);
  } else {
    std::cout << "max sum_l <B_l>^p = " << sweep.max_value << " at theta = (";
    for (size_t i = 0; i < sweep.angles.size(); ++i) {
      std::cout << (i ? ", " : "") << sweep.angles[i];
    }
    std::cout << ")\n";
  }
  return 0;
}

int cmd_bruteforce(const std::string& file, std::optional<double> p_flag,
                   bool mixture, int restarts, const Output& out) {
  const NetworkSpec spec = load_network(file);
  const double p = p_flag.value_or(spec.p);
  SettingTable table;
  if (is_virtual_form(normalize_star(spec))) {
    const auto pair = virtual_qubit_pair(spec, 0);
    table = setting_table({pair.plus, pair.minus});
  } else {
    table = setting_table(spec);
  }
  ordered_json report = out.envelope("bruteforce");
  report["network"] = file;
  report["digest"] = digest(spec);
  report["p"] = p;
  report["m_a"] = table.m_a;
  report["settings"] = table.labels.size();
  report["strategies"] = strategy_count(table);
  const ClassicalBound bound = classical_bound(table.m_a, p);
  report["bound"] = bound.value;
  report["bound_validity"] =
      bound.is_valid_bound ? "VALID" : "NOT-A-BOUND";
  if (mixture) {
    const MixtureMax mix = classical_max_mixture(table, p, restarts, out.seed);
    report["mode"] = mix.used_vertex_optimum ? "vertex" : "mixture";
    report["max"] = mix.value;
    report["uniform_witness"] = mix.uniform_value;
    report["weights"] = mix.weights;
  } else {
    const DeterministicMax best = classical_max_deterministic(table, p);
    report["mode"] = "deterministic";
    report["max"] = best.value;
    report["exact"] = best.exact;
    ordered_json witness;
    witness["index"] = best.witness_index;
    witness["a"] = ordered_json::array();
    for (const auto& [a0, a1] : best.witness.a) {
      witness["a"].push_back({a0, a1});
    }
    witness["b"] = ordered_json::object();
    for (size_t y = 0; y < table.labels.size(); ++y) {
      witness["b"][table.labels[y]] = best.witness.b[y];
    }
    report["witness"] = std::move(witness);
  }
  if (out.json) {
    out.emit(report);
  } else {
    std::cout << "LHV max = " << report["max"].get<double>() << "  (bound "
              << bound.value << ", "
              << report["bound_validity"].get<std::string>() << ")\n";
  }
  return 0;
}

int cmd_ns(const std::string& file, std::optional<double> p_flag,
           const Output& out) {
  const NetworkSpec spec = load_network(file);
  const double p = p_flag.value_or(spec.p);
  const auto correlators = ns_correlators(spec);
  ordered_json report = out.envelope("ns");
  report["network"] = file;
  report["digest"] = digest(spec);
  report["p"] = p;
  report["per_l"] = ordered_json::array();
  for (const auto& c : correlators) {
    report["per_l"].push_back(boost::rational_cast<double>(c));
  }
  report["sum"] = ns_value(spec, p);
  report["max"] = ns_max(static_cast<int>(spec.a_observers().size()), p);
  if (out.json) {
    out.emit(report);
  } else {
    std::cout << "sum_l <B_l>^p = " << report["sum"].get<double>()
              << "  (algebraic max " << report["max"].get<double>() << ")\n";
  }
  return 0;
}

int cmd_classify(const std::string& file, std::optional<std::string> uvw,
                 std::optional<double> p_flag, const Output& out) {
  ordered_json report = out.envelope("classify");
  HybridSplit split;
  double p = p_flag.value_or(1.0);
  std::optional<double> achieved;
  if (!file.empty()) {
    const NetworkSpec spec = load_network(file);
    p = p_flag.value_or(spec.p);
    split = split_of(spec);
    achieved = achieved_value(spec, p);
    report["network"] = file;
    report["digest"] = digest(spec);
  } else if (uvw) {
    split = parse_uvw(*uvw);
    achieved = optimal_witness_value(split, p);
  } else {
    throw Error(Error::Kind::parse, "classify needs a network file or --uvw");
  }
  const BoundsReport bounds = closed_form_bounds(split, p);
  report["split"] = {split.u, split.v, split.w};
  report["p"] = p;
  report["B_C"] = bounds.b_c.value;
  report["B_C_valid"] = bounds.b_c.is_valid_bound;
  report["B_Q"] = bounds.b_q;
  report["B_NS"] = bounds.b_ns;
  report["B_max"] = bounds.b_max;
  report["achieved"] = *achieved;
  const NonlocalityDegree degree =
      t_nonlocality_degree(*achieved, split.m_a(), p);
  if (degree.t) {
    report["t_nonlocal"] = *degree.t;
  } else {
    report["t_nonlocal"] = nullptr;
    report["classically_modelable"] = degree.classically_modelable;
  }
  // Verdicts against the pure reference splits at the same M_A.
  report["vs"] = ordered_json::object();
  const int n = split.m_a();
  report["vs"]["fully_classical"] =
      to_string(compare_reproducibility(split, {n, 0, 0}));
  report["vs"]["fully_quantum"] =
      to_string(compare_reproducibility(split, {0, n, 0}));
  report["vs"]["fully_ns"] =
      to_string(compare_reproducibility(split, {0, 0, n}));
  if (out.json) {
    out.emit(report);
  } else {
    std::cout << "split <" << split.u << "," << split.v << "," << split.w
              << ">  achieved " << *achieved << "  B_max " << bounds.b_max
              << "\n";
    if (degree.t) {
      std::cout << "t-nonlocal degree: " << *degree.t << "\n";
    } else {
      std::cout << "not t-nonlocal for any t (classically modelable)\n";
    }
  }
  return 0;
}

int cmd_reproduce(const std::string& networks, uint64_t seed, int jobs,
                  const Output& out) {
  ReproduceOptions options;
  if (!networks.empty()) options.networks_dir = networks;
  options.seed = seed;
  options.jobs = jobs;
  const auto rows = reproduce_paper(options);
  if (out.json) {
    ordered_json report = out.envelope("reproduce-paper");
    report["rows"] = ordered_json::array();
    for (const auto& row : rows) {
      report["rows"].push_back({{"id", row.id},
                                {"title", row.title},
                                {"status", to_string(row.status)},
                                {"detail", row.detail},
                                {"seconds", row.seconds}});
    }
    report["passed"] = all_rows_passed(rows);
    out.emit(report);
  } else {
    std::printf("seed: %#llx\n", static_cast<unsigned long long>(seed));
    for (const auto& row : rows) {
      std::printf("[%s] %-4s %-55s (%.2fs) %s\n", to_string(row.status).c_str(),
                  row.id.c_str(), row.title.c_str(), row.seconds,
                  row.status == RowResult::Status::pass ? ""
                                                        : row.detail.c_str());
    }
  }
  return all_rows_passed(rows) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"segmented Bell operator calculator for hybrid networks"};
  app.require_subcommand(1);

  Output out;
  std::string output_mode = "table";
  app.add_option("--output", output_mode, "output format: json|table")
      ->check(CLI::IsMember({"json", "table"}));
  app.add_option("--seed", out.seed, "seed for sampled checks");
  int jobs = 0;
  app.add_option("--jobs", jobs, "worker threads (0 = hardware)");

  std::string file, uvw_text, networks_dir;
  std::optional<double> p_flag;
  int grid = 101, restarts = 1000;
  bool dense_check = false, sos = false, mixture = false;

  auto* validate_cmd = app.add_subcommand("validate", "check a network file");
  validate_cmd->add_option("file", file)->required();

  auto* operators_cmd =
      app.add_subcommand("operators", "print the segmented operator family");
  operators_cmd->add_option("file", file)->required();

  auto* bounds_cmd =
      app.add_subcommand("bounds", "closed-form bounds for a hybrid split");
  bounds_cmd->add_option("--uvw", uvw_text, "u,v,w source counts")->required();
  int ma_flag = 0;
  bounds_cmd->add_option("--ma", ma_flag, "M_A consistency check");
  bounds_cmd->add_option("--p", p_flag, "exponent p")->required();

  auto* quantum_cmd =
      app.add_subcommand("quantum", "evaluate the tailored quantum values");
  quantum_cmd->add_option("file", file)->required();
  quantum_cmd->add_option("--p", p_flag, "exponent p (default: file)");
  quantum_cmd->add_flag("--dense-check", dense_check,
                        "cross-check against the dense oracle");
  quantum_cmd->add_flag("--sos", sos, "report SOS residuals");

  auto* sweep_cmd = app.add_subcommand("sweep", "grid search over angles");
  sweep_cmd->add_option("file", file)->required();
  sweep_cmd->add_option("--p", p_flag, "exponent p (default: file)");
  sweep_cmd->add_option("--grid", grid, "grid points per angle");

  auto* brute_cmd =
      app.add_subcommand("bruteforce", "LHV optimum by enumeration");
  brute_cmd->add_option("file", file)->required();
  brute_cmd->add_option("--p", p_flag, "exponent p (default: file)");
  brute_cmd->add_flag("--mixture", mixture, "optimize over mixtures (p < 1)");
  brute_cmd->add_option("--restarts", restarts, "hill-climb restarts");

  auto* ns_cmd = app.add_subcommand("ns", "evaluate no-signaling networks");
  ns_cmd->add_option("file", file)->required();
  ns_cmd->add_option("--p", p_flag, "exponent p (default: file)");

  auto* classify_cmd =
      app.add_subcommand("classify", "bounds, achieved value, t-degree");
  classify_cmd->add_option("file", file);
  classify_cmd->add_option("--uvw", uvw_text, "u,v,w instead of a file");
  classify_cmd->add_option("--p", p_flag, "exponent p");

  auto* repro_cmd =
      app.add_subcommand("reproduce-paper", "run the verification matrix");
  repro_cmd->add_option("--networks", networks_dir, "network file directory");

  // Let --output/--seed/--jobs appear after the subcommand too.
  for (CLI::App* sub :
       app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 64;
  }

  out.json = output_mode == "json";
  try {
    if (validate_cmd->parsed()) return cmd_validate(file, out);
    if (operators_cmd->parsed()) return cmd_operators(file, out);
    if (bounds_cmd->parsed()) {
      const HybridSplit split = parse_uvw(uvw_text);
      if (ma_flag > 0 && ma_flag != split.m_a()) {
        throw Error(Error::Kind::parse, "--ma disagrees with --uvw");
      }
      return cmd_bounds(split, *p_flag, out);
    }
    if (quantum_cmd->parsed())
      return cmd_quantum(file, p_flag, dense_check, sos, out);
    if (sweep_cmd->parsed()) return cmd_sweep(file, p_flag, grid, jobs, out);
    if (brute_cmd->parsed())
      return cmd_bruteforce(file, p_flag, mixture, restarts, out);
    if (ns_cmd->parsed()) return cmd_ns(file, p_flag, out);
    if (classify_cmd->parsed()) {
      return cmd_classify(file,
                          uvw_text.empty()
                              ? std::nullopt
                              : std::make_optional(uvw_text),
                          p_flag, out);
    }
    if (repro_cmd->parsed())
      return cmd_reproduce(networks_dir, out.seed, jobs, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
  return 64;
}
