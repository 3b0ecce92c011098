#include "bellnet/reproduce.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "bellnet/classical.hpp"
#include "bellnet/hybrid.hpp"
#include "bellnet/mathutil.hpp"
#include "bellnet/nosignal.hpp"
#include "bellnet/quantum.hpp"

#ifndef BELLNET_NETWORKS_DIR
#define BELLNET_NETWORKS_DIR "networks"
#endif

namespace bellnet {

namespace {

const double kPi = std::acos(-1.0);

struct Checker {
  std::ostringstream detail;
  bool ok = true;
  int checks = 0;

  void expect(bool condition, const std::string& message) {
    ++checks;
    if (!condition) {
      ok = false;
      if (detail.tellp() > 0) detail << "; ";
      detail << message;
    }
  }

  void expect_near(double got, double want, double tol,
                   const std::string& what) {
    expect(std::fabs(got - want) <= tol,
           what + ": got " + std::to_string(got) + ", want " +
               std::to_string(want) + " (tol " + std::to_string(tol) + ")");
  }
};

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::vector<HybridSplit> all_splits(int m_a) {
  std::vector<HybridSplit> out;
  for (int u = 0; u <= m_a; ++u)
    for (int v = 0; u + v <= m_a; ++v) out.push_back({u, v, m_a - u - v});
  return out;
}

}  // namespace

std::string to_string(RowResult::Status status) {
  switch (status) {
    case RowResult::Status::pass: return "PASS";
    case RowResult::Status::fail: return "FAIL";
    case RowResult::Status::skip: return "SKIP";
  }
  return "?";
}

bool all_rows_passed(const std::vector<RowResult>& rows) {
  for (const auto& row : rows) {
    if (row.status == RowResult::Status::fail) return false;
  }
  return true;
}

std::vector<RowResult> reproduce_paper(const ReproduceOptions& options) {
  const std::filesystem::path dir = options.networks_dir.empty()
                                        ? std::filesystem::path(BELLNET_NETWORKS_DIR)
                                        : options.networks_dir;
  auto net = [&](const char* name) { return load_network(dir / name); };
  const char* kStars[3] = {"star1.json", "star2.json", "star3.json"};
  const char* kNs[3] = {"ns1.json", "ns2.json", "ns3.json"};

  std::vector<RowResult> rows;
  auto run_row = [&](const std::string& id, const std::string& title,
                     const std::function<void(Checker&)>& body) {
    RowResult row;
    row.id = id;
    row.title = title;
    const auto start = std::chrono::steady_clock::now();
    Checker check;
    try {
      body(check);
      row.status =
          check.ok ? RowResult::Status::pass : RowResult::Status::fail;
      row.detail = check.ok ? std::to_string(check.checks) + " checks"
                            : check.detail.str();
    } catch (const Error& e) {
      if (e.kind() == Error::Kind::resource) {
        row.status = RowResult::Status::skip;
        row.detail = e.what();
      } else {
        row.status = RowResult::Status::fail;
        row.detail = e.what();
      }
    } catch (const std::exception& e) {
      row.status = RowResult::Status::fail;
      row.detail = e.what();
    }
    row.seconds = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    rows.push_back(row);
  };

  run_row("A0", "network files validate as bundled", [&](Checker& c) {
    for (const char* name :
         {"star1.json", "star2.json", "star3.json", "ghz3.json",
          "star2-ghz.json", "virtual-s1.json", "ns1.json", "ns2.json",
          "ns3.json", "hybrid-101.json", "hybrid-111.json"}) {
      const auto diagnostics = validate(net(name));
      std::string joined;
      for (const auto& d : diagnostics) joined += d.field + ": " + d.message + " ";
      c.expect(diagnostics.empty(), std::string(name) + " invalid: " + joined);
    }
    bool flagged = false;
    for (const auto& d : validate(net("bad-nb1.json"))) {
      flagged = flagged || d.message.find("n_B >= 2 violated") != std::string::npos;
    }
    c.expect(flagged, "bad-nb1.json missed the n_B diagnostic");
  });

  run_row("A1", "linear classical bound: brute-force max is exactly 1",
          [&](Checker& c) {
            for (const char* name : kStars) {
              const DeterministicMax best =
                  classical_max_deterministic(setting_table(net(name)), 1.0);
              c.expect(best.exact, std::string(name) + ": not integer-exact");
              c.expect(best.value == 1.0,
                       std::string(name) + ": max " + format_double(best.value));
            }
          });

  run_row("A2", "nonlinear classical bound 2^{M_A(1-p)} via mixtures",
          [&](Checker& c) {
            for (const char* name : kStars) {
              const SettingTable table = setting_table(net(name));
              for (double p : {0.5, 0.75}) {
                const double bound = classical_bound(table.m_a, p).value;
                const MixtureMax mix = classical_max_mixture(
                    table, p, 1000, options.seed ^ table.m_a);
                c.expect_near(mix.uniform_value, bound, 1e-9,
                              std::string(name) + " uniform witness, p=" +
                                  format_double(p));
                c.expect(mix.value <= bound + 1e-9,
                         std::string(name) + ": climb beat the bound: " +
                             format_double(mix.value));
              }
            }
            const DeterministicMax quad = classical_max_deterministic(
                setting_table(net("star1.json")), 2.0);
            c.expect_near(quad.value, 1.0, 0.0,
                          "p=2 deterministic max (documented p>1 deviation)");
          });

  run_row("A3", "quantum value product form and sweep maximum",
          [&](Checker& c) {
            std::mt19937_64 rng(options.seed);
            std::uniform_real_distribution<double> angle(0.02, kPi / 2 - 0.02);
            for (const char* name : kStars) {
              const OperatorFamily family = build_operators(net(name));
              for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> theta(family.m_a);
                for (auto& t : theta) t = angle(rng);
                for (double p : {0.5, 1.0, 2.0}) {
                  double expected = 1.0;
                  for (double t : theta) {
                    expected *= std::pow(std::cos(t), p) +
                                std::pow(std::sin(t), p);
                  }
                  c.expect_near(quantum_sum(family, p, theta), expected, 1e-9,
                                std::string(name) + " product form");
                }
              }
            }
            for (const char* name : kStars) {
              const NetworkSpec spec = net(name);
              const int m_a = static_cast<int>(spec.a_observers().size());
              const double step = kPi / (2.0 * 102);
              for (double p : {0.5, 1.0, 2.0}) {
                const SweepResult sweep =
                    sweep_angles(spec, p, 101, options.jobs);
                const double bound = exp2d(m_a * (1.0 - p / 2.0));
                c.expect_near(sweep.max_value, bound, 1e-3,
                              std::string(name) + " sweep max, p=" +
                                  format_double(p));
                if (p < 2.0) {
                  for (double a : sweep.angles) {
                    c.expect(std::fabs(a - kPi / 4) <= step + 1e-12,
                             std::string(name) + " argmax off pi/4 at p=" +
                                 format_double(p));
                  }
                }
              }
            }
          });

  run_row("A4", "stabilizer path equals dense oracle on every (l, network)",
          [&](Checker& c) {
            for (const char* name :
                 {"star2.json", "star3.json", "ghz3.json"}) {
              const OperatorFamily family = build_operators(net(name));
              const DenseState dense =
                  DenseState::from_stabilizer(family.network_state);
              for (const auto& op : family.ops) {
                const double stab = quantum_value(op, family.network_state);
                const double oracle = dense_expectation(op, dense);
                c.expect(std::fabs(stab - oracle) < 1e-9,
                         std::string(name) + " l=" + op.bits() + ": " +
                             format_double(stab) + " vs " +
                             format_double(oracle));
              }
            }
            const NetworkSpec virt = net("virtual-s1.json");
            std::vector<StabilizerState> states;
            for (const auto& s : virt.sources) states.push_back(*s.state);
            const StabilizerState network = tensor_product(states);
            const DenseState dense = DenseState::from_stabilizer(network);
            for (const auto& pair : virtual_qubit_pairs(virt)) {
              for (const auto* op : {&pair.plus, &pair.minus}) {
                const double stab = quantum_value(*op, network);
                const double oracle = dense_expectation(*op, dense);
                c.expect(std::fabs(stab - oracle) < 1e-9,
                         "virtual pair " + std::to_string(pair.l));
              }
            }
          });

  run_row("A5", "SOS residuals vanish on tailored states only",
          [&](Checker& c) {
            for (const char* name :
                 {"star1.json", "star2.json", "ghz3.json"}) {
              const SosWitness witness = sos_residuals(net(name), 1.0);
              for (double r : witness.residuals) {
                c.expect(r < 1e-9, std::string(name) + " residual " +
                                       format_double(r));
              }
            }
            const OperatorFamily family = build_operators(net("star2.json"));
            const DenseState zeros =
                DenseState::basis(family.quantum_roster, 0);
            const SosWitness witness = sos_residuals(family, zeros, 1.0);
            double worst = 0.0;
            for (double r : witness.residuals) worst = std::max(worst, r);
            c.expect(worst >= 0.5,
                     "control state residual only " + format_double(worst));
          });

  run_row("A6", "PR-box witness reaches 2^{M_A} exactly", [&](Checker& c) {
    for (int i = 0; i < 3; ++i) {
      const NetworkSpec spec = net(kNs[i]);
      for (const auto& src : spec.sources) {
        c.expect(validate_box(*src.box).empty(),
                 std::string(kNs[i]) + ": witness box fails validation");
      }
      const auto correlators = ns_correlators(spec);
      c.expect(correlators.size() == (size_t{1} << (i + 1)),
               std::string(kNs[i]) + ": wrong operator count");
      for (const auto& corr : correlators) {
        c.expect(corr == Rational(1),
                 std::string(kNs[i]) + ": correlator not exactly 1");
      }
      for (double p : {0.5, 1.0}) {
        c.expect(ns_value(spec, p) == exp2d(i + 1),
                 std::string(kNs[i]) + ": sum not exact at p=" +
                     format_double(p));
      }
    }
  });

  run_row("A7", "hybrid closed form matches witnesses; r1 ordering holds",
          [&](Checker& c) {
            for (int m_a : {2, 3}) {
              for (const auto& split : all_splits(m_a)) {
                for (double p : {0.5, 1.0}) {
                  const double closed = closed_form_bounds(split, p).b_max;
                  c.expect_near(optimal_witness_value(split, p), closed, 1e-9,
                                to_string(split) + " witness, p=" +
                                    format_double(p));
                  const double lo =
                      closed_form_bounds({split.u, m_a - split.u, 0}, p).b_max;
                  const double hi =
                      closed_form_bounds({split.u, 0, m_a - split.u}, p).b_max;
                  c.expect(lo <= closed + 1e-12 && closed <= hi + 1e-12,
                           to_string(split) + " breaks the r1 ordering");
                }
              }
            }
          });

  run_row("A8", "reproducibility and t-nonlocality classification",
          [&](Checker& c) {
            c.expect(compare_reproducibility({0, 2, 0}, {1, 0, 1}) ==
                         Reproducibility::equal,
                     "<0,2,0> vs <1,0,1> not equal");
            const NonlocalityDegree d2 = t_nonlocality_degree(
                closed_form_bounds({0, 2, 0}, 1.0).b_max, 2, 1.0);
            c.expect(d2.t.has_value() && *d2.t == 2,
                     "fully-quantum n=2 degree is not 2");
            const NonlocalityDegree d3 = t_nonlocality_degree(
                closed_form_bounds({0, 3, 0}, 1.0).b_max, 3, 1.0);
            c.expect(d3.t.has_value() && *d3.t == 2,
                     "fully-quantum n=3 degree is not 2");
            for (int m_a = 1; m_a <= 6; ++m_a) {
              for (int u = 0; u <= m_a; ++u) {
                const auto verdict = compare_reproducibility(
                    {0, m_a, 0}, {u, 0, m_a - u});
                const bool dominates =
                    verdict == Reproducibility::first_dominates;
                c.expect(dominates == (2 * u > m_a),
                         "dominance mismatch at M_A=" + std::to_string(m_a) +
                             ", u'=" + std::to_string(u));
              }
            }
          });

  run_row("A9", "three-qubit Mermin block: LHV max 1, quantum value 2",
          [&](Checker& c) {
            const NetworkSpec spec = net("ghz3.json");
            const DeterministicMax best =
                classical_max_deterministic(setting_table(spec), 1.0);
            c.expect(best.exact && best.value == 1.0,
                     "LHV max " + format_double(best.value));
            c.expect_near(quantum_sum(spec, 1.0), 2.0, 1e-9,
                          "quantum fragment sum at pi/4");
          });

  run_row("A10", "virtual qubit pairs: algebra, quantum and LHV values",
          [&](Checker& c) {
            const NetworkSpec spec = net("virtual-s1.json");
            std::vector<StabilizerState> states;
            for (const auto& s : spec.sources) states.push_back(*s.state);
            const StabilizerState network = tensor_product(states);
            const auto pairs = virtual_qubit_pairs(spec);
            c.expect(pairs.size() == 4, "expected 2^{2s} = 4 pairs");
            for (const auto& pair : pairs) {
              const ATerm& term = pair.plus.a_terms[0];
              c.expect(!term.pauli0.commutes_with(term.pauli1),
                       "aggregates commute at l=" + std::to_string(pair.l));
              c.expect((term.pauli0 * term.pauli0).is_identity() &&
                           (term.pauli1 * term.pauli1).is_identity(),
                       "aggregates do not square to identity");
              for (double p : {1.0, 2.0}) {
                const double sum =
                    signed_pow(quantum_value(pair.plus, network), p) +
                    signed_pow(quantum_value(pair.minus, network), p);
                c.expect_near(sum, exp2d(1.0 - p / 2.0), 1e-9,
                              "quantum two-term value at p=" +
                                  format_double(p));
              }
              const SettingTable table =
                  setting_table({pair.plus, pair.minus});
              const DeterministicMax det =
                  classical_max_deterministic(table, 1.0);
              c.expect(det.value == 1.0, "LHV two-term max at p=1");
              const MixtureMax mix = classical_max_mixture(
                  table, 0.5, 1000, options.seed ^ pair.l);
              c.expect_near(mix.uniform_value, exp2d(0.5), 1e-9,
                            "LHV two-term uniform witness at p=1/2");
              c.expect(mix.value <= exp2d(0.5) + 1e-9,
                       "LHV two-term climb beat 2^{1-p}");
            }
          });

  run_row("A11", "product inequality on seeded samples and constants",
          [&](Checker& c) {
            std::mt19937_64 rng(options.seed ^ 0xa11);
            std::uniform_real_distribution<double> unit(0.0, 3.0);
            for (int alpha : {1, 2, 3}) {
              for (int trial = 0; trial < 10000; ++trial) {
                std::vector<double> zc(4), zq(4), zns(4);
                for (int i = 0; i < 4; ++i) {
                  zc[i] = unit(rng);
                  zq[i] = unit(rng);
                  zns[i] = unit(rng);
                }
                const HolderResult r = holder_check(zc, zq, zns, alpha);
                if (!r.holds) {
                  c.expect(false, "violation at alpha=" +
                                      std::to_string(alpha));
                  break;
                }
              }
            }
            const std::vector<double> zc(8, 0.7), zq(8, 1.9), zns(8, 0.4);
            const HolderResult r = holder_check(zc, zq, zns, 3);
            c.expect(std::fabs(r.lhs - r.rhs) <= 1e-12,
                     "constant arrays missed equality: lhs=" +
                         format_double(r.lhs) + " rhs=" + format_double(r.rhs));
          });

  return rows;
}

}  // namespace bellnet
