#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "bellnet/operators.hpp"

namespace bellnet {

// The classical shape of an operator family: per l, the joint B setting
// label and the operator sign. The shared hidden variable set makes one
// global deterministic table the most general strategy.
struct SettingTable {
  int m_a = 0;
  std::vector<std::string> labels;   // distinct joint settings, sorted
  std::vector<int> label_of_l;       // 2^{m_a} entries
  std::vector<int> sign_of_l;
};

SettingTable setting_table(const std::vector<SegmentedBellOperator>& ops);
SettingTable setting_table(const OperatorFamily& family);
SettingTable setting_table(const NetworkSpec& spec);

struct DeterministicStrategy {
  std::vector<std::array<int, 2>> a;  // per observer: outputs at x = 0, 1
  std::vector<int> b;                 // per setting label
};

uint64_t strategy_count(const SettingTable& table);

// Visits all 4^{M_A} * 2^{#labels} strategies exactly once, lexicographic in
// the flat index. Throws Error{resource} with the refused count beyond the
// guard (M_A <= 5, labels <= 32, total <= 2^26).
void enumerate_strategies(
    const SettingTable& table,
    const std::function<void(uint64_t, const DeterministicStrategy&)>& visit);

struct Firing {
  uint32_t l = 0;
  int correlator = 0;  // +1 or -1 at the firing string
};

// The unique l with P_l = 1 for a deterministic strategy.
Firing firing_string(const DeterministicStrategy& strategy,
                     const SettingTable& table);

// The deterministic strategy firing l with correlator +1: a_0 = +1,
// a_1 = (-1)^{l_i}, and b at the firing label cancels the operator sign.
DeterministicStrategy canonical_firing_strategy(uint32_t l,
                                                const SettingTable& table);

struct MixtureValue {
  std::vector<double> p_l;
  std::vector<double> correlators;
  double objective = 0.0;
};

MixtureValue strategy_value(const DeterministicStrategy& strategy,
                            const SettingTable& table, double p);

struct DeterministicMax {
  double value = 0.0;
  DeterministicStrategy witness;
  uint64_t witness_index = 0;
  bool exact = false;  // integer arithmetic (p = 1)
};

DeterministicMax classical_max_deterministic(const SettingTable& table,
                                             double p);

struct MixtureMax {
  double value = 0.0;
  std::vector<double> weights;   // over the canonical per-l firing strategies
  double uniform_value = 0.0;    // the analytic witness sum_l (2^-M_A)^p
  bool used_vertex_optimum = false;  // p >= 1 falls back to deterministic
};

// Uniform analytic witness plus random-restart hill climbing over mixture
// weights; the climb exists to fail to beat the witness.
MixtureMax classical_max_mixture(const SettingTable& table, double p,
                                 int restarts, uint64_t seed);

// Best objective over random mixtures of random deterministic strategies.
double random_mixture_max(const SettingTable& table, double p, int samples,
                          uint64_t seed);

struct ClassicalBound {
  double value = 0.0;         // 2^{M_A (1-p)}
  bool is_valid_bound = true;  // p in (0, 1]
  double vertex_value = 1.0;   // deterministic optimum, relevant for p > 1
};

ClassicalBound classical_bound(int m_a, double p);

}  // namespace bellnet
