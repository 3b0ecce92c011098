#include "bellnet/classical.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "bellnet/mathutil.hpp"

namespace bellnet {

namespace {

constexpr uint64_t kTotalGuard = uint64_t{1} << 26;

DeterministicStrategy decode(uint64_t index, int m_a, int labels) {
  DeterministicStrategy s;
  uint64_t b_part = index & ((uint64_t{1} << labels) - 1);
  uint64_t a_part = index >> labels;
  s.b.resize(labels);
  for (int y = 0; y < labels; ++y) {
    s.b[y] = (b_part >> y) & 1 ? -1 : 1;
  }
  s.a.resize(m_a);
  for (int i = 0; i < m_a; ++i) {
    const int digit = static_cast<int>((a_part >> (2 * i)) & 3);
    s.a[i] = {digit & 1 ? -1 : 1, digit & 2 ? -1 : 1};
  }
  return s;
}

}  // namespace

DeterministicStrategy canonical_firing_strategy(uint32_t l,
                                                const SettingTable& table) {
  DeterministicStrategy s;
  s.a.resize(table.m_a);
  for (int i = 0; i < table.m_a; ++i) {
    s.a[i] = {1, bit_of(l, table.m_a, i) ? -1 : 1};
  }
  s.b.assign(table.labels.size(), 1);
  s.b[table.label_of_l[l]] = table.sign_of_l[l];
  return s;
}

SettingTable setting_table(const std::vector<SegmentedBellOperator>& ops) {
  if (ops.empty()) {
    throw Error(Error::Kind::validation, "no operators to tabulate");
  }
  SettingTable table;
  table.m_a = ops[0].m_a;
  std::set<std::string> labels;
  for (const auto& op : ops) labels.insert(op.setting_label);
  table.labels.assign(labels.begin(), labels.end());
  table.label_of_l.resize(ops.size());
  table.sign_of_l.resize(ops.size());
  for (const auto& op : ops) {
    const auto it =
        std::lower_bound(table.labels.begin(), table.labels.end(),
                         op.setting_label);
    if (op.index >= ops.size()) {
      throw Error(Error::Kind::internal, "operator indices are not dense");
    }
    table.label_of_l[op.index] =
        static_cast<int>(it - table.labels.begin());
    table.sign_of_l[op.index] = op.sign;
  }
  return table;
}

SettingTable setting_table(const OperatorFamily& family) {
  return setting_table(family.ops);
}

SettingTable setting_table(const NetworkSpec& spec) {
  return setting_table(build_operators(spec));
}

uint64_t strategy_count(const SettingTable& table) {
  return (uint64_t{1} << (2 * table.m_a)) << table.labels.size();
}

void enumerate_strategies(
    const SettingTable& table,
    const std::function<void(uint64_t, const DeterministicStrategy&)>& visit) {
  const int labels = static_cast<int>(table.labels.size());
  const uint64_t total = strategy_count(table);
  if (table.m_a > 5 || labels > 32 || total > kTotalGuard) {
    throw Error(Error::Kind::resource,
                "refusing to enumerate " + std::to_string(total) +
                    " deterministic strategies (M_A = " +
                    std::to_string(table.m_a) + ", settings = " +
                    std::to_string(labels) + ")");
  }
  for (uint64_t index = 0; index < total; ++index) {
    visit(index, decode(index, table.m_a, labels));
  }
}

Firing firing_string(const DeterministicStrategy& strategy,
                     const SettingTable& table) {
  Firing f;
  int product = 1;
  for (int i = 0; i < table.m_a; ++i) {
    const auto [a0, a1] = strategy.a[i];
    const int bit = a0 == a1 ? 0 : 1;
    f.l |= static_cast<uint32_t>(bit) << (table.m_a - 1 - i);
    product *= a0;  // the surviving half-sum equals a0 either way
  }
  f.correlator = table.sign_of_l[f.l] * product *
                 strategy.b[table.label_of_l[f.l]];
  return f;
}

MixtureValue strategy_value(const DeterministicStrategy& strategy,
                            const SettingTable& table, double p) {
  MixtureValue value;
  value.p_l.assign(table.label_of_l.size(), 0.0);
  value.correlators.assign(table.label_of_l.size(), 0.0);
  const Firing f = firing_string(strategy, table);
  value.p_l[f.l] = 1.0;
  value.correlators[f.l] = f.correlator;
  value.objective = signed_pow(static_cast<double>(f.correlator), p);
  return value;
}

DeterministicMax classical_max_deterministic(const SettingTable& table,
                                             double p) {
  DeterministicMax best;
  bool first = true;
  long best_int = -2;
  const bool integer_path = p == 1.0;
  enumerate_strategies(table, [&](uint64_t index,
                                  const DeterministicStrategy& s) {
    const Firing f = firing_string(s, table);
    if (integer_path) {
      if (first || f.correlator > best_int) {
        first = false;
        best_int = f.correlator;
        best.value = static_cast<double>(f.correlator);
        best.witness = s;
        best.witness_index = index;
      }
      return;
    }
    const double objective = signed_pow(static_cast<double>(f.correlator), p);
    if (first || objective > best.value) {
      first = false;
      best.value = objective;
      best.witness = s;
      best.witness_index = index;
    }
  });
  best.exact = integer_path;
  return best;
}

MixtureMax classical_max_mixture(const SettingTable& table, double p,
                                 int restarts, uint64_t seed) {
  MixtureMax out;
  const size_t terms = table.label_of_l.size();
  if (p >= 1.0) {
    // The uniform interior point is no longer the optimum; the vertex value
    // is.
    const DeterministicMax det = classical_max_deterministic(table, p);
    out.value = det.value;
    out.used_vertex_optimum = true;
    out.uniform_value =
        static_cast<double>(terms) * signed_pow(1.0 / terms, p);
    out.weights.assign(terms, 1.0 / static_cast<double>(terms));
    return out;
  }

  // Mixtures of the canonical firing strategies realize every profile
  // <B_l> = P_l, which dominates the objective; climb over those weights.
  auto objective = [&](const std::vector<double>& q) {
    double sum = 0.0;
    for (double v : q) sum += std::pow(v, p);
    return sum;
  };
  std::vector<double> uniform(terms, 1.0 / static_cast<double>(terms));
  out.uniform_value = objective(uniform);
  out.weights = uniform;
  out.value = out.uniform_value;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> expd(1.0);
  std::uniform_int_distribution<size_t> pick(0, terms - 1);
  for (int restart = 0; restart < restarts; ++restart) {
    std::vector<double> q(terms);
    double total = 0.0;
    for (auto& v : q) {
      v = expd(rng);
      total += v;
    }
    for (auto& v : q) v /= total;
    double best = objective(q);
    double step = 0.25;
    for (int iter = 0; iter < 200; ++iter) {
      const size_t i = pick(rng);
      const size_t j = pick(rng);
      if (i == j) continue;
      const double delta = std::min(q[j], step * unit(rng));
      if (delta <= 0.0) continue;
      q[i] += delta;
      q[j] -= delta;
      const double candidate = objective(q);
      if (candidate > best) {
        best = candidate;
      } else {
        q[i] -= delta;
        q[j] += delta;
        step *= 0.97;
      }
    }
    if (best > out.value) {
      out.value = best;
      out.weights = q;
    }
  }
  return out;
}

double random_mixture_max(const SettingTable& table, double p, int samples,
                          uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int labels = static_cast<int>(table.labels.size());
  const size_t terms = table.label_of_l.size();
  std::uniform_int_distribution<uint64_t> pick_strategy(
      0, strategy_count(table) - 1);
  std::exponential_distribution<double> expd(1.0);
  std::uniform_int_distribution<int> pick_support(1, 8);
  double best = 0.0;
  std::vector<double> correlators(terms);
  for (int sample = 0; sample < samples; ++sample) {
    std::fill(correlators.begin(), correlators.end(), 0.0);
    const int support = pick_support(rng);
    std::vector<double> weights(support);
    double total = 0.0;
    for (auto& w : weights) {
      w = expd(rng);
      total += w;
    }
    for (int k = 0; k < support; ++k) {
      const DeterministicStrategy s =
          decode(pick_strategy(rng), table.m_a, labels);
      const Firing f = firing_string(s, table);
      correlators[f.l] += weights[k] / total * f.correlator;
    }
    double objective = 0.0;
    for (double c : correlators) objective += signed_pow(c, p);
    best = std::max(best, objective);
  }
  return best;
}

ClassicalBound classical_bound(int m_a, double p) {
  if (m_a < 1) {
    throw Error(Error::Kind::validation, "M_A must be at least 1");
  }
  if (!(p > 0.0)) {
    throw Error(Error::Kind::validation, "exponent p must be positive");
  }
  ClassicalBound bound;
  bound.value = exp2d(m_a * (1.0 - p));
  bound.is_valid_bound = p <= 1.0;
  bound.vertex_value = 1.0;
  return bound;
}

}  // namespace bellnet
