#include "bellnet/hybrid.hpp"

#include <bit>
#include <cmath>

#include "bellnet/mathutil.hpp"
#include "bellnet/nosignal.hpp"
#include "bellnet/quantum.hpp"

namespace bellnet {

std::string to_string(const HybridSplit& split) {
  return "<" + std::to_string(split.u) + "," + std::to_string(split.v) + "," +
         std::to_string(split.w) + ">";
}

HybridSplit split_of(const NetworkSpec& spec) {
  HybridSplit split;
  for (const auto* obs : spec.a_observers()) {
    const auto held = spec.held_by(obs->id);
    if (held.empty()) continue;
    const SourceDecl* src = spec.source(held.front().source);
    if (!src) continue;
    switch (src->kind) {
      case SourceKind::classical: ++split.u; break;
      case SourceKind::quantum: ++split.v; break;
      case SourceKind::nosignaling: ++split.w; break;
    }
  }
  return split;
}

namespace {

int log2_exact(size_t n, const char* what) {
  if (n == 0 || (n & (n - 1)) != 0) {
    throw Error(Error::Kind::validation,
                std::string(what) + " list length must be a power of two");
  }
  return std::countr_zero(n);
}

}  // namespace

double factorized_value(std::span<const double> xi_c,
                        std::span<const double> xi_q,
                        std::span<const double> xi_ns, double p) {
  const int u = log2_exact(xi_c.size(), "classical factor");
  const int v = log2_exact(xi_q.size(), "quantum factor");
  const int w = log2_exact(xi_ns.size(), "no-signaling factor");
  const int m_a = u + v + w;
  if (m_a > 24) {
    throw Error(Error::Kind::resource, "factor lists are too long");
  }
  double sum = 0.0;
  for (uint32_t l = 0; l < (uint32_t{1} << m_a); ++l) {
    const uint32_t lc = l >> (v + w);
    const uint32_t lq = (l >> w) & ((uint32_t{1} << v) - 1);
    const uint32_t lns = l & ((uint32_t{1} << w) - 1);
    sum += signed_pow(xi_c[lc] * xi_q[lq] * xi_ns[lns], p);
  }
  return sum;
}

BoundsReport closed_form_bounds(const HybridSplit& split, double p) {
  if (split.u < 0 || split.v < 0 || split.w < 0 || split.m_a() < 1) {
    throw Error(Error::Kind::validation,
                "invalid hybrid split " + to_string(split));
  }
  if (!(p > 0.0)) {
    throw Error(Error::Kind::validation, "exponent p must be positive");
  }
  BoundsReport report;
  report.split = split;
  report.p = p;
  const int m_a = split.m_a();
  report.b_c = classical_bound(m_a, p);
  report.b_q = exp2d(m_a * (1.0 - p / 2.0));
  report.b_ns = exp2d(static_cast<double>(m_a));
  report.b_max = exp2d(m_a - p * (split.u + 0.5 * split.v));
  return report;
}

double optimal_witness_value(const HybridSplit& split, double p) {
  std::vector<double> xi_c(size_t{1} << split.u, exp2d(-split.u));
  std::vector<double> xi_q(size_t{1} << split.v, exp2d(-0.5 * split.v));
  std::vector<double> xi_ns(size_t{1} << split.w, 1.0);
  return factorized_value(xi_c, xi_q, xi_ns, p);
}

double achieved_value(const NetworkSpec& raw, double p) {
  require_valid(raw);
  const NetworkSpec spec = normalize_star(raw);
  std::vector<int> classical_ids, quantum_ids, ns_ids;
  for (const auto& s : spec.sources) {
    switch (s.kind) {
      case SourceKind::classical: classical_ids.push_back(s.id); break;
      case SourceKind::quantum: quantum_ids.push_back(s.id); break;
      case SourceKind::nosignaling: ns_ids.push_back(s.id); break;
    }
  }
  // Bit layout in build_operators is source-id order; the factorized
  // decomposition l = l_C || l_Q || l_NS needs the kinds grouped that way.
  std::vector<int> order;
  order.insert(order.end(), classical_ids.begin(), classical_ids.end());
  order.insert(order.end(), quantum_ids.begin(), quantum_ids.end());
  order.insert(order.end(), ns_ids.begin(), ns_ids.end());
  std::vector<int> sorted_ids = order;
  std::sort(sorted_ids.begin(), sorted_ids.end());
  if (order != sorted_ids) {
    throw Error(Error::Kind::validation,
                "hybrid evaluation expects sources declared in the order "
                "classical, quantum, no-signaling");
  }

  int u_bits = 0;
  std::vector<double> xi_c, xi_q, xi_ns;
  if (!classical_ids.empty()) {
    u_bits = static_cast<int>(classical_ids.size());
    // Optimal shared-randomness witness: P_{l_C} = 2^-u for every l_C.
    xi_c.assign(size_t{1} << u_bits, exp2d(-u_bits));
  } else {
    xi_c.assign(1, 1.0);
  }
  if (!quantum_ids.empty()) {
    const OperatorFamily family =
        build_operators(restricted(spec, quantum_ids));
    xi_q.reserve(family.ops.size());
    for (const auto& op : family.ops) {
      xi_q.push_back(quantum_value(op, family.network_state));
    }
  } else {
    xi_q.assign(1, 1.0);
  }
  if (!ns_ids.empty()) {
    const auto correlators = ns_correlators(restricted(spec, ns_ids));
    xi_ns.reserve(correlators.size());
    for (const auto& c : correlators) {
      xi_ns.push_back(boost::rational_cast<double>(c));
    }
  } else {
    xi_ns.assign(1, 1.0);
  }
  return factorized_value(xi_c, xi_q, xi_ns, p);
}

HolderResult holder_check(std::span<const double> z_c,
                          std::span<const double> z_q,
                          std::span<const double> z_ns, int alpha) {
  if (alpha < 1 || alpha > 3) {
    throw Error(Error::Kind::validation, "alpha must be 1, 2 or 3");
  }
  if (z_c.size() != z_q.size() || z_q.size() != z_ns.size()) {
    throw Error(Error::Kind::validation, "factor arrays differ in length");
  }
  const double inv = 1.0 / alpha;
  double lhs = 0.0, sc = 0.0, sq = 0.0, sns = 0.0;
  for (size_t i = 0; i < z_c.size(); ++i) {
    if (z_c[i] < 0 || z_q[i] < 0 || z_ns[i] < 0) {
      throw Error(Error::Kind::validation, "factor arrays must be nonnegative");
    }
    lhs += std::pow(z_c[i] * z_q[i] * z_ns[i], inv);
    sc += z_c[i];
    sq += z_q[i];
    sns += z_ns[i];
  }
  HolderResult result;
  result.lhs = lhs;
  result.rhs = std::pow(sc, inv) * std::pow(sq, inv) * std::pow(sns, inv);
  result.holds = result.lhs <= result.rhs + 1e-12;
  return result;
}

int holder_alpha(const HybridSplit& split) {
  const int zeros = (split.u == 0) + (split.v == 0) + (split.w == 0);
  return 3 - zeros;
}

std::string to_string(Reproducibility verdict) {
  switch (verdict) {
    case Reproducibility::first_dominates: return "1-dominates-2";
    case Reproducibility::second_dominates: return "2-dominates-1";
    case Reproducibility::equal: return "equal";
    case Reproducibility::incomparable: return "incomparable-by-this-criterion";
  }
  return "?";
}

Reproducibility compare_reproducibility(const HybridSplit& first,
                                        const HybridSplit& second) {
  if (first.m_a() != second.m_a()) {
    throw Error(Error::Kind::validation,
                "splits compare only at equal M_A");
  }
  const double cost1 = first.u + 0.5 * first.v;
  const double cost2 = second.u + 0.5 * second.v;
  if (cost1 < cost2) return Reproducibility::first_dominates;
  if (cost2 < cost1) return Reproducibility::second_dominates;
  return Reproducibility::equal;
}

NonlocalityDegree t_nonlocality_degree(double value, int n, double p) {
  if (n < 1) {
    throw Error(Error::Kind::validation, "degree needs at least one source");
  }
  if (value > exp2d(static_cast<double>(n)) + 1e-9) {
    throw Error(Error::Kind::validation,
                "value exceeds the algebraic maximum 2^{M_A}");
  }
  NonlocalityDegree degree;
  for (int t = 1; t <= n; ++t) {
    if (value > exp2d(n - p * t)) {
      degree.t = t;
      return degree;
    }
  }
  degree.classically_modelable = true;
  return degree;
}

}  // namespace bellnet
