#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellnet/classical.hpp"
#include "bellnet/netspec.hpp"

namespace bellnet {

// Counts of classical / quantum / no-signaling type-A bits in star normal
// form (one bit per pair source).
struct HybridSplit {
  int u = 0;
  int v = 0;
  int w = 0;

  int m_a() const { return u + v + w; }
  bool operator==(const HybridSplit&) const = default;
};

std::string to_string(const HybridSplit& split);

// The split of a network, counted per type-A bit: classical-fed bits -> u,
// quantum-fed -> v, no-signaling-fed -> w.
HybridSplit split_of(const NetworkSpec& spec);

// sum over l of (xi_C[l_C] * xi_Q[l_Q] * xi_NS[l_NS])^p with l decomposed
// source-major as l_C || l_Q || l_NS. List lengths must be powers of two
// (2^u, 2^v, 2^w).
double factorized_value(std::span<const double> xi_c,
                        std::span<const double> xi_q,
                        std::span<const double> xi_ns, double p);

struct BoundsReport {
  HybridSplit split;
  double p = 1.0;
  ClassicalBound b_c;
  double b_q = 0.0;
  double b_ns = 0.0;
  double b_max = 0.0;  // 2^{M_A - p (u + v/2)}
  std::optional<double> achieved;
};

BoundsReport closed_form_bounds(const HybridSplit& split, double p);

// The product value with the optimal per-network witnesses
// <xi_C> = 2^-u, <xi_Q> = 2^{-v/2}, <xi_NS> = 1; reproduces b_max.
double optimal_witness_value(const HybridSplit& split, double p);

// Achieved value of a network file: classical factor from the uniform
// mixture, quantum factor from the tailored sub-network at its declared
// angles, no-signaling factor from the declared boxes.
double achieved_value(const NetworkSpec& spec, double p);

struct HolderResult {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// sum (z_C z_Q z_NS)^{1/alpha} <= prod_X (sum z^(X))^{1/alpha} for
// nonnegative arrays of equal length; alpha in {1,2,3}.
HolderResult holder_check(std::span<const double> z_c,
                          std::span<const double> z_q,
                          std::span<const double> z_ns, int alpha);

// alpha rule: 3 when u,v,w all nonzero; 2 when exactly one is zero; 1 when
// two are zero.
int holder_alpha(const HybridSplit& split);

enum class Reproducibility {
  first_dominates,   // split1's correlations cannot be reproduced by split2
  second_dominates,
  equal,
  incomparable,  // unused by the u + v/2 criterion; kept for API stability
};

std::string to_string(Reproducibility verdict);

// Compares u + v/2; the smaller exponent penalty dominates. Splits must
// share M_A.
Reproducibility compare_reproducibility(const HybridSplit& first,
                                        const HybridSplit& second);

struct NonlocalityDegree {
  std::optional<int> t;          // smallest t with value > 2^{M_A - p t}
  bool classically_modelable = false;
};

NonlocalityDegree t_nonlocality_degree(double value, int n, double p);

}  // namespace bellnet
