#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

namespace bellnet {

class NetworkSpec;

using Rational = boost::rational<long long>;

// Closest rational with a bounded denominator; exact for the table entries
// that actually occur in box files (halves, quarters, ...).
Rational rational_from_double(double value);

// Bipartite two-input two-output behavior P(a,b|x,y), outcomes in {+1,-1}.
// Entries are exact rationals so vertex boxes evaluate without rounding.
class BehaviorTable {
public:
  BehaviorTable();  // all zeros

  // Outcome index 0 -> +1, 1 -> -1.
  Rational& at(int a, int b, int x, int y);
  const Rational& at(int a, int b, int x, int y) const;

  // Correlator E(x,y) = sum_ab a b P(a,b|x,y).
  Rational correlator(int x, int y) const;
  // Segmented correlator <B^(l)> = (E(0,l) + (-1)^l E(1,l)) / 2, where the
  // first box party carries the two type-A settings and the second carries
  // the l-indexed type-B setting.
  Rational segmented_correlator(int l) const;

  static BehaviorTable pr_box();
  static BehaviorTable uniform_noise();
  // a = alpha x + beta, b = gamma y + delta over GF(2): the 16 local vertices.
  static BehaviorTable local_vertex(int alpha, int beta, int gamma, int delta);
  // a + b = x y + alpha x + beta y + gamma over GF(2): the 8 PR-symmetry boxes.
  static BehaviorTable pr_variant(int alpha, int beta, int gamma);

  // Convex combination; weights need not be rational-exact.
  static BehaviorTable mix(const std::vector<std::pair<double, BehaviorTable>>&
                               weighted);

  bool operator==(const BehaviorTable&) const = default;

private:
  std::array<Rational, 16> p_;
};

struct BoxDiagnostic {
  std::string message;
};

// Empty iff normalization and both no-signaling marginal conditions hold
// (exactly in the rational representation, 1e-12 slack on mixed tables).
std::vector<BoxDiagnostic> validate_box(const BehaviorTable& table);

// Exact per-l correlators: for each M_A-bit string l, the product over NS
// sources of that box's segmented correlator at the source's bit of l.
std::vector<Rational> ns_correlators(const NetworkSpec& spec);

// Sum over l of (per-l correlator)^p for a validated network whose sources
// are all no-signaling.
double ns_value(const NetworkSpec& spec, double p);

// Algebraic maximum 2^{M_A}, achieved by PR boxes, independent of p.
double ns_max(int m_a, double p);

}  // namespace bellnet
