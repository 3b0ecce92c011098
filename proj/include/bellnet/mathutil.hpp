#pragma once

#include <cmath>
#include <cstdint>

namespace bellnet {

// x^p with integer p evaluated exactly by std::pow; for fractional p the
// sign-preserving reading sgn(x)|x|^p keeps sums of correlator powers real.
inline double signed_pow(double x, double p) {
  if (x >= 0.0 || p == std::floor(p)) return std::pow(x, p);
  return -std::pow(-x, p);
}

inline double exp2d(double e) { return std::exp2(e); }

inline int bit_of(uint32_t l, int m_a, int k) {
  // l_1 ... l_{M_A} read as a binary number: observer k (0-based) owns bit
  // M_A-1-k.
  return static_cast<int>((l >> (m_a - 1 - k)) & 1u);
}

}  // namespace bellnet
