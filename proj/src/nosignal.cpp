#include "bellnet/nosignal.hpp"

#include <cmath>
#include <cstdlib>

#include "bellnet/mathutil.hpp"
#include "bellnet/netspec.hpp"

namespace bellnet {

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) {
    throw Error(Error::Kind::parse, "box entries must be finite");
  }
  const bool negative = value < 0;
  double v = std::fabs(value);
  // Continued-fraction expansion, denominator-capped.
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double x = v;
  for (int step = 0; step < 64; ++step) {
    const double fl = std::floor(x);
    if (fl > 1e15) break;
    const long long a = static_cast<long long>(fl);
    const __int128 p2 = static_cast<__int128>(a) * p1 + p0;
    const __int128 q2 = static_cast<__int128>(a) * q1 + q0;
    if (p2 > 2'000'000'000'000ll || q2 > 2'000'000'000'000ll) break;
    p0 = p1;
    q0 = q1;
    p1 = static_cast<long long>(p2);
    q1 = static_cast<long long>(q2);
    const double approx = static_cast<double>(p1) / static_cast<double>(q1);
    if (std::fabs(approx - v) < 1e-13 * std::max(1.0, v)) break;
    const double frac = x - fl;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
  }
  if (q1 == 0) {
    throw Error(Error::Kind::parse, "box entry is out of rational range");
  }
  Rational r(p1, q1);
  return negative ? -r : r;
}

BehaviorTable::BehaviorTable() { p_.fill(Rational(0)); }

Rational& BehaviorTable::at(int a, int b, int x, int y) {
  return p_[((a * 2 + b) * 2 + x) * 2 + y];
}

const Rational& BehaviorTable::at(int a, int b, int x, int y) const {
  return p_[((a * 2 + b) * 2 + x) * 2 + y];
}

Rational BehaviorTable::correlator(int x, int y) const {
  Rational e(0);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const int product = (a == b) ? 1 : -1;  // outcome index 0 -> +1
      e += Rational(product) * at(a, b, x, y);
    }
  }
  return e;
}

Rational BehaviorTable::segmented_correlator(int l) const {
  const Rational sign(l == 0 ? 1 : -1);
  return (correlator(0, l) + sign * correlator(1, l)) / Rational(2);
}

BehaviorTable BehaviorTable::pr_box() { return pr_variant(0, 0, 0); }

BehaviorTable BehaviorTable::uniform_noise() {
  BehaviorTable t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) t.at(a, b, x, y) = Rational(1, 4);
  return t;
}

BehaviorTable BehaviorTable::local_vertex(int alpha, int beta, int gamma,
                                          int delta) {
  BehaviorTable t;
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      const int a = (alpha * x + beta) % 2;
      const int b = (gamma * y + delta) % 2;
      t.at(a, b, x, y) = Rational(1);
    }
  }
  return t;
}

BehaviorTable BehaviorTable::pr_variant(int alpha, int beta, int gamma) {
  BehaviorTable t;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          if ((a + b) % 2 == (x * y + alpha * x + beta * y + gamma) % 2)
            t.at(a, b, x, y) = Rational(1, 2);
  return t;
}

BehaviorTable BehaviorTable::mix(
    const std::vector<std::pair<double, BehaviorTable>>& weighted) {
  // Snap the weights to an exact dyadic grid: keeps every denominator
  // bounded and the normalization exact, at the cost of <= 2^-20 weight
  // drift.
  constexpr long long kGrid = 1 << 20;
  double requested = 0.0;
  for (const auto& [w, box] : weighted) requested += w;
  if (std::fabs(requested - 1.0) > 1e-6) {
    throw Error(Error::Kind::validation, "mixture weights must sum to 1");
  }
  std::vector<long long> grid(weighted.size());
  long long total = 0;
  size_t largest = 0;
  for (size_t i = 0; i < weighted.size(); ++i) {
    if (weighted[i].first < -1e-12) {
      throw Error(Error::Kind::validation, "mixture weights must be >= 0");
    }
    grid[i] = std::llround(std::max(0.0, weighted[i].first) * kGrid);
    total += grid[i];
    if (grid[i] > grid[largest]) largest = i;
  }
  grid[largest] += kGrid - total;
  if (grid[largest] < 0) {
    throw Error(Error::Kind::validation, "mixture weights must sum to 1");
  }
  BehaviorTable t;
  for (size_t i = 0; i < weighted.size(); ++i) {
    const Rational w(grid[i], kGrid);
    const BehaviorTable& box = weighted[i].second;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y) t.at(a, b, x, y) += w * box.at(a, b, x, y);
  }
  return t;
}

std::vector<BoxDiagnostic> validate_box(const BehaviorTable& table) {
  std::vector<BoxDiagnostic> out;
  auto near_zero = [](const Rational& r) {
    return std::fabs(boost::rational_cast<double>(r)) <= 1e-12;
  };
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y)
          if (table.at(a, b, x, y) < Rational(0)) {
            out.push_back({"negative probability at (a,b|x,y) = (" +
                           std::to_string(a) + "," + std::to_string(b) + "|" +
                           std::to_string(x) + "," + std::to_string(y) + ")"});
          }
  for (int x = 0; x < 2; ++x) {
    for (int y = 0; y < 2; ++y) {
      Rational norm(0);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) norm += table.at(a, b, x, y);
      if (!near_zero(norm - Rational(1))) {
        out.push_back({"normalization violated at settings (x,y) = (" +
                       std::to_string(x) + "," + std::to_string(y) + ")"});
      }
    }
  }
  for (int a = 0; a < 2; ++a) {
    for (int x = 0; x < 2; ++x) {
      Rational m0(0), m1(0);
      for (int b = 0; b < 2; ++b) {
        m0 += table.at(a, b, x, 0);
        m1 += table.at(a, b, x, 1);
      }
      if (!near_zero(m0 - m1)) {
        out.push_back({"A-marginal depends on y (a=" + std::to_string(a) +
                       ", x=" + std::to_string(x) + ")"});
      }
    }
  }
  for (int b = 0; b < 2; ++b) {
    for (int y = 0; y < 2; ++y) {
      Rational m0(0), m1(0);
      for (int a = 0; a < 2; ++a) {
        m0 += table.at(a, b, 0, y);
        m1 += table.at(a, b, 1, y);
      }
      if (!near_zero(m0 - m1)) {
        out.push_back({"B-marginal depends on x (b=" + std::to_string(b) +
                       ", y=" + std::to_string(y) + ")"});
      }
    }
  }
  return out;
}

namespace {

// For each NS source: its box, the A-observer bit position, and which box
// party the type-A observer holds (0 = emission 1, 1 = emission 2).
struct BoxSlot {
  const BehaviorTable* box;
  int bit;
  int a_party;
};

std::vector<BoxSlot> box_slots(const NetworkSpec& spec) {
  const auto a_obs = spec.a_observers();
  const int m_a = static_cast<int>(a_obs.size());
  std::vector<BoxSlot> slots;
  for (const auto& s : spec.sources) {
    if (s.kind != SourceKind::nosignaling) {
      throw Error(Error::Kind::validation,
                  "ns evaluation requires all sources to be no-signaling");
    }
    int a_emission = 0;
    for (int j = 1; j <= s.particles; ++j) {
      const auto it = spec.routing.find({s.id, j});
      if (it == spec.routing.end()) continue;
      const ObserverDecl* o = spec.observer(it->second);
      if (o && o->type == 'A') {
        if (a_emission != 0) {
          throw Error(Error::Kind::validation,
                      "no-signaling source " + std::to_string(s.id) +
                          " feeds more than one type-A observer");
        }
        a_emission = j;
      }
    }
    if (a_emission == 0) {
      throw Error(Error::Kind::validation,
                  "no-signaling source " + std::to_string(s.id) +
                      " feeds no type-A observer");
    }
    const ObserverDecl* owner =
        spec.observer(spec.routing.at({s.id, a_emission}));
    int bit = -1;
    for (int k = 0; k < m_a; ++k) {
      if (a_obs[k]->id == owner->id) bit = k;
    }
    slots.push_back({&*s.box, bit, a_emission - 1});
  }
  return slots;
}

Rational segmented_for_party(const BehaviorTable& box, int l, int a_party) {
  if (a_party == 0) return box.segmented_correlator(l);
  // Type-A observer holds the second box party: its settings enter as y.
  const Rational sign(l == 0 ? 1 : -1);
  return (box.correlator(l, 0) + sign * box.correlator(l, 1)) / Rational(2);
}

}  // namespace

std::vector<Rational> ns_correlators(const NetworkSpec& spec) {
  const auto slots = box_slots(spec);
  const int m_a = static_cast<int>(spec.a_observers().size());
  std::vector<Rational> out;
  out.reserve(size_t{1} << m_a);
  for (uint32_t l = 0; l < (uint32_t{1} << m_a); ++l) {
    Rational value(1);
    for (const auto& slot : slots) {
      value *= segmented_for_party(*slot.box, bit_of(l, m_a, slot.bit),
                                   slot.a_party);
    }
    out.push_back(value);
  }
  return out;
}

double ns_value(const NetworkSpec& spec, double p) {
  double sum = 0.0;
  for (const auto& c : ns_correlators(spec)) {
    sum += signed_pow(boost::rational_cast<double>(c), p);
  }
  return sum;
}

double ns_max(int m_a, double /*p*/) {
  return exp2d(static_cast<double>(m_a));
}

}  // namespace bellnet
