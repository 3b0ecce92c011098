#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "bellnet/hybrid.hpp"
#include "bellnet/quantum.hpp"

using namespace bellnet;

namespace {

const std::filesystem::path kNetworks = BELLNET_NETWORKS_DIR;

std::vector<HybridSplit> splits_of(int m_a) {
  std::vector<HybridSplit> out;
  for (int u = 0; u <= m_a; ++u)
    for (int v = 0; u + v <= m_a; ++v) out.push_back({u, v, m_a - u - v});
  return out;
}

}  // namespace

TEST_CASE("factorized value reproduces the worked 2^{M_A - p(u + v/2)} cases") {
  // <1,0,1>: uniform classical factor 1/2, PR factor 1.
  const std::vector<double> xi_c{0.5, 0.5};
  const std::vector<double> xi_q{1.0};
  const std::vector<double> xi_ns{1.0, 1.0};
  CHECK(factorized_value(xi_c, xi_q, xi_ns, 1.0) == doctest::Approx(2.0));

  // Fully quantum reduces to the quantum sum.
  const NetworkSpec star2 = load_network(kNetworks / "star2.json");
  const OperatorFamily family = build_operators(star2);
  std::vector<double> xi_q2;
  for (const auto& op : family.ops) {
    xi_q2.push_back(quantum_value(op, family.network_state));
  }
  const std::vector<double> one{1.0};
  CHECK(factorized_value(one, xi_q2, one, 1.0) ==
        doctest::Approx(quantum_sum(star2, 1.0)));

  // A zero factor for every l kills the sum.
  const std::vector<double> dead{0.0, 0.0};
  CHECK(factorized_value(dead, xi_q, xi_ns, 0.5) == 0.0);

  const std::vector<double> three{1.0, 1.0, 1.0};  // not a power of two
  CHECK_THROWS_AS(factorized_value(three, xi_q, xi_ns, 1.0), Error);
}

TEST_CASE("closed-form bounds and their degeneracies") {
  const BoundsReport r = closed_form_bounds({0, 2, 0}, 0.5);
  CHECK(r.b_max == doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
  CHECK(r.b_q == r.b_max);

  CHECK(closed_form_bounds({1, 0, 1}, 1.0).b_max == doctest::Approx(2.0));
  CHECK(closed_form_bounds({0, 2, 0}, 1.0).b_max == doctest::Approx(2.0));

  for (int m_a : {1, 2, 3}) {
    for (double p : {0.5, 1.0}) {
      const BoundsReport all_c = closed_form_bounds({m_a, 0, 0}, p);
      CHECK(all_c.b_max == doctest::Approx(all_c.b_c.value));
      const BoundsReport all_q = closed_form_bounds({0, m_a, 0}, p);
      CHECK(all_q.b_max == doctest::Approx(all_q.b_q));
      const BoundsReport all_ns = closed_form_bounds({0, 0, m_a}, p);
      CHECK(all_ns.b_max == doctest::Approx(all_ns.b_ns));
      // B_C <= B_Q <= B_NS for p in (0,1].
      CHECK(all_c.b_c.value <= all_c.b_q + 1e-12);
      CHECK(all_c.b_q <= all_c.b_ns + 1e-12);
    }
  }
}

TEST_CASE("optimal witnesses achieve the closed form exactly") {
  for (int m_a : {1, 2, 3}) {
    for (const auto& split : splits_of(m_a)) {
      for (double p : {0.5, 0.75, 1.0}) {
        CAPTURE(to_string(split));
        const double witness = optimal_witness_value(split, p);
        const double closed = closed_form_bounds(split, p).b_max;
        CHECK(witness == doctest::Approx(closed).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("the r1 ordering pins fully-NS and fully-quantum complements") {
  for (int m_a : {2, 3, 4}) {
    for (double p : {0.5, 1.0}) {
      for (const auto& split : splits_of(m_a)) {
        const double mid = closed_form_bounds(split, p).b_max;
        const double lo =
            closed_form_bounds({split.u, m_a - split.u, 0}, p).b_max;
        const double hi =
            closed_form_bounds({split.u, 0, m_a - split.u}, p).b_max;
        CHECK(lo <= mid + 1e-12);
        CHECK(mid <= hi + 1e-12);
      }
    }
  }
}

TEST_CASE("achieved_value factorizes the bundled hybrid networks") {
  const NetworkSpec h101 = load_network(kNetworks / "hybrid-101.json");
  CHECK(split_of(h101) == HybridSplit{1, 0, 1});
  CHECK(achieved_value(h101, 1.0) == doctest::Approx(2.0));

  const NetworkSpec h111 = load_network(kNetworks / "hybrid-111.json");
  CHECK(split_of(h111) == HybridSplit{1, 1, 1});
  CHECK(achieved_value(h111, 1.0) ==
        doctest::Approx(closed_form_bounds({1, 1, 1}, 1.0).b_max));

  const NetworkSpec star2 = load_network(kNetworks / "star2.json");
  CHECK(achieved_value(star2, 0.5) ==
        doctest::Approx(quantum_sum(star2, 0.5)));
}

TEST_CASE("holder inequality: equality on constants, validity on samples") {
  const std::vector<double> c(4, 2.0), q(4, 0.3), ns(4, 1.0);
  for (int alpha : {1, 2, 3}) {
    const HolderResult r = holder_check(c, q, ns, alpha);
    CHECK(r.holds);
    if (alpha == 3) {
      CHECK(r.lhs == doctest::Approx(r.rhs).epsilon(1e-12));
    }
  }
  std::mt19937_64 rng(0xbe11);
  std::uniform_real_distribution<double> unit(0.0, 4.0);
  for (int alpha : {1, 2, 3}) {
    for (int trial = 0; trial < 10000; ++trial) {
      std::vector<double> zc(4), zq(4), zns(4);
      for (int i = 0; i < 4; ++i) {
        zc[i] = unit(rng);
        zq[i] = unit(rng);
        zns[i] = unit(rng);
      }
      const HolderResult r = holder_check(zc, zq, zns, alpha);
      CHECK(r.holds);
    }
  }
  CHECK_THROWS_AS(holder_check({c.data(), 2}, q, ns, 3), Error);
  const std::vector<double> neg{-1.0, 0.0, 0.0, 0.0};
  CHECK_THROWS_AS(holder_check(neg, q, ns, 2), Error);
}

TEST_CASE("alpha follows the zero pattern of the split") {
  CHECK(holder_alpha({1, 1, 1}) == 3);
  CHECK(holder_alpha({0, 1, 1}) == 2);
  CHECK(holder_alpha({0, 2, 0}) == 1);
  CHECK(holder_alpha({3, 0, 0}) == 1);
}

TEST_CASE("reproducibility verdicts") {
  CHECK(compare_reproducibility({0, 2, 0}, {1, 0, 1}) ==
        Reproducibility::equal);
  CHECK(compare_reproducibility({2, 0, 0}, {0, 2, 0}) ==
        Reproducibility::second_dominates);
  CHECK(compare_reproducibility({0, 0, 2}, {0, 2, 0}) ==
        Reproducibility::first_dominates);
  CHECK_THROWS_AS(compare_reproducibility({0, 2, 0}, {1, 1, 1}), Error);

  // Fully quantum vs <u',0,M_A-u'>: dominance iff u' > M_A / 2.
  for (int m_a = 1; m_a <= 6; ++m_a) {
    for (int u = 0; u <= m_a; ++u) {
      const auto verdict =
          compare_reproducibility({0, m_a, 0}, {u, 0, m_a - u});
      if (2 * u > m_a) {
        CHECK(verdict == Reproducibility::first_dominates);
      } else if (2 * u < m_a) {
        CHECK(verdict == Reproducibility::second_dominates);
      } else {
        CHECK(verdict == Reproducibility::equal);
      }
    }
  }
}

TEST_CASE("verdicts are antisymmetric and transitive at fixed M_A") {
  for (int m_a : {2, 3, 4, 5}) {
    const auto splits = splits_of(m_a);
    for (const auto& s1 : splits) {
      for (const auto& s2 : splits) {
        const auto v12 = compare_reproducibility(s1, s2);
        const auto v21 = compare_reproducibility(s2, s1);
        if (v12 == Reproducibility::first_dominates) {
          CHECK(v21 == Reproducibility::second_dominates);
        }
        if (v12 == Reproducibility::equal) {
          CHECK(v21 == Reproducibility::equal);
        }
        for (const auto& s3 : splits) {
          if (v12 == Reproducibility::first_dominates &&
              compare_reproducibility(s2, s3) ==
                  Reproducibility::first_dominates) {
            CHECK(compare_reproducibility(s1, s3) ==
                  Reproducibility::first_dominates);
          }
        }
      }
    }
  }
}

TEST_CASE("t-nonlocality degrees of fully quantum stars") {
  // n = 2, p = 1, value 2: not 1-nonlocal, 2-nonlocal.
  const NonlocalityDegree d2 = t_nonlocality_degree(2.0, 2, 1.0);
  REQUIRE(d2.t.has_value());
  CHECK(*d2.t == 2);

  const NonlocalityDegree d3 =
      t_nonlocality_degree(std::pow(2.0, 1.5), 3, 1.0);
  REQUIRE(d3.t.has_value());
  CHECK(*d3.t == 2);

  // Below the all-classical model: no degree, classically modelable.
  const NonlocalityDegree weak = t_nonlocality_degree(0.9, 2, 1.0);
  CHECK_FALSE(weak.t.has_value());
  CHECK(weak.classically_modelable);

  CHECK_THROWS_AS(t_nonlocality_degree(5.0, 2, 1.0), Error);
}
