#include <doctest.h>

#include <filesystem>
#include <random>

#include "bellnet/netspec.hpp"
#include "bellnet/nosignal.hpp"

using namespace bellnet;

namespace {

const std::filesystem::path kNetworks = BELLNET_NETWORKS_DIR;

}  // namespace

TEST_CASE("PR box correlators and segmented values") {
  const BehaviorTable pr = BehaviorTable::pr_box();
  CHECK(pr.correlator(0, 0) == Rational(1));
  CHECK(pr.correlator(0, 1) == Rational(1));
  CHECK(pr.correlator(1, 0) == Rational(1));
  CHECK(pr.correlator(1, 1) == Rational(-1));
  CHECK(pr.segmented_correlator(0) == Rational(1));
  CHECK(pr.segmented_correlator(1) == Rational(1));
}

TEST_CASE("box validation accepts PR and noise, rejects signaling") {
  CHECK(validate_box(BehaviorTable::pr_box()).empty());
  CHECK(validate_box(BehaviorTable::uniform_noise()).empty());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g)
        CHECK(validate_box(BehaviorTable::pr_variant(a, b, g)).empty());
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g)
        for (int d = 0; d < 2; ++d)
          CHECK(validate_box(BehaviorTable::local_vertex(a, b, g, d)).empty());

  // A's outcome distribution depends on y: signaling.
  BehaviorTable bad;
  for (int x = 0; x < 2; ++x) {
    bad.at(0, 0, x, 0) = Rational(1);
    bad.at(1, 0, x, 1) = Rational(1);
  }
  const auto diagnostics = validate_box(bad);
  bool found = false;
  for (const auto& d : diagnostics) {
    found = found || d.message.find("A-marginal depends on y") != std::string::npos;
  }
  CHECK(found);
}

TEST_CASE("rational conversion is exact on table-style values") {
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(rational_from_double(0.25) == Rational(1, 4));
  CHECK(rational_from_double(0.0) == Rational(0));
  CHECK(rational_from_double(1.0 / 3.0) == Rational(1, 3));
  CHECK(rational_from_double(-0.125) == Rational(-1, 8));
}

TEST_CASE("ns star values: PR boxes reach 2^{M_A} exactly") {
  const NetworkSpec two = load_network(kNetworks / "ns2.json");
  const auto correlators = ns_correlators(two);
  REQUIRE(correlators.size() == 4);
  for (const auto& c : correlators) CHECK(c == Rational(1));
  for (double p : {0.5, 1.0, 2.0}) {
    CHECK(ns_value(two, p) == 4.0);  // dyadic-exact
  }
  CHECK(ns_max(2, 1.0) == 4.0);
  CHECK(ns_max(1, 0.5) == 2.0);
  CHECK(ns_max(3, 0.5) == ns_max(3, 1.0));
}

TEST_CASE("noise boxes zero the sum; a zero factor kills the product") {
  NetworkSpec spec = load_network(kNetworks / "ns2.json");
  spec.sources[0].box = BehaviorTable::uniform_noise();
  spec.sources[0].state_tag = "custom";
  CHECK(ns_value(spec, 1.0) == 0.0);
  spec.sources[1].box = BehaviorTable::uniform_noise();
  CHECK(ns_value(spec, 1.0) == 0.0);
}

TEST_CASE("random no-signaling mixtures stay within the algebraic maximum") {
  std::mt19937_64 rng(0xbe11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Extreme points: 8 PR-symmetry boxes and 16 local vertices.
  std::vector<BehaviorTable> extremes;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g) extremes.push_back(BehaviorTable::pr_variant(a, b, g));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int g = 0; g < 2; ++g)
        for (int d = 0; d < 2; ++d)
          extremes.push_back(BehaviorTable::local_vertex(a, b, g, d));
  REQUIRE(extremes.size() == 24);

  NetworkSpec spec = load_network(kNetworks / "ns2.json");
  for (int trial = 0; trial < 200; ++trial) {
    for (auto& src : spec.sources) {
      double w1 = unit(rng);
      double w2 = unit(rng) * (1.0 - w1);
      const double w3 = 1.0 - w1 - w2;
      const size_t i = rng() % extremes.size();
      const size_t j = rng() % extremes.size();
      const size_t k = rng() % extremes.size();
      src.box = BehaviorTable::mix(
          {{w1, extremes[i]}, {w2, extremes[j]}, {w3, extremes[k]}});
      src.state_tag = "custom";
      CHECK(validate_box(*src.box).empty());
    }
    for (double p : {0.5, 1.0}) {
      CHECK(ns_value(spec, p) <= ns_max(2, p) + 1e-9);
    }
  }
}

TEST_CASE("ns evaluation rejects non-ns sources and bad shapes") {
  const NetworkSpec quantum = load_network(kNetworks / "star2.json");
  CHECK_THROWS_AS(ns_value(quantum, 1.0), Error);

  NetworkSpec both_to_b = load_network(kNetworks / "ns1.json");
  both_to_b.routing[{1, 2}] = "B1";
  CHECK_THROWS_AS(ns_value(both_to_b, 1.0), Error);
}
