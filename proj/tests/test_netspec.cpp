#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "bellnet/netspec.hpp"

using namespace bellnet;

namespace {

const std::filesystem::path kNetworks = BELLNET_NETWORKS_DIR;

bool has_diag(const std::vector<Diagnostic>& ds, const std::string& needle) {
  for (const auto& d : ds) {
    if (d.message.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("star2 parses with the documented structure") {
  const NetworkSpec spec = load_network(kNetworks / "star2.json");
  CHECK(spec.sources.size() == 2);
  CHECK(spec.a_observers().size() == 2);
  CHECK(spec.b_observers().size() == 1);
  CHECK(spec.held_by("B1").size() == 2);
  CHECK(validate(spec).empty());
  // Omitted angles default to pi/4  and axes to (Z, X).
  for (const auto* obs : spec.a_observers()) {
    CHECK(obs->angle == doctest::Approx(std::acos(-1.0) / 4));
    CHECK(obs->axes[0] == 'Z');
    CHECK(obs->axes[1] == 'X');
  }
}

TEST_CASE("ghz:3 payload expands to the minus-type GHZ group") {
  const NetworkSpec spec = load_network(kNetworks / "ghz3.json");
  const SourceDecl* src = spec.source(1);
  REQUIRE(src != nullptr);
  REQUIRE(src->state.has_value());
  const Roster r = src->state->roster();
  CHECK(src->state->expectation(PauliString::parse("-XXX", r)) == 1);
  CHECK(src->state->expectation(PauliString::parse("XYY", r)) == 1);
  CHECK(src->state->expectation(PauliString::parse("YXY", r)) == 1);
  CHECK(src->state->expectation(PauliString::parse("YYX", r)) == 1);
}

TEST_CASE("singleton type-B observers are flagged among several") {
  const NetworkSpec spec = load_network(kNetworks / "bad-nb1.json");
  const auto diagnostics = validate(spec);
  CHECK(has_diag(diagnostics, "n_B >= 2 violated"));
}

TEST_CASE("standard Bell test and joint-measurement form stay valid") {
  CHECK(validate(load_network(kNetworks / "star1.json")).empty());
  CHECK(validate(load_network(kNetworks / "virtual-s1.json")).empty());
  CHECK(validate(load_network(kNetworks / "ghz3.json")).empty());
}

TEST_CASE("illegal axis pairs are flagged") {
  NetworkSpec spec = load_network(kNetworks / "star1.json");
  for (auto& o : spec.observers) {
    if (o.type == 'A') o.axes = {'X', 'X'};
  }
  CHECK(has_diag(validate(spec), "criteria (2) violated"));
}

TEST_CASE("boundary angles are flagged") {
  NetworkSpec spec = load_network(kNetworks / "star1.json");
  for (auto& o : spec.observers) {
    if (o.type == 'A') o.angle = 0.0;
  }
  CHECK(has_diag(validate(spec), "strictly inside"));
}

TEST_CASE("unrouted and doubly routed particles are caught") {
  NetworkSpec spec = load_network(kNetworks / "star2.json");
  spec.routing.erase({2, 1});
  CHECK(has_diag(validate(spec), "not routed"));

  CHECK_THROWS_AS(
      parse_network(R"({
        "sources": [{"id": 1, "kind": "quantum", "particles": 2}],
        "observers": [{"id": "A1", "type": "A"}, {"id": "B1", "type": "B"}],
        "routing": [
          {"particle": [1, 1], "to": "B1"},
          {"particle": [1, 1], "to": "B1"},
          {"particle": [1, 2], "to": "A1"}
        ]
      })"),
      Error);
}

TEST_CASE("unknown references fail at parse time") {
  CHECK_THROWS_WITH_AS(
      parse_network(R"({
        "sources": [{"id": 1, "kind": "quantum", "particles": 2}],
        "observers": [{"id": "A1", "type": "A"}],
        "routing": [{"particle": [1, 1], "to": "Bogus"},
                    {"particle": [1, 2], "to": "A1"}]
      })"),
      doctest::Contains("unknown observer"), Error);
  CHECK_THROWS_AS(parse_network("{ not json"), Error);
}

TEST_CASE("validate is total on structurally odd specs") {
  NetworkSpec empty;
  CHECK_FALSE(validate(empty).empty());

  NetworkSpec no_a = load_network(kNetworks / "star1.json");
  no_a.observers.erase(
      std::remove_if(no_a.observers.begin(), no_a.observers.end(),
                     [](const ObserverDecl& o) { return o.type == 'A'; }),
      no_a.observers.end());
  CHECK(has_diag(validate(no_a), "no type-A observers"));
}

TEST_CASE("parse after serialize is the identity on canonical documents") {
  for (const char* name :
       {"star1.json", "star2.json", "star3.json", "ghz3.json", "ns2.json",
        "hybrid-101.json", "hybrid-111.json", "virtual-s1.json",
        "star2-ghz.json"}) {
    CAPTURE(name);
    const NetworkSpec spec = load_network(kNetworks / name);
    const std::string once = serialize(spec);
    const std::string twice = serialize(parse_network(once));
    CHECK(once == twice);
  }
}

TEST_CASE("digest is stable and input-sensitive") {
  const NetworkSpec a = load_network(kNetworks / "star2.json");
  const NetworkSpec b = load_network(kNetworks / "star3.json");
  CHECK(digest(a) == digest(a));
  CHECK(digest(a) != digest(b));
}

TEST_CASE("star normalization merges type-B observers and logs it") {
  const NetworkSpec spec = load_network(kNetworks / "virtual-s1.json");
  std::vector<std::string> log;
  const NetworkSpec merged = normalize_star(spec, &log);
  CHECK(merged.b_observers().size() == 1);
  CHECK(merged.held_by(merged.b_observers()[0]->id).size() == 3);
  REQUIRE(log.size() == 1);
  CHECK(log[0].find("merged") != std::string::npos);
  // Idempotent.
  std::vector<std::string> log2;
  const NetworkSpec again = normalize_star(merged, &log2);
  CHECK(log2.empty());
  CHECK(serialize(again) == serialize(merged));
}

TEST_CASE("restriction keeps only the chosen sources") {
  const NetworkSpec spec = load_network(kNetworks / "hybrid-111.json");
  const NetworkSpec quantum_part = restricted(spec, {2});
  CHECK(quantum_part.sources.size() == 1);
  CHECK(quantum_part.a_observers().size() == 1);
  CHECK(quantum_part.routing.size() == 2);
}
