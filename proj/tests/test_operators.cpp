#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "bellnet/operators.hpp"

using namespace bellnet;

namespace {

const std::filesystem::path kNetworks = BELLNET_NETWORKS_DIR;

NetworkSpec net(const char* name) { return load_network(kNetworks / name); }

}  // namespace

TEST_CASE("Bell pair selection picks (ZZ, XX)") {
  const auto table = select_local_operators(net("star2.json"));
  REQUIRE(table.blocks.size() == 2);
  for (const auto& block : table.blocks) {
    REQUIRE(block.local_stabilizers.size() == 2);
    CHECK(block.local_stabilizers[0].str() == "ZZ");
    CHECK(block.local_stabilizers[1].str() == "XX");
    CHECK(block.a_letters[0][0] == 'Z');
    CHECK(block.a_letters[0][1] == 'X');
  }
}

TEST_CASE("GHZ3 selection yields the four signed X/Y operators") {
  const auto table = select_local_operators(net("ghz3.json"));
  REQUIRE(table.blocks.size() == 1);
  const auto& block = table.blocks[0];
  REQUIRE(block.local_stabilizers.size() == 4);
  // Local bits (l_n, l_{n+1}): 00 -> XYY, 01 -> YYX, 10 -> YXY, 11 -> -XXX.
  CHECK(block.local_stabilizers[0].str() == "XYY");
  CHECK(block.local_stabilizers[1].str() == "YYX");
  CHECK(block.local_stabilizers[2].str() == "YXY");
  CHECK(block.local_stabilizers[3].str() == "-XXX");
}

TEST_CASE("degenerate product-state source has no operator pair") {
  NetworkSpec spec = net("star1.json");
  Roster roster{{1, 1}, {1, 2}};
  spec.sources[0].state = StabilizerState(
      roster,
      {PauliString::parse("ZI", roster), PauliString::parse("IZ", roster)});
  spec.sources[0].state_tag = "custom";
  CHECK_THROWS_WITH_AS(build_operators(spec),
                       doctest::Contains("no valid operator pair"), Error);
}

TEST_CASE("global stabilizers of the two-source star") {
  const NetworkSpec spec = net("star2.json");
  const auto table = select_local_operators(spec);
  const auto gs = global_stabilizers(spec, table);
  REQUIRE(gs.size() == 4);
  // Roster order (1,1),(1,2),(2,1),(2,2); l = 01 pairs Z with X.
  CHECK(gs[0b01].str() == "ZZXX");
  CHECK(gs[0b10].str() == "XXZZ");
  CHECK(gs[0b00].str() == "ZZZZ");
  CHECK(gs[0b11].str() == "XXXX");
  const StabilizerState state = build_operators(spec).network_state;
  for (const auto& g : gs) {
    CHECK(state.expectation(g) == 1);
  }
}

TEST_CASE("segmented operators carry weights and recover g_l") {
  const OperatorFamily family = build_operators(net("star2.json"));
  REQUIRE(family.ops.size() == 4);
  for (const auto& op : family.ops) {
    CHECK(op.weight() == doctest::Approx(0.5).epsilon(1e-12));  // 2^{-M_A/2}
    CHECK(family.network_state.expectation(op.stabilizer()) == 1);
    CHECK(op.sign == 1);
    CHECK(op.setting_label == op.bits());  // identity y map
  }
}

TEST_CASE("every GHZ fragment stabilizes the state with the Mermin signs") {
  const OperatorFamily family = build_operators(net("ghz3.json"));
  REQUIRE(family.ops.size() == 4);
  // Sign (-1)^{l_n l_{n+1}}; B setting index l_n xor l_{n+1} with X first.
  CHECK(family.ops[0b00].sign == 1);
  CHECK(family.ops[0b01].sign == 1);
  CHECK(family.ops[0b10].sign == 1);
  CHECK(family.ops[0b11].sign == -1);
  CHECK(family.ops[0b00].setting_label == "0");
  CHECK(family.ops[0b01].setting_label == "1");
  CHECK(family.ops[0b10].setting_label == "1");
  CHECK(family.ops[0b11].setting_label == "0");
  CHECK(family.ops[0b00].b_setting.str() == "X");
  CHECK(family.ops[0b01].b_setting.str() == "Y");
  for (const auto& op : family.ops) {
    CHECK(family.network_state.expectation(op.stabilizer()) == 1);
  }
}

TEST_CASE("fragment block of a source equals its sub-network operators") {
  const auto frags = ghz_fragment_block(net("star2-ghz.json"), 2);
  REQUIRE(frags.size() == 4);
  CHECK(frags[0b11].sign == -1);
  CHECK(frags[0b01].setting_label == "1");
}

TEST_CASE("mixed Bell+GHZ network has 2^{M_A} operators with contiguous bits") {
  const OperatorFamily family = build_operators(net("star2-ghz.json"));
  CHECK(family.m_a == 3);
  REQUIRE(family.ops.size() == 8);
  for (const auto& op : family.ops) {
    CHECK(family.network_state.expectation(op.stabilizer()) == 1);
    CHECK(op.weight() ==
          doctest::Approx(std::pow(2.0, -1.5)).epsilon(1e-12));
  }
  // First bit belongs to the Bell source, the last two to the GHZ source.
  CHECK(family.ops[0b100].a_terms[0].branch().str() == "X");
  CHECK(family.ops[0b100].a_terms[1].branch().str() == "Y");
}

TEST_CASE("operator count and indices enumerate all bit strings") {
  const OperatorFamily family = build_operators(net("star3.json"));
  CHECK(family.ops.size() == 8);
  std::set<uint32_t> seen;
  for (const auto& op : family.ops) seen.insert(op.index);
  CHECK(seen.size() == 8);
}

TEST_CASE("virtual-qubit pairs: parity, anticommutation, squares") {
  const NetworkSpec spec = net("virtual-s1.json");
  CHECK(is_virtual_form(normalize_star(spec)));
  CHECK_THROWS_WITH_AS(virtual_qubit_pair(spec, 0b001),
                       doctest::Contains("even parity"), Error);
  const auto pairs = virtual_qubit_pairs(spec);
  REQUIRE(pairs.size() == 4);  // 2^{2s} with s = 1
  for (const auto& pair : pairs) {
    const auto& term = pair.plus.a_terms[0];
    CHECK_FALSE(term.pauli0.commutes_with(term.pauli1));
    CHECK((term.pauli0 * term.pauli0).is_identity());
    CHECK((term.pauli1 * term.pauli1).is_identity());
  }
}

TEST_CASE("virtual pair for l = 011 is based on (ZXX, XZZ)") {
  const auto pair = virtual_qubit_pair(net("virtual-s1.json"), 0b011);
  CHECK(pair.plus.a_terms[0].pauli0.str() == "ZXX");
  CHECK(pair.plus.a_terms[0].pauli1.str() == "XZZ");
  CHECK(pair.plus.setting_label == "011");
  CHECK(pair.minus.setting_label == "100");
}

TEST_CASE("virtual pair operators stabilize the distributed state") {
  const NetworkSpec spec = net("virtual-s1.json");
  const OperatorFamily probe = [&] {
    // Build the state by hand: build_operators refuses the joint form.
    OperatorFamily f;
    std::vector<StabilizerState> states;
    for (const auto& s : spec.sources) states.push_back(*s.state);
    f.network_state = tensor_product(states);
    return f;
  }();
  for (const auto& pair : virtual_qubit_pairs(spec)) {
    CHECK(probe.network_state.expectation(pair.plus.stabilizer()) == 1);
    CHECK(probe.network_state.expectation(pair.minus.stabilizer()) == 1);
  }
}

TEST_CASE("build_operators refuses the joint-measurement form") {
  CHECK_THROWS_WITH_AS(build_operators(net("virtual-s1.json")),
                       doctest::Contains("virtual-qubit"), Error);
}

TEST_CASE("setting map overrides relabel and get checked") {
  NetworkSpec spec = net("star1.json");
  SettingMapOverride ymap;
  ymap.table["0"] = "zero";
  ymap.table["1"] = "one";
  spec.ymap = ymap;
  const OperatorFamily family = build_operators(spec);
  CHECK(family.ops[0].setting_label == "zero");
  CHECK(family.ops[1].setting_label == "one");

  // Merging two l with different joint observables is inconsistent.
  ymap.table["1"] = "zero";
  spec.ymap = ymap;
  CHECK_THROWS_WITH_AS(build_operators(spec),
                       doctest::Contains("two different joint observables"),
                       Error);
}
