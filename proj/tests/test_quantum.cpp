#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "bellnet/quantum.hpp"

using namespace bellnet;

namespace {

const std::filesystem::path kNetworks = BELLNET_NETWORKS_DIR;
const double kPi = std::acos(-1.0);

NetworkSpec net(const char* name) { return load_network(kNetworks / name); }

}  // namespace

TEST_CASE("tailored two-source star: every <B_l> is 1/2 at pi/4") {
  const OperatorFamily family = build_operators(net("star2.json"));
  const DenseState dense = DenseState::from_stabilizer(family.network_state);
  for (const auto& op : family.ops) {
    const double stab = quantum_value(op, family.network_state);
    const double oracle = dense_expectation(op, dense);
    CHECK(stab == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::fabs(stab - oracle) < 1e-9);
  }
}

TEST_CASE("non-tailored Z-only state zeroes X-bearing operators") {
  const OperatorFamily family = build_operators(net("star2.json"));
  Roster roster = family.quantum_roster;
  std::vector<PauliString> gens;
  for (int s = 0; s < 4; ++s) {
    PauliString z(roster);
    z.set_letter(s, 'Z');
    gens.push_back(z);
  }
  const StabilizerState zeros(roster, gens);  // |0000>
  const DenseState dense = DenseState::from_stabilizer(zeros);
  for (const auto& op : family.ops) {
    const double value = quantum_value(op, zeros);
    if (op.index == 0) {
      // all-Z stabilizer: cos^2(pi/4) = 1/2
      CHECK(value == doctest::Approx(0.5));
    } else {
      CHECK(value == 0.0);
    }
    CHECK(std::fabs(value - dense_expectation(op, dense)) < 1e-9);
  }
}

TEST_CASE("degenerate angle override kills the sin branch") {
  const OperatorFamily family = build_operators(net("star2.json"));
  const std::vector<double> angles{0.0, kPi / 4};
  for (const auto& op : family.ops) {
    const double value =
        quantum_value(op, family.network_state, angles);
    const int l1 = op.index >> 1;
    if (l1 == 1) {
      CHECK(value == 0.0);  // sin(0) branch
    } else {
      CHECK(value == doctest::Approx(std::cos(0.0) * std::cos(kPi / 4)));
    }
  }
}

TEST_CASE("quantum_sum reproduces the closed form") {
  CHECK(quantum_sum(net("star2.json"), 1.0) == doctest::Approx(2.0));
  CHECK(quantum_sum(net("star1.json"), 2.0) == doctest::Approx(1.0));
  CHECK(quantum_sum(net("star2.json"), 0.5) ==
        doctest::Approx(std::pow(2.0, 1.5)).epsilon(1e-12));
}

TEST_CASE("sum equals prod_i (cos^p + sin^p) on random angle tuples") {
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> angle(0.05, kPi / 2 - 0.05);
  for (const char* name : {"star1.json", "star2.json", "star3.json",
                           "ghz3.json", "star2-ghz.json"}) {
    CAPTURE(name);
    const OperatorFamily family = build_operators(net(name));
    for (double p : {0.5, 1.0, 2.0}) {
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> theta(family.m_a);
        double expected = 1.0;
        for (auto& t : theta) {
          t = angle(rng);
          expected *= std::pow(std::cos(t), p) + std::pow(std::sin(t), p);
        }
        const double sum = quantum_sum(family, p, theta);
        CHECK(sum == doctest::Approx(expected).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("dense oracle agrees with the stabilizer path at random angles") {
  std::mt19937_64 rng(0xd15e);
  std::uniform_real_distribution<double> angle(0.05, kPi / 2 - 0.05);
  for (const char* name : {"star2.json", "ghz3.json", "star2-ghz.json"}) {
    CAPTURE(name);
    const OperatorFamily family = build_operators(net(name));
    const DenseState dense =
        DenseState::from_stabilizer(family.network_state);
    std::vector<double> theta(family.m_a);
    for (int trial = 0; trial < 5; ++trial) {
      for (auto& t : theta) t = angle(rng);
      for (const auto& op : family.ops) {
        const double stab = quantum_value(op, family.network_state, theta);
        const double oracle = dense_expectation(op, dense, theta);
        CHECK(std::fabs(stab - oracle) < 1e-9);
      }
    }
  }
}

TEST_CASE("virtual pairs evaluate identically on both paths") {
  const NetworkSpec spec = net("virtual-s1.json");
  std::vector<StabilizerState> states;
  for (const auto& s : spec.sources) states.push_back(*s.state);
  const StabilizerState network = tensor_product(states);
  const DenseState dense = DenseState::from_stabilizer(network);
  for (const auto& pair : virtual_qubit_pairs(spec)) {
    for (const auto* op : {&pair.plus, &pair.minus}) {
      const double stab = quantum_value(*op, network);
      const double oracle = dense_expectation(*op, dense);
      CHECK(stab == doctest::Approx(1.0 / std::sqrt(2.0)));
      CHECK(std::fabs(stab - oracle) < 1e-9);
    }
  }
}

TEST_CASE("sweep finds the pi/4 maximum on odd grids") {
  const SweepResult r1 = sweep_angles(net("star1.json"), 1.0, 101);
  CHECK(r1.max_value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(r1.angles[0] == doctest::Approx(kPi / 4).epsilon(1e-9));

  const SweepResult r2 = sweep_angles(net("star2.json"), 1.0, 51);
  CHECK(r2.max_value == doctest::Approx(2.0).epsilon(1e-3));
  for (double a : r2.angles) {
    CHECK(std::fabs(a - kPi / 4) < kPi / (2 * 52) + 1e-12);
  }

  // p = 2 is flat in theta; the first grid point wins the tie.
  const SweepResult flat = sweep_angles(net("star1.json"), 2.0, 11);
  CHECK(flat.max_value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(flat.grid_index == 0);
}

TEST_CASE("sweep maxima never exceed 2^{M_A(1-p/2)}") {
  for (const char* name : {"star1.json", "star2.json"}) {
    const NetworkSpec spec = net(name);
    const int m_a = static_cast<int>(spec.a_observers().size());
    for (double p : {0.5, 1.0, 2.0}) {
      const SweepResult sweep = sweep_angles(spec, p, 25);
      CHECK(sweep.max_value <= std::exp2(m_a * (1.0 - p / 2.0)) + 1e-9);
    }
  }
}

TEST_CASE("stabilizer expectations agree with dense inner products") {
  std::mt19937_64 rng(0xfade);
  for (const char* name : {"star2.json", "ghz3.json", "star3.json"}) {
    CAPTURE(name);
    const OperatorFamily family = build_operators(net(name));
    const StabilizerState& state = family.network_state;
    const DenseState dense = DenseState::from_stabilizer(state);
    const Roster& roster = state.roster();
    static const char letters[4] = {'I', 'X', 'Y', 'Z'};
    for (int trial = 0; trial < 40; ++trial) {
      PauliString probe(roster);
      for (int s = 0; s < probe.size(); ++s) {
        probe.set_letter(s, letters[rng() % 4]);
      }
      if (rng() % 2) probe.mul_phase(2);
      std::vector<cd> scratch(dense.amp.size(), cd{0, 0});
      apply_pauli(probe, roster, dense.amp, scratch);
      cd overlap{0, 0};
      for (size_t i = 0; i < scratch.size(); ++i) {
        overlap += std::conj(dense.amp[i]) * scratch[i];
      }
      CHECK(std::fabs(overlap.imag()) < 1e-10);
      CHECK(std::fabs(overlap.real() - state.expectation(probe)) < 1e-9);
    }
  }
}

TEST_CASE("sweep is deterministic across worker counts") {
  const SweepResult a = sweep_angles(net("star2.json"), 0.5, 31, 1);
  const SweepResult b = sweep_angles(net("star2.json"), 0.5, 31, 7);
  CHECK(a.grid_index == b.grid_index);
  CHECK(a.max_value == b.max_value);
}

TEST_CASE("sos residuals vanish exactly on tailored states") {
  for (const char* name : {"star1.json", "star2.json", "ghz3.json"}) {
    CAPTURE(name);
    const SosWitness witness = sos_residuals(net(name), 1.0);
    for (double r : witness.residuals) CHECK(r < 1e-9);
    CHECK(witness.gamma_psd);
    REQUIRE(witness.gamma_min_eigenvalue.has_value());
    CHECK(*witness.gamma_min_eigenvalue > -1e-9);
  }
}

TEST_CASE("sos residuals flag the wrong state") {
  const OperatorFamily family = build_operators(net("star2.json"));
  const DenseState zeros = DenseState::basis(family.quantum_roster, 0);
  const SosWitness witness = sos_residuals(family, zeros, 1.0);
  double max_residual = 0.0;
  for (double r : witness.residuals) max_residual = std::max(max_residual, r);
  CHECK(max_residual > 0.5);
}

TEST_CASE("dense construction respects the qubit cap") {
  Roster big;
  for (int s = 1; s <= dense_cap() + 1; ++s) big.push_back({s, 1});
  std::vector<PauliString> gens;
  for (size_t i = 0; i < big.size(); ++i) {
    PauliString z(big);
    z.set_letter(static_cast<int>(i), 'Z');
    gens.push_back(z);
  }
  CHECK_THROWS_AS(DenseState::from_stabilizer(StabilizerState(big, gens)),
                  Error);
}

TEST_CASE("m_l annihilates the tailored state but not controls") {
  // <Psi|M_l^dag M_l|Psi> = 0 together with <B_l> = omega_l.
  const OperatorFamily family = build_operators(net("star2.json"));
  const SosWitness witness = sos_residuals(net("star2.json"), 1.0);
  for (size_t i = 0; i < family.ops.size(); ++i) {
    CHECK(witness.residuals[i] < 1e-9);
    CHECK(quantum_value(family.ops[i], family.network_state) ==
          doctest::Approx(witness.weights[i]));
  }
}
