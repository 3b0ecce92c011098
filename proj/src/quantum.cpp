#include "bellnet/quantum.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <Eigen/Dense>

#include "bellnet/mathutil.hpp"

namespace bellnet {

namespace {

constexpr int kDefaultCap = 12;
constexpr int kGammaCap = 8;  // eigendecomposition stays desk-scale

cd phase_factor(int exponent) {
  switch (((exponent % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

// Site s maps to index bit N-1-s so |b_0 b_1 ...> reads as a binary number.
uint64_t site_mask_to_index_mask(uint64_t mask, int n) {
  uint64_t out = 0;
  for (int s = 0; s < n; ++s) {
    if ((mask >> s) & 1u) out |= uint64_t{1} << (n - 1 - s);
  }
  return out;
}

double norm(std::span<const cd> v) {
  double s = 0.0;
  for (const auto& a : v) s += std::norm(a);
  return std::sqrt(s);
}

std::vector<double> observer_angles(const SegmentedBellOperator& op,
                                    std::span<const double> angles) {
  if (angles.empty()) {
    std::vector<double> out;
    out.reserve(op.a_terms.size());
    for (const auto& t : op.a_terms) out.push_back(t.angle);
    return out;
  }
  if (angles.size() != op.a_terms.size()) {
    throw Error(Error::Kind::validation,
                "angle override count does not match the type-A factors");
  }
  return {angles.begin(), angles.end()};
}

}  // namespace

int dense_cap() {
  if (const char* env = std::getenv("BELLNET_DENSE_CAP")) {
    const int cap = std::atoi(env);
    if (cap >= 1) return cap;
  }
  return kDefaultCap;
}

DenseState DenseState::basis(Roster roster, uint64_t bits) {
  DenseState out;
  out.roster = std::move(roster);
  out.amp.assign(size_t{1} << out.roster.size(), cd{0, 0});
  out.amp.at(bits) = cd{1, 0};
  return out;
}

DenseState DenseState::from_stabilizer(const StabilizerState& state) {
  const int n = state.qubit_count();
  if (n > dense_cap()) {
    throw Error(Error::Kind::resource,
                "dense statevector for " + std::to_string(n) +
                    " qubits exceeds the cap of " + std::to_string(dense_cap()));
  }
  const size_t dim = size_t{1} << n;
  std::vector<cd> scratch(dim);
  for (uint64_t b = 0; b < dim; ++b) {
    DenseState candidate = basis(state.roster(), b);
    // Project with (I + g)/2 for every generator.
    for (const auto& g : state.generators()) {
      std::fill(scratch.begin(), scratch.end(), cd{0, 0});
      apply_pauli(g, state.roster(), candidate.amp, scratch);
      for (size_t i = 0; i < dim; ++i) {
        candidate.amp[i] = (candidate.amp[i] + scratch[i]) * 0.5;
      }
    }
    const double nrm = norm(candidate.amp);
    if (nrm > 1e-9) {
      for (auto& a : candidate.amp) a /= nrm;
      return candidate;
    }
  }
  throw Error(Error::Kind::internal, "stabilizer projector annihilated every "
                                     "basis state");
}

void apply_pauli(const PauliString& p, const Roster& roster,
                 std::span<const cd> in, std::span<cd> out) {
  const PauliString q = p.roster() == roster ? p : p.embedded(roster);
  const int n = static_cast<int>(roster.size());
  const uint64_t xm = site_mask_to_index_mask(q.x_mask(), n);
  const uint64_t zm = site_mask_to_index_mask(q.z_mask(), n);
  const cd base =
      phase_factor(q.phase_exponent() +
                   std::popcount(q.x_mask() & q.z_mask()));
  for (uint64_t idx = 0; idx < in.size(); ++idx) {
    const int zpar = std::popcount(idx & zm) & 1;
    out[idx ^ xm] += (zpar ? -base : base) * in[idx];
  }
}

double quantum_value(const SegmentedBellOperator& op,
                     const StabilizerState& state,
                     std::span<const double> angles) {
  return op.weight(angles) * state.expectation(op.stabilizer());
}

double dense_expectation(const SegmentedBellOperator& op,
                         const DenseState& state,
                         std::span<const double> angles) {
  const auto theta = observer_angles(op, angles);
  const size_t dim = state.amp.size();
  std::vector<cd> cur = state.amp;
  std::vector<cd> p0v(dim), p1v(dim);
  for (size_t k = 0; k < op.a_terms.size(); ++k) {
    const ATerm& term = op.a_terms[k];
    std::fill(p0v.begin(), p0v.end(), cd{0, 0});
    std::fill(p1v.begin(), p1v.end(), cd{0, 0});
    apply_pauli(term.pauli0, state.roster, cur, p0v);
    apply_pauli(term.pauli1, state.roster, cur, p1v);
    const double c = std::cos(theta[k]), s = std::sin(theta[k]);
    for (size_t i = 0; i < dim; ++i) {
      const cd a0 = c * p0v[i] + s * p1v[i];
      const cd a1 = c * p0v[i] - s * p1v[i];
      cur[i] = 0.5 * (term.bit == 0 ? a0 + a1 : a0 - a1);
    }
  }
  std::fill(p0v.begin(), p0v.end(), cd{0, 0});
  apply_pauli(op.b_setting, state.roster, cur, p0v);
  cd value{0, 0};
  for (size_t i = 0; i < dim; ++i) {
    value += std::conj(state.amp[i]) * p0v[i];
  }
  value *= static_cast<double>(op.sign);
  if (std::fabs(value.imag()) >= 1e-10) {
    throw Error(Error::Kind::internal,
                "expectation of a Hermitian Bell operator came out complex");
  }
  return value.real();
}

double quantum_sum(const OperatorFamily& family, double p,
                   std::span<const double> angles) {
  double sum = 0.0;
  for (const auto& op : family.ops) {
    sum += signed_pow(quantum_value(op, family.network_state, angles), p);
  }
  return sum;
}

double quantum_sum(const NetworkSpec& spec, double p) {
  for (const auto& s : spec.sources) {
    if (s.kind != SourceKind::quantum) {
      throw Error(Error::Kind::validation,
                  "quantum evaluation requires a fully-quantum network");
    }
  }
  return quantum_sum(build_operators(spec), p);
}

SweepResult sweep_angles(const NetworkSpec& spec, double p, int grid,
                         int jobs) {
  if (grid < 3) {
    throw Error(Error::Kind::validation, "sweep grid must have at least 3 "
                                         "points");
  }
  const OperatorFamily family = build_operators(spec);
  const int m_a = family.m_a;
  // Cache the angle-independent memberships; the sweep only rescales
  // weights.
  std::vector<int> membership;
  membership.reserve(family.ops.size());
  for (const auto& op : family.ops) {
    membership.push_back(family.network_state.expectation(op.stabilizer()));
  }
  std::vector<double> cosv(grid), sinv(grid);
  const double pi = std::acos(-1.0);
  for (int k = 0; k < grid; ++k) {
    const double theta = (k + 1) * pi / (2.0 * (grid + 1));
    cosv[k] = std::cos(theta);
    sinv[k] = std::sin(theta);
  }
  uint64_t total = 1;
  for (int i = 0; i < m_a; ++i) {
    total *= static_cast<uint64_t>(grid);
    if (total > (uint64_t{1} << 32)) {
      throw Error(Error::Kind::resource, "sweep grid has too many points");
    }
  }

  struct Best {
    double value = -1e300;
    uint64_t index = ~uint64_t{0};
  };
  auto run_range = [&](uint64_t begin, uint64_t end) {
    Best best;
    std::vector<int> digits(m_a);
    for (uint64_t flat = begin; flat < end; ++flat) {
      uint64_t rest = flat;
      for (int i = m_a - 1; i >= 0; --i) {
        digits[i] = static_cast<int>(rest % grid);
        rest /= grid;
      }
      double sum = 0.0;
      for (size_t li = 0; li < family.ops.size(); ++li) {
        if (membership[li] == 0) continue;
        double w = static_cast<double>(membership[li] );
        const uint32_t l = family.ops[li].index;
        for (int i = 0; i < m_a; ++i) {
          w *= bit_of(l, m_a, i) ? sinv[digits[i]] : cosv[digits[i]];
        }
        sum += signed_pow(w, p);
      }
      if (sum > best.value || (sum == best.value && flat < best.index)) {
        best = {sum, flat};
      }
    }
    return best;
  };

  int workers = jobs > 0 ? jobs
                         : static_cast<int>(std::max(
                               1u, std::thread::hardware_concurrency()));
  workers = static_cast<int>(
      std::min<uint64_t>(static_cast<uint64_t>(workers), total));
  std::vector<Best> partial(workers);
  std::vector<std::thread> threads;
  const uint64_t chunk = (total + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&, t] {
      const uint64_t begin = t * chunk;
      const uint64_t end = std::min(total, begin + chunk);
      if (begin < end) partial[t] = run_range(begin, end);
    });
  }
  for (auto& th : threads) th.join();
  Best best;
  for (const auto& b : partial) {
    if (b.value > best.value || (b.value == best.value && b.index < best.index)) {
      best = b;
    }
  }

  SweepResult result;
  result.max_value = best.value;
  result.grid_index = best.index;
  result.grid = grid;
  uint64_t rest = best.index;
  std::vector<int> digits(m_a);
  for (int i = m_a - 1; i >= 0; --i) {
    digits[i] = static_cast<int>(rest % grid);
    rest /= grid;
  }
  for (int i = 0; i < m_a; ++i) {
    result.angles.push_back((digits[i] + 1) * pi / (2.0 * (grid + 1)));
  }
  return result;
}

SosWitness sos_residuals(const OperatorFamily& family, const DenseState& state,
                         double p) {
  const size_t dim = state.amp.size();
  SosWitness witness;
  std::vector<std::vector<cd>> m_columns_scratch;
  const int n = static_cast<int>(state.roster.size());
  const bool want_gamma = n <= kGammaCap;
  Eigen::MatrixXcd gamma;
  if (want_gamma) gamma = Eigen::MatrixXcd::Zero(dim, dim);

  std::vector<cd> cur(dim), p0v(dim), p1v(dim), bv(dim);
  auto apply_m = [&](const SegmentedBellOperator& op,
                     std::span<const cd> in, std::vector<cd>& out) {
    cur.assign(in.begin(), in.end());
    for (const auto& term : op.a_terms) {
      std::fill(p0v.begin(), p0v.end(), cd{0, 0});
      std::fill(p1v.begin(), p1v.end(), cd{0, 0});
      apply_pauli(term.pauli0, state.roster, cur, p0v);
      apply_pauli(term.pauli1, state.roster, cur, p1v);
      const double c = std::cos(term.angle), s = std::sin(term.angle);
      const double omega = term.weight();
      if (std::fabs(omega) < 1e-12) {
        throw Error(Error::Kind::validation,
                    "degenerate angle makes the normalized type-A factor "
                    "singular");
      }
      const double inv = 1.0 / (2.0 * omega);
      for (size_t i = 0; i < dim; ++i) {
        const cd a0 = c * p0v[i] + s * p1v[i];
        const cd a1 = c * p0v[i] - s * p1v[i];
        cur[i] = inv * (term.bit == 0 ? a0 + a1 : a0 - a1);
      }
    }
    std::fill(bv.begin(), bv.end(), cd{0, 0});
    apply_pauli(op.b_setting, state.roster, in, bv);
    out.resize(dim);
    for (size_t i = 0; i < dim; ++i) {
      out[i] = cur[i] - static_cast<double>(op.sign) * bv[i];
    }
  };

  std::vector<cd> mv;
  for (const auto& op : family.ops) {
    apply_m(op, state.amp, mv);
    witness.residuals.push_back(norm(mv));
    witness.weights.push_back(op.weight());
    if (want_gamma) {
      Eigen::MatrixXcd m(dim, dim);
      std::vector<cd> e(dim), col;
      for (size_t j = 0; j < dim; ++j) {
        std::fill(e.begin(), e.end(), cd{0, 0});
        e[j] = cd{1, 0};
        apply_m(op, e, col);
        for (size_t i = 0; i < dim; ++i) m(i, j) = col[i];
      }
      gamma += std::pow(op.weight(), p) * (m.adjoint() * m);
    }
  }
  if (want_gamma) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gamma);
    witness.gamma_min_eigenvalue = solver.eigenvalues().minCoeff();
    witness.gamma_psd = *witness.gamma_min_eigenvalue > -1e-9;
  }
  return witness;
}

SosWitness sos_residuals(const NetworkSpec& spec, double p) {
  const OperatorFamily family = build_operators(spec);
  const DenseState state = DenseState::from_stabilizer(family.network_state);
  return sos_residuals(family, state, p);
}

}  // namespace bellnet
