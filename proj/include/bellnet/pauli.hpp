#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellnet {

// Error kinds map onto CLI exit codes (validation -> 1, resource -> 2).
class Error : public std::runtime_error {
public:
  enum class Kind { parse, validation, resource, internal };

  Error(Kind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

// A particle is identified by (source index, emission index), both 1-based.
struct ParticleId {
  int source = 0;
  int emission = 0;

  auto operator<=>(const ParticleId&) const = default;
};

std::string to_string(const ParticleId& id);

// Ordered particle labels a Pauli string or state is defined over.
// Always kept sorted source-major (source, then emission).
using Roster = std::vector<ParticleId>;

Roster sorted_roster(Roster roster);
bool roster_contains(const Roster& larger, const Roster& smaller);

// Phased Pauli string over labeled particles: i^k * tensor of {I,X,Y,Z}.
// Sites are encoded as symplectic (x,z) bit pairs packed into 64-bit masks,
// so products and commutation checks are exact integer arithmetic.
class PauliString {
public:
  PauliString() = default;
  explicit PauliString(Roster roster);

  static PauliString identity(Roster roster);
  // Accepts strings like "XX", "-XXX", "iY", "-iZX". One letter per site, in
  // roster order.
  static PauliString parse(const std::string& text, Roster roster);

  const Roster& roster() const { return roster_; }
  int size() const { return static_cast<int>(roster_.size()); }

  int phase_exponent() const { return phase_; }  // k in i^k, 0..3
  bool x_bit(int site) const { return (x_ >> site) & 1u; }
  bool z_bit(int site) const { return (z_ >> site) & 1u; }
  uint64_t x_mask() const { return x_; }
  uint64_t z_mask() const { return z_; }

  bool is_identity() const { return x_ == 0 && z_ == 0 && phase_ == 0; }
  bool is_identity_site(int site) const { return !x_bit(site) && !z_bit(site); }
  bool is_hermitian() const { return phase_ % 2 == 0; }
  // +1 or -1 for Hermitian strings; throws otherwise.
  int sign() const;

  char letter(int site) const;
  void set_letter(int site, char letter);
  // Multiplies the global phase by i^k.
  void mul_phase(int k);

  int weight() const;  // number of non-identity sites

  PauliString operator*(const PauliString& other) const;
  bool commutes_with(const PauliString& other) const;
  // Re-expresses this string over a larger roster, identity elsewhere.
  PauliString embedded(const Roster& larger) const;

  std::string str() const;  // e.g. "-XXX"

  bool operator==(const PauliString& other) const = default;

  // Site codes I=0, Z=1, X=2, Y=3 in roster order; used for the deterministic
  // lexicographic selection of stabilizing operators.
  std::vector<int> lex_key() const;

private:
  Roster roster_;
  uint64_t x_ = 0;
  uint64_t z_ = 0;
  int phase_ = 0;  // exponent of i, mod 4

  void check_same_roster(const PauliString& other) const;
};

// Stabilizer state defined by an independent set of commuting, real-phased
// generators. The constructor canonicalizes whatever generating set it is
// given (redundant generators are fine) and requires the resulting rank to
// equal the qubit count.
class StabilizerState {
public:
  StabilizerState() = default;  // the empty (0-qubit) state
  StabilizerState(Roster roster, std::vector<PauliString> generators);

  const Roster& roster() const { return roster_; }
  int qubit_count() const { return static_cast<int>(roster_.size()); }
  const std::vector<PauliString>& generators() const { return generators_; }

  // <P> for Hermitian P over a sub-roster: +1 if P is in the stabilizer
  // group, -1 if -P is, 0 otherwise.
  int expectation(const PauliString& p) const;

  // All 2^N signed group elements (N <= 16 guard).
  std::vector<PauliString> group_elements() const;

  static StabilizerState bell_pair(int source);
  // (|0..0> - |1..1>)/sqrt(2); generators {-X..X, Z_i Z_{i+1}}.
  static StabilizerState ghz_minus(int source, int qubits);

private:
  Roster roster_;
  std::vector<PauliString> generators_;  // canonical RREF form
  std::vector<int> pivot_columns_;       // per generator, column of its pivot
};

// Product of states on disjoint rosters, as one state on the union roster.
StabilizerState tensor_product(const std::vector<StabilizerState>& parts);

}  // namespace bellnet
