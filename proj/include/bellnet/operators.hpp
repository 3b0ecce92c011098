#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bellnet/netspec.hpp"
#include "bellnet/pauli.hpp"

namespace bellnet {

// One type-A factor (A_0 + (-1)^bit A_1)/2 of a segmented Bell operator.
// pauli0/pauli1 are the two branch observables the tailored measurements
// point along; single-qubit except in the joint-measurement form.
struct ATerm {
  std::string observer;
  Roster particles;
  int bit = 0;
  PauliString pauli0;
  PauliString pauli1;
  double angle = 0.0;

  const PauliString& branch() const { return bit == 0 ? pauli0 : pauli1; }
  double weight() const;
  double weight(double angle_override) const;
};

// The Bell operator B_l: sign * prod_i (A_0^(i) + (-1)^{l_i} A_1^(i))/2 *
// B_{y(l)}. Removing the angle-dependent halves recovers the stabilizing
// operator g_l exactly.
struct SegmentedBellOperator {
  uint32_t index = 0;  // [l], first observer's bit most significant
  int m_a = 0;
  std::vector<ATerm> a_terms;   // quantum-fed observers, network order
  PauliString b_setting;        // joint Pauli on quantum B-held particles
  std::string setting_label;    // y(l), covers every source's B side
  int sign = 1;
  Roster quantum_roster;

  std::string bits() const;
  double weight() const;  // omega_l at the declared angles
  // angles keyed by quantum a_term order; empty span = declared angles.
  double weight(std::span<const double> angles) const;
  PauliString stabilizer() const;
};

// Per-source selection of useful local stabilizing operators: for every
// local bit string over the source's A-held qubits, a signed group element
// whose single-qubit components on those qubits follow the branch letters.
struct SourceBlock {
  int source_id = 0;
  std::vector<ParticleId> a_particles;       // emission order
  std::vector<std::string> a_observer_ids;   // aligned with a_particles
  std::vector<ParticleId> b_particles;
  std::vector<PauliString> local_stabilizers;  // indexed by local bit value
  std::vector<std::array<char, 2>> a_letters;  // per A qubit: (bit0, bit1)
};

struct LocalOperatorTable {
  std::vector<SourceBlock> blocks;  // quantum sources, id order
};

// Lexicographically first valid selection over canonicalized group elements;
// multi-A-qubit sources use the X/Y parity family. Throws Error{validation}
// ("no valid operator pair") when a source admits none.
LocalOperatorTable select_local_operators(const NetworkSpec& spec);

// The 2^{M_A} signed global stabilizing operators over the quantum roster,
// indexed by [l]. Every entry stabilizes the distributed state.
std::vector<PauliString> global_stabilizers(const NetworkSpec& spec,
                                            const LocalOperatorTable& table);

struct OperatorFamily {
  int m_a = 0;
  std::vector<SegmentedBellOperator> ops;  // sorted by index
  Roster quantum_roster;
  StabilizerState network_state;           // product of quantum payloads
  std::vector<std::string> normalization_log;
};

// Builds the full indexed family for a validated network (classical and
// no-signaling sources contribute setting-label bits without Pauli data).
// Networks in the joint-measurement form must use virtual_qubit_pairs.
OperatorFamily build_operators(const NetworkSpec& spec);

// The appendix fragments of one multi-A-qubit source, as the segmented
// operators of the sub-network containing just that source.
std::vector<SegmentedBellOperator> ghz_fragment_block(const NetworkSpec& spec,
                                                      int source_id);

// True when the single type-A observer jointly measures one qubit from each
// of an odd number of pair sources.
bool is_virtual_form(const NetworkSpec& spec);

struct VirtualPair {
  uint32_t l = 0;  // even-parity representative, first source most significant
  SegmentedBellOperator plus;   // cos branch, aggregate B_l
  SegmentedBellOperator minus;  // sin branch, aggregate B_lbar
};

// Rejects odd-parity l.
VirtualPair virtual_qubit_pair(const NetworkSpec& spec, uint32_t l);
// All 2^{2s} even-parity representatives.
std::vector<VirtualPair> virtual_qubit_pairs(const NetworkSpec& spec);

}  // namespace bellnet
