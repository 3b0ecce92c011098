#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bellnet/nosignal.hpp"
#include "bellnet/pauli.hpp"

namespace bellnet {

enum class SourceKind { classical, quantum, nosignaling };

std::string to_string(SourceKind kind);

struct SourceDecl {
  int id = 0;  // 1-based, also the particle label's source index
  SourceKind kind = SourceKind::quantum;
  int particles = 2;  // N_i
  std::optional<StabilizerState> state;  // quantum payload
  std::optional<BehaviorTable> box;      // no-signaling payload
  std::string state_tag;                 // "bell", "ghz:3", "custom", "pr", ...
};

struct ObserverDecl {
  std::string id;
  char type = 'A';  // 'A' or 'B'
  double angle = 0.0;               // theta_i, type A only; radians
  std::array<char, 2> axes = {'Z', 'X'};  // declared (P_0, P_1) pair
};

// Optional override of the l -> B-setting-label map. Keys are l bit strings
// of length M_A, values are arbitrary setting labels.
struct SettingMapOverride {
  std::map<std::string, std::string> table;
};

class NetworkSpec {
public:
  std::vector<SourceDecl> sources;
  std::map<ParticleId, std::string> routing;  // particle -> observer id
  std::vector<ObserverDecl> observers;
  double p = 1.0;
  std::optional<SettingMapOverride> ymap;

  Roster roster() const;
  const SourceDecl* source(int id) const;
  const ObserverDecl* observer(const std::string& id) const;
  std::vector<ParticleId> held_by(const std::string& observer_id) const;
  // Type-A observers ordered source-major by their first held particle.
  std::vector<const ObserverDecl*> a_observers() const;
  std::vector<const ObserverDecl*> b_observers() const;
  int count_kind(SourceKind kind) const;
};

// Parses the JSON network document, applying defaults (theta = pi/4,
// axes (Z,X), p = 1). Throws Error{parse} with position/field context.
NetworkSpec parse_network(const std::string& text);
NetworkSpec load_network(const std::filesystem::path& path);

// Canonical serialization; parse(serialize(s)) == s on canonical documents.
std::string serialize(const NetworkSpec& spec);

struct Diagnostic {
  std::string field;
  std::string message;
};

// Structural validation: routing partition, observer cardinalities, axis
// pairs, payload arities, angle ranges. Returns every violation; never
// throws on parseable input.
std::vector<Diagnostic> validate(const NetworkSpec& spec);

// True when validate() returns no diagnostics.
bool is_valid(const NetworkSpec& spec);
// Throws Error{validation} listing all diagnostics when invalid.
void require_valid(const NetworkSpec& spec);

// Merges all type-B observers into a single joint observer "B". The merge is
// recorded in *log when given. Idempotent.
NetworkSpec normalize_star(const NetworkSpec& spec,
                           std::vector<std::string>* log = nullptr);

// Sub-network containing only the listed sources, their particles, and the
// observers that still hold something.
NetworkSpec restricted(const NetworkSpec& spec,
                       const std::vector<int>& source_ids);

// FNV-1a of the canonical serialization; stable across runs.
std::string digest(const NetworkSpec& spec);

}  // namespace bellnet
