#include "bellnet/operators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>

#include "bellnet/mathutil.hpp"

namespace bellnet {

double ATerm::weight() const { return weight(angle); }

double ATerm::weight(double angle_override) const {
  return bit == 0 ? std::cos(angle_override) : std::sin(angle_override);
}

std::string SegmentedBellOperator::bits() const {
  std::string out(m_a, '0');
  for (int k = 0; k < m_a; ++k) {
    out[k] = bit_of(index, m_a, k) ? '1' : '0';
  }
  return out;
}

double SegmentedBellOperator::weight() const {
  double w = 1.0;
  for (const auto& term : a_terms) w *= term.weight();
  return w;
}

double SegmentedBellOperator::weight(std::span<const double> angles) const {
  if (angles.empty()) return weight();
  if (angles.size() != a_terms.size()) {
    throw Error(Error::Kind::validation,
                "angle override count does not match the type-A factors");
  }
  double w = 1.0;
  for (size_t k = 0; k < a_terms.size(); ++k) {
    w *= a_terms[k].weight(angles[k]);
  }
  return w;
}

PauliString SegmentedBellOperator::stabilizer() const {
  PauliString g = PauliString::identity(quantum_roster);
  for (const auto& term : a_terms) {
    g = g * term.branch().embedded(quantum_roster);
  }
  g = g * b_setting.embedded(quantum_roster);
  if (sign < 0) g.mul_phase(2);
  return g;
}

namespace {

struct ObserverSlot {
  const ObserverDecl* decl;
  int bit;  // position in the global l string
};

char parity_completion_letter(int a_y_count) {
  return (a_y_count % 2 == 1) ? 'Y' : 'X';
}

int lex_less(const PauliString& a, const PauliString& b) {
  return a.lex_key() < b.lex_key();
}

SourceBlock build_block(const NetworkSpec& spec, const SourceDecl& src) {
  SourceBlock block;
  block.source_id = src.id;
  for (int e = 1; e <= src.particles; ++e) {
    const ParticleId particle{src.id, e};
    const auto it = spec.routing.find(particle);
    if (it == spec.routing.end()) continue;
    const ObserverDecl* o = spec.observer(it->second);
    if (o && o->type == 'A') {
      if (spec.held_by(o->id).size() != 1) {
        throw Error(Error::Kind::validation,
                    "joint type-A measurements are handled by the "
                    "virtual-qubit construction");
      }
      block.a_particles.push_back(particle);
      block.a_observer_ids.push_back(o->id);
    } else {
      block.b_particles.push_back(particle);
    }
  }
  const int k = static_cast<int>(block.a_particles.size());
  if (k == 0) {
    throw Error(Error::Kind::validation,
                "quantum source " + std::to_string(src.id) +
                    " feeds no type-A observer");
  }
  const StabilizerState& state = *src.state;
  const Roster& roster = state.roster();
  auto site_of = [&](const ParticleId& particle) {
    const auto it = std::lower_bound(roster.begin(), roster.end(), particle);
    return static_cast<int>(it - roster.begin());
  };

  if (k == 1) {
    auto elements = state.group_elements();
    std::sort(elements.begin(), elements.end(), lex_less);
    const int site = site_of(block.a_particles[0]);
    const PauliString* g0 = nullptr;
    const PauliString* g1 = nullptr;
    for (const auto& g : elements) {
      if (g.letter(site) == 'I') continue;
      if (!g0) {
        g0 = &g;
      } else if (g.letter(site) != g0->letter(site)) {
        g1 = &g;
        break;
      }
    }
    if (!g0 || !g1) {
      throw Error(Error::Kind::validation,
                  "no valid operator pair: source " + std::to_string(src.id) +
                      " admits no anticommuting stabilizer pair on qubit " +
                      to_string(block.a_particles[0]));
    }
    block.local_stabilizers = {*g0, *g1};
    block.a_letters = {{g0->letter(site), g1->letter(site)}};
    return block;
  }

  // Multi-A-qubit source: the X/Y family with even Y parity. Bit 0 maps to
  // Y (the + combination), bit 1 to X; the first B-held qubit absorbs the
  // parity, the rest measure X.
  block.a_letters.assign(k, {'Y', 'X'});
  for (uint32_t v = 0; v < (uint32_t{1} << k); ++v) {
    PauliString candidate(roster);
    int a_y_count = 0;
    for (int q = 0; q < k; ++q) {
      const char letter = bit_of(v, k, q) ? 'X' : 'Y';
      a_y_count += (letter == 'Y');
      candidate.set_letter(site_of(block.a_particles[q]), letter);
    }
    if (block.b_particles.empty()) {
      if (a_y_count % 2 != 0) {
        throw Error(Error::Kind::validation,
                    "source " + std::to_string(src.id) +
                        " has no B-held qubit to complete the parity of bit "
                        "string " + std::to_string(v));
      }
    } else {
      candidate.set_letter(site_of(block.b_particles[0]),
                           parity_completion_letter(a_y_count));
      for (size_t q = 1; q < block.b_particles.size(); ++q) {
        candidate.set_letter(site_of(block.b_particles[q]), 'X');
      }
    }
    const int sign = state.expectation(candidate);
    if (sign == 0) {
      throw Error(Error::Kind::validation,
                  "no valid operator pair: source " + std::to_string(src.id) +
                      " does not stabilize the X/Y family (state is not of "
                      "GHZ form)");
    }
    if (sign < 0) candidate.mul_phase(2);
    block.local_stabilizers.push_back(std::move(candidate));
  }
  return block;
}

// Per B-held particle: letter -> setting bit, ordered I < Z < X < Y.
std::map<ParticleId, std::map<char, int>> letter_bits(
    const SourceBlock& block, const StabilizerState& state) {
  std::map<ParticleId, std::map<char, int>> out;
  auto code = [](char c) {
    switch (c) {
      case 'I': return 0;
      case 'Z': return 1;
      case 'X': return 2;
      default: return 3;
    }
  };
  const Roster& roster = state.roster();
  for (const auto& particle : block.b_particles) {
    const auto it = std::lower_bound(roster.begin(), roster.end(), particle);
    const int site = static_cast<int>(it - roster.begin());
    std::set<char> letters;
    for (const auto& g : block.local_stabilizers) {
      letters.insert(g.letter(site));
    }
    std::vector<char> sorted(letters.begin(), letters.end());
    std::sort(sorted.begin(), sorted.end(),
              [&](char a, char b) { return code(a) < code(b); });
    if (sorted.size() > 2) {
      throw Error(Error::Kind::internal,
                  "more than two measurement letters on " +
                      to_string(particle));
    }
    std::map<char, int> bits;
    for (size_t i = 0; i < sorted.size(); ++i) bits[sorted[i]] = int(i);
    out[particle] = std::move(bits);
  }
  return out;
}

}  // namespace

LocalOperatorTable select_local_operators(const NetworkSpec& spec) {
  LocalOperatorTable table;
  std::vector<const SourceDecl*> quantum;
  for (const auto& s : spec.sources) {
    if (s.kind == SourceKind::quantum) quantum.push_back(&s);
  }
  std::sort(quantum.begin(), quantum.end(),
            [](const SourceDecl* a, const SourceDecl* b) {
              return a->id < b->id;
            });
  for (const SourceDecl* s : quantum) {
    table.blocks.push_back(build_block(spec, *s));
  }
  return table;
}

std::vector<PauliString> global_stabilizers(const NetworkSpec& spec,
                                            const LocalOperatorTable& table) {
  for (const auto& s : spec.sources) {
    if (s.kind != SourceKind::quantum) {
      throw Error(Error::Kind::validation,
                  "global stabilizing operators require all-quantum sources");
    }
  }
  Roster roster = spec.roster();
  int m_a = 0;
  for (const auto& block : table.blocks) {
    m_a += static_cast<int>(block.a_particles.size());
  }
  std::vector<PauliString> out;
  out.reserve(size_t{1} << m_a);
  for (uint32_t l = 0; l < (uint32_t{1} << m_a); ++l) {
    PauliString g = PauliString::identity(roster);
    int offset = 0;
    for (const auto& block : table.blocks) {
      const int k = static_cast<int>(block.a_particles.size());
      uint32_t v = 0;
      for (int q = 0; q < k; ++q) {
        v = (v << 1) | bit_of(l, m_a, offset + q);
      }
      g = g * block.local_stabilizers[v].embedded(roster);
      offset += k;
    }
    out.push_back(std::move(g));
  }
  return out;
}

bool is_virtual_form(const NetworkSpec& spec) {
  const auto a_obs = spec.a_observers();
  if (a_obs.size() != 1) return false;
  return spec.held_by(a_obs[0]->id).size() > 1;
}

OperatorFamily build_operators(const NetworkSpec& raw) {
  require_valid(raw);
  OperatorFamily family;
  const NetworkSpec spec = normalize_star(raw, &family.normalization_log);
  if (is_virtual_form(spec)) {
    throw Error(Error::Kind::validation,
                "network uses a joint type-A measurement; build the "
                "virtual-qubit pairs instead");
  }

  const LocalOperatorTable table = select_local_operators(spec);
  std::map<int, const SourceBlock*> block_of;
  for (const auto& block : table.blocks) block_of[block.source_id] = &block;

  std::vector<StabilizerState> states;
  Roster quantum_roster;
  Roster quantum_b_roster;
  for (const auto& s : spec.sources) {
    if (s.kind != SourceKind::quantum) continue;
    states.push_back(*s.state);
    for (const auto& id : s.state->roster()) quantum_roster.push_back(id);
    for (const auto& particle : block_of.at(s.id)->b_particles) {
      quantum_b_roster.push_back(particle);
    }
  }
  quantum_roster = sorted_roster(std::move(quantum_roster));
  quantum_b_roster = sorted_roster(std::move(quantum_b_roster));
  family.network_state = tensor_product(states);
  family.quantum_roster = quantum_roster;

  // Bit layout: sources in id order, each contributing its type-A bits.
  std::vector<SourceDecl const*> sources;
  for (const auto& s : spec.sources) sources.push_back(&s);
  std::sort(sources.begin(), sources.end(),
            [](const SourceDecl* a, const SourceDecl* b) {
              return a->id < b->id;
            });

  struct SourceBits {
    const SourceDecl* src;
    const SourceBlock* block;  // quantum only
    std::vector<const ObserverDecl*> a_obs;
    int offset;
  };
  std::vector<SourceBits> layout;
  int m_a = 0;
  for (const SourceDecl* src : sources) {
    SourceBits sb{src, nullptr, {}, m_a};
    if (src->kind == SourceKind::quantum) {
      sb.block = block_of.at(src->id);
      for (const auto& oid : sb.block->a_observer_ids) {
        sb.a_obs.push_back(spec.observer(oid));
      }
    } else {
      for (int e = 1; e <= src->particles; ++e) {
        const auto it = spec.routing.find({src->id, e});
        if (it == spec.routing.end()) continue;
        const ObserverDecl* o = spec.observer(it->second);
        if (o && o->type == 'A') sb.a_obs.push_back(o);
      }
      if (sb.a_obs.size() != 1) {
        throw Error(Error::Kind::validation,
                    to_string(src->kind) + " source " +
                        std::to_string(src->id) +
                        " must feed exactly one type-A observer");
      }
    }
    m_a += static_cast<int>(sb.a_obs.size());
    layout.push_back(std::move(sb));
  }
  family.m_a = m_a;
  if (m_a > 20) {
    throw Error(Error::Kind::resource,
                "2^" + std::to_string(m_a) + " segmented operators exceed "
                "the build guard");
  }

  std::map<int, std::map<ParticleId, std::map<char, int>>> setting_bits;
  for (const auto& block : table.blocks) {
    setting_bits[block.source_id] =
        letter_bits(block, *spec.source(block.source_id)->state);
  }

  std::map<std::string, std::string> label_to_setting;  // ymap consistency
  for (uint32_t l = 0; l < (uint32_t{1} << m_a); ++l) {
    SegmentedBellOperator op;
    op.index = l;
    op.m_a = m_a;
    op.quantum_roster = quantum_roster;
    op.b_setting = PauliString::identity(quantum_b_roster);
    int sign = 1;
    std::string label;
    for (const auto& sb : layout) {
      if (!sb.block) {
        label.push_back(bit_of(l, m_a, sb.offset) ? '1' : '0');
        continue;
      }
      const int k = static_cast<int>(sb.block->a_particles.size());
      uint32_t v = 0;
      for (int q = 0; q < k; ++q) {
        v = (v << 1) | bit_of(l, m_a, sb.offset + q);
      }
      const PauliString& local = sb.block->local_stabilizers[v];
      sign *= local.sign();
      const Roster& src_roster = sb.src->state->roster();
      for (int q = 0; q < k; ++q) {
        const ObserverDecl* obs = sb.a_obs[q];
        ATerm term;
        term.observer = obs->id;
        term.particles = {sb.block->a_particles[q]};
        term.bit = bit_of(l, m_a, sb.offset + q);
        term.pauli0 = PauliString(term.particles);
        term.pauli0.set_letter(0, sb.block->a_letters[q][0]);
        term.pauli1 = PauliString(term.particles);
        term.pauli1.set_letter(0, sb.block->a_letters[q][1]);
        term.angle = obs->angle;
        op.a_terms.push_back(std::move(term));
      }
      const auto& bits = setting_bits.at(sb.src->id);
      for (const auto& particle : sb.block->b_particles) {
        const auto it =
            std::lower_bound(src_roster.begin(), src_roster.end(), particle);
        const char letter =
            local.letter(static_cast<int>(it - src_roster.begin()));
        op.b_setting = op.b_setting *
                       [&] {
                         PauliString p(quantum_b_roster);
                         const auto jt = std::lower_bound(
                             quantum_b_roster.begin(), quantum_b_roster.end(),
                             particle);
                         p.set_letter(
                             static_cast<int>(jt - quantum_b_roster.begin()),
                             letter);
                         return p;
                       }();
        label.push_back('0' + bits.at(particle).at(letter));
      }
    }
    op.sign = sign;
    op.setting_label = label;
    if (spec.ymap) {
      const auto it = spec.ymap->table.find(op.bits());
      if (it == spec.ymap->table.end()) {
        throw Error(Error::Kind::validation,
                    "setting map override misses bit string " + op.bits());
      }
      op.setting_label = it->second;
    }
    const std::string setting_key = op.b_setting.str();
    const auto [entry, inserted] =
        label_to_setting.emplace(op.setting_label, setting_key);
    if (!inserted && entry->second != setting_key) {
      throw Error(Error::Kind::validation,
                  "setting map assigns label \"" + op.setting_label +
                      "\" to two different joint observables");
    }
    family.ops.push_back(std::move(op));
  }
  return family;
}

std::vector<SegmentedBellOperator> ghz_fragment_block(const NetworkSpec& spec,
                                                      int source_id) {
  const SourceDecl* src = spec.source(source_id);
  if (!src || src->kind != SourceKind::quantum) {
    throw Error(Error::Kind::validation,
                "source " + std::to_string(source_id) +
                    " is not a quantum source");
  }
  return build_operators(restricted(spec, {source_id})).ops;
}

VirtualPair virtual_qubit_pair(const NetworkSpec& raw, uint32_t l) {
  require_valid(raw);
  const NetworkSpec spec = normalize_star(raw);
  if (!is_virtual_form(spec)) {
    throw Error(Error::Kind::validation,
                "network is not in the joint-measurement form");
  }
  const ObserverDecl* a_obs = spec.a_observers()[0];
  const auto a_held = spec.held_by(a_obs->id);
  const int n = static_cast<int>(a_held.size());
  if (std::popcount(l) % 2 != 0) {
    throw Error(Error::Kind::validation,
                "bit string must have even parity");
  }
  if (l >= (uint32_t{1} << n)) {
    throw Error(Error::Kind::validation, "bit string out of range");
  }

  Roster a_roster = sorted_roster(a_held);
  Roster b_roster;
  Roster quantum_roster;
  std::vector<ParticleId> b_of_source(n);  // aligned with a_roster order
  for (int k = 0; k < n; ++k) {
    const int source_id = a_roster[k].source;
    const SourceDecl* src = spec.source(source_id);
    for (int e = 1; e <= src->particles; ++e) {
      const ParticleId particle{source_id, e};
      quantum_roster.push_back(particle);
      if (particle != a_roster[k]) b_of_source[k] = particle;
    }
    b_roster.push_back(b_of_source[k]);
  }
  quantum_roster = sorted_roster(std::move(quantum_roster));
  b_roster = sorted_roster(std::move(b_roster));

  auto aggregate = [&](uint32_t bits_value, const Roster& roster,
                       const std::vector<ParticleId>& per_source) {
    PauliString p(roster);
    for (int k = 0; k < n; ++k) {
      const char letter = bit_of(bits_value, n, k) ? 'X' : 'Z';
      const auto it =
          std::lower_bound(roster.begin(), roster.end(), per_source[k]);
      p.set_letter(static_cast<int>(it - roster.begin()), letter);
    }
    return p;
  };
  const uint32_t lbar = (~l) & ((uint32_t{1} << n) - 1);
  std::vector<ParticleId> a_list(a_roster.begin(), a_roster.end());

  auto label_of = [&](uint32_t bits_value) {
    std::string s(n, '0');
    for (int k = 0; k < n; ++k) {
      s[k] = bit_of(bits_value, n, k) ? '1' : '0';
    }
    return s;
  };

  VirtualPair pair;
  pair.l = l;
  for (int half = 0; half < 2; ++half) {
    SegmentedBellOperator op;
    op.index = half;
    op.m_a = 1;
    op.quantum_roster = quantum_roster;
    ATerm term;
    term.observer = a_obs->id;
    term.particles = a_roster;
    term.bit = half;
    term.pauli0 = aggregate(l, a_roster, a_list);
    term.pauli1 = aggregate(lbar, a_roster, a_list);
    term.angle = a_obs->angle;
    op.a_terms.push_back(std::move(term));
    const uint32_t setting = half == 0 ? l : lbar;
    op.b_setting = aggregate(setting, b_roster, b_of_source);
    op.setting_label = label_of(setting);
    op.sign = 1;
    (half == 0 ? pair.plus : pair.minus) = std::move(op);
  }
  return pair;
}

std::vector<VirtualPair> virtual_qubit_pairs(const NetworkSpec& spec) {
  require_valid(spec);
  const NetworkSpec normalized = normalize_star(spec);
  if (!is_virtual_form(normalized)) {
    throw Error(Error::Kind::validation,
                "network is not in the joint-measurement form");
  }
  const auto a_obs = normalized.a_observers()[0];
  const int n = static_cast<int>(normalized.held_by(a_obs->id).size());
  std::vector<VirtualPair> out;
  for (uint32_t l = 0; l < (uint32_t{1} << n); ++l) {
    if (std::popcount(l) % 2 == 0) {
      out.push_back(virtual_qubit_pair(spec, l));
    }
  }
  return out;
}

}  // namespace bellnet
