#include "bellnet/pauli.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace bellnet {

namespace {

constexpr int kMaxSites = 64;

int popcount(uint64_t v) { return std::popcount(v); }

}  // namespace

std::string to_string(const ParticleId& id) {
  std::ostringstream os;
  os << "(" << id.source << "," << id.emission << ")";
  return os.str();
}

Roster sorted_roster(Roster roster) {
  std::sort(roster.begin(), roster.end());
  roster.erase(std::unique(roster.begin(), roster.end()), roster.end());
  return roster;
}

bool roster_contains(const Roster& larger, const Roster& smaller) {
  return std::includes(larger.begin(), larger.end(), smaller.begin(),
                       smaller.end());
}

PauliString::PauliString(Roster roster) : roster_(std::move(roster)) {
  if (roster_.size() > kMaxSites) {
    throw Error(Error::Kind::resource,
                "Pauli string over " + std::to_string(roster_.size()) +
                    " particles exceeds the 64-site limit");
  }
  if (!std::is_sorted(roster_.begin(), roster_.end())) {
    throw Error(Error::Kind::internal, "particle roster must be sorted");
  }
}

PauliString PauliString::identity(Roster roster) {
  return PauliString(std::move(roster));
}

PauliString PauliString::parse(const std::string& text, Roster roster) {
  PauliString out(std::move(roster));
  size_t pos = 0;
  int phase = 0;
  if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
    if (text[pos] == '-') phase = 2;
    ++pos;
  }
  if (pos < text.size() && (text[pos] == 'i' || text[pos] == 'j')) {
    phase = (phase + 1) % 4;
    ++pos;
  }
  const std::string letters = text.substr(pos);
  if (static_cast<int>(letters.size()) != out.size()) {
    throw Error(Error::Kind::parse,
                "Pauli string \"" + text + "\" has " +
                    std::to_string(letters.size()) + " letters for " +
                    std::to_string(out.size()) + " particles");
  }
  for (int s = 0; s < out.size(); ++s) {
    out.set_letter(s, letters[s]);
  }
  out.mul_phase(phase);
  return out;
}

int PauliString::sign() const {
  if (!is_hermitian()) {
    throw Error(Error::Kind::validation,
                "Pauli string " + str() + " is not Hermitian");
  }
  return phase_ == 0 ? 1 : -1;
}

char PauliString::letter(int site) const {
  const bool x = x_bit(site), z = z_bit(site);
  if (x && z) return 'Y';
  if (x) return 'X';
  if (z) return 'Z';
  return 'I';
}

void PauliString::set_letter(int site, char letter) {
  const uint64_t bit = uint64_t{1} << site;
  x_ &= ~bit;
  z_ &= ~bit;
  switch (letter) {
    case 'I':
      break;
    case 'X':
      x_ |= bit;
      break;
    case 'Y':
      x_ |= bit;
      z_ |= bit;
      break;
    case 'Z':
      z_ |= bit;
      break;
    default:
      throw Error(Error::Kind::parse,
                  std::string("unknown Pauli letter '") + letter + "'");
  }
}

void PauliString::mul_phase(int k) { phase_ = ((phase_ + k) % 4 + 4) % 4; }

int PauliString::weight() const { return popcount(x_ | z_); }

void PauliString::check_same_roster(const PauliString& other) const {
  if (roster_ != other.roster_) {
    throw Error(Error::Kind::validation,
                "Pauli strings are defined over different particle rosters");
  }
}

PauliString PauliString::operator*(const PauliString& other) const {
  check_same_roster(other);
  PauliString out(roster_);
  out.x_ = x_ ^ other.x_;
  out.z_ = z_ ^ other.z_;
  // Per-site phase of sigma(x1,z1)*sigma(x2,z2) = i^g sigma(x1^x2, z1^z2),
  // with g = x1 z1 + x2 z2 + 2 z1 x2 - x3 z3 (mod 4), summed over sites.
  const int g = popcount(x_ & z_) + popcount(other.x_ & other.z_) +
                2 * popcount(z_ & other.x_) - popcount(out.x_ & out.z_);
  out.phase_ = ((phase_ + other.phase_ + g) % 4 + 4) % 4;
  return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
  check_same_roster(other);
  const int anti = popcount(x_ & other.z_) + popcount(z_ & other.x_);
  return anti % 2 == 0;
}

PauliString PauliString::embedded(const Roster& larger) const {
  if (!roster_contains(larger, roster_)) {
    throw Error(Error::Kind::validation,
                "target roster does not contain all particles of " + str());
  }
  PauliString out(larger);
  for (int s = 0; s < size(); ++s) {
    const auto it = std::lower_bound(larger.begin(), larger.end(), roster_[s]);
    const int t = static_cast<int>(it - larger.begin());
    if (x_bit(s)) out.x_ |= uint64_t{1} << t;
    if (z_bit(s)) out.z_ |= uint64_t{1} << t;
  }
  out.phase_ = phase_;
  return out;
}

std::string PauliString::str() const {
  static const char* prefixes[4] = {"", "i", "-", "-i"};
  std::string out = prefixes[phase_];
  for (int s = 0; s < size(); ++s) out.push_back(letter(s));
  return out;
}

std::vector<int> PauliString::lex_key() const {
  // I=0 < Z=1 < X=2 < Y=3, matching the (x,z) bit pair read x-major.
  std::vector<int> key(roster_.size());
  for (int s = 0; s < size(); ++s) {
    key[s] = (x_bit(s) ? 2 : 0) + (z_bit(s) ? 1 : 0);
  }
  return key;
}

StabilizerState::StabilizerState(Roster roster,
                                 std::vector<PauliString> generators)
    : roster_(sorted_roster(std::move(roster))) {
  const int n = qubit_count();
  std::vector<PauliString> rows;
  rows.reserve(generators.size());
  for (auto& g : generators) {
    PauliString row = g.roster() == roster_ ? g : g.embedded(roster_);
    if (!row.is_hermitian() ) {
      throw Error(Error::Kind::validation,
                  "generator " + row.str() + " has imaginary phase");
    }
    rows.push_back(std::move(row));
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    for (size_t j = i + 1; j < rows.size(); ++j) {
      if (!rows[i].commutes_with(rows[j])) {
        throw Error(Error::Kind::validation, "generators " + rows[i].str() +
                                                 " and " + rows[j].str() +
                                                 " anticommute");
      }
    }
  }
  // Gaussian elimination over GF(2) on the (x|z) tableau, x block first,
  // with exact phase tracking through the row products.
  auto column_bit = [n](const PauliString& p, int col) {
    return col < n ? p.x_bit(col) : p.z_bit(col - n);
  };
  size_t pivot_row = 0;
  for (int col = 0; col < 2 * n && pivot_row < rows.size(); ++col) {
    size_t candidate = pivot_row;
    while (candidate < rows.size() && !column_bit(rows[candidate], col)) {
      ++candidate;
    }
    if (candidate == rows.size()) continue;
    std::swap(rows[pivot_row], rows[candidate]);
    for (size_t r = 0; r < rows.size(); ++r) {
      if (r != pivot_row && column_bit(rows[r], col)) {
        rows[r] = rows[r] * rows[pivot_row];
      }
    }
    pivot_columns_.push_back(col);
    ++pivot_row;
  }
  for (size_t r = pivot_row; r < rows.size(); ++r) {
    if (rows[r].weight() != 0) {
      throw Error(Error::Kind::internal, "tableau reduction left a dangling row");
    }
    if (rows[r].phase_exponent() != 0) {
      // A product of the given generators equals -identity.
      throw Error(Error::Kind::validation,
                  "generating set is contradictory (contains -identity)");
    }
  }
  rows.resize(pivot_row);
  if (static_cast<int>(rows.size()) != n) {
    throw Error(Error::Kind::validation,
                "generators have rank " + std::to_string(rows.size()) +
                    " but the state has " + std::to_string(n) + " qubits");
  }
  generators_ = std::move(rows);
}

int StabilizerState::expectation(const PauliString& p) const {
  if (!p.is_hermitian()) {
    throw Error(Error::Kind::validation,
                "expectation of non-Hermitian string " + p.str());
  }
  PauliString q = p.roster() == roster_ ? p : p.embedded(roster_);
  const int n = qubit_count();
  auto column_bit = [n](const PauliString& s, int col) {
    return col < n ? s.x_bit(col) : s.z_bit(col - n);
  };
  for (size_t r = 0; r < generators_.size(); ++r) {
    if (column_bit(q, pivot_columns_[r])) {
      q = q * generators_[r];
    }
  }
  if (q.weight() != 0) return 0;  // not in the span of the group
  return q.phase_exponent() == 0 ? 1 : -1;
}

std::vector<PauliString> StabilizerState::group_elements() const {
  const int n = qubit_count();
  if (n > 16) {
    throw Error(Error::Kind::resource,
                "refusing to enumerate 2^" + std::to_string(n) +
                    " group elements");
  }
  std::vector<PauliString> out;
  out.reserve(size_t{1} << n);
  out.push_back(PauliString::identity(roster_));
  for (int g = 0; g < n; ++g) {
    const size_t have = out.size();
    for (size_t i = 0; i < have; ++i) {
      out.push_back(out[i] * generators_[g]);
    }
  }
  return out;
}

StabilizerState StabilizerState::bell_pair(int source) {
  Roster roster{{source, 1}, {source, 2}};
  return StabilizerState(roster, {PauliString::parse("XX", roster),
                                  PauliString::parse("ZZ", roster)});
}

StabilizerState StabilizerState::ghz_minus(int source, int qubits) {
  if (qubits < 2) {
    throw Error(Error::Kind::validation, "GHZ state needs at least 2 qubits");
  }
  Roster roster;
  for (int j = 1; j <= qubits; ++j) roster.push_back({source, j});
  std::vector<PauliString> gens;
  PauliString all_x(roster);
  for (int s = 0; s < qubits; ++s) all_x.set_letter(s, 'X');
  all_x.mul_phase(2);  // -X...X
  gens.push_back(all_x);
  for (int s = 0; s + 1 < qubits; ++s) {
    PauliString zz(roster);
    zz.set_letter(s, 'Z');
    zz.set_letter(s + 1, 'Z');
    gens.push_back(zz);
  }
  return StabilizerState(roster, std::move(gens));
}

StabilizerState tensor_product(const std::vector<StabilizerState>& parts) {
  Roster roster;
  for (const auto& part : parts) {
    roster.insert(roster.end(), part.roster().begin(), part.roster().end());
  }
  Roster merged = sorted_roster(roster);
  if (merged.size() != roster.size()) {
    throw Error(Error::Kind::validation,
                "tensor product parts share particle labels");
  }
  std::vector<PauliString> gens;
  for (const auto& part : parts) {
    for (const auto& g : part.generators()) {
      gens.push_back(g.embedded(merged));
    }
  }
  return StabilizerState(merged, std::move(gens));
}

}  // namespace bellnet
