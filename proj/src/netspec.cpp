#include "bellnet/netspec.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace bellnet {

using nlohmann::ordered_json;

std::string to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::classical:
      return "classical";
    case SourceKind::quantum:
      return "quantum";
    case SourceKind::nosignaling:
      return "ns";
  }
  return "?";
}

Roster NetworkSpec::roster() const {
  Roster r;
  for (const auto& s : sources) {
    for (int j = 1; j <= s.particles; ++j) r.push_back({s.id, j});
  }
  return sorted_roster(std::move(r));
}

const SourceDecl* NetworkSpec::source(int id) const {
  for (const auto& s : sources) {
    if (s.id == id) return &s;
  }
  return nullptr;
}

const ObserverDecl* NetworkSpec::observer(const std::string& id) const {
  for (const auto& o : observers) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

std::vector<ParticleId> NetworkSpec::held_by(
    const std::string& observer_id) const {
  std::vector<ParticleId> out;
  for (const auto& [particle, to] : routing) {
    if (to == observer_id) out.push_back(particle);
  }
  return out;  // source-major: routing map is ordered by ParticleId
}

std::vector<const ObserverDecl*> NetworkSpec::a_observers() const {
  std::vector<std::pair<ParticleId, const ObserverDecl*>> keyed;
  for (const auto& o : observers) {
    if (o.type != 'A') continue;
    auto held = held_by(o.id);
    ParticleId first = held.empty() ? ParticleId{1 << 20, 0} : held.front();
    keyed.emplace_back(first, &o);
  }
  std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    return a.first < b.first || (a.first == b.first && a.second->id < b.second->id);
  });
  std::vector<const ObserverDecl*> out;
  for (auto& [_, decl] : keyed) out.push_back(decl);
  return out;
}

std::vector<const ObserverDecl*> NetworkSpec::b_observers() const {
  std::vector<const ObserverDecl*> out;
  for (const auto& o : observers) {
    if (o.type == 'B') out.push_back(&o);
  }
  return out;
}

int NetworkSpec::count_kind(SourceKind kind) const {
  int n = 0;
  for (const auto& s : sources) n += (s.kind == kind);
  return n;
}

namespace {

constexpr double kDefaultAngle = std::numbers::pi / 4;

[[noreturn]] void parse_fail(const std::string& field,
                             const std::string& message) {
  throw Error(Error::Kind::parse, field + ": " + message);
}

SourceKind parse_kind(const std::string& text, const std::string& field) {
  if (text == "classical") return SourceKind::classical;
  if (text == "quantum") return SourceKind::quantum;
  if (text == "ns" || text == "no-signaling" || text == "nosignaling") {
    return SourceKind::nosignaling;
  }
  parse_fail(field, "unknown source kind \"" + text + "\"");
}

StabilizerState parse_state(const ordered_json& j, int source_id,
                            int particles, std::string* tag,
                            const std::string& field) {
  try {
    if (j.is_string()) {
      const std::string text = j.get<std::string>();
      if (text == "bell") {
        if (particles != 2) {
          parse_fail(field, "\"bell\" payload requires 2 particles");
        }
        *tag = "bell";
        return StabilizerState::bell_pair(source_id);
      }
      if (text.rfind("ghz:", 0) == 0) {
        const int k = std::stoi(text.substr(4));
        if (k != particles) {
          parse_fail(field, "\"" + text + "\" payload does not match " +
                                std::to_string(particles) + " particles");
        }
        *tag = text;
        return StabilizerState::ghz_minus(source_id, k);
      }
      parse_fail(field, "unknown state tag \"" + text + "\"");
    }
    if (j.is_object() && j.contains("generators")) {
      Roster roster;
      for (int e = 1; e <= particles; ++e) roster.push_back({source_id, e});
      std::vector<PauliString> gens;
      for (const auto& g : j.at("generators")) {
        gens.push_back(PauliString::parse(g.get<std::string>(), roster));
      }
      *tag = "custom";
      return StabilizerState(roster, std::move(gens));
    }
  } catch (const Error& e) {
    parse_fail(field, e.what());
  } catch (const nlohmann::json::exception& e) {
    parse_fail(field, e.what());
  }
  parse_fail(field, "expected \"bell\", \"ghz:<k>\" or {\"generators\": [...]}");
}

int box_index(int a, int b, int x, int y) {
  return ((a * 2 + b) * 2 + x) * 2 + y;
}

BehaviorTable parse_box(const ordered_json& j, std::string* tag,
                        const std::string& field) {
  if (j.is_string()) {
    if (j.get<std::string>() == "pr") {
      *tag = "pr";
      return BehaviorTable::pr_box();
    }
    parse_fail(field, "unknown box tag \"" + j.get<std::string>() + "\"");
  }
  if (j.is_object() && j.contains("table")) {
    *tag = "custom";
    BehaviorTable t;
    const auto& table = j.at("table");
    if (table.is_array()) {
      if (table.size() != 16) {
        parse_fail(field, "box table must have 16 entries");
      }
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y)
              t.at(a, b, x, y) = rational_from_double(
                  table.at(box_index(a, b, x, y)).get<double>());
      return t;
    }
    if (table.is_object()) {
      int seen = 0;
      for (const auto& [key, value] : table.items()) {
        // "ab|xy" with a,b in {+,-} and x,y in {0,1}, e.g. "+-|01".
        if (key.size() != 5 || key[2] != '|') {
          parse_fail(field, "bad box table key \"" + key + "\"");
        }
        auto outcome = [&](char c) {
          if (c == '+') return 0;
          if (c == '-') return 1;
          parse_fail(field, "bad outcome in key \"" + key + "\"");
        };
        auto setting = [&](char c) {
          if (c == '0') return 0;
          if (c == '1') return 1;
          parse_fail(field, "bad setting in key \"" + key + "\"");
        };
        t.at(outcome(key[0]), outcome(key[1]), setting(key[3]),
             setting(key[4])) = rational_from_double(value.get<double>());
        ++seen;
      }
      if (seen != 16) parse_fail(field, "box table must have 16 entries");
      return t;
    }
  }
  parse_fail(field, "expected \"pr\" or {\"table\": ...}");
}

}  // namespace

NetworkSpec parse_network(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Error::Kind::parse, e.what());
  }
  NetworkSpec spec;
  try {
    if (!doc.is_object()) parse_fail("document", "top level must be an object");
    int index = 0;
    for (const auto& js : doc.value("sources", ordered_json::array())) {
      const std::string field = "sources[" + std::to_string(index++) + "]";
      SourceDecl s;
      s.id = js.at("id").get<int>();
      s.kind = parse_kind(js.at("kind").get<std::string>(), field + ".kind");
      s.particles = js.value("particles", 2);
      if (s.particles < 1 || s.particles > 24) {
        parse_fail(field + ".particles", "particle count out of range");
      }
      if (js.contains("state")) {
        s.state = parse_state(js.at("state"), s.id, s.particles, &s.state_tag,
                              field + ".state");
      } else if (s.kind == SourceKind::quantum) {
        if (s.particles != 2) {
          parse_fail(field, "quantum source without \"state\" must emit a "
                            "2-particle pair");
        }
        s.state = StabilizerState::bell_pair(s.id);
        s.state_tag = "bell";
      }
      if (js.contains("box")) {
        s.box = parse_box(js.at("box"), &s.state_tag, field + ".box");
      } else if (s.kind == SourceKind::nosignaling) {
        s.box = BehaviorTable::pr_box();
        s.state_tag = "pr";
      }
      spec.sources.push_back(std::move(s));
    }
    index = 0;
    for (const auto& jo : doc.value("observers", ordered_json::array())) {
      const std::string field = "observers[" + std::to_string(index++) + "]";
      ObserverDecl o;
      o.id = jo.at("id").get<std::string>();
      const std::string type = jo.at("type").get<std::string>();
      if (type != "A" && type != "B") {
        parse_fail(field + ".type", "observer type must be \"A\" or \"B\"");
      }
      o.type = type[0];
      if (o.type == 'A') {
        o.angle = jo.value("angle", kDefaultAngle);
        if (jo.contains("axes")) {
          const auto& axes = jo.at("axes");
          if (!axes.is_array() || axes.size() != 2) {
            parse_fail(field + ".axes", "expected two Pauli letters");
          }
          for (int k = 0; k < 2; ++k) {
            const std::string a = axes.at(k).get<std::string>();
            if (a.size() != 1 ||
                (a[0] != 'X' && a[0] != 'Y' && a[0] != 'Z')) {
              parse_fail(field + ".axes", "bad axis \"" + a + "\"");
            }
            o.axes[k] = a[0];
          }
        }
      }
      spec.observers.push_back(std::move(o));
    }
    index = 0;
    for (const auto& jr : doc.value("routing", ordered_json::array())) {
      const std::string field = "routing[" + std::to_string(index++) + "]";
      const auto& pj = jr.at("particle");
      if (!pj.is_array() || pj.size() != 2) {
        parse_fail(field + ".particle", "expected [source, emission]");
      }
      ParticleId particle{pj.at(0).get<int>(), pj.at(1).get<int>()};
      const std::string to = jr.at("to").get<std::string>();
      if (!spec.observer(to)) {
        parse_fail(field, "unknown observer \"" + to + "\"");
      }
      const SourceDecl* src = spec.source(particle.source);
      if (!src) {
        parse_fail(field, "unknown source " + std::to_string(particle.source));
      }
      if (particle.emission < 1 || particle.emission > src->particles) {
        parse_fail(field, "source " + std::to_string(particle.source) +
                              " has no particle " + to_string(particle));
      }
      if (spec.routing.count(particle)) {
        parse_fail(field, "particle " + to_string(particle) +
                              " routed more than once");
      }
      spec.routing[particle] = to;
    }
    spec.p = doc.value("p", 1.0);
    if (doc.contains("ymap")) {
      SettingMapOverride ymap;
      for (const auto& [key, value] : doc.at("ymap").items()) {
        ymap.table[key] = value.get<std::string>();
      }
      spec.ymap = std::move(ymap);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Error::Kind::parse, e.what());
  }
  return spec;
}

NetworkSpec load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Error::Kind::parse, "cannot open " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_network(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string serialize(const NetworkSpec& spec) {
  ordered_json doc;
  doc["sources"] = ordered_json::array();
  std::vector<SourceDecl> sources = spec.sources;
  std::sort(sources.begin(), sources.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& s : sources) {
    ordered_json js;
    js["id"] = s.id;
    js["kind"] = to_string(s.kind);
    js["particles"] = s.particles;
    if (s.state) {
      if (s.state_tag == "custom" || s.state_tag.empty()) {
        ordered_json gens = ordered_json::array();
        for (const auto& g : s.state->generators()) gens.push_back(g.str());
        js["state"] = ordered_json{{"generators", gens}};
      } else {
        js["state"] = s.state_tag;
      }
    }
    if (s.box) {
      if (s.state_tag == "pr") {
        js["box"] = "pr";
      } else {
        ordered_json table = ordered_json::array();
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int x = 0; x < 2; ++x)
              for (int y = 0; y < 2; ++y)
                table.push_back(boost::rational_cast<double>(
                    s.box->at(a, b, x, y)));
        js["box"] = ordered_json{{"table", table}};
      }
    }
    doc["sources"].push_back(std::move(js));
  }
  doc["observers"] = ordered_json::array();
  std::vector<ObserverDecl> observers = spec.observers;
  std::sort(observers.begin(), observers.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (const auto& o : observers) {
    ordered_json jo;
    jo["id"] = o.id;
    jo["type"] = std::string(1, o.type);
    if (o.type == 'A') {
      jo["angle"] = o.angle;
      jo["axes"] = {std::string(1, o.axes[0]), std::string(1, o.axes[1])};
    }
    doc["observers"].push_back(std::move(jo));
  }
  doc["routing"] = ordered_json::array();
  for (const auto& [particle, to] : spec.routing) {
    doc["routing"].push_back(ordered_json{
        {"particle", {particle.source, particle.emission}}, {"to", to}});
  }
  doc["p"] = spec.p;
  if (spec.ymap) {
    ordered_json jm;
    for (const auto& [key, value] : spec.ymap->table) jm[key] = value;
    doc["ymap"] = std::move(jm);
  }
  return doc.dump(2) + "\n";
}

namespace {

bool legal_axis_pair(char a, char b) {
  if (a == b) return false;
  auto ok = [](char c) { return c == 'X' || c == 'Y' || c == 'Z'; };
  return ok(a) && ok(b);
}

// The one sanctioned multi-qubit type-A shape: an odd number of single
// qubits, one from each 2-qubit quantum source, measured jointly.
bool virtual_qubit_shape(const NetworkSpec& spec,
                         const std::vector<ParticleId>& held) {
  if (held.size() < 3 || held.size() % 2 == 0) return false;
  std::set<int> seen;
  for (const auto& particle : held) {
    const SourceDecl* src = spec.source(particle.source);
    if (!src || src->kind != SourceKind::quantum || src->particles != 2) {
      return false;
    }
    if (!seen.insert(particle.source).second) return false;
  }
  return spec.a_observers().size() == 1;
}

}  // namespace

std::vector<Diagnostic> validate(const NetworkSpec& spec) {
  std::vector<Diagnostic> out;
  auto flag = [&](const std::string& field, const std::string& message) {
    out.push_back({field, message});
  };

  if (spec.sources.empty()) flag("sources", "network has no sources");
  std::set<int> source_ids;
  for (const auto& s : spec.sources) {
    const std::string field = "sources[" + std::to_string(s.id) + "]";
    if (s.id < 1) flag(field, "source ids must be positive");
    if (!source_ids.insert(s.id).second) flag(field, "duplicate source id");
    switch (s.kind) {
      case SourceKind::quantum:
        if (!s.state) {
          flag(field, "quantum source has no state payload");
        } else if (s.state->qubit_count() != s.particles) {
          flag(field, "state has " + std::to_string(s.state->qubit_count()) +
                          " qubits but the source emits " +
                          std::to_string(s.particles));
        }
        break;
      case SourceKind::nosignaling:
        if (s.particles != 2) {
          flag(field, "no-signaling sources are bipartite (2 particles)");
        }
        if (!s.box) {
          flag(field, "no-signaling source has no box payload");
        } else {
          for (const auto& d : validate_box(*s.box)) {
            flag(field + ".box", d.message);
          }
        }
        break;
      case SourceKind::classical:
        break;
    }
  }

  std::set<std::string> observer_ids;
  for (const auto& o : spec.observers) {
    const std::string field = "observers[" + o.id + "]";
    if (!observer_ids.insert(o.id).second) flag(field, "duplicate observer id");
    if (o.type == 'A') {
      if (!(o.angle > 0.0 && o.angle < std::numbers::pi / 2)) {
        flag(field + ".angle", "theta must lie strictly inside (0, pi/2)");
      }
      if (!legal_axis_pair(o.axes[0], o.axes[1])) {
        flag(field + ".axes", "criteria (2) violated: axis pair must be two "
                              "distinct letters from {X,Y,Z}");
      }
    }
  }

  // Routing must be a total partition of the emitted particles.
  for (const auto& s : spec.sources) {
    for (int j = 1; j <= s.particles; ++j) {
      const ParticleId particle{s.id, j};
      if (!spec.routing.count(particle)) {
        flag("routing", "particle " + to_string(particle) + " is not routed");
      }
    }
  }
  for (const auto& [particle, to] : spec.routing) {
    if (!spec.observer(to)) {
      flag("routing", "particle " + to_string(particle) +
                          " routed to unknown observer \"" + to + "\"");
    }
    if (!source_ids.count(particle.source)) {
      flag("routing", "particle " + to_string(particle) +
                          " comes from an undeclared source");
    }
  }

  const int m_a = static_cast<int>(spec.a_observers().size());
  const int m_b = static_cast<int>(spec.b_observers().size());
  bool virtual_form = false;
  for (const auto& o : spec.observers) {
    if (o.type == 'A' && virtual_qubit_shape(spec, spec.held_by(o.id))) {
      virtual_form = true;
    }
  }
  for (const auto& o : spec.observers) {
    const auto held = spec.held_by(o.id);
    const std::string field = "observers[" + o.id + "]";
    if (held.empty()) {
      flag(field, "observer receives no particles");
      continue;
    }
    if (o.type == 'A' && held.size() != 1 &&
        !virtual_qubit_shape(spec, held)) {
      flag(field, "n_A = 1 violated: type-A observers measure a single "
                  "particle (joint measurements only in the odd Bell-source "
                  "form)");
    }
    // A lone single-particle joint observer (standard Bell test, or the
    // per-branch receivers of the joint-measurement form) is fine; a
    // singleton among several type-B observers is a routing mistake.
    if (o.type == 'B' && held.size() < 2 && m_b >= 2 && !virtual_form) {
      flag(field, "n_B >= 2 violated");
    }
  }
  if (m_a == 0) flag("observers", "network has no type-A observers");

  if (!(spec.p > 0.0)) flag("p", "exponent p must be positive");

  if (spec.ymap) {
    const size_t want = size_t{1} << m_a;
    if (spec.ymap->table.size() != want && m_a > 0) {
      flag("ymap", "setting map override must cover all " +
                       std::to_string(want) + " bit strings");
    }
    for (const auto& [key, value] : spec.ymap->table) {
      if (key.size() != static_cast<size_t>(m_a) ||
          key.find_first_not_of("01") != std::string::npos) {
        flag("ymap", "bad bit string key \"" + key + "\"");
      }
    }
  }
  return out;
}

bool is_valid(const NetworkSpec& spec) { return validate(spec).empty(); }

void require_valid(const NetworkSpec& spec) {
  const auto diagnostics = validate(spec);
  if (diagnostics.empty()) return;
  std::ostringstream os;
  os << "invalid network:";
  for (const auto& d : diagnostics) {
    os << "\n  " << d.field << ": " << d.message;
  }
  throw Error(Error::Kind::validation, os.str());
}

NetworkSpec normalize_star(const NetworkSpec& spec,
                           std::vector<std::string>* log) {
  const auto bs = spec.b_observers();
  if (bs.size() <= 1) return spec;
  NetworkSpec out = spec;
  std::string merged_id = "B";
  while (out.observer(merged_id) && spec.observer(merged_id)->type != 'B') {
    merged_id += "_";
  }
  std::vector<ObserverDecl> keep;
  std::string names;
  for (const auto& o : out.observers) {
    if (o.type == 'B') {
      if (!names.empty()) names += ",";
      names += o.id;
      continue;
    }
    keep.push_back(o);
  }
  keep.push_back(ObserverDecl{merged_id, 'B', 0.0, {'Z', 'X'}});
  for (auto& [particle, to] : out.routing) {
    if (spec.observer(to) && spec.observer(to)->type == 'B') to = merged_id;
  }
  out.observers = std::move(keep);
  if (log) {
    log->push_back("merged type-B observers {" + names + "} into joint "
                   "observer \"" + merged_id + "\"");
  }
  return out;
}

NetworkSpec restricted(const NetworkSpec& spec,
                       const std::vector<int>& source_ids) {
  NetworkSpec out;
  std::set<int> keep(source_ids.begin(), source_ids.end());
  for (const auto& s : spec.sources) {
    if (keep.count(s.id)) out.sources.push_back(s);
  }
  std::set<std::string> used;
  for (const auto& [particle, to] : spec.routing) {
    if (keep.count(particle.source)) {
      out.routing[particle] = to;
      used.insert(to);
    }
  }
  for (const auto& o : spec.observers) {
    if (used.count(o.id)) out.observers.push_back(o);
  }
  out.p = spec.p;
  // A setting-map override keyed on the full network's bit strings does not
  // restrict meaningfully; drop it.
  return out;
}

std::string digest(const NetworkSpec& spec) {
  const std::string text = serialize(spec);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

}  // namespace bellnet
