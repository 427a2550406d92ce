#include "pcc/scenario.hpp"

#include "pcc/checks.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace pcc {

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : ConfigError([&] {
        std::string s = "scenario has " + std::to_string(errors.size()) + " error(s)";
        for (const auto& e : errors) s += "\n  " + e;
        return s;
      }()),
      errors_(std::move(errors)) {}

namespace {

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
};

struct Section {
  std::string kind;
  std::string name;
  int line = 0;
  std::vector<Entry> entries;

  const Entry* find(std::string_view key) const {
    for (const auto& e : entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  }
};

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

std::string at_line(int line, const std::string& msg) { return "line " + std::to_string(line) + ": " + msg; }

std::vector<Section> split_sections(std::string_view text, std::vector<std::string>& errors) {
  std::vector<Section> sections;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string t = trim(raw);
    if (t.empty()) continue;
    const bool indented = std::isspace(static_cast<unsigned char>(raw[0]));
    if (t.front() == '[') {
      if (t.back() != ']') {
        errors.push_back(at_line(line, "section header must end with ']'"));
        continue;
      }
      const auto w = words(std::string_view(t).substr(1, t.size() - 2));
      if (w.empty() || w.size() > 2) {
        errors.push_back(at_line(line, "section header must be [kind] or [kind name]"));
        continue;
      }
      sections.push_back({w[0], w.size() == 2 ? w[1] : std::string(), line, {}});
      continue;
    }
    if (sections.empty()) {
      errors.push_back(at_line(line, "content before the first section"));
      continue;
    }
    auto& entries = sections.back().entries;
    if (indented && !entries.empty()) {
      entries.back().value += " " + t;
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      errors.push_back(at_line(line, "expected 'key = value'"));
      continue;
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (key.empty()) {
      errors.push_back(at_line(line, "empty key"));
      continue;
    }
    if (sections.back().find(key) != nullptr) {
      errors.push_back(at_line(line, "duplicate key '" + key + "'"));
      continue;
    }
    entries.push_back({key, trim(std::string_view(t).substr(eq + 1)), line});
  }
  return sections;
}

std::optional<double> parse_double(std::string_view s) {
  const std::string str(s);
  if (str.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(str.c_str(), &end);
  if (end != str.c_str() + str.size() || errno != 0 || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  const std::string str(s);
  if (str.empty()) return std::nullopt;
  char* end = nullptr;
  errno = 0;
  const long long v = std::strtoll(str.c_str(), &end, 10);
  if (end != str.c_str() + str.size() || errno != 0) return std::nullopt;
  return v;
}

class Builder {
 public:
  explicit Builder(std::string name) { s_.name = std::move(name); }

  Scenario build(std::string_view text) {
    const auto sections = split_sections(text, errors_);
    for (const auto& sec : sections) by_kind_[sec.kind].push_back(&sec);
    for (const auto& [kind, secs] : by_kind_) {
      static const std::set<std::string> known = {"chart",      "sampling", "vector_field",   "one_form",
                                                  "endo",       "metric",   "tensor",         "connection",
                                                  "projector_pair", "distribution", "pencil", "check"};
      if (!known.count(kind)) {
        for (const auto* sec : secs) errors_.push_back(at_line(sec->line, "unknown section kind '" + kind + "'"));
      }
    }
    if (!build_chart()) {
      fail();
    }
    build_sampling();
    points_ = sample_points({s_.seed, s_.count, s_.chart.box});

    for (const auto* sec : named("vector_field")) {
      allow(*sec, {"components"});
      if (auto cs = exprs(*sec, "components", n())) add(s_.vectors, *sec, VectorField(*cs));
    }
    for (const auto* sec : named("one_form")) {
      allow(*sec, {"components"});
      if (auto cs = exprs(*sec, "components", n())) add(s_.forms, *sec, OneFormField(*cs));
    }
    for (const auto* sec : named("endo")) {
      allow(*sec, {"components", "from_pair"});
      if (sec->find("from_pair") != nullptr) continue;
      if (auto cs = exprs(*sec, "components", n() * n())) add(s_.endos, *sec, EndoField(n(), *cs));
    }
    for (const auto* sec : named("metric")) build_metric(*sec);
    for (const auto* sec : named("projector_pair")) build_pair(*sec);
    for (const auto* sec : named("endo")) {
      const Entry* fp = sec->find("from_pair");
      if (fp == nullptr) continue;
      if (sec->find("components") != nullptr) {
        errors_.push_back(at_line(sec->line, "endo takes either components or from_pair"));
        continue;
      }
      if (const auto* pair = lookup(s_.pairs, fp->value, fp->line, "projector pair")) {
        add(s_.endos, *sec, structure_from_projectors(*pair));
      }
    }
    for (const auto* sec : named("pencil")) build_pencil(*sec);
    for (const auto* sec : named("distribution")) build_distribution(*sec);

    for (const auto* sec : named("tensor")) tensor_secs_[sec->name] = sec;
    for (const auto* sec : named("connection")) connection_secs_[sec->name] = sec;
    for (const auto& [name, sec] : tensor_secs_) get_tensor(name, sec->line);
    for (const auto& [name, sec] : connection_secs_) get_connection(name, sec->line);

    for (const auto& f : frame_names_) {
      if (!s_.vectors.count(f)) errors_.push_back(at_line(frames_line_, "unknown frame field '" + f + "'"));
    }
    s_.frames = frame_names_;

    for (const auto* sec : by_kind_["check"]) build_check(*sec);
    validate_structures();
    fail();
    return std::move(s_);
  }

 private:
  int n() const { return s_.chart.dim; }

  void fail() {
    if (!errors_.empty()) throw ScenarioError(errors_);
  }

  std::vector<const Section*> named(const std::string& kind) {
    std::vector<const Section*> out;
    for (const auto* sec : by_kind_[kind]) {
      if (!is_identifier(sec->name)) {
        errors_.push_back(at_line(sec->line, "[" + kind + "] needs a name"));
        continue;
      }
      out.push_back(sec);
    }
    return out;
  }

  void allow(const Section& sec, std::initializer_list<std::string_view> keys, std::string_view prefix = {}) {
    for (const auto& e : sec.entries) {
      const bool listed = std::find(keys.begin(), keys.end(), e.key) != keys.end();
      const bool prefixed = !prefix.empty() && e.key.rfind(prefix, 0) == 0;
      if (!listed && !prefixed) errors_.push_back(at_line(e.line, "unknown key '" + e.key + "' in [" + sec.kind + "]"));
    }
  }

  const Entry* require(const Section& sec, std::string_view key) {
    const Entry* e = sec.find(key);
    if (e == nullptr) errors_.push_back(at_line(sec.line, "[" + sec.kind + "] is missing '" + std::string(key) + "'"));
    return e;
  }

  template <class Map>
  void add(Map& m, const Section& sec, typename Map::mapped_type value) {
    if (m.count(sec.name)) {
      errors_.push_back(at_line(sec.line, "duplicate " + sec.kind + " '" + sec.name + "'"));
      return;
    }
    m.emplace(sec.name, std::move(value));
  }

  template <class Map>
  const typename Map::mapped_type* lookup(const Map& m, const std::string& name, int line, const std::string& what) {
    auto it = m.find(name);
    if (it == m.end()) {
      errors_.push_back(at_line(line, "unknown " + what + " '" + name + "'"));
      return nullptr;
    }
    return &it->second;
  }

  std::optional<std::vector<Expr>> exprs_from(const Entry& e, std::size_t expected) {
    try {
      auto list = parse_expr_list(e.value, s_.chart.coords);
      if (list.size() != expected) {
        errors_.push_back(at_line(e.line, "'" + e.key + "' needs " + std::to_string(expected) + " expressions, got " +
                                              std::to_string(list.size())));
        return std::nullopt;
      }
      for (const auto& x : list) {
        if (x.max_coord() >= n()) {
          errors_.push_back(at_line(e.line, "coordinate index out of range in '" + e.key + "'"));
          return std::nullopt;
        }
      }
      return list;
    } catch (const ParseError& err) {
      errors_.push_back(at_line(e.line, std::string(err.what()) + " (offset " + std::to_string(err.offset()) + ")"));
      return std::nullopt;
    }
  }

  std::optional<std::vector<Expr>> exprs(const Section& sec, std::string_view key, int expected) {
    const Entry* e = require(sec, key);
    if (e == nullptr) return std::nullopt;
    return exprs_from(*e, static_cast<std::size_t>(expected));
  }

  // Components of a (1,2) object from `key = n^3 list` or sparse `key.k.i.j = expr`.
  std::optional<std::vector<Expr>> components12(const Section& sec, const std::string& key) {
    const std::size_t n3 = static_cast<std::size_t>(n()) * n() * n();
    if (const Entry* full = sec.find(key)) return exprs_from(*full, n3);
    std::vector<Expr> out(n3, Expr::rational(0));
    const std::string prefix = key + ".";
    bool ok = true;
    for (const auto& e : sec.entries) {
      if (e.key.rfind(prefix, 0) != 0) continue;
      std::vector<std::string> idx;
      std::stringstream ss(e.key.substr(prefix.size()));
      std::string part;
      while (std::getline(ss, part, '.')) idx.push_back(part);
      std::array<int, 3> k{};
      bool good = idx.size() == 3;
      for (std::size_t a = 0; good && a < 3; ++a) {
        const auto& names = s_.chart.coords;
        auto it = std::find(names.begin(), names.end(), idx[a]);
        good = it != names.end();
        if (good) k[a] = static_cast<int>(it - names.begin());
      }
      if (!good) {
        errors_.push_back(at_line(e.line, "'" + e.key + "' must be " + key + ".<k>.<i>.<j> with coordinate names"));
        ok = false;
        continue;
      }
      auto v = exprs_from(e, 1);
      if (!v) {
        ok = false;
        continue;
      }
      out[(static_cast<std::size_t>(k[0]) * n() + k[1]) * n() + k[2]] = (*v)[0];
    }
    if (!ok) return std::nullopt;
    return out;
  }

  bool build_chart() {
    const auto secs = by_kind_["chart"];
    if (secs.size() != 1) {
      errors_.push_back(secs.empty() ? std::string("line 0: missing [chart] section")
                                     : at_line(secs[1]->line, "more than one [chart] section"));
      return false;
    }
    const Section& sec = *secs[0];
    allow(sec, {"coords", "box"});
    const Entry* coords = require(sec, "coords");
    const Entry* box = require(sec, "box");
    if (coords == nullptr || box == nullptr) return false;
    static const std::set<std::string> reserved = {"sin", "cos", "exp", "pow", "coord"};
    Chart chart;
    chart.coords = words(coords->value);
    chart.dim = static_cast<int>(chart.coords.size());
    std::set<std::string> seen;
    for (const auto& c : chart.coords) {
      if (!is_identifier(c) || reserved.count(c) || !seen.insert(c).second) {
        errors_.push_back(at_line(coords->line, "invalid or repeated coordinate name '" + c + "'"));
        return false;
      }
    }
    const auto b = words(box->value);
    if (b.size() != 2 * chart.coords.size()) {
      errors_.push_back(at_line(box->line, "box needs lo hi for each coordinate"));
      return false;
    }
    for (std::size_t i = 0; i < chart.coords.size(); ++i) {
      const auto lo = parse_double(b[2 * i]);
      const auto hi = parse_double(b[2 * i + 1]);
      if (!lo || !hi) {
        errors_.push_back(at_line(box->line, "box bounds must be numbers"));
        return false;
      }
      chart.box.push_back({*lo, *hi});
    }
    try {
      chart.validate();
    } catch (const ConfigError& err) {
      errors_.push_back(at_line(sec.line, err.what()));
      return false;
    }
    s_.chart = std::move(chart);
    return true;
  }

  void build_sampling() {
    const auto secs = by_kind_["sampling"];
    if (secs.size() > 1) errors_.push_back(at_line(secs[1]->line, "more than one [sampling] section"));
    if (secs.empty()) return;
    const Section& sec = *secs[0];
    allow(sec, {"seed", "count", "tol", "frames"});
    if (const Entry* e = sec.find("seed")) {
      const auto v = parse_int(e->value);
      if (!v || *v < 0) errors_.push_back(at_line(e->line, "seed must be a nonnegative integer"));
      else s_.seed = static_cast<std::uint64_t>(*v);
    }
    if (const Entry* e = sec.find("count")) {
      const auto v = parse_int(e->value);
      if (!v || *v < 1 || *v > 100000) errors_.push_back(at_line(e->line, "count must be in 1..100000"));
      else s_.count = static_cast<int>(*v);
    }
    if (const Entry* e = sec.find("tol")) {
      const auto v = parse_double(e->value);
      if (!v || *v <= 0) errors_.push_back(at_line(e->line, "tol must be positive"));
      else s_.tol = *v;
    }
    if (const Entry* e = sec.find("frames")) {
      frame_names_ = words(e->value);
      frames_line_ = e->line;
    }
  }

  void build_metric(const Section& sec) {
    allow(sec, {"components", "riemannian"});
    bool riemannian = true;
    if (const Entry* r = sec.find("riemannian")) {
      if (r->value == "true" || r->value == "yes") riemannian = true;
      else if (r->value == "false" || r->value == "no") riemannian = false;
      else errors_.push_back(at_line(r->line, "riemannian must be true or false"));
    }
    const Entry* c = require(sec, "components");
    if (c == nullptr) return;
    const std::size_t upper = static_cast<std::size_t>(n()) * (n() + 1) / 2;
    const std::size_t full = static_cast<std::size_t>(n()) * n();
    std::size_t count = 0;
    try {
      count = parse_expr_list(c->value, s_.chart.coords).size();
    } catch (const ParseError&) {
    }
    auto list = exprs_from(*c, count == full ? full : upper);
    if (!list) return;
    try {
      add(s_.metrics, sec, count == full ? MetricField::from_full(n(), *list, riemannian)
                                         : MetricField(n(), *list, riemannian));
    } catch (const ConfigError& err) {
      errors_.push_back(at_line(sec.line, err.what()));
    }
  }

  void build_pair(const Section& sec) {
    allow(sec, {"h", "v", "structure"});
    if (const Entry* st = sec.find("structure")) {
      if (sec.find("h") || sec.find("v")) errors_.push_back(at_line(sec.line, "pair takes either structure or h/v"));
      if (const auto* e = lookup(s_.endos, st->value, st->line, "endo")) add(s_.pairs, sec, ProjectorPair::from_structure(*e));
      return;
    }
    auto h = exprs(sec, "h", n() * n());
    if (!h) return;
    ProjectorPair pair = ProjectorPair::from_horizontal(EndoField(n(), *h));
    if (const Entry* v = sec.find("v")) {
      auto vs = exprs_from(*v, static_cast<std::size_t>(n()) * n());
      if (!vs) return;
      pair.v = EndoField(n(), *vs);
    }
    add(s_.pairs, sec, std::move(pair));
  }

  void build_pencil(const Section& sec) {
    allow(sec, {"e1", "e2", "alpha", "beta"});
    const Entry* e1 = require(sec, "e1");
    const Entry* e2 = require(sec, "e2");
    const Entry* a = require(sec, "alpha");
    const Entry* b = require(sec, "beta");
    if (!e1 || !e2 || !a || !b) return;
    const auto* m1 = lookup(s_.endos, e1->value, e1->line, "endo");
    const auto* m2 = lookup(s_.endos, e2->value, e2->line, "endo");
    Pencil p;
    try {
      p.alpha = parse_rational(a->value);
      p.beta = parse_rational(b->value);
    } catch (const ConfigError& err) {
      errors_.push_back(at_line(a->line, err.what()));
      return;
    }
    if (!m1 || !m2) return;
    p.e1 = *m1;
    p.e2 = *m2;
    add(s_.pencils, sec, std::move(p));
  }

  void build_distribution(const Section& sec) {
    allow(sec, {"span", "pair", "side"});
    if (const Entry* sp = sec.find("span")) {
      if (sec.find("pair")) errors_.push_back(at_line(sec.line, "distribution takes either span or pair"));
      std::vector<VectorField> fields;
      for (const auto& w : words(sp->value)) {
        if (const auto* v = lookup(s_.vectors, w, sp->line, "vector field")) fields.push_back(*v);
        else return;
      }
      try {
        add(s_.distributions, sec, Distribution::span(n(), std::move(fields)));
      } catch (const ConfigError& err) {
        errors_.push_back(at_line(sp->line, err.what()));
      }
      return;
    }
    const Entry* pr = require(sec, "pair");
    const Entry* side = require(sec, "side");
    if (!pr || !side) return;
    const auto* pair = lookup(s_.pairs, pr->value, pr->line, "projector pair");
    Side sd = Side::Horizontal;
    if (side->value == "vertical") sd = Side::Vertical;
    else if (side->value != "horizontal") errors_.push_back(at_line(side->line, "side must be horizontal or vertical"));
    if (pair) add(s_.distributions, sec, Distribution::side(*pair, sd));
  }

  const EndoField* endo_ref(const Section& sec, std::string_view key) {
    const Entry* e = require(sec, key);
    if (e == nullptr) return nullptr;
    const auto* m = lookup(s_.endos, e->value, e->line, "endo");
    if (m != nullptr && std::string(key) == "structure") structure_refs_.emplace(e->value, e->line);
    return m;
  }

  const OneFormField* form_ref(const Section& sec, std::string_view key) {
    const Entry* e = require(sec, key);
    return e ? lookup(s_.forms, e->value, e->line, "one-form") : nullptr;
  }

  const Tensor12Field* get_tensor(const std::string& name, int line) {
    if (auto it = s_.tensors.find(name); it != s_.tensors.end()) return &it->second;
    auto sit = tensor_secs_.find(name);
    if (sit == tensor_secs_.end()) {
      errors_.push_back(at_line(line, "unknown tensor '" + name + "'"));
      return nullptr;
    }
    if (failed_.count("t:" + name)) return nullptr;
    if (!building_.insert("t:" + name).second) {
      errors_.push_back(at_line(line, "cyclic definition involving tensor '" + name + "'"));
      failed_.insert("t:" + name);
      return nullptr;
    }
    const Section& sec = *sit->second;
    std::optional<Tensor12Field> t = make_tensor(sec);
    building_.erase("t:" + name);
    if (!t) {
      failed_.insert("t:" + name);
      return nullptr;
    }
    return &s_.tensors.emplace(name, std::move(*t)).first->second;
  }

  std::optional<Tensor12Field> make_tensor(const Section& sec) {
    const Entry* kind = require(sec, "kind");
    if (kind == nullptr) return std::nullopt;
    const std::string& k = kind->value;
    if (k == "components") {
      allow(sec, {"kind", "components"}, "c.");
      auto cs = sec.find("components") ? components12(sec, "components") : components12(sec, "c");
      if (!cs) return std::nullopt;
      return Tensor12Field::from_components(n(), std::move(*cs), sec.name);
    }
    if (k == "zero") {
      allow(sec, {"kind"});
      return Tensor12Field::zero(n());
    }
    if (k == "nabla_E") {
      allow(sec, {"kind", "connection", "structure"});
      const Entry* c = require(sec, "connection");
      const EndoField* e = endo_ref(sec, "structure");
      const Connection* conn = c ? get_connection(c->value, c->line) : nullptr;
      if (!conn || !e) return std::nullopt;
      return nabla_tensor(*conn, *e);
    }
    if (k == "form_endo" || k == "endo_form") {
      allow(sec, {"kind", "form", "endo"});
      const OneFormField* f = form_ref(sec, "form");
      const EndoField* e = endo_ref(sec, "endo");
      if (!f || !e) return std::nullopt;
      return k == "form_endo" ? form_times_endo(*f, *e) : endo_times_form(*e, *f);
    }
    if (k == "projective") {
      allow(sec, {"kind", "form"});
      const OneFormField* f = form_ref(sec, "form");
      if (!f) return std::nullopt;
      return projective_tensor(*f);
    }
    if (k == "compose") {
      allow(sec, {"kind", "endo", "tensor"});
      const EndoField* e = endo_ref(sec, "endo");
      const Entry* t = require(sec, "tensor");
      const Tensor12Field* tt = t ? get_tensor(t->value, t->line) : nullptr;
      if (!e || !tt) return std::nullopt;
      return compose(*e, *tt);
    }
    if (k == "sum") {
      allow(sec, {"kind", "terms"});
      const Entry* t = require(sec, "terms");
      if (!t) return std::nullopt;
      std::optional<Tensor12Field> acc;
      for (const auto& w : words(t->value)) {
        const Tensor12Field* term = get_tensor(w, t->line);
        if (!term) return std::nullopt;
        acc = acc ? *acc + *term : *term;
      }
      if (!acc) errors_.push_back(at_line(t->line, "sum needs at least one term"));
      return acc;
    }
    if (k == "scale") {
      allow(sec, {"kind", "factor", "tensor"});
      const Entry* f = require(sec, "factor");
      const Entry* t = require(sec, "tensor");
      const Tensor12Field* tt = t ? get_tensor(t->value, t->line) : nullptr;
      if (!f || !tt) return std::nullopt;
      try {
        return parse_rational(f->value).value() * *tt;
      } catch (const ConfigError& err) {
        errors_.push_back(at_line(f->line, err.what()));
        return std::nullopt;
      }
    }
    errors_.push_back(at_line(kind->line, "unknown tensor kind '" + k + "'"));
    return std::nullopt;
  }

  const Connection* get_connection(const std::string& name, int line) {
    if (auto it = s_.connections.find(name); it != s_.connections.end()) return &it->second;
    auto sit = connection_secs_.find(name);
    if (sit == connection_secs_.end()) {
      errors_.push_back(at_line(line, "unknown connection '" + name + "'"));
      return nullptr;
    }
    if (failed_.count("c:" + name)) return nullptr;
    if (!building_.insert("c:" + name).second) {
      errors_.push_back(at_line(line, "cyclic definition involving connection '" + name + "'"));
      failed_.insert("c:" + name);
      return nullptr;
    }
    std::optional<Connection> c = make_connection(*sit->second);
    building_.erase("c:" + name);
    if (!c) {
      failed_.insert("c:" + name);
      return nullptr;
    }
    return &s_.connections.emplace(name, std::move(*c)).first->second;
  }

  const Connection* base_ref(const Section& sec) {
    const Entry* b = require(sec, "base");
    return b ? get_connection(b->value, b->line) : nullptr;
  }

  std::optional<Connection> make_connection(const Section& sec) {
    const Entry* kind = require(sec, "kind");
    if (kind == nullptr) return std::nullopt;
    const std::string& k = kind->value;
    if (k == "christoffel") {
      allow(sec, {"kind", "gamma"}, "gamma.");
      auto g = components12(sec, "gamma");
      if (!g) return std::nullopt;
      return Connection::christoffel(n(), std::move(*g), sec.name);
    }
    if (k == "flat") {
      allow(sec, {"kind"});
      return Connection::flat(n());
    }
    if (k == "levi_civita") {
      allow(sec, {"kind", "metric"});
      const Entry* m = require(sec, "metric");
      const MetricField* g = m ? lookup(s_.metrics, m->value, m->line, "metric") : nullptr;
      if (!g) return std::nullopt;
      return levi_civita(*g);
    }
    if (k == "sum") {
      allow(sec, {"kind", "base", "tensor"});
      const Connection* b = base_ref(sec);
      const Entry* t = require(sec, "tensor");
      const Tensor12Field* tt = t ? get_tensor(t->value, t->line) : nullptr;
      if (!b || !tt) return std::nullopt;
      return add_tensor(*b, *tt);
    }
    if (k == "conjugate" || k == "psi") {
      allow(sec, {"kind", "base", "structure"});
      const Connection* b = base_ref(sec);
      const EndoField* e = endo_ref(sec, "structure");
      if (!b || !e) return std::nullopt;
      return k == "conjugate" ? conjugate(*b, *e) : psi(*b, *e);
    }
    if (k == "schouten") {
      allow(sec, {"kind", "base", "pair"});
      const Connection* b = base_ref(sec);
      const Entry* p = require(sec, "pair");
      const ProjectorPair* pp = p ? lookup(s_.pairs, p->value, p->line, "projector pair") : nullptr;
      if (!b || !pp) return std::nullopt;
      return schouten(*b, *pp);
    }
    if (k == "generalized") {
      allow(sec, {"kind", "base", "structure", "tensor"});
      const Connection* b = base_ref(sec);
      const EndoField* e = endo_ref(sec, "structure");
      const Entry* t = require(sec, "tensor");
      const Tensor12Field* tt = t ? get_tensor(t->value, t->line) : nullptr;
      if (!b || !e || !tt) return std::nullopt;
      return generalized_conjugate(*b, *e, *tt);
    }
    if (k == "family") {
      allow(sec, {"kind", "base", "structure", "lambda", "mu"});
      const Connection* b = base_ref(sec);
      const EndoField* e = endo_ref(sec, "structure");
      const Entry* l = require(sec, "lambda");
      const Entry* m = require(sec, "mu");
      if (!b || !e || !l || !m) return std::nullopt;
      try {
        return family_member(*b, *e, parse_rational(l->value).value(), parse_rational(m->value).value());
      } catch (const ConfigError& err) {
        errors_.push_back(at_line(l->line, err.what()));
        return std::nullopt;
      }
    }
    errors_.push_back(at_line(kind->line, "unknown connection kind '" + k + "'"));
    return std::nullopt;
  }

  void build_check(const Section& sec) {
    if (sec.name.empty()) {
      errors_.push_back(at_line(sec.line, "[check] needs a label"));
      return;
    }
    for (const auto& c : s_.checks) {
      if (c.label == sec.name) {
        errors_.push_back(at_line(sec.line, "duplicate check label '" + sec.name + "'"));
        return;
      }
    }
    const Entry* kind = require(sec, "kind");
    if (!kind) return;
    const CheckKind* ck = find_check_kind(kind->value);
    if (!ck) {
      errors_.push_back(at_line(kind->line, "unknown check kind '" + kind->value + "'"));
      return;
    }
    CheckSpec spec;
    spec.label = sec.name;
    spec.kind = ck->name;
    spec.line = sec.line;
    bool ok = true;
    for (const auto& e : sec.entries) {
      if (e.key == "kind") continue;
      if (e.key == "expect_fail") {
        spec.expect_fail = words(e.value);
        for (const auto& item : spec.expect_fail) {
          const bool produced = std::any_of(ck->items.begin(), ck->items.end(), [&](const std::string& i) {
            return i == item || item.rfind(i + "(", 0) == 0;
          });
          if (!produced) errors_.push_back(at_line(e.line, "check kind '" + ck->name + "' has no item '" + item + "'"));
        }
        continue;
      }
      if (e.key == "min_residual") {
        const auto v = parse_double(e.value);
        if (!v || *v < 0) errors_.push_back(at_line(e.line, "min_residual must be a nonnegative number"));
        else spec.min_residual = *v;
        continue;
      }
      const auto it = std::find_if(ck->params.begin(), ck->params.end(), [&](const ParamSpec& p) { return p.name == e.key; });
      if (it == ck->params.end()) {
        errors_.push_back(at_line(e.line, "check kind '" + ck->name + "' has no parameter '" + e.key + "'"));
        ok = false;
        continue;
      }
      if (!resolve_param(*it, e)) ok = false;
      spec.params[e.key] = e.value;
    }
    for (const auto& p : ck->params) {
      if (p.required && !spec.params.count(p.name)) {
        errors_.push_back(at_line(sec.line, "check '" + sec.name + "' is missing '" + p.name + "'"));
        ok = false;
      }
    }
    if (ok) s_.checks.push_back(std::move(spec));
  }

  bool resolve_param(const ParamSpec& p, const Entry& e) {
    switch (p.type) {
      case ParamType::Connection:
        return get_connection(e.value, e.line) != nullptr;
      case ParamType::Structure:
        if (!lookup(s_.endos, e.value, e.line, "endo")) return false;
        structure_refs_.emplace(e.value, e.line);
        return true;
      case ParamType::Metric:
        return lookup(s_.metrics, e.value, e.line, "metric") != nullptr;
      case ParamType::Tensor:
        return get_tensor(e.value, e.line) != nullptr;
      case ParamType::Form:
        return lookup(s_.forms, e.value, e.line, "one-form") != nullptr;
      case ParamType::Pair:
        return lookup(s_.pairs, e.value, e.line, "projector pair") != nullptr;
      case ParamType::Distribution:
        return lookup(s_.distributions, e.value, e.line, "distribution") != nullptr;
      case ParamType::Pencil:
        return lookup(s_.pencils, e.value, e.line, "pencil") != nullptr;
      case ParamType::Mode:
        if (e.value == "recurrent" || e.value == "identity") return true;
        errors_.push_back(at_line(e.line, "mode must be recurrent or identity"));
        return false;
      case ParamType::Cells:
        try {
          if (parse_cells(e.value).empty()) throw ConfigError("empty list");
          return true;
        } catch (const ConfigError& err) {
          errors_.push_back(at_line(e.line, std::string("bad (lambda, mu) list: ") + err.what()));
          return false;
        }
    }
    return false;
  }

  // Structures must square to the identity, Riemannian metrics must be
  // positive definite, and pairs must be complementary projectors, all at the
  // sample points.
  void validate_structures() {
    for (const auto& [name, line] : structure_refs_) {
      auto it = s_.endos.find(name);
      if (it == s_.endos.end()) continue;
      try {
        const CheckRecord r = check_almost_product(it->second, points_, s_.tol);
        if (r.status != Status::Pass) {
          errors_.push_back(at_line(line, "structure '" + name + "' has E^2 != I at a sample point (residual " +
                                              std::to_string(r.residual) + ")"));
        }
      } catch (const EvalError& err) {
        errors_.push_back(at_line(line, "structure '" + name + "': " + err.what()));
      }
    }
    for (const auto* sec : by_kind_["metric"]) {
      auto it = s_.metrics.find(sec->name);
      if (it == s_.metrics.end() || !it->second.riemannian()) continue;
      try {
        for (const auto& p : points_) {
          if (!positive_definite_at(it->second, p)) {
            errors_.push_back(at_line(sec->line, "metric '" + sec->name + "' is not positive definite at a sample point"));
            break;
          }
        }
      } catch (const EvalError& err) {
        errors_.push_back(at_line(sec->line, "metric '" + sec->name + "': " + err.what()));
      }
    }
    for (const auto* sec : by_kind_["projector_pair"]) {
      auto it = s_.pairs.find(sec->name);
      if (it == s_.pairs.end()) continue;
      try {
        if (projector_pair_axioms(it->second, points_, s_.tol).status != Status::Pass) {
          errors_.push_back(at_line(sec->line, "projector pair '" + sec->name + "' violates h + v = I, h^2 = h, hv = 0"));
        }
      } catch (const EvalError& err) {
        errors_.push_back(at_line(sec->line, "projector pair '" + sec->name + "': " + err.what()));
      }
    }
  }

  Scenario s_;
  std::vector<std::string> errors_;
  std::map<std::string, std::vector<const Section*>> by_kind_;
  std::map<std::string, const Section*> tensor_secs_;
  std::map<std::string, const Section*> connection_secs_;
  std::set<std::string> building_;
  std::set<std::string> failed_;
  std::map<std::string, int> structure_refs_;
  std::vector<std::string> frame_names_;
  int frames_line_ = 0;
  std::vector<Point> points_;
};

}  // namespace

Rational parse_rational(std::string_view text) {
  const std::string t = trim(text);
  auto reduce = [](std::int64_t num, std::int64_t den) {
    if (den == 0) throw ConfigError("zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    const Rational r{num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
    // Exact predicates multiply four numerators or denominators in 128 bits.
    constexpr std::int64_t kLimit = std::int64_t{1} << 31;
    if (r.num <= -kLimit || r.num >= kLimit || r.den >= kLimit) throw ConfigError("rational out of range");
    return r;
  };
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    const auto num = parse_int(t.substr(0, slash));
    const auto den = parse_int(t.substr(slash + 1));
    if (!num || !den) throw ConfigError("not a rational: '" + t + "'");
    return reduce(*num, *den);
  }
  if (const auto dot = t.find('.'); dot != std::string::npos) {
    const std::string frac = t.substr(dot + 1);
    if (frac.empty() || frac.size() > 15 || !std::all_of(frac.begin(), frac.end(), ::isdigit)) {
      throw ConfigError("not a decimal: '" + t + "'");
    }
    const std::string whole = t.substr(0, dot);
    const bool neg = !whole.empty() && whole[0] == '-';
    const std::string digits = (neg ? whole.substr(1) : whole) + frac;
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit) || digits.size() > 18) {
      throw ConfigError("not a decimal: '" + t + "'");
    }
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const std::int64_t num = std::stoll(digits);
    return reduce(neg ? -num : num, den);
  }
  const auto v = parse_int(t);
  if (!v) throw ConfigError("not a number: '" + t + "'");
  return reduce(*v, 1);
}

Scenario load_scenario(std::string_view text, std::string name) { return Builder(std::move(name)).build(text); }

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError({"cannot open '" + path.string() + "'"});
  std::stringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str(), path.stem().string());
}

}  // namespace pcc
