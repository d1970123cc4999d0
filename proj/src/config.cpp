#include "caginalp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "caginalp/csv_io.hpp"
#include "caginalp/errors.hpp"

namespace caginalp {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::string key_name(const std::string& section, const std::string& key) {
  return "[" + section + "]." + key;
}

double to_real(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v)) {
    throw ConfigError(what + ": expected a finite number, got '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s, const std::string& what) {
  const std::string t = trim(s);
  char* end = nullptr;
  const long v = std::strtol(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size() || v < -(1L << 30) ||
      v > (1L << 30)) {
    throw ConfigError(what + ": expected an integer, got '" + s + "'");
  }
  return static_cast<int>(v);
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return path.lexically_normal();
}

}  // namespace

// IniDocument ----------------------------------------------------------------

IniDocument IniDocument::parse(const std::string& text,
                               const std::string& origin) {
  IniDocument doc;
  doc.origin_ = origin;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + ": empty section name");
      if (doc.sections_.count(section)) {
        throw ConfigError(where + ": section [" + section + "] repeated");
      }
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    // Trailing comments need whitespace before the marker so paths with '#'
    // survive.
    for (const char* marker : {" #", "\t#", " ;", "\t;"}) {
      const auto c = value.find(marker);
      if (c != std::string::npos) value = trim(value.substr(0, c));
    }
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (section.empty()) {
      throw ConfigError(where + ": key '" + key + "' outside of any section");
    }
    auto& sec = doc.sections_[section];
    if (sec.count(key)) {
      throw ConfigError(where + ": " + key_name(section, key) + " given twice");
    }
    sec[key] = Entry{value, line_no, false};
  }
  return doc;
}

IniDocument IniDocument::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const IniDocument::Entry* IniDocument::find(const std::string& section,
                                            const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return nullptr;
  k->second.used = true;
  return &k->second;
}

bool IniDocument::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string IniDocument::get(const std::string& section,
                             const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) {
    throw ConfigError(origin_ + ": missing required key " +
                      key_name(section, key));
  }
  return e->value;
}

std::string IniDocument::get_or(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

double IniDocument::real(const std::string& section,
                         const std::string& key) const {
  return to_real(get(section, key), origin_ + ": " + key_name(section, key));
}

double IniDocument::real_or(const std::string& section, const std::string& key,
                            double fallback) const {
  return has(section, key) ? real(section, key) : fallback;
}

int IniDocument::integer(const std::string& section,
                         const std::string& key) const {
  return to_int(get(section, key), origin_ + ": " + key_name(section, key));
}

int IniDocument::integer_or(const std::string& section, const std::string& key,
                            int fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

bool IniDocument::boolean_or(const std::string& section, const std::string& key,
                             bool fallback) const {
  if (!has(section, key)) return fallback;
  const std::string v = get(section, key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(origin_ + ": " + key_name(section, key) +
                    ": expected true or false, got '" + v + "'");
}

void IniDocument::reject_unknown(const std::vector<std::string>& allowed) const {
  for (const auto& [section, entries] : sections_) {
    if (std::find(allowed.begin(), allowed.end(), section) == allowed.end()) {
      throw ConfigError(origin_ + ": unknown section [" + section + "]");
    }
    for (const auto& [key, entry] : entries) {
      if (!entry.used) {
        throw ConfigError(origin_ + ":" + std::to_string(entry.line) +
                          ": unknown key " + key_name(section, key));
      }
    }
  }
}

// Run configuration ----------------------------------------------------------

namespace {

constexpr int kMaxReferenceDepth = 4;

class Emitter {
 public:
  void section(const std::string& name) {
    if (!first_) out_ << '\n';
    first_ = false;
    out_ << '[' << name << "]\n";
  }
  void key(const std::string& k, const std::string& v) {
    out_ << k << " = " << v << '\n';
  }
  void key(const std::string& k, double v) { key(k, format_real(v)); }
  void key(const std::string& k, int v) { key(k, std::to_string(v)); }
  std::string str() const { return out_.str(); }

 private:
  std::ostringstream out_;
  bool first_ = true;
};

struct Loader {
  const IniDocument& doc;
  fs::path base;
  int depth;
  Emitter emit;
  std::map<std::string, StateTrajectory> references;

  std::string where(const std::string& section, const std::string& key) const {
    return doc.origin() + ": " + key_name(section, key);
  }

  StateTrajectory& reference(const std::string& spec, const Grid& grid,
                             const TimeGrid& time, const std::string& what,
                             std::string& canonical);
  Field field_source(const std::string& section, const std::string& key,
                     const std::string& fallback, const Grid& grid,
                     std::string& canonical);
  SpaceTimeField spacetime_source(const std::string& section,
                                  const std::string& key,
                                  const std::string& fallback,
                                  const Grid& grid, const TimeGrid& time,
                                  std::string& canonical);
  Field final_target(const std::string& section, const std::string& key,
                     const std::string& component, const Grid& grid,
                     const TimeGrid& time, std::string& canonical);
  SpaceTimeField running_target(const std::string& section,
                                const std::string& key,
                                const std::string& component, const Grid& grid,
                                const TimeGrid& time, std::string& canonical);
};

RunConfig load_impl(const std::string& text, const fs::path& base_dir,
                    const std::string& origin, int depth);

StateTrajectory& Loader::reference(const std::string& spec, const Grid& grid,
                                   const TimeGrid& time,
                                   const std::string& what,
                                   std::string& canonical) {
  const fs::path path = resolve(base, spec);
  canonical = "from_reference_run:" + path.string();
  const auto hit = references.find(path.string());
  if (hit != references.end()) return hit->second;
  if (depth >= kMaxReferenceDepth) {
    throw ConfigError(what + ": reference runs nested too deeply");
  }
  std::ifstream in(path);
  if (!in) throw ConfigError(what + ": cannot open reference config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const RunConfig ref =
      load_impl(ss.str(), path.parent_path(), path.string(), depth + 1);
  if (ref.problem.grid != grid || ref.problem.time != time) {
    throw ConfigError(what + ": reference run " + path.string() +
                      " uses a different grid or time grid");
  }
  const Problem& p = ref.problem;
  StateTrajectory traj = solve_state(p.init, p.control, p.solver, p.model);
  return references.emplace(path.string(), std::move(traj)).first->second;
}

Field Loader::field_source(const std::string& section, const std::string& key,
                           const std::string& fallback, const Grid& grid,
                           std::string& canonical) {
  const std::string spec = doc.get_or(section, key, fallback);
  const std::string what = where(section, key);
  if (starts_with(spec, "constant:")) {
    const double v = to_real(spec.substr(9), what);
    canonical = "constant:" + format_real(v);
    return Field::constant(grid, v);
  }
  if (starts_with(spec, "cosine:")) {
    const auto parts = split(spec.substr(7), ',');
    if (parts.size() != 3) {
      throw ConfigError(what + ": cosine needs mean,amplitude,mode");
    }
    const double mean = to_real(parts[0], what);
    const double amp = to_real(parts[1], what);
    const int mode = to_int(parts[2], what);
    canonical = "cosine:" + format_real(mean) + "," + format_real(amp) + "," +
                std::to_string(mode);
    return cosine_field(grid, mean, amp, mode);
  }
  if (starts_with(spec, "file:")) {
    const fs::path path = resolve(base, spec.substr(5));
    canonical = "file:" + path.string();
    try {
      return read_field_csv(path, grid);
    } catch (const ConfigError& e) {
      throw ConfigError(what + ": " + e.what());
    }
  }
  throw ConfigError(what + ": expected constant:<v>, cosine:<mean>,<amp>,<mode> "
                    "or file:<path>, got '" + spec + "'");
}

SpaceTimeField Loader::spacetime_source(const std::string& section,
                                        const std::string& key,
                                        const std::string& fallback,
                                        const Grid& grid, const TimeGrid& time,
                                        std::string& canonical) {
  const std::string spec = doc.get_or(section, key, fallback);
  const std::string what = where(section, key);
  if (spec == "zero") {
    canonical = "zero";
    return SpaceTimeField(grid, time);
  }
  if (starts_with(spec, "constant:")) {
    const double v = to_real(spec.substr(9), what);
    canonical = "constant:" + format_real(v);
    return SpaceTimeField::constant(grid, time, v);
  }
  if (starts_with(spec, "wave:")) {
    const auto parts = split(spec.substr(5), ',');
    if (parts.size() != 3) {
      throw ConfigError(what + ": wave needs mean,amplitude,mode");
    }
    const double mean = to_real(parts[0], what);
    const double amp = to_real(parts[1], what);
    const int mode = to_int(parts[2], what);
    canonical = "wave:" + format_real(mean) + "," + format_real(amp) + "," +
                std::to_string(mode);
    return wave_field(grid, time, mean, amp, mode);
  }
  if (starts_with(spec, "file:")) {
    const fs::path path = resolve(base, spec.substr(5));
    canonical = "file:" + path.string();
    try {
      return read_spacetime_csv(path, grid, time);
    } catch (const ConfigError& e) {
      throw ConfigError(what + ": " + e.what());
    }
  }
  throw ConfigError(what + ": expected zero, constant:<v>, "
                    "wave:<mean>,<amp>,<mode> or file:<path>, got '" + spec +
                    "'");
}

SpaceTimeField Loader::running_target(const std::string& section,
                                      const std::string& key,
                                      const std::string& component,
                                      const Grid& grid, const TimeGrid& time,
                                      std::string& canonical) {
  const std::string spec = doc.get_or(section, key, "constant:0");
  if (starts_with(spec, "from_reference_run:")) {
    const StateTrajectory& ref =
        reference(spec.substr(19), grid, time, where(section, key), canonical);
    std::vector<Field> slices;
    for (const auto& s : ref.snapshots) {
      slices.push_back(component == "theta" ? s.theta : s.phi);
    }
    return SpaceTimeField(time, std::move(slices));
  }
  if (spec == "zero" || starts_with(spec, "wave:")) {
    throw ConfigError(where(section, key) +
                      ": targets take constant:, file: or from_reference_run:");
  }
  return spacetime_source(section, key, "constant:0", grid, time, canonical);
}

Field Loader::final_target(const std::string& section, const std::string& key,
                           const std::string& component, const Grid& grid,
                           const TimeGrid& time, std::string& canonical) {
  const std::string spec = doc.get_or(section, key, "constant:0");
  if (starts_with(spec, "from_reference_run:")) {
    const StateTrajectory& ref =
        reference(spec.substr(19), grid, time, where(section, key), canonical);
    return component == "theta" ? ref.final().theta : ref.final().phi;
  }
  if (starts_with(spec, "cosine:")) {
    throw ConfigError(where(section, key) +
                      ": targets take constant:, file: or from_reference_run:");
  }
  return field_source(section, key, "constant:0", grid, canonical);
}

Nonlinearities load_nonlinearities(const std::string& spec,
                                   const fs::path& base,
                                   const std::string& what,
                                   std::string& canonical) {
  if (spec == "default") {
    canonical = "default";
    return default_nonlinearities();
  }
  if (!starts_with(spec, "custom:")) {
    throw ConfigError(what + ": expected default or custom:<path>, got '" +
                      spec + "'");
  }
  const fs::path path = resolve(base, spec.substr(7));
  canonical = "custom:" + path.string();
  const IniDocument doc = IniDocument::load(path);
  const double hs = doc.real("nonlinearity", "h_steepness");
  const double hh = doc.real_or("nonlinearity", "h_height", 1.0);
  const double ks = doc.real("nonlinearity", "k_steepness");
  const double kh = doc.real_or("nonlinearity", "k_height", 1.0);
  doc.reject_unknown({"nonlinearity"});
  if (!(hs > 0.0) || !(ks > 0.0) || !(hh > 0.0) || !(kh > 0.0)) {
    throw ConfigError(path.string() + ": steepness and height must be positive");
  }
  Nonlinearities nl;
  nl.h_gate = tanh_switch(hs, hh);
  nl.k_temp = tanh_switch(ks, kh);
  nl.h_star = hh;
  nl.k_star = kh;
  return nl;
}

std::vector<int> parse_slices(const std::string& spec, int nt,
                              const std::string& what) {
  std::vector<int> out;
  if (spec == "none") return out;
  if (spec == "all") {
    for (int n = 0; n <= nt; ++n) out.push_back(n);
    return out;
  }
  for (const auto& item : split(spec, ',')) {
    int n = 0;
    if (item == "first") {
      n = 0;
    } else if (item == "last") {
      n = nt;
    } else {
      n = to_int(item, what);
    }
    if (n < 0 || n > nt) {
      throw ConfigError(what + ": slice " + item + " outside 0.." +
                        std::to_string(nt));
    }
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string slices_text(const std::vector<int>& slices) {
  if (slices.empty()) return "none";
  std::string s;
  for (int n : slices) s += (s.empty() ? "" : ",") + std::to_string(n);
  return s;
}

// Sign conditions: negative constants are rejected; ell, Lambda and chi equal
// to zero are degenerate but usable (verification regimes), so only warned.
void apply_validation(const Model& model, const std::string& origin,
                      std::vector<std::string>& warnings) {
  static const std::map<std::string, std::string> config_key = {
      {"ell", "ell"},           {"Lambda", "lambda_big"},
      {"chi", "chi"},           {"tau", "tau"},
      {"lambda_P", "lambda_p"}, {"lambda_A", "lambda_a"},
      {"lambda_E", "lambda_e"}, {"lambda_C", "lambda_c"},
      {"lambda_B", "lambda_b"}, {"lambda_D", "lambda_d"}};
  const ValidationReport report = validate(model);
  for (const auto& c : report.failures()) {
    if (c.hypothesis == "H1") {
      const auto it = config_key.find(c.item);
      const std::string key =
          key_name("model", it == config_key.end() ? c.item : it->second);
      if (c.witness == 0.0 &&
          (c.item == "ell" || c.item == "Lambda" || c.item == "chi")) {
        warnings.push_back(origin + ": " + key +
                           " = 0 is outside the well-posedness hypotheses");
        continue;
      }
      throw ConfigError(origin + ": " + key + ": " + c.message);
    }
    const std::string key = c.hypothesis == "H2" ? key_name("model", "sigma_b")
                            : c.hypothesis == "H3"
                                ? key_name("model", "nonlinearity")
                                : key_name("model", "potential");
    throw ConfigError(origin + ": " + key + ": " + c.hypothesis + " " +
                      c.item + ": " + c.message);
  }
}

RunConfig load_impl(const std::string& text, const fs::path& base_dir,
                    const std::string& origin, int depth) {
  const IniDocument doc = IniDocument::parse(text, origin);
  Loader L{doc, base_dir, depth, {}, {}};
  Emitter& E = L.emit;

  // [grid]
  const int dim = doc.integer_or("grid", "dim", 1);
  if (dim != 1 && dim != 2) {
    throw ConfigError(L.where("grid", "dim") + ": must be 1 or 2");
  }
  const auto per_axis = [&](const std::string& key, const std::string& fallback) {
    const auto parts = split(doc.get_or("grid", key, fallback), ',');
    if (parts.size() != 1 && static_cast<int>(parts.size()) != dim) {
      throw ConfigError(L.where("grid", key) + ": expected 1 or " +
                        std::to_string(dim) + " values");
    }
    return parts;
  };
  if (!doc.has("grid", "n")) doc.get("grid", "n");
  const auto n_parts = per_axis("n", "");
  const auto l_parts = per_axis("length", "1");
  std::array<int, 2> n{};
  std::array<double, 2> len{};
  for (int d = 0; d < dim; ++d) {
    n[d] = to_int(n_parts[std::min<std::size_t>(d, n_parts.size() - 1)],
                  L.where("grid", "n"));
    len[d] = to_real(l_parts[std::min<std::size_t>(d, l_parts.size() - 1)],
                     L.where("grid", "length"));
    if (n[d] < 3) throw ConfigError(L.where("grid", "n") + ": need at least 3 nodes per axis");
    if (!(len[d] > 0.0)) throw ConfigError(L.where("grid", "length") + ": must be positive");
  }
  const Grid grid = dim == 1 ? Grid::line(n[0], len[0])
                             : Grid::rect(n[0], n[1], len[0], len[1]);
  E.section("grid");
  E.key("dim", dim);
  E.key("n", dim == 1 ? std::to_string(n[0])
                      : std::to_string(n[0]) + "," + std::to_string(n[1]));
  E.key("length", dim == 1 ? format_real(len[0])
                           : format_real(len[0]) + "," + format_real(len[1]));

  // [time], with [solver].dt as an alternative to nt
  const double t_final = doc.real("time", "t_final");
  if (!(t_final > 0.0)) throw ConfigError(L.where("time", "t_final") + ": must be positive");
  int nt = 0;
  if (doc.has("solver", "dt")) {
    const double dt = doc.real("solver", "dt");
    if (!(dt > 0.0)) throw ConfigError(L.where("solver", "dt") + ": must be positive");
    const double ratio = t_final / dt;
    const int rounded = static_cast<int>(std::lround(ratio));
    if (rounded < 1 || std::abs(ratio - rounded) > 1e-9 * ratio) {
      throw ConfigError(L.where("solver", "dt") +
                        ": t_final is not an integer multiple of dt");
    }
    nt = rounded;
    if (doc.has("time", "nt") && doc.integer("time", "nt") != nt) {
      throw ConfigError(L.where("time", "nt") + ": disagrees with [solver].dt");
    }
  } else {
    if (!doc.has("time", "nt")) {
      throw ConfigError(origin + ": missing required key [time].nt (or [solver].dt)");
    }
    nt = doc.integer("time", "nt");
  }
  if (nt < 1) throw ConfigError(L.where("time", "nt") + ": must be at least 1");
  const TimeGrid time(t_final, nt);
  E.section("time");
  E.key("t_final", t_final);
  E.key("nt", nt);

  // [model]
  Model model;
  ModelParams& p = model.params;
  p.ell = doc.real("model", "ell");
  p.Lambda = doc.real("model", "lambda_big");
  p.chi = doc.real("model", "chi");
  p.tau = doc.real_or("model", "tau", 0.0);
  p.lambda_P = doc.real_or("model", "lambda_p", 0.0);
  p.lambda_A = doc.real_or("model", "lambda_a", 0.0);
  p.lambda_E = doc.real_or("model", "lambda_e", 0.0);
  p.lambda_C = doc.real_or("model", "lambda_c", 0.0);
  p.lambda_B = doc.real_or("model", "lambda_b", 0.0);
  p.lambda_D = doc.real_or("model", "lambda_d", 0.0);
  std::string sigma_b_text;
  {
    const std::string spec = doc.get_or("model", "sigma_b", "1");
    char* end = nullptr;
    const double v = std::strtod(spec.c_str(), &end);
    if (!spec.empty() && end == spec.c_str() + spec.size()) {
      p.sigma_B = to_real(spec, L.where("model", "sigma_b"));
      sigma_b_text = format_real(v);
    } else {
      const fs::path path =
          resolve(base_dir, starts_with(spec, "file:") ? spec.substr(5) : spec);
      sigma_b_text = "file:" + path.string();
      try {
        p.sigma_B = read_spacetime_csv(path, grid, time);
      } catch (const ConfigError& e) {
        throw ConfigError(L.where("model", "sigma_b") + ": " + e.what());
      }
    }
  }
  std::string nl_text;
  model.nonlin = load_nonlinearities(doc.get_or("model", "nonlinearity", "default"),
                                     base_dir, L.where("model", "nonlinearity"),
                                     nl_text);
  try {
    model.potential = potential_by_name(doc.get_or("model", "potential", "quartic"));
  } catch (const ConfigError& e) {
    throw ConfigError(L.where("model", "potential") + ": " + e.what());
  }
  RunConfig out{fs::path(origin), Problem{grid, time, model, {}, {Field(grid), Field(grid), Field(grid)},
                SpaceTimeField(grid, time), CostSpec::with_zero_targets(grid, time, 0, 0, 0, 0, 1),
                AdmissibleSet::constant(grid, time, 0.0, 0.0, 1.0), {}, SpaceTimeField(grid, time)},
                false, false, {}, {}, {}, {}};
  apply_validation(model, origin, out.warnings);
  E.section("model");
  E.key("ell", p.ell);
  E.key("lambda_big", p.Lambda);
  E.key("chi", p.chi);
  E.key("tau", p.tau);
  E.key("lambda_p", p.lambda_P);
  E.key("lambda_a", p.lambda_A);
  E.key("lambda_e", p.lambda_E);
  E.key("lambda_c", p.lambda_C);
  E.key("lambda_b", p.lambda_B);
  E.key("lambda_d", p.lambda_D);
  E.key("sigma_b", sigma_b_text);
  E.key("nonlinearity", nl_text);
  E.key("potential", model.potential.name);

  // [solver]
  SolverConfig& solver = out.problem.solver;
  solver.stabilization_S = doc.real_or("solver", "stabilization_s", solver.stabilization_S);
  solver.linear_tol = doc.real_or("solver", "linear_tol", solver.linear_tol);
  solver.max_linear_iters =
      doc.integer_or("solver", "max_linear_iters", solver.max_linear_iters);
  if (solver.max_linear_iters < 0) {
    throw ConfigError(L.where("solver", "max_linear_iters") + ": must be nonnegative");
  }
  try {
    solver.check();
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": [solver]: " + e.what());
  }
  E.section("solver");
  E.key("stabilization_s", solver.stabilization_S);
  E.key("linear_tol", solver.linear_tol);
  E.key("max_linear_iters", solver.max_linear_iters);

  // [initial], [control]
  std::string c0, c1, c2, cu;
  out.problem.init = InitialData{
      L.field_source("initial", "theta0", "constant:0", grid, c0),
      L.field_source("initial", "phi0", "constant:0", grid, c1),
      L.field_source("initial", "sigma0", "constant:1", grid, c2)};
  E.section("initial");
  E.key("theta0", c0);
  E.key("phi0", c1);
  E.key("sigma0", c2);
  out.problem.control = L.spacetime_source("control", "u", "zero", grid, time, cu);
  E.section("control");
  E.key("u", cu);

  // [cost]
  if (doc.has_section("cost")) {
    out.has_cost = true;
    CostSpec& cost = out.problem.cost;
    cost.b1 = doc.real_or("cost", "b1", 0.0);
    cost.b2 = doc.real_or("cost", "b2", 0.0);
    cost.b3 = doc.real_or("cost", "b3", 0.0);
    cost.b4 = doc.real_or("cost", "b4", 0.0);
    cost.b5 = doc.real("cost", "b5");
    std::string tq, pq, to, po;
    cost.theta_Q = L.running_target("cost", "theta_q", "theta", grid, time, tq);
    cost.phi_Q = L.running_target("cost", "phi_q", "phi", grid, time, pq);
    cost.theta_Omega = L.final_target("cost", "theta_omega", "theta", grid, time, to);
    cost.phi_Omega = L.final_target("cost", "phi_omega", "phi", grid, time, po);
    try {
      cost.check(grid, time);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": [cost]: " + e.what());
    }
    E.section("cost");
    E.key("b1", cost.b1);
    E.key("b2", cost.b2);
    E.key("b3", cost.b3);
    E.key("b4", cost.b4);
    E.key("b5", cost.b5);
    E.key("theta_q", tq);
    E.key("phi_q", pq);
    E.key("theta_omega", to);
    E.key("phi_omega", po);
  }

  // [admissible]
  if (doc.has_section("admissible")) {
    out.has_admissible = true;
    std::string lo, hi;
    const auto bound = [&](const std::string& key, std::string& canonical) {
      std::string spec = doc.get("admissible", key);
      // Bare numbers are constants.
      char* end = nullptr;
      std::strtod(spec.c_str(), &end);
      if (!spec.empty() && end == spec.c_str() + spec.size()) {
        const double v = to_real(spec, L.where("admissible", key));
        canonical = format_real(v);
        return SpaceTimeField::constant(grid, time, v);
      }
      if (!starts_with(spec, "file:")) {
        throw ConfigError(L.where("admissible", key) +
                          ": expected a number or file:<path>");
      }
      return L.spacetime_source("admissible", key, "", grid, time, canonical);
    };
    AdmissibleSet& adm = out.problem.admissible;
    adm.lower = bound("u_min", lo);
    adm.upper = bound("u_max", hi);
    adm.m_bound = doc.real("admissible", "m_bound");
    try {
      adm.check();
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": [admissible]: " + e.what());
    }
    E.section("admissible");
    E.key("u_min", lo);
    E.key("u_max", hi);
    E.key("m_bound", adm.m_bound);
  }

  // [optimizer]
  {
    OptimizerConfig& opt = out.problem.optimizer;
    opt.max_iters = doc.integer_or("optimizer", "max_iters", opt.max_iters);
    opt.armijo_c = doc.real_or("optimizer", "armijo_c", opt.armijo_c);
    opt.backtrack_factor =
        doc.real_or("optimizer", "backtrack_factor", opt.backtrack_factor);
    opt.initial_step = doc.real_or("optimizer", "initial_step", opt.initial_step);
    opt.stationarity_tol =
        doc.real_or("optimizer", "stationarity_tol", opt.stationarity_tol);
    opt.min_step = doc.real_or("optimizer", "min_step", opt.min_step);
    try {
      opt.check();
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ": [optimizer]: " + e.what());
    }
    std::string u0;
    out.problem.optimizer_start =
        L.spacetime_source("optimizer", "u0", "zero", grid, time, u0);
    E.section("optimizer");
    E.key("max_iters", opt.max_iters);
    E.key("armijo_c", opt.armijo_c);
    E.key("backtrack_factor", opt.backtrack_factor);
    E.key("initial_step", opt.initial_step);
    E.key("stationarity_tol", opt.stationarity_tol);
    E.key("min_step", opt.min_step);
    E.key("u0", u0);
  }

  // [verify]
  {
    const std::string seed = doc.get_or("verify", "seed", "");
    if (!seed.empty()) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(seed.c_str(), &end, 10);
      if (end != seed.c_str() + seed.size() || seed[0] == '-') {
        throw ConfigError(L.where("verify", "seed") +
                          ": expected a nonnegative integer");
      }
      out.verify.seed = v;
    }
    out.verify.inject_adjoint_fault =
        doc.boolean_or("verify", "inject_adjoint_fault", false);
    out.problem.solver.debug_flip_adjoint_sign = out.verify.inject_adjoint_fault;
    E.section("verify");
    E.key("seed", std::to_string(out.verify.seed));
    E.key("inject_adjoint_fault",
          std::string(out.verify.inject_adjoint_fault ? "true" : "false"));
  }

  // [output]
  out.output.dir = resolve(base_dir, doc.get_or("output", "dir", "output"));
  out.output.slices = parse_slices(doc.get_or("output", "slices", "first,last"),
                                   nt, L.where("output", "slices"));
  E.section("output");
  E.key("dir", out.output.dir.string());
  E.key("slices", slices_text(out.output.slices));

  doc.reject_unknown({"grid", "time", "model", "solver", "initial", "control",
                      "cost", "admissible", "optimizer", "verify", "output"});
  out.effective = E.str();
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text, const fs::path& base_dir,
                       const std::string& origin) {
  return load_impl(text, base_dir, origin, 0);
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path abs = fs::absolute(path).lexically_normal();
  RunConfig cfg = load_impl(ss.str(), abs.parent_path(), path.string(), 0);
  cfg.source = abs;
  return cfg;
}

}  // namespace caginalp
