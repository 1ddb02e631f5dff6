#include "dispersia/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dispersia::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

// section -> key -> entry
using Ini = std::map<std::string, std::map<std::string, Entry>>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"geometry", {"kind", "gap", "radius"}},
      {"coupling", {"unit_mode", "lambda", "d2_x", "d2_y", "d2_z"}},
      {"scan",
       {"sweep", "start", "stop", "samples", "spacing", "height_a", "height_b", "separation", "z_a", "z_b",
        "separations", "atom_a", "atom_b"}},
      {"numerics", {"rel_tol", "n_max", "min_terms", "base_step", "richardson_levels"}},
      {"output", {"path", "precision"}},
  };
  return keys;
}

Ini read_ini(const std::string& text, const std::string& source) {
  Ini ini;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto hash = raw.find_first_of("#;");
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().contains(section)) throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    if (section.empty()) throw ConfigError(where + ": key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    if (!known_keys().at(section).contains(key)) {
      throw ConfigError(where + ": unknown key " + section + "." + key);
    }
    if (ini[section].contains(key)) throw ConfigError(where + ": duplicate key " + section + "." + key);
    ini[section][key] = {trim(line.substr(eq + 1)), lineno};
  }
  return ini;
}

class Reader {
 public:
  Reader(const Ini& ini, std::string source) : ini_(ini), source_(std::move(source)) {}

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = ini_.find(section);
    if (s == ini_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
  }

  std::string field(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    const std::string name = section + "." + key;
    return e ? source_ + ":" + std::to_string(e->line) + ": " + name : source_ + ": " + name;
  }

  template <class F>
  auto get(const std::string& section, const std::string& key, F&& parse) const {
    const Entry* e = find(section, key);
    if (!e) throw ConfigError(field(section, key) + ": missing");
    try {
      return parse(e->value, field(section, key));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& err) {
      throw ConfigError(field(section, key) + ": " + err.what());
    }
  }

 private:
  const Ini& ini_;
  std::string source_;
};

int parse_int(const std::string& text, const std::string& field) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) throw ConfigError(field + ": expected an integer");
  return v;
}

Vec3 parse_vec(const std::string& text, UnitMode mode, const std::string& field) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(trim(item));
  if (parts.size() != 3) throw ConfigError(field + ": expected three comma-separated components");
  return {parse_length(parts[0], mode, field), parse_length(parts[1], mode, field),
          parse_length(parts[2], mode, field)};
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item), field));
  if (out.empty()) throw ConfigError(field + ": empty list");
  return out;
}

}  // namespace

double parse_number(const std::string& text, const std::string& field) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size() || !std::isfinite(v)) {
    throw ConfigError(field + ": expected a decimal literal, got '" + t + "'");
  }
  return v;
}

double parse_length(const std::string& text, UnitMode mode, const std::string& field) {
  std::string t = trim(text);
  double scale = 1.0;
  auto strip = [&](const std::string& suffix) {
    if (t.size() > suffix.size() && t.ends_with(suffix)) {
      t = trim(t.substr(0, t.size() - suffix.size()));
      return true;
    }
    return false;
  };
  if (strip("nm")) {
    scale = mode == UnitMode::SI ? 1e-9 : 1.0;
  } else if (strip("um")) {
    scale = mode == UnitMode::SI ? 1e-6 : 1e3;
  } else if (strip("L")) {
    if (mode == UnitMode::SI) throw ConfigError(field + ": unit L is only valid with unit_mode = reduced");
  }
  return parse_number(t, field) * scale;
}

std::vector<double> ScanBlock::points() const {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double t = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
    out.push_back(spacing == Spacing::Log ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                                          : start + t * (stop - start));
  }
  return out;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  const Ini ini = read_ini(text, source);
  const Reader r(ini, source);
  RunConfig cfg;
  cfg.source = source;

  UnitMode mode = UnitMode::Reduced;
  if (r.find("coupling", "unit_mode")) {
    const std::string m = r.get("coupling", "unit_mode", [](const std::string& v, const std::string&) { return v; });
    if (m == "si") {
      mode = UnitMode::SI;
    } else if (m != "reduced") {
      throw ConfigError(r.field("coupling", "unit_mode") + ": expected reduced or si");
    }
  }
  const double lambda = r.find("coupling", "lambda") ? r.get("coupling", "lambda", parse_number) : 1.0;
  try {
    cfg.coupling = PairCoupling(lambda, mode);
  } catch (const ConfigError& e) {
    throw ConfigError(r.field("coupling", "lambda") + ": " + e.what());
  }
  if (r.find("coupling", "d2_x") || r.find("coupling", "d2_y") || r.find("coupling", "d2_z")) {
    AtomPolarization p;
    const char* axes[3] = {"d2_x", "d2_y", "d2_z"};
    for (int m = 0; m < 3; ++m) {
      p.d2[static_cast<std::size_t>(m)] = r.get("coupling", axes[m], parse_number);
      if (p.d2[static_cast<std::size_t>(m)] < 0.0) throw ConfigError(r.field("coupling", axes[m]) + ": must be >= 0");
    }
    cfg.polarization = p;
  }

  auto length = [mode](const std::string& v, const std::string& f) { return parse_length(v, mode, f); };
  auto positive_length = [&](const char* key) {
    const double v = r.get("geometry", key, length);
    if (!(v > 0.0)) throw ConfigError(r.field("geometry", key) + ": must be > 0");
    return v;
  };
  cfg.geometry_kind = r.get("geometry", "kind", [](const std::string& v, const std::string&) { return v; });
  if (cfg.geometry_kind == "free_space") {
    cfg.geometry = FreeSpace{};
  } else if (cfg.geometry_kind == "plane") {
    cfg.geometry = Plane{};
  } else if (cfg.geometry_kind == "capacitor") {
    cfg.geometry = Capacitor{positive_length("gap")};
  } else if (cfg.geometry_kind == "sphere_grounded") {
    cfg.geometry = SphereGrounded{positive_length("radius")};
  } else if (cfg.geometry_kind == "sphere_isolated") {
    cfg.geometry = SphereIsolated{positive_length("radius")};
  } else {
    throw ConfigError(r.field("geometry", "kind") +
                      ": expected free_space, plane, capacitor, sphere_grounded or sphere_isolated");
  }

  ScanBlock& s = cfg.scan;
  if (r.find("scan", "sweep")) s.sweep = r.get("scan", "sweep", [](const std::string& v, const std::string&) { return v; });
  if (r.find("scan", "spacing")) {
    const std::string sp = r.get("scan", "spacing", [](const std::string& v, const std::string&) { return v; });
    if (sp == "log") {
      s.spacing = Spacing::Log;
    } else if (sp != "linear") {
      throw ConfigError(r.field("scan", "spacing") + ": expected linear or log");
    }
  }
  // start/stop are lengths for plane and axilrod sweeps and dimensionless
  // ratios (R/D, r/a) otherwise; the command decides, so keep both parses lazy
  if (r.find("scan", "start")) s.start = r.get("scan", "start", length);
  if (r.find("scan", "stop")) s.stop = r.get("scan", "stop", length);
  if (r.find("scan", "samples")) {
    s.samples = r.get("scan", "samples", parse_int);
    if (s.samples < 1) throw ConfigError(r.field("scan", "samples") + ": must be >= 1");
  }
  if (s.spacing == Spacing::Log && r.find("scan", "start") && !(s.start > 0.0 && s.stop > 0.0)) {
    throw ConfigError(r.field("scan", "spacing") + ": log spacing needs start and stop > 0");
  }
  for (auto [key, dst] : {std::pair{"height_a", &s.height_a}, std::pair{"height_b", &s.height_b},
                          std::pair{"separation", &s.separation}, std::pair{"z_a", &s.z_a}, std::pair{"z_b", &s.z_b}}) {
    if (r.find("scan", key)) *dst = r.get("scan", key, length);
  }
  if (r.find("scan", "separations")) s.separations = r.get("scan", "separations", parse_list);
  if (r.find("scan", "atom_a")) s.atom_a = r.get("scan", "atom_a", [mode](const std::string& v, const std::string& f) { return parse_vec(v, mode, f); });
  if (r.find("scan", "atom_b")) s.atom_b = r.get("scan", "atom_b", [mode](const std::string& v, const std::string& f) { return parse_vec(v, mode, f); });

  if (r.find("numerics", "rel_tol")) cfg.series.rel_tol = r.get("numerics", "rel_tol", parse_number);
  if (r.find("numerics", "n_max")) cfg.series.n_max = r.get("numerics", "n_max", parse_int);
  if (r.find("numerics", "min_terms")) cfg.series.min_terms = r.get("numerics", "min_terms", parse_int);
  if (r.find("numerics", "base_step")) cfg.fd.base_step = r.get("numerics", "base_step", parse_number);
  if (r.find("numerics", "richardson_levels")) {
    cfg.fd.richardson_levels = r.get("numerics", "richardson_levels", parse_int);
  }
  try {
    cfg.series.validate();
    cfg.fd.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": [numerics] " + e.what());
  }

  if (r.find("output", "path")) cfg.out_path = r.get("output", "path", [](const std::string& v, const std::string&) { return v; });
  if (r.find("output", "precision")) {
    cfg.precision = r.get("output", "precision", parse_int);
    if (cfg.precision < 1 || cfg.precision > 17) throw ConfigError(r.field("output", "precision") + ": must be in [1, 17]");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

}  // namespace dispersia::cli
