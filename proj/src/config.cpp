#include "collapse/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "collapse/units.hpp"

namespace collapse {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct UnitEntry {
  const char* token;
  Dim dim;
  double factor;
};

// natural-unit factors per token; bare numbers use factor 1 of the dimension
const UnitEntry kUnits[] = {
    {"cm", Dim::Length, units::cm},
    {"km", Dim::Length, units::km},
    {"gev^-1", Dim::Length, 1.0},
    {"s", Dim::Time, units::second},
    {"ev", Dim::Energy, units::ev},
    {"kev", Dim::Energy, units::kev},
    {"mev", Dim::Energy, units::mev},
    {"gev", Dim::Energy, 1.0},
    {"tev", Dim::Energy, units::tev},
    {"kelvin", Dim::Energy, units::kelvin},
    {"k", Dim::Energy, units::kelvin},
    {"km/s", Dim::Velocity, 1.0 / units::speed_of_light_km_s},
    {"gev/cm3", Dim::MassDensity, units::gev_per_cm3},
    {"gev/cm^3", Dim::MassDensity, units::gev_per_cm3},
    {"gev^-4", Dim::CouplingW, 1.0},
    {"gev^-2", Dim::CouplingT, 1.0},
    {"tev^-2", Dim::CouplingT, 1e-6},
    {"cm3/s", Dim::RateCsl, units::cm3 / units::second},
    {"cm^3/s", Dim::RateCsl, units::cm3 / units::second},
};

}  // namespace

double parse_quantity(const std::string& text, Dim dim) {
  const std::string t = trim(text);
  std::size_t pos = 0;
  double value;
  try {
    value = std::stod(t, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + text + "'");
  }
  const std::string unit = lower(trim(t.substr(pos)));
  if (unit.empty()) {
    // bare value: natural units (or plain number for dimensionless keys);
    // RateCsl defaults to gev^-2
    return value;
  }
  for (const auto& u : kUnits) {
    if (unit == u.token) {
      if (u.dim != dim) {
        // allow gev^-2 for the CSL-normalized rate (it is one in natural units)
        if (dim == Dim::RateCsl && u.dim == Dim::CouplingT) return value;
        throw ConfigError("unit '" + unit + "' does not fit the expected dimension in '" +
                          text + "'");
      }
      return value * u.factor;
    }
  }
  if (dim == Dim::None)
    throw ConfigError("dimensionless value cannot carry unit '" + unit + "'");
  throw ConfigError("unknown unit '" + unit + "' in '" + text + "'");
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str(), path);
}

ConfigFile ConfigFile::parse_text(const std::string& text, const std::string& origin) {
  ConfigFile cfg;
  cfg.text_ = text;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = lower(trim(line.substr(1, line.size() - 2)));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any section");
    const std::string key = lower(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    auto& entries = cfg.sections_[section];
    for (const auto& [k, v] : entries)
      if (k == key)
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                          "' in [" + section + "]");
    entries.emplace_back(key, value);
  }
  return cfg;
}

void ConfigFile::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
  const std::string path = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  const auto dot = path.find('.');
  if (dot == std::string::npos)
    throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
  const std::string section = lower(trim(path.substr(0, dot)));
  const std::string key = lower(trim(path.substr(dot + 1)));
  auto& entries = sections_[section];
  for (auto& [k, v] : entries) {
    if (k == key) {
      v = value;
      return;
    }
  }
  entries.emplace_back(key, value);
  text_ += "\n# override\n[" + section + "]\n" + key + " = " + value + "\n";
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return false;
  for (const auto& [k, v] : it->second)
    if (k == key) return true;
  return false;
}

bool ConfigFile::has_section(const std::string& section) const {
  return sections_.count(section) != 0;
}

std::string ConfigFile::raw(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it != sections_.end())
    for (const auto& [k, v] : it->second)
      if (k == key) return v;
  throw ConfigError("missing key '" + key + "' in [" + section + "]");
}

std::string ConfigFile::raw_or(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  return has(section, key) ? raw(section, key) : fallback;
}

double ConfigFile::number(const std::string& section, const std::string& key, Dim dim) const {
  try {
    return parse_quantity(raw(section, key), dim);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(e.what()) + " (at [" + section + "]." + key + ")");
  }
}

double ConfigFile::number_or(const std::string& section, const std::string& key, Dim dim,
                             double fallback) const {
  if (!has(section, key)) return fallback;
  return number(section, key, dim);
}

std::vector<double> ConfigFile::list(const std::string& section, const std::string& key,
                                     Dim dim) const {
  std::string v = raw(section, key);
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream ss(v);
  std::vector<double> out;
  std::string a, b;
  while (ss >> a) {
    // peek whether the next token is a unit suffix
    const auto save = ss.tellg();
    if (ss >> b) {
      bool unit_like = !b.empty() && !(std::isdigit(static_cast<unsigned char>(b[0])) ||
                                       b[0] == '-' || b[0] == '+' || b[0] == '.');
      if (unit_like) {
        out.push_back(parse_quantity(a + " " + b, dim));
        continue;
      }
      ss.seekg(save);
    }
    out.push_back(parse_quantity(a, dim));
  }
  if (out.empty()) throw ConfigError("empty list at [" + section + "]." + key);
  return out;
}

std::vector<std::string> ConfigFile::keys(const std::string& section) const {
  std::vector<std::string> out;
  auto it = sections_.find(section);
  if (it != sections_.end())
    for (const auto& [k, v] : it->second) out.push_back(k);
  return out;
}

void ConfigFile::require_known(const std::string& section,
                               const std::vector<std::string>& allowed) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return;
  for (const auto& [k, v] : it->second) {
    bool ok = false;
    for (const auto& a : allowed) {
      if (a == k) {
        ok = true;
        break;
      }
      // trailing-dot entries admit numbered keys (branch.1, species.2, ...)
      if (!a.empty() && a.back() == '.' && k.rfind(a, 0) == 0) {
        ok = true;
        break;
      }
    }
    if (!ok)
      throw ConfigError("unknown key '" + k + "' in [" + section +
                        "] (typo? unknown keys are errors)");
  }
}

// --- builders ----------------------------------------------------------------

NoiseModel model_from_config(const ConfigFile& cfg) {
  cfg.require_known("model", {"family", "gamma", "gamma_csl", "r_c", "mu", "t", "temperature",
                              "zeta", "d", "lambda", "shape", "gamma0", "omega_c", "omega_0",
                              "table"});
  const std::string family = lower(cfg.raw("model", "family"));
  NoiseModel model;
  if (family == "white_csl") {
    const double r_c = cfg.number("model", "r_c", Dim::Length);
    double gamma;
    if (cfg.has("model", "gamma_csl")) {
      const double mn2 = units::nucleon_mass * units::nucleon_mass;
      gamma = cfg.number("model", "gamma_csl", Dim::RateCsl) / mn2;
    } else {
      gamma = cfg.number("model", "gamma", Dim::CouplingW);
    }
    model = WhiteCsl{gamma, r_c};
  } else if (family == "cutoff_product") {
    const double r_c = cfg.number("model", "r_c", Dim::Length);
    const std::string shape = lower(cfg.raw_or("model", "shape", "constant"));
    SpectralFunction f;
    if (shape == "constant") {
      f = SpectralFunction::constant(cfg.number("model", "gamma0", Dim::None));
    } else if (shape == "step") {
      f = SpectralFunction::step(cfg.number("model", "gamma0", Dim::None),
                                 cfg.number("model", "omega_c", Dim::Energy));
    } else if (shape == "high_pass") {
      f = SpectralFunction::high_pass(cfg.number("model", "gamma0", Dim::None),
                                      cfg.number("model", "omega_0", Dim::Energy));
    } else if (shape == "tabulated") {
      f = load_spectral_csv(cfg.raw("model", "table"));
    } else {
      throw ConfigError("unknown spectral shape '" + shape + "'");
    }
    model = CutoffProduct{f, r_c};
  } else if (family == "thermal" || family == "dilute_nr") {
    const double mu = cfg.number("model", "mu", Dim::Energy);
    const double T = cfg.has("model", "t") ? cfg.number("model", "t", Dim::Energy)
                                           : cfg.number("model", "temperature", Dim::Energy);
    const double zeta = cfg.number_or("model", "zeta", Dim::Energy, 0.0);
    const double gamma = cfg.number("model", "gamma", Dim::CouplingT);
    if (family == "thermal")
      model = Thermal{mu, T, zeta, gamma};
    else
      model = DiluteNr{mu, T, zeta, gamma};
  } else if (family == "unparticle") {
    model = Unparticle{cfg.number("model", "d", Dim::None),
                       cfg.number("model", "lambda", Dim::Energy),
                       cfg.has("model", "t") ? cfg.number("model", "t", Dim::Energy)
                                             : cfg.number("model", "temperature", Dim::Energy),
                       cfg.number_or("model", "zeta", Dim::Energy, 0.0),
                       cfg.number("model", "gamma", Dim::CouplingT)};
  } else {
    throw ConfigError("unknown model family '" + family + "'");
  }
  validate(model);
  return model;
}

SuperpositionConfig geometry_from_config(const ConfigFile& cfg) {
  cfg.require_known("geometry", {"length_unit", "coupling_unit", "probabilities", "branch."});
  const std::string lu = lower(cfg.raw_or("geometry", "length_unit", "natural"));
  double lfac;
  if (lu == "cm")
    lfac = units::cm;
  else if (lu == "natural" || lu == "gev^-1")
    lfac = 1.0;
  else
    throw ConfigError("geometry length_unit must be cm or natural");
  const std::string cu = lower(cfg.raw_or("geometry", "coupling_unit", "gev"));
  double cfac;
  if (cu == "gev")
    cfac = 1.0;
  else if (cu == "nucleon")
    cfac = units::nucleon_mass;
  else
    throw ConfigError("geometry coupling_unit must be gev or nucleon");

  SuperpositionConfig out;
  for (int b = 1;; ++b) {
    const std::string key = "branch." + std::to_string(b);
    if (!cfg.has("geometry", key)) break;
    std::string v = cfg.raw("geometry", key);
    ParticleGroup g;
    std::istringstream recs(v);
    std::string rec;
    while (std::getline(recs, rec, ';')) {
      rec = trim(rec);
      if (rec.empty()) continue;
      std::replace(rec.begin(), rec.end(), ',', ' ');
      std::istringstream rs(rec);
      double x, y, z, m;
      if (!(rs >> x >> y >> z >> m))
        throw ConfigError("branch record needs 'x y z m': '" + rec + "'");
      std::string extra;
      if (rs >> extra) throw ConfigError("trailing tokens in branch record: '" + rec + "'");
      g.positions.push_back({x * lfac, y * lfac, z * lfac});
      g.couplings.push_back(m * cfac);
    }
    if (g.positions.empty()) throw ConfigError(key + " has no particle records");
    out.groups.push_back(std::move(g));
  }
  if (out.groups.size() < 2)
    throw ConfigError("[geometry] needs branch.1 and branch.2 (at least two branches)");
  out.probabilities = cfg.list("geometry", "probabilities", Dim::None);
  validate(out);
  return out;
}

std::vector<ParticleSpecies> species_from_config(const ConfigFile& cfg) {
  cfg.require_known("species", {"unit", "species."});
  const std::string cu = lower(cfg.raw_or("species", "unit", "gev"));
  double fac;
  if (cu == "gev")
    fac = 1.0;
  else if (cu == "nucleon")
    fac = units::nucleon_mass;
  else
    throw ConfigError("species unit must be gev or nucleon");
  std::vector<ParticleSpecies> out;
  for (int i = 1;; ++i) {
    const std::string key = "species." + std::to_string(i);
    if (!cfg.has("species", key)) break;
    std::string v = cfg.raw("species", key);
    std::replace(v.begin(), v.end(), ',', ' ');
    std::istringstream rs(v);
    ParticleSpecies sp;
    if (!(rs >> sp.coupling >> sp.inertial_mass >> sp.count))
      throw ConfigError(key + " needs 'coupling inertial_mass count'");
    sp.coupling *= fac;
    sp.inertial_mass *= fac;
    out.push_back(sp);
  }
  validate(out);
  return out;
}

DarkMatterScenario scenario_from_config(const ConfigFile& cfg) {
  cfg.require_known("scenario",
                    {"mu", "v_rms", "rho_m", "gamma", "m", "n", "n_bunches", "mu5"});
  DarkMatterScenario s;
  s.mu = cfg.number("scenario", "mu", Dim::Energy);
  s.v_rms = cfg.number("scenario", "v_rms", Dim::Velocity);
  s.rho_m = cfg.number("scenario", "rho_m", Dim::MassDensity);
  if (cfg.has("scenario", "gamma")) {
    s.gamma = cfg.number("scenario", "gamma", Dim::CouplingT);
  } else {
    const double M = cfg.number("scenario", "m", Dim::Energy);
    if (!(M > 0.0)) throw ConfigError("scenario M must be > 0");
    s.gamma = 1.0 / (M * M);
  }
  s.n_per_bunch = cfg.number_or("scenario", "n", Dim::None, 1.0);
  s.n_bunches = cfg.number_or("scenario", "n_bunches", Dim::None, 1.0);
  s.mu5 = cfg.number_or("scenario", "mu5", Dim::Energy, 1.4e-3 * units::ev);
  validate(s);
  return s;
}

}  // namespace collapse
