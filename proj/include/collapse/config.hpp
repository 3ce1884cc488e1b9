#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "collapse/errors.hpp"
#include "collapse/geometry.hpp"
#include "collapse/noise_model.hpp"
#include "collapse/observables.hpp"
#include "collapse/phenomenology.hpp"

// Sectioned key = value configuration with unit-suffixed quantities
// ("1e-5 cm", "1 keV", "220 km/s").  Unknown keys and unknown units are
// errors; bare numbers read as natural units (GeV powers) except where a
// key is dimensionless.

namespace collapse {

// dimension tags for quantity parsing
enum class Dim {
  None,        // dimensionless
  Length,      // cm, km, gev^-1
  Time,        // s, gev^-1
  Energy,      // ev ... tev, kelvin
  Velocity,    // km/s or bare fraction of c
  MassDensity, // gev/cm3
  CouplingW,   // white-noise gamma: gev^-4
  CouplingT,   // field-coupled gamma: gev^-2, tev^-2
  RateCsl,     // gamma_csl: cm3/s or gev^-2
};

// value with units -> natural units
double parse_quantity(const std::string& text, Dim dim);

class ConfigFile {
 public:
  static ConfigFile parse_file(const std::string& path);
  static ConfigFile parse_text(const std::string& text, const std::string& origin = "<text>");

  // --set section.key=value
  void apply_override(const std::string& assignment);

  bool has(const std::string& section, const std::string& key) const;
  std::string raw(const std::string& section, const std::string& key) const;
  std::string raw_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;

  double number(const std::string& section, const std::string& key, Dim dim) const;
  double number_or(const std::string& section, const std::string& key, Dim dim,
                   double fallback) const;
  std::vector<double> list(const std::string& section, const std::string& key, Dim dim) const;

  std::vector<std::string> keys(const std::string& section) const;
  const std::string& text() const { return text_; }

  // every key of `section` must appear in `allowed`; typos become errors
  void require_known(const std::string& section, const std::vector<std::string>& allowed) const;
  bool has_section(const std::string& section) const;

 private:
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
  std::string text_;
  std::string origin_;
};

// shared builders used by the CLI commands
NoiseModel model_from_config(const ConfigFile& cfg);
SuperpositionConfig geometry_from_config(const ConfigFile& cfg);
std::vector<ParticleSpecies> species_from_config(const ConfigFile& cfg);
DarkMatterScenario scenario_from_config(const ConfigFile& cfg);

}  // namespace collapse
