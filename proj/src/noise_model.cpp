#include "collapse/noise_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace collapse {

double SpectralFunction::operator()(double omega) const {
  switch (shape) {
    case Shape::Constant:
      return gamma0;
    case Shape::Step:
      return omega <= omega_c ? gamma0 : 0.0;
    case Shape::HighPass:
      return gamma0 * omega * omega / (omega * omega + omega_0 * omega_0);
    case Shape::Tabulated: {
      if (table.empty() || omega < table.front().first || omega > table.back().first)
        return 0.0;
      auto it = std::lower_bound(table.begin(), table.end(), omega,
                                 [](const auto& p, double w) { return p.first < w; });
      if (it == table.begin()) return it->second;
      const auto [x1, y1] = *(it - 1);
      const auto [x2, y2] = *it;
      if (x2 == x1) return y2;
      return y1 + (y2 - y1) * (omega - x1) / (x2 - x1);
    }
  }
  return 0.0;
}

SpectralFunction SpectralFunction::tabulated(std::vector<std::pair<double, double>> pts) {
  SpectralFunction f;
  f.shape = Shape::Tabulated;
  f.gamma0 = 1.0;
  std::sort(pts.begin(), pts.end());
  f.table = std::move(pts);
  return f;
}

SpectralFunction load_spectral_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spectral CSV: " + path);
  std::vector<std::pair<double, double>> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double w, g;
    if (!(ss >> w >> g)) {
      // tolerate a single header line
      if (lineno == 1) continue;
      throw ConfigError(path + ": malformed CSV at line " + std::to_string(lineno));
    }
    if (w < 0.0) throw ConfigError(path + ": omega must be >= 0");
    pts.emplace_back(w, g);
  }
  if (pts.size() < 2) throw ConfigError(path + ": need at least two rows");
  return SpectralFunction::tabulated(std::move(pts));
}

double Unparticle::effective_coupling() const {
  return gamma * std::pow(lambda, 2.0 * (1.0 - d));
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void validate(const NoiseModel& model) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) {
          require(m.gamma > 0.0, "WhiteCsl: gamma must be > 0");
          require(m.r_c > 0.0, "WhiteCsl: r_C must be > 0");
        } else if constexpr (std::is_same_v<T, CutoffProduct>) {
          require(m.r_c > 0.0, "CutoffProduct: r_C must be > 0");
          require(m.gamma_of_omega.gamma0 > 0.0 ||
                      m.gamma_of_omega.shape == SpectralFunction::Shape::Tabulated,
                  "CutoffProduct: gamma scale must be > 0");
        } else if constexpr (std::is_same_v<T, Thermal>) {
          require(m.mu > 0.0, "Thermal: mu must be > 0");
          require(m.temperature > 0.0, "Thermal: T must be > 0");
          require(m.gamma > 0.0, "Thermal: gamma must be > 0");
          // the Bose factor is evaluated on omega_k >= mu, so the pole-free
          // condition is zeta < mu (Bose-Einstein condensation bound)
          if (m.zeta >= m.mu)
            throw DomainError("Thermal: zeta >= mu would correspond to a physical-region pole");
        } else if constexpr (std::is_same_v<T, DiluteNr>) {
          require(m.mu > 0.0, "DiluteNr: mu must be > 0");
          require(m.temperature > 0.0, "DiluteNr: T must be > 0");
          require(m.gamma > 0.0, "DiluteNr: gamma must be > 0");
          if (m.zeta >= m.mu)
            throw DomainError("DiluteNr: zeta >= mu would correspond to a physical-region pole");
        } else if constexpr (std::is_same_v<T, Unparticle>) {
          require(m.d > 0.0, "Unparticle: d must be > 0");
          require(m.lambda > 0.0, "Unparticle: Lambda must be > 0");
          require(m.temperature > 0.0, "Unparticle: T must be > 0");
          require(m.gamma > 0.0, "Unparticle: gamma must be > 0");
          if (m.zeta > 0.0)
            throw DomainError("Unparticle: zeta > 0 would correspond to a physical-region pole");
        }
      },
      model);
}

double coupling(const NoiseModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, CutoffProduct>)
          return 1.0;  // absorbed into gamma(omega)
        else
          return m.gamma;
      },
      model);
}

double correlation_length(const NoiseModel& model) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl> || std::is_same_v<T, CutoffProduct>)
          return m.r_c;
        else if constexpr (std::is_same_v<T, Thermal> || std::is_same_v<T, DiluteNr>)
          return 1.0 / std::sqrt(2.0 * m.mu * m.temperature);
        else
          return 1.0 / m.temperature;
      },
      model);
}

std::string family_name(const NoiseModel& model) {
  return std::visit(
      [](const auto& m) -> std::string {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, WhiteCsl>) return "white_csl";
        else if constexpr (std::is_same_v<T, CutoffProduct>) return "cutoff_product";
        else if constexpr (std::is_same_v<T, Thermal>) return "thermal";
        else if constexpr (std::is_same_v<T, DiluteNr>) return "dilute_nr";
        else return "unparticle";
      },
      model);
}

}  // namespace collapse
