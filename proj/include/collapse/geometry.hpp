#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "collapse/errors.hpp"

namespace collapse {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

// One localized group of particles: positions plus their noise couplings
// (mass, baryon number, ... depending on the density the noise couples to).
struct ParticleGroup {
  std::vector<Vec3> positions;
  std::vector<double> couplings;

  std::size_t size() const { return positions.size(); }
};

inline void validate(const ParticleGroup& g) {
  if (g.positions.size() != g.couplings.size())
    throw ConfigError("ParticleGroup: positions and couplings differ in length");
  if (g.positions.empty()) throw ConfigError("ParticleGroup: empty group");
  for (double m : g.couplings)
    if (!(m > 0.0)) throw ConfigError("ParticleGroup: couplings must be > 0");
}

inline bool same_couplings(const ParticleGroup& a, const ParticleGroup& b) {
  if (a.couplings.size() != b.couplings.size()) return false;
  for (std::size_t i = 0; i < a.couplings.size(); ++i)
    if (a.couplings[i] != b.couplings[i]) return false;
  return true;
}

// Superposition of N localized branches.  Branches share particle count and
// couplings; only positions differ.  probabilities[J] = |alpha_J|^2.
struct SuperpositionConfig {
  std::vector<ParticleGroup> groups;
  std::vector<double> probabilities;

  std::size_t branches() const { return groups.size(); }
};

inline void validate(const SuperpositionConfig& c) {
  if (c.groups.size() < 2) throw ConfigError("SuperpositionConfig: need at least 2 branches");
  if (c.groups.size() != c.probabilities.size())
    throw ConfigError("SuperpositionConfig: probabilities and groups differ in length");
  double sum = 0.0;
  for (double p : c.probabilities) {
    if (!(p >= 0.0)) throw ConfigError("SuperpositionConfig: probabilities must be >= 0");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ConfigError("SuperpositionConfig: probabilities must sum to 1 (within 1e-12)");
  for (const auto& g : c.groups) validate(g);
  for (std::size_t j = 1; j < c.groups.size(); ++j)
    if (!same_couplings(c.groups[0], c.groups[j]))
      throw ConfigError("SuperpositionConfig: branches must share couplings");
}

}  // namespace collapse
