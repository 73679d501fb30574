#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "brittle/config_measures.hpp"
#include "brittle/quasistatic.hpp"
#include "brittle/states.hpp"

namespace brittle {

/// Configuration error carrying the JSON path of the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class RegionSpecKind { whole, ball, tip_ball, away_from_tips };

/// Region description resolved against a state (tip-relative kinds use the
/// crack edge points of that state).
struct RegionSpec {
  std::string name = "whole";
  RegionSpecKind kind = RegionSpecKind::whole;
  Point center = Point::Zero();
  double radius = 0.0;
  Region build(const State& state) const;
};

struct MeasureConfig {
  std::vector<double> radii;          ///< absolute, strictly decreasing; empty selects settings defaults
  std::vector<double> contour_radii;  ///< absolute, strictly decreasing
  FamilyOptions family;
  std::vector<RegionSpec> regions{RegionSpec{}};
  std::string state = "solved";  ///< "solved" or "manufactured"
  double amplitude = 1.0;
  double mu = 1.0;
};

struct EvolveConfig {
  bool minimal = true;
  bool equilibrium = false;
  std::optional<int> equilibrium_depth;
};

struct CriticalConfig {
  double lo = 0.0, hi = 0.0;
  double tol = 1e-6;
  double rel_tol = 0.1;  ///< allowed |ER_tan - G| / G
};

struct VerifyConfig {
  std::vector<double> loads;
  int equilibrium_depth = 1;
  std::optional<double> inject_non_equilibrium;
  std::optional<CriticalConfig> critical;
  int hypothesis_cases = 100;
  bool chain = true;
  bool axioms = true;
};

struct Scenario {
  int schema_version = 1;
  std::string source;
  std::string hash;  ///< git-style blob SHA-1 of the config bytes
  nlohmann::ordered_json echo;
  MeshPtr mesh;
  CrackSet K;
  Material material;
  SurfaceEnergy surface;
  BoundaryDisplacement boundary;
  LoadSchedule schedule;
  SearchOptions search;
  MeasureConfig measures;
  EvolveConfig evolve;
  VerifyConfig verify;
  std::string output_dir = "out";
};

/// Parses a scenario document. Unknown keys and malformed values raise
/// ConfigError naming the field path; syntax errors name line and column.
Scenario parse_scenario(const std::string& text, const std::string& source = "<string>");
Scenario load_scenario(const std::string& path);

/// SHA-1 of "blob <size>\0<bytes>", as printed by git hash-object.
std::string git_blob_sha1(const std::string& bytes);

}  // namespace brittle
