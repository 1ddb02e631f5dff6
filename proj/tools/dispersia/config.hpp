#pragma once

#include "dispersia/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dispersia::cli {

enum class Spacing { Linear, Log };

struct ScanBlock {
  double start = 0.0;
  double stop = 0.0;
  int samples = 0;
  Spacing spacing = Spacing::Linear;
  std::string sweep = "separation";  // plane-scan: separation | height
  // fixed placements, in configured length units (after conversion)
  double height_a = 0.0;
  double height_b = 0.0;
  double separation = 0.0;
  double z_a = 0.0;
  double z_b = 0.0;
  std::vector<double> separations;  // sphere-force, in units of the radius
  Vec3 atom_a = Vec3::Zero();
  Vec3 atom_b = Vec3::Zero();

  std::vector<double> points() const;
};

struct RunConfig {
  std::string source;  // path, for messages
  std::string geometry_kind = "free_space";
  Geometry geometry = FreeSpace{};
  PairCoupling coupling = PairCoupling::reduced();
  std::optional<AtomPolarization> polarization;
  ScanBlock scan;
  SeriesCtrl series;
  FdCtrl fd;
  std::string out_path;
  int precision = 12;
};

/// Parse a length literal with optional unit suffix {nm, um, L}. SI mode
/// returns meters (bare numbers are meters); reduced mode returns L, where a
/// suffixed value is expressed in nm.
double parse_length(const std::string& text, UnitMode mode, const std::string& field);

/// Parse a plain decimal literal (no unit suffix).
double parse_number(const std::string& text, const std::string& field);

/// Read and validate an INI-style run configuration. Throws ConfigError
/// naming the offending section.key.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text, const std::string& source = "<string>");

}  // namespace dispersia::cli
