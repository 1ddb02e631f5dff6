#pragma once

#include "dispersia/config.hpp"
#include "dispersia/dispersia.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace dispersia::cli {

inline constexpr const char* kCsvHeader =
    "param,e_london,e_na1,e_na2,e_na_total,ratio,fx_na,fy_na,fz_na,terms_used,converged";

struct CsvRow {
  double param = 0.0;
  double e_london = 0.0;
  double e_na1 = 0.0;
  double e_na2 = 0.0;
  double e_na_total = 0.0;
  double ratio = 0.0;
  std::optional<Vec3> f_na;
  int terms_used = 0;
  bool converged = true;
};

/// One CSV file. `suffix` is inserted before the extension of the output
/// path; the primary table has an empty suffix.
struct Table {
  std::string suffix;
  std::vector<CsvRow> rows;
};

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows, int precision);

/// `<stem><suffix>.csv` for an output path `<stem>.csv`.
std::string sibling_path(const std::string& out_path, const std::string& suffix);

/// Worker count for scans: DISPERSIA_THREADS if set (at most 256), else the
/// hardware count.
unsigned scan_threads();

std::vector<Table> cmd_plane_scan(const RunConfig& cfg);
std::vector<Table> cmd_capacitor_ratio(const RunConfig& cfg);
std::vector<Table> cmd_capacitor_force(const RunConfig& cfg);
std::vector<Table> cmd_sphere_force(const RunConfig& cfg);
std::vector<Table> cmd_sphere_iso_vs_grounded(const RunConfig& cfg);
std::vector<Table> cmd_axilrod_limit(const RunConfig& cfg);

// ---------------------------------------------------------------------------
// verify

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

/// Analytic image tensor under test; replaceable so a deliberately broken
/// tensor can be shown to fail.
using TensorUnderTest = std::function<Tensor3(const Geometry&, const Vec3&, const Vec3&)>;

struct VerifyOptions {
  TensorUnderTest tensor;  // empty means gh_tensor
  unsigned threads = 0;    // 0 means scan_threads()
};

std::vector<CheckResult> cmd_verify(const VerifyOptions& opts = {});

void print_report(std::ostream& out, const std::vector<CheckResult>& checks);

}  // namespace dispersia::cli
