#include "dispersia/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>

namespace dispersia::cli {

namespace {

std::string kind_error(const RunConfig& cfg, const char* cmd, const char* wanted) {
  return cfg.source + ": geometry.kind = " + cfg.geometry_kind + " but " + cmd + " needs " + wanted;
}

void require_sweep(const RunConfig& cfg, bool positive) {
  const ScanBlock& s = cfg.scan;
  if (s.samples < 1) throw ConfigError(cfg.source + ": scan.samples missing");
  if (positive && !(s.start > 0.0 && s.stop > 0.0)) throw ConfigError(cfg.source + ": scan.start and scan.stop must be > 0");
}

std::string describe(const char* what, double value) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s = %.6g", what, value);
  return buf;
}

/// Evaluate `row(x)` for each sweep point on a worker pool and return the rows
/// in sweep order. The first failure in sweep order is rethrown with context.
template <class RowFn>
std::vector<CsvRow> sweep(const std::vector<double>& points, const char* what, RowFn&& row) {
  std::vector<CsvRow> rows(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        rows[i] = row(points[i]);
        if (!rows[i].converged) throw ConvergenceError("series did not converge");
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::min<unsigned>(scan_threads(), static_cast<unsigned>(points.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!errors[i]) continue;
    const std::string ctx = "sample " + std::to_string(i) + " (" + describe(what, points[i]) + "): ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(ctx + e.what());
    } catch (const GeometryError& e) {
      throw GeometryError(ctx + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(ctx + e.what());
    }
  }
  return rows;
}

CsvRow energy_row(double param, const EnergyBreakdown& e) {
  CsvRow r;
  r.param = param;
  r.e_london = e.e_london;
  r.e_na1 = e.e_na1;
  r.e_na2 = e.e_na2;
  r.e_na_total = e.e_na_total;
  r.ratio = e.ratio;
  r.terms_used = e.terms_used;
  r.converged = e.converged;
  return r;
}

double in_plane_projection(const Vec3& f, const Vec3& dir) {
  Vec3 n(dir.x(), dir.y(), 0.0);
  return f.dot(n.normalized());
}

TensorEval asymptotic_image_tensor(const Vec3& ra, const Vec3& rb, double gap) {
  return {g_tensor_capacitor_asymptotic(ra, rb, gap) - dipole_kernel_tensor(ra, rb), 0, true};
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows, int precision) {
  out << kCsvHeader << '\n';
  char buf[64];
  auto num = [&](double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    std::snprintf(buf, sizeof buf, "%.*e", precision, v);
    out << buf;
  };
  for (const CsvRow& r : rows) {
    for (double v : {r.param, r.e_london, r.e_na1, r.e_na2, r.e_na_total, r.ratio}) {
      num(v);
      out << ',';
    }
    for (int k = 0; k < 3; ++k) {
      if (r.f_na) num((*r.f_na)[k]);
      out << ',';
    }
    out << r.terms_used << ',' << (r.converged ? "true" : "false") << '\n';
  }
}

std::string sibling_path(const std::string& out_path, const std::string& suffix) {
  if (suffix.empty()) return out_path;
  const auto slash = out_path.find_last_of('/');
  const auto dot = out_path.find_last_of('.');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return has_ext ? out_path.substr(0, dot) + suffix + out_path.substr(dot) : out_path + suffix + ".csv";
}

unsigned scan_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DISPERSIA_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) throw ConfigError("DISPERSIA_THREADS must be a positive integer");
    n = static_cast<unsigned>(std::min(v, 256L));
  }
  return n;
}

// ---------------------------------------------------------------------------

std::vector<Table> cmd_plane_scan(const RunConfig& cfg) {
  if (!std::holds_alternative<Plane>(cfg.geometry)) throw ConfigError(kind_error(cfg, "plane-scan", "plane"));
  const ScanBlock& s = cfg.scan;
  require_sweep(cfg, true);
  const Geometry g = cfg.geometry;
  std::vector<CsvRow> rows;
  if (s.sweep == "separation") {
    if (!(s.height_a > 0.0 && s.height_b > 0.0)) {
      throw ConfigError(cfg.source + ": scan.height_a and scan.height_b must be > 0 for sweep = separation");
    }
    const double dh = s.height_b - s.height_a;
    if (std::min(s.start, s.stop) <= std::abs(dh)) {
      throw ConfigError(cfg.source + ": scan range must exceed |height_b - height_a|");
    }
    rows = sweep(s.points(), "R_AB", [&](double r) {
      const Vec3 a(0.0, 0.0, s.height_a);
      const Vec3 b(std::sqrt(r * r - dh * dh), 0.0, s.height_b);
      return energy_row(r, energy_breakdown(cfg.coupling, g, a, b, cfg.series));
    });
  } else if (s.sweep == "height") {
    if (!(s.separation > 0.0)) throw ConfigError(cfg.source + ": scan.separation must be > 0 for sweep = height");
    rows = sweep(s.points(), "height", [&](double h) {
      return energy_row(h, energy_breakdown(cfg.coupling, g, Vec3(0, 0, h), Vec3(s.separation, 0, h), cfg.series));
    });
  } else {
    throw ConfigError(cfg.source + ": scan.sweep must be separation or height");
  }
  return {{"", std::move(rows)}};
}

std::vector<Table> cmd_capacitor_ratio(const RunConfig& cfg) {
  const auto* cap = std::get_if<Capacitor>(&cfg.geometry);
  if (!cap) throw ConfigError(kind_error(cfg, "capacitor-ratio", "capacitor"));
  require_sweep(cfg, true);
  const double gap = cap->gap;
  const ScanBlock& s = cfg.scan;
  const Vec3 a(0.0, 0.0, s.z_a);
  validate_position(cfg.geometry, a);
  const auto pts = s.points();
  auto full = sweep(pts, "R_AB/D", [&](double x) {
    return energy_row(x, energy_breakdown(cfg.coupling, cfg.geometry, a, Vec3(x * gap, 0.0, s.z_b), cfg.series));
  });
  auto asym = sweep(pts, "R_AB/D", [&](double x) {
    const Vec3 b(x * gap, 0.0, s.z_b);
    validate_position(cfg.geometry, b);
    return energy_row(x, energy_breakdown(cfg.coupling, a, b, asymptotic_image_tensor(a, b, gap)));
  });
  return {{"", std::move(full)}, {".asymptotic", std::move(asym)}};
}

std::vector<Table> cmd_capacitor_force(const RunConfig& cfg) {
  const auto* cap = std::get_if<Capacitor>(&cfg.geometry);
  if (!cap) throw ConfigError(kind_error(cfg, "capacitor-force", "capacitor"));
  require_sweep(cfg, true);
  const double gap = cap->gap;
  const ScanBlock& s = cfg.scan;
  const auto pts = s.points();
  auto make = [&](bool asymptotic) {
    return sweep(pts, "R_AB/D", [&, asymptotic](double x) {
      AtomPair atoms;
      atoms.a = Vec3(0.0, 0.0, s.z_a);
      atoms.b = Vec3(x * gap, 0.0, s.z_b);
      TensorEval at;
      ForceBreakdown f;
      if (asymptotic) {
        auto provider = [gap](const Vec3& ra, const Vec3& rb) { return asymptotic_image_tensor(ra, rb, gap); };
        at = provider(atoms.a, atoms.b);
        f = force_on_atom(Which::B, cfg.coupling, atoms, cfg.geometry, provider, cfg.fd, cfg.series);
      } else {
        at = gh_tensor(cfg.geometry, atoms.a, atoms.b, cfg.series);
        f = force_on_atom(Which::B, cfg.coupling, atoms, cfg.geometry, cfg.fd, cfg.series);
      }
      CsvRow row = energy_row(x, energy_breakdown(cfg.coupling, atoms.a, atoms.b, at));
      const Vec3 dir = atoms.a - atoms.b;
      row.ratio = in_plane_projection(f.f_na, dir) / in_plane_projection(f.f_london, dir);
      row.f_na = f.f_na;
      return row;
    });
  };
  auto full = make(false);
  auto asym = make(true);
  return {{"", std::move(full)}, {".asymptotic", std::move(asym)}};
}

std::vector<Table> cmd_sphere_force(const RunConfig& cfg) {
  double radius = 0.0;
  if (const auto* sg = std::get_if<SphereGrounded>(&cfg.geometry)) radius = sg->radius;
  if (const auto* si = std::get_if<SphereIsolated>(&cfg.geometry)) radius = si->radius;
  if (radius == 0.0) throw ConfigError(kind_error(cfg, "sphere-force", "sphere_grounded or sphere_isolated"));
  require_sweep(cfg, true);
  const ScanBlock& s = cfg.scan;
  if (s.separations.empty()) throw ConfigError(cfg.source + ": scan.separations missing (units of the radius)");
  std::vector<Table> out;
  for (std::size_t k = 0; k < s.separations.size(); ++k) {
    const double sep = s.separations[k];
    if (!(sep > 0.0)) throw ConfigError(cfg.source + ": scan.separations entries must be > 0");
    auto rows = sweep(s.points(), "r_B/a", [&](double x) {
      AtomPair atoms;
      atoms.b = Vec3(0.0, 0.0, x * radius);
      atoms.a = atoms.b + Vec3(sep * radius, 0.0, 0.0);
      const ForceBreakdown f = force_on_atom(Which::B, cfg.coupling, atoms, cfg.geometry, cfg.fd, cfg.series);
      CsvRow row = energy_row(x, energy_breakdown(cfg.coupling, cfg.geometry, atoms.a, atoms.b, cfg.series));
      const Vec3 rhat = (atoms.a - atoms.b).normalized();
      row.ratio = f.f_na.dot(rhat) / f.f_london.dot(rhat);
      row.f_na = f.f_na;
      return row;
    });
    out.push_back({k == 0 ? "" : ".sep" + std::to_string(k + 1), std::move(rows)});
  }
  return out;
}

std::vector<Table> cmd_sphere_iso_vs_grounded(const RunConfig& cfg) {
  double radius = 0.0;
  if (const auto* sg = std::get_if<SphereGrounded>(&cfg.geometry)) radius = sg->radius;
  if (const auto* si = std::get_if<SphereIsolated>(&cfg.geometry)) radius = si->radius;
  if (radius == 0.0) {
    throw ConfigError(kind_error(cfg, "sphere-iso-vs-grounded", "sphere_grounded or sphere_isolated"));
  }
  require_sweep(cfg, true);
  const ScanBlock& s = cfg.scan;
  if (!(s.separation > 0.0)) throw ConfigError(cfg.source + ": scan.separation missing (units of the radius)");
  const Geometry iso = SphereIsolated{radius};
  const Geometry gro = SphereGrounded{radius};
  auto rows = sweep(s.points(), "r_A/a", [&](double x) {
    const Vec3 a(0.0, 0.0, x * radius);
    const Vec3 b(0.0, 0.0, (x + s.separation) * radius);
    const EnergyBreakdown ei = energy_breakdown(cfg.coupling, iso, a, b, cfg.series);
    const EnergyBreakdown eg = energy_breakdown(cfg.coupling, gro, a, b, cfg.series);
    CsvRow row = energy_row(x, ei);
    row.ratio = ei.e_na_total / eg.e_na_total;
    return row;
  });
  return {{"", std::move(rows)}};
}

std::vector<Table> cmd_axilrod_limit(const RunConfig& cfg) {
  const bool isolated = std::holds_alternative<SphereIsolated>(cfg.geometry);
  if (!isolated && !std::holds_alternative<SphereGrounded>(cfg.geometry)) {
    throw ConfigError(kind_error(cfg, "axilrod-limit", "sphere_isolated (or sphere_grounded as a control)"));
  }
  require_sweep(cfg, true);
  const ScanBlock& s = cfg.scan;
  const Vec3 a = s.atom_a;
  const Vec3 b = s.atom_b;
  if ((a - b).norm() == 0.0) throw ConfigError(cfg.source + ": scan.atom_a and scan.atom_b must differ");
  const double norm = std::pow((a - b).norm(), 3) * std::pow(a.norm(), 3) * std::pow(b.norm(), 3);
  auto rows = sweep(s.points(), "a", [&](double radius) {
    const Geometry g = isolated ? Geometry{SphereIsolated{radius}} : Geometry{SphereGrounded{radius}};
    CsvRow row = energy_row(radius, energy_breakdown(cfg.coupling, g, a, b, cfg.series));
    row.ratio = row.e_na_total * norm / (radius * radius * radius);
    return row;
  });
  return {{"", std::move(rows)}};
}

}  // namespace dispersia::cli
