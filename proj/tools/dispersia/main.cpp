#include "dispersia/commands.hpp"

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include <fstream>
#include <iostream>
#include <map>

using namespace dispersia;
using namespace dispersia::cli;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kConfig = 2, kNonConvergence = 3 };

using Command = std::vector<Table> (*)(const RunConfig&);

void emit(const std::vector<Table>& tables, const std::string& out_path, int precision) {
  if (out_path.empty()) {
    if (tables.size() > 1) {
      throw ConfigError("this subcommand writes " + std::to_string(tables.size()) +
                        " tables; set --out or output.path");
    }
    write_csv(std::cout, tables.front().rows, precision);
    return;
  }
  for (const Table& t : tables) {
    const std::string path = sibling_path(out_path, t.suffix);
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ConfigError(path + ": cannot open for writing");
    write_csv(f, t.rows, precision);
    if (!f.flush()) throw ConfigError(path + ": write failed");
    std::cerr << "wrote " << path << " (" << t.rows.size() << " rows)\n";
  }
}

int run_verify() {
  const auto checks = cmd_verify();
  print_report(std::cout, checks);
  for (const auto& c : checks) {
    if (!c.pass) return kVerifyFailed;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-retarded dispersion interactions of two atoms near conducting surfaces"};
  app.require_subcommand(1);

  struct Options {
    std::string config;
    std::string out;
    bool verify = false;
  } opts;

  const std::vector<std::tuple<std::string, std::string, Command>> commands = {
      {"plane-scan", "pair energies near a grounded plane", cmd_plane_scan},
      {"capacitor-ratio", "E_NA/E_Lon between parallel plates, full series and asymptotic", cmd_capacitor_ratio},
      {"capacitor-force", "in-plane non-additive force ratio between parallel plates", cmd_capacitor_force},
      {"sphere-force", "non-additive force on B near a sphere versus r_B/a", cmd_sphere_force},
      {"sphere-iso-vs-grounded", "E_NA(isolated)/E_NA(grounded) on a colinear sweep", cmd_sphere_iso_vs_grounded},
      {"axilrod-limit", "small-sphere limit of the non-additive energy", cmd_axilrod_limit},
  };
  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    std::string alias = name;
    std::replace(alias.begin(), alias.end(), '-', '_');
    sub->alias(alias);
    sub->add_option("-c,--config", opts.config, "run configuration (INI)")->required();
    sub->add_option("-o,--out", opts.out, "output CSV path (overrides output.path)");
    sub->add_flag("--verify", opts.verify, "run the oracle cross-checks first and stop on failure");
    dispatch[sub] = fn;
  }
  CLI::App* verify = app.add_subcommand("verify", "run the oracle cross-check suite");
  verify->add_option("-c,--config", opts.config, "ignored; accepted for symmetry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (verify->parsed()) return run_verify();
    for (const auto& [sub, fn] : dispatch) {
      if (!sub->parsed()) continue;
      if (opts.verify) {
        const int v = run_verify();
        if (v != kOk) return v;
      }
      const RunConfig cfg = load_config(opts.config);
      const auto tables = fn(cfg);
      emit(tables, opts.out.empty() ? cfg.out_path : opts.out, cfg.precision);
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << '\n';
    return kConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kVerifyFailed;
  }
  return kConfig;
}
