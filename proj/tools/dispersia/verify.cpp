#include "dispersia/commands.hpp"
#include "dispersia/oracle/bessel_reference.hpp"
#include "dispersia/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <random>

namespace dispersia::cli {

namespace {

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double u(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  double logu(double lo, double hi) { return std::exp(u(std::log(lo), std::log(hi))); }
  Vec3 unit() {
    std::normal_distribution<double> n;
    return Vec3(n(eng), n(eng), n(eng)).normalized();
  }
};

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

CheckResult result(std::string name, double residual, double tol, std::string note = {}) {
  return {std::move(name), residual, tol, residual <= tol, std::move(note)};
}

CheckResult bessel_check() {
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = 1e-6 * std::pow(600.0 / 1e-6, i / 199.0);
    for (int n : {0, 1}) {
      const long double ref = oracle::bessel_k_reference(n, x);
      const double got = n == 0 ? bessel_k0(x) : bessel_k1(x);
      worst = std::max(worst, static_cast<double>(std::fabs((got - ref) / ref)));
    }
  }
  return result("bessel K0/K1 vs extended precision", worst, 1e-13);
}

struct Domain {
  Geometry g;
  Vec3 (*sample)(Rng&);
};

const std::vector<Domain>& domains() {
  static const std::vector<Domain> d = {
      {Plane{}, +[](Rng& r) -> Vec3 { return Vec3(r.u(-1.5, 1.5), r.u(-1.5, 1.5), r.u(0.2, 2.0)); }},
      {Capacitor{1.0}, +[](Rng& r) -> Vec3 { return Vec3(r.u(-1, 1), r.u(-1, 1), r.u(-0.35, 0.35)); }},
      {SphereGrounded{1.0}, +[](Rng& r) -> Vec3 { return r.logu(1.2, 5.0) * r.unit(); }},
      {SphereIsolated{1.0}, +[](Rng& r) -> Vec3 { return r.logu(1.2, 5.0) * r.unit(); }},
  };
  return d;
}

CheckResult fd_tensor_check(const Domain& dom, const TensorUnderTest& tensor, std::uint64_t seed) {
  Rng rng(seed);
  const FdCtrl fd{1e-2, 2};
  double worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    const Vec3 a = dom.sample(rng);
    const Vec3 b = dom.sample(rng);
    const double ell = 0.3 * std::min(boundary_distance(dom.g, a), boundary_distance(dom.g, b));
    const auto o = oracle::fd_mixed_hessian([&](const Vec3& r, const Vec3& p) { return gh(dom.g, r, p).value; }, a, b,
                                            fd, ell);
    const Tensor3 t = tensor(dom.g, a, b);
    worst = std::max(worst, (t - o.t).cwiseAbs().maxCoeff() / o.t.cwiseAbs().maxCoeff());
  }
  return result("FD tensor " + geometry_name(dom.g), worst, 1e-6, "max entry err / max|T|");
}

CheckResult plane_identity_check() {
  Rng rng(21);
  const PairCoupling unit = PairCoupling::reduced();
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vec3 a(rng.u(-2, 2), rng.u(-2, 2), rng.u(0.05, 3));
    const Vec3 b(rng.u(-2, 2), rng.u(-2, 2), rng.u(0.05, 3));
    worst = std::max(worst, rel(ena2(unit, gh_tensor_plane(a, b)), london_energy(unit, a, mirror_z(b))));
  }
  return result("plane E_NA2 = E_Lon(image)", worst, 1e-12);
}

CheckResult representation_check() {
  Rng rng(22);
  const PairCoupling unit = PairCoupling::reduced();
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double phi = rng.u(0.0, 2.0 * kPi);
    const Vec3 a(rng.u(-2, 2), rng.u(-2, 2), rng.u(-0.48, 0.48));
    const Vec3 b = Vec3(a.x(), a.y(), rng.u(-0.48, 0.48)) + rng.u(0.0, 3.0) * Vec3(std::cos(phi), std::sin(phi), 0.0);
    const auto e = energy_breakdown(unit, Capacitor{1.0}, a, b);
    worst = std::max(worst, rel(crossed_energy_capacitor_direct(unit, a, b, 1.0), e.e_london + e.e_na_total));
  }
  return result("capacitor direct vs decomposed energy", worst, 1e-9);
}

CheckResult ladder_check() {
  Rng rng(23);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vec3 a(0.0, 0.0, rng.u(-0.45, 0.45));
    const Vec3 b(rng.u(0.02, 1.0), 0.0, rng.u(-0.45, 0.45));
    const auto ref = oracle::capacitor_image_ladder(a, b, 1.0, 4096);
    worst = std::max(worst, rel(g_capacitor(a, b, 1.0).value, ref.value));
  }
  return result("capacitor series vs image ladder", worst, 1e-8);
}

CheckResult high_cutoff_check() {
  Rng rng(24);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Vec3 a(0.0, 0.0, rng.u(-0.45, 0.45));
    const Vec3 b(rng.u(0.1, 3.0), 0.0, rng.u(-0.45, 0.45));
    const double ref = oracle::high_cutoff_reference(a, b, 1.0, 2000);
    worst = std::max(worst, rel(g_capacitor(a, b, 1.0).value, ref));
  }
  return result("capacitor series vs fixed high cutoff", worst, 1e-10);
}

std::vector<CheckResult> axiom_checks() {
  Rng rng(25);
  const double h = 1e-3;
  double dirichlet = 0.0;
  double symmetry = 0.0;
  double harmonic = 0.0;
  for (const Domain& dom : domains()) {
    for (int i = 0; i < 50; ++i) {
      const Vec3 r = dom.sample(rng);
      const Vec3 rp = dom.sample(rng);
      const double g = gh(dom.g, r, rp).value;
      symmetry = std::max(symmetry, std::abs(g - gh(dom.g, rp, r).value) / std::abs(g));
      double lap = -6.0 * g;
      for (int k = 0; k < 3; ++k) {
        Vec3 e = Vec3::Zero();
        e[k] = h;
        lap += gh(dom.g, r + e, rp).value + gh(dom.g, r - e, rp).value;
      }
      harmonic = std::max(harmonic, std::abs(lap) / std::abs(g));

      Vec3 s;
      if (std::holds_alternative<Plane>(dom.g)) {
        s = Vec3(rng.u(-2, 2), rng.u(-2, 2), 0.0);
      } else if (std::holds_alternative<Capacitor>(dom.g)) {
        s = Vec3(rng.u(-1, 1), rng.u(-1, 1), rng.u(0, 1) < 0.5 ? -0.5 : 0.5);
      } else if (std::holds_alternative<SphereGrounded>(dom.g)) {
        s = rng.unit();
      } else {
        continue;  // the isolated sphere floats at a nonzero potential
      }
      dirichlet = std::max(dirichlet, std::abs(gh(dom.g, s, rp).value + free_kernel(s, rp)) / free_kernel(s, rp));
    }
  }
  return {result("Dirichlet condition on grounded surfaces", dirichlet, 1e-9),
          result("G_H(r, r') = G_H(r', r)", symmetry, 1e-12),
          result("7-point Laplacian of G_H", harmonic, 1e-5, "relative to |G_H|/h^2, h = 1e-3")};
}

}  // namespace

std::vector<CheckResult> cmd_verify(const VerifyOptions& opts) {
  const TensorUnderTest tensor =
      opts.tensor ? opts.tensor : [](const Geometry& g, const Vec3& a, const Vec3& b) { return gh_tensor(g, a, b).t; };

  std::vector<std::function<std::vector<CheckResult>()>> jobs;
  jobs.push_back([] { return std::vector{bessel_check()}; });
  std::uint64_t seed = 10;
  for (const Domain& dom : domains()) {
    jobs.push_back([&dom, &tensor, s = seed++] { return std::vector{fd_tensor_check(dom, tensor, s)}; });
  }
  jobs.push_back([] { return std::vector{plane_identity_check()}; });
  jobs.push_back([] { return std::vector{representation_check()}; });
  jobs.push_back([] { return std::vector{ladder_check()}; });
  jobs.push_back([] { return std::vector{high_cutoff_check()}; });
  jobs.push_back(axiom_checks);

  const unsigned threads = opts.threads ? opts.threads : scan_threads();
  std::vector<std::vector<CheckResult>> results(jobs.size());
  auto guarded = [&](std::size_t i) {
    try {
      results[i] = jobs[i]();
    } catch (const std::exception& e) {
      results[i] = {{"job " + std::to_string(i), 0.0, 0.0, false, std::string("exception: ") + e.what()}};
    }
  };
  for (std::size_t start = 0; start < jobs.size(); start += threads) {
    std::vector<std::future<void>> batch;
    for (std::size_t i = start; i < std::min(jobs.size(), start + threads); ++i) {
      batch.push_back(std::async(std::launch::async, guarded, i));
    }
    for (auto& f : batch) f.get();
  }

  std::vector<CheckResult> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

void print_report(std::ostream& out, const std::vector<CheckResult>& checks) {
  char buf[320];
  int failed = 0;
  for (const CheckResult& c : checks) {
    failed += c.pass ? 0 : 1;
    std::snprintf(buf, sizeof buf, "%s  %-42s max residual %.3e  tol %.1e", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                  c.residual, c.tolerance);
    out << buf;
    if (!c.note.empty()) out << "  (" << c.note << ")";
    out << '\n';
  }
  out << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size() << " checks passed\n";
}

}  // namespace dispersia::cli
