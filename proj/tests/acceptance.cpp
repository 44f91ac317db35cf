// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [path-to-bmse-cli]
#include <Eigen/Dense>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bmse/batch_select.hpp"
#include "bmse/estimators.hpp"
#include "bmse/harness.hpp"
#include "bmse/lag_window.hpp"
#include "bmse/reference.hpp"
#include "bmse/var1.hpp"
#include "test_support.hpp"

namespace {

using namespace bmse;
using Clock = std::chrono::steady_clock;

int g_failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  std::mt19937_64 eng(101);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(50, 5000)(eng);
    const Eigen::Index p = std::uniform_int_distribution<Eigen::Index>(1, 4)(eng);
    const ChainMatrix c = test::random_chain(n, p, 5000 + static_cast<std::uint64_t>(i));
    const std::int64_t half = std::uniform_int_distribution<std::int64_t>(1, std::max<std::int64_t>(1, n / 4))(eng);
    const std::int64_t b = 2 * half;
    const Eigen::MatrixXd bart = generalized_obm(c, LagWindow(WindowKind::kBartlett, b)).sigma;
    worst = std::max(worst, test::matrix_rel_err(bart, obm(c, b).sigma));
    const Eigen::MatrixXd ft = generalized_obm(c, LagWindow(WindowKind::kFlatTop, b)).sigma;
    const Eigen::MatrixXd combo = 2.0 * obm(c, b).sigma - obm(c, b / 2).sigma;
    worst = std::max(worst, test::matrix_rel_err(ft, combo));
  }
  const double t = seconds_since(t0);
  report(1, worst <= 1e-10 && t < 1.0,
         "generalized OBM identities, max rel err " + fmt("%.3g", worst) + ", " + fmt("%.3f", t) + " s");
}

void criterion2() {
  bool ok = true;
  double worst = 0.0;
  for (std::int64_t b = 2; b <= 256; ++b) {
    for (const WindowKind kind : {WindowKind::kBartlett, WindowKind::kFlatTop}) {
      if (kind == WindowKind::kFlatTop && b % 2 != 0) continue;
      const LagWindow w(kind, b);
      long double sum_k = 0.0L;
      std::int64_t sq_numer = 0;  // sum of (b * delta2)^2, exact in integers
      for (std::int64_t k = 1; k <= b; ++k) {
        const double d = w.delta2(k);
        sum_k += static_cast<long double>(k) * d;
        const double scaled = d * static_cast<double>(b);
        const auto r = std::llround(scaled);
        if (std::abs(scaled - static_cast<double>(r)) > 1e-9) ok = false;
        sq_numer += r * r;
      }
      worst = std::max(worst, static_cast<double>(std::abs(sum_k - 1.0L)));
      const std::int64_t expected_sq = kind == WindowKind::kBartlett ? 1 : 8;
      if (sq_numer != expected_sq) ok = false;
      const WindowConditionReport rep = verify_window_conditions(w);
      if (!rep.passed) ok = false;
      const double c_expected = kind == WindowKind::kBartlett ? 1.0 : 0.0;
      for (const Family f : {Family::kBM, Family::kOBM}) {
        if (mse_constants(kind, f).C != c_expected) ok = false;
      }
    }
  }
  ok = ok && worst <= 1e-12;
  report(2, ok, "window conditions for b in 2..256, max |sum k d2w - 1| = " + fmt("%.3g", worst));
}

void criterion3() {
  std::mt19937_64 eng(303);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index n = std::uniform_int_distribution<Eigen::Index>(20, 200)(eng);
    const Eigen::Index p = std::uniform_int_distribution<Eigen::Index>(1, 4)(eng);
    const ChainMatrix c = test::random_chain(n, p, 9000 + static_cast<std::uint64_t>(i));
    const std::int64_t b_bm = std::uniform_int_distribution<std::int64_t>(1, n / 2)(eng);
    const std::int64_t b_obm = std::uniform_int_distribution<std::int64_t>(1, n - 1)(eng);
    const std::int64_t b_ft = 2 * std::uniform_int_distribution<std::int64_t>(1, (n - 1) / 2)(eng);
    worst = std::max(worst, test::matrix_rel_err(bm(c, b_bm).sigma, reference::bm_naive(c, b_bm)));
    worst = std::max(worst, test::matrix_rel_err(obm(c, b_obm).sigma, reference::obm_naive(c, b_obm)));
    for (const WindowKind kind : {WindowKind::kBartlett, WindowKind::kFlatTop, WindowKind::kTukeyHanning}) {
      const LagWindow w(kind, kind == WindowKind::kFlatTop ? b_ft : b_obm);
      worst = std::max(worst, test::matrix_rel_err(generalized_obm(c, w).sigma, reference::generalized_obm_naive(c, w)));
    }
  }
  report(3, worst <= 1e-10, "naive oracles vs fast paths, max rel err " + fmt("%.3g", worst));
}

void criterion4() {
  Engine eng = make_engine(404);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int m = 1 + i % 5;
    const std::vector<double> phi = test::random_stationary_phi(m, 0.9, eng);
    const ArFit fit = ar_model(phi, 1.0);
    const auto g = test::ar_autocov_by_psi(phi, 1.0, 200000);
    std::size_t k_max = g.size() - 1;
    while (k_max > 0 && std::abs(g[k_max]) < 1e-15L * g[0]) --k_max;
    long double s = g[0], gam = 0.0L;
    for (std::size_t k = 1; k <= k_max; ++k) {
      s += 2.0L * g[k];
      gam -= 2.0L * static_cast<long double>(k) * g[k];
    }
    worst = std::max(worst, test::rel_err(ar_sigma(fit), static_cast<double>(s)));
    worst = std::max(worst, test::rel_err(ar_gamma(fit), static_cast<double>(gam)));
  }
  const ArFit ar1 = ar_model({0.5}, 1.0);
  const double e1 = std::max(std::abs(ar_sigma(ar1) - 4.0), std::abs(ar_gamma(ar1) + 16.0 / 3.0));
  report(4, worst <= 1e-6 && e1 <= 1e-8,
         "AR closed forms, max rel err " + fmt("%.3g", worst) + ", AR(1) abs err " + fmt("%.3g", e1));
}

void criterion5() {
  std::mt19937_64 eng(505);
  std::normal_distribution<double> z;
  double worst = 0.0, worst_fp = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index p = 1 + i % 5;
    Eigen::MatrixXd phi;
    const double radius = std::uniform_real_distribution<double>(0.05, 0.95)(eng);
    if (i % 2 == 0) {
      phi = make_phi(p, radius, 7000 + static_cast<std::uint64_t>(i));
    } else {
      phi = Eigen::MatrixXd(p, p);
      for (Eigen::Index r = 0; r < p; ++r)
        for (Eigen::Index c = 0; c < p; ++c) phi(r, c) = z(eng);
      phi *= radius / spectral_radius(phi);
    }
    const Var1Spec spec = make_var1(phi);
    // truncated series: V = sum Phi^j Phi^j', R(k) = Phi^k V
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(p, p), pj = Eigen::MatrixXd::Identity(p, p);
    for (int j = 0; j < 6000; ++j) {
      v += pj * pj.transpose();
      pj = phi * pj;
    }
    Eigen::MatrixXd sigma = v, gamma = Eigen::MatrixXd::Zero(p, p), rk = v;
    for (int k = 1; k < 6000; ++k) {
      rk = phi * rk;
      sigma += rk + rk.transpose();
      gamma -= static_cast<double>(k) * (rk + rk.transpose());
    }
    worst = std::max({worst, test::matrix_rel_err(spec.sigma_true, sigma), test::matrix_rel_err(spec.gamma_true, gamma)});
    const Eigen::MatrixXd resid = spec.v - phi * spec.v * phi.transpose() - Eigen::MatrixXd::Identity(p, p);
    worst_fp = std::max(worst_fp, resid.cwiseAbs().maxCoeff());
  }
  report(5, worst <= 1e-8 && worst_fp <= 1e-10,
         "VAR(1) closed forms, max rel err " + fmt("%.3g", worst) + ", V residual " + fmt("%.3g", worst_fp));
}

ExperimentConfig base_config() {
  ExperimentConfig c;
  c.p = 3;
  c.n_pilot = 10000;
  c.n_final = 100000;
  c.replications = 200;
  return c;
}

void criterion6() {
  ExperimentConfig c = base_config();
  c.rho_grid = {0.8, 0.85, 0.9};
  c.estimators.clear();
  c.rules = {BatchRule::kAr, BatchRule::kNp};
  const ExperimentResult r = run_experiment(c);
  bool ok = true;
  std::ostringstream detail;
  detail << "coefficient relative RMSE (ar/np):";
  for (const RhoSummary& s : r.summaries) {
    const double ar = s.ar.relative_rmse, np = s.np.relative_rmse;
    detail << " rho=" << s.rho << " " << fmt("%.3f", ar) << "/" << fmt("%.3f", np);
    if (ar > 1.1 * np) ok = false;
    if (s.rho == 0.85 && ar > 0.25) ok = false;
    if (s.ar.failures > 0 || s.np.failures > 0) detail << " (failures " << s.ar.failures << "/" << s.np.failures << ")";
  }
  report(6, ok, detail.str());
}

void criterion7() {
  ExperimentConfig c = base_config();
  c.rho_grid = {0.8, 0.9};
  c.estimators = {Method::kBM, Method::kOBM};
  c.rules = {BatchRule::kAr, BatchRule::kCubeRoot, BatchRule::kSquareRoot};
  const ExperimentResult r = run_experiment(c);
  bool ok = true;
  std::ostringstream detail;
  detail << "rho=0.9 MSE (ar/n13/n12):";
  for (const RhoSummary& s : r.summaries) {
    if (s.rho != 0.9) continue;
    for (const Method m : c.estimators) {
      const double ar = s.cell(m, BatchRule::kAr).mean_mse;
      const double n13 = s.cell(m, BatchRule::kCubeRoot).mean_mse;
      const double n12 = s.cell(m, BatchRule::kSquareRoot).mean_mse;
      detail << " " << to_string(m) << " " << fmt("%.3f", ar) << "/" << fmt("%.3f", n13) << "/" << fmt("%.3f", n12);
      if (!(ar < n13) || !(ar <= 1.1 * n12)) ok = false;
    }
  }
  report(7, ok, detail.str());
}

void criterion8() {
  ExperimentConfig c = base_config();
  c.rho_grid = {0.85};
  c.replications = 500;
  c.estimators = {Method::kBM};
  c.rules = {BatchRule::kAr};
  const ExperimentResult r = run_experiment(c);
  const CellSummary& cell = r.summaries.front().cell(Method::kBM, BatchRule::kAr);
  // failures count against coverage: the denominator is all replications
  const double cov = static_cast<double>(cell.covered) / c.replications;
  report(8, cov >= 0.84 && cov <= 0.93,
         "BM/AR coverage " + fmt("%.3f", cov) + " over 500 replications (" + std::to_string(cell.failures) +
             " failures)");
}

void criterion9() {
  const int reps = 200;
  int twos = 0;
  std::vector<std::int64_t> rs(reps);
  std::vector<std::int64_t> bs(reps);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < reps; ++i) {
    NormalSource normal(make_engine(909, {0, static_cast<std::uint64_t>(i)}));
    Eigen::MatrixXd d(100000, 1);
    for (Eigen::Index t = 0; t < d.rows(); ++t) d(t, 0) = normal();
    bs[i] = lag_based_batchsize(ChainMatrix(std::move(d)), false).b;
    const Eigen::VectorXd y = test::ar1_series(10000, 0.9, 90900 + static_cast<std::uint64_t>(i));
    rs[i] = lag_rule(ChainMatrix(Eigen::MatrixXd(y)));
  }
  for (const auto b : bs) twos += b == 2 ? 1 : 0;
  std::sort(rs.begin(), rs.end());
  const double median = 0.5 * static_cast<double>(rs[reps / 2 - 1] + rs[reps / 2]);
  const double frac = static_cast<double>(twos) / reps;
  report(9, frac >= 0.8 && median >= 25 && median <= 55,
         "iid b=2 in " + fmt("%.3f", frac) + " of runs, AR(1) 0.9 median r " + fmt("%.1f", median));
}

void criterion10(const char* cli) {
  Eigen::MatrixXd d(1000000, 5);
  {
    NormalSource normal(make_engine(1010));
    for (Eigen::Index t = 0; t < d.rows(); ++t)
      for (Eigen::Index j = 0; j < 5; ++j) d(t, j) = normal();
  }
  const ChainMatrix c(std::move(d));
  auto t0 = Clock::now();
  const CovEstimate e = obm(c, 100);
  const double t_obm = seconds_since(t0);

  t0 = Clock::now();
  bool ran = true;
  if (cli != nullptr) {
    const auto dir = std::filesystem::temp_directory_path() / "bmse_acceptance";
    std::filesystem::create_directories(dir);
    const std::string cmd = std::string("\"") + cli + "\" replicate --out \"" + (dir / "records.csv").string() +
                            "\" --summary \"" + (dir / "summary.json").string() + "\" > /dev/null";
    ran = std::system(cmd.c_str()) == 0;
  } else {
    run_experiment(ExperimentConfig{});
  }
  const double t_rep = seconds_since(t0);
  report(10, e.sigma.allFinite() && ran && t_obm < 1.0 && t_rep < 600.0,
         "obm n=1e6 p=5 in " + fmt("%.3f", t_obm) + " s; default replicate in " + fmt("%.1f", t_rep) + " s on " +
             std::to_string(omp_get_max_threads()) + " thread(s)");
}

}  // namespace

int main(int argc, char** argv) {
  const char* cli = argc > 1 ? argv[1] : nullptr;
  try {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10(cli);
  } catch (const std::exception& e) {
    std::cout << "FAIL aborted: " << e.what() << std::endl;
    return 1;
  }
  return g_failures == 0 ? 0 : 1;
}
