// End-to-end acceptance harness. Each numbered check prints exactly one
// [PASS]/[FAIL] line; indented lines are recorded diagnostics that do not
// gate the result. Exits nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "udesign/control.hpp"
#include "udesign/design.hpp"
#include "udesign/qmat.hpp"
#include "udesign/sphere.hpp"
#include "udesign/upath.hpp"

using namespace udesign;

namespace {

int g_failures = 0;

void report(int index, bool ok, const std::string& label,
            const std::string& detail) {
  std::printf("[%s] %2d %s  (%s)\n", ok ? "PASS" : "FAIL", index,
              label.c_str(), detail.c_str());
  if (!ok) ++g_failures;
}

void note(const std::string& text) {
  std::printf("         %s\n", text.c_str());
}

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof(buf), pattern, args);
  va_end(args);
  return std::string(buf);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double fp_at(const unitary_path& path, int n) {
  return frame_potential(sample_path(path, n));
}

double max_abs(const cmat& m) { return m.cwiseAbs().maxCoeff(); }

// Exactly evolvable instance: constant drive plus constant noise.
double exact_square_fidelity(const noise_spec& noise) {
  pulse_program square = composite_pulse(composite_kind::square, 1.0);
  unitary_op target = noise_free_target(square);
  unitary_op u = propagate(square, noise, propagation_config(1));
  return gate_fidelity(target, u);
}

}  // namespace

// 1. Equiangular samplings of every closed path family are exact unitary
// 1-designs: frame potential 1 within 1e-10.
static void check_design_identities() {
  const axis3 z(0, 0, 1), y(0, 1, 0);
  double worst = 0.0;
  std::string worst_tag = "none";
  auto track = [&](const std::string& tag, double fp) {
    double err = std::abs(fp - 1.0);
    if (err > worst) {
      worst = err;
      worst_tag = tag;
    }
  };

  unitary_path loop = two_axis_path(z, y);
  for (int n = 4; n <= 12; ++n) track(fmt("two-axis n=%d", n), fp_at(loop, n));

  unitary_path fixed = fixed_angle_path(axis3(0, 0, -1), axis3(0, -1, 0));
  track("fixed-angle n=8", fp_at(fixed, 8));
  track("fixed-angle n=16", fp_at(fixed, 16));

  unitary_path pair = tensor_qubit_path({{z, y}, {z, y}});
  track("tensor-2q n=16", fp_at(pair, 16));

  for (int d = 2; d <= 5; ++d)
    track(fmt("hw d=%d n=%d", d, d * d), fp_at(hw_path(d), d * d));

  unitary_path fiber = fiber_path(3);
  track("fiber d=3 n=25", fp_at(fiber, 25));
  track("fiber d=3 n=50", fp_at(fiber, 50));

  report(1, worst <= 1e-10, "exact design frame potentials",
         fmt("worst |F-1| = %.3g at %s", worst, worst_tag.c_str()));
}

// 2. Arc lengths of the three generating curves and the pentagonal inner
// products of the first one.
static void check_curve_metrics() {
  struct entry {
    curve_spec spec;
    double expected;
    const char* name;
  };
  const entry entries[] = {
      {curve_spec(curve_kind::xi), std::sqrt(10.0) * M_PI, "xi"},
      {curve_spec(curve_kind::gamma), 2.0 * std::sqrt(5.0) * M_PI, "gamma"},
      {curve_spec(curve_kind::gamma_tilde), std::sqrt(5.0) * M_PI,
       "gamma-tilde"},
  };
  double worst_rel = 0.0;
  for (const auto& e : entries) {
    double rel = std::abs(arc_length(e.spec) - e.expected) / e.expected;
    worst_rel = std::max(worst_rel, rel);
  }

  std::vector<sphere_point> penta;
  for (int k = 0; k < 5; ++k)
    penta.push_back(eval_curve(curve_spec(curve_kind::xi), k / 5.0));
  double worst_inner = 0.0;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      double inner = penta[i].vec().dot(penta[j].vec());
      worst_inner = std::max(worst_inner, std::abs(inner + 0.25));
    }

  report(2, worst_rel <= 1e-8 && worst_inner <= 1e-12,
         "arc lengths and pentagonal inner products",
         fmt("worst rel len err = %.3g, worst |inner+1/4| = %.3g", worst_rel,
             worst_inner));
}

// 3. Closed generating curves average to zero with second moment I/4 at 128
// samples. The tilde-phase family is open on the 3-sphere, so its moments
// are recorded here but not gated.
static void check_curve_moments() {
  std::vector<std::pair<std::string, curve_spec>> gated = {
      {"xi", curve_spec(curve_kind::xi)},
      {"gamma", curve_spec(curve_kind::gamma)},
      {"xi-prime", curve_spec(curve_kind::xi_prime)},
      {"gamma-prime", curve_spec(curve_kind::gamma_prime)},
  };
  const double phis[] = {0.0, M_PI / 4.0, M_PI / 2.0, M_PI};
  for (double phi : phis) {
    gated.push_back(
        {fmt("xi-phase(%.4f)", phi), curve_spec(curve_kind::xi_phase, phi)});
    gated.push_back({fmt("gamma-phase(%.4f)", phi),
                     curve_spec(curve_kind::gamma_phase, phi)});
  }

  double worst = 0.0;
  std::string worst_tag = "none";
  for (const auto& [tag, spec] : gated) {
    moment_result mom = curve_moments(spec, 128);
    Eigen::MatrixXd target =
        Eigen::MatrixXd::Identity(mom.m2.rows(), mom.m2.cols()) / 4.0;
    double err = std::max(mom.m1.cwiseAbs().maxCoeff(),
                          (mom.m2 - target).cwiseAbs().maxCoeff());
    if (err > worst) {
      worst = err;
      worst_tag = tag;
    }
  }

  report(3, worst <= 1e-9, "closed-curve moment identities",
         fmt("worst moment deviation = %.3g at %s", worst, worst_tag.c_str()));
  for (double phi : phis) {
    moment_result mom =
        curve_moments(curve_spec(curve_kind::gamma_tilde_phase, phi), 128);
    Eigen::MatrixXd target = Eigen::MatrixXd::Identity(4, 4) / 4.0;
    note(fmt("recorded: gamma-tilde-phase(%.4f) |m1| = %.6f, "
             "max|m2 - I/4| = %.6f (open curve, not gated)",
             phi, mom.m1.norm(), (mom.m2 - target).cwiseAbs().maxCoeff()));
  }
}

// 4. The driven identity pulse cancels the first-order response to every
// static perturbation axis.
static void check_first_moment_cancellation() {
  auto t0 = std::chrono::steady_clock::now();
  pulse_program pulse = urc_pulse(axis3(0, 0, 1), axis3(0, 1, 0), 1.0);
  const cmat axes[3] = {pauli_x(), pauli_y(), pauli_z()};
  const char* names[3] = {"x", "y", "z"};
  double worst = 0.0;
  std::string worst_tag = "none";
  for (int k = 0; k < 3; ++k) {
    double err = max_abs(time_first_moment(pulse, axes[k], 32768));
    if (err > worst) {
      worst = err;
      worst_tag = names[k];
    }
  }
  double elapsed = seconds_since(t0);
  report(4, worst <= 1e-6 && elapsed < 1.0, "first-moment cancellation",
         fmt("worst residual = %.3g at sigma_%s, %.2f s", worst,
             worst_tag.c_str(), elapsed));
}

// 5. Opening the loop toward the pi phase gate trades design exactness for
// the target; the frame potential decays toward 1 as sampling refines, and
// the decay itself is pinned as a regression baseline.
static void check_open_path_convergence() {
  open_path opened =
      build_open_path(two_axis_path(axis3(0, 0, 1), axis3(0, 1, 0)),
                      unitary_op(complexd(0, -1) * pauli_z(), true));
  const int ns[4] = {8, 16, 32, 64};
  const double frozen[4] = {1.080805826175840, 1.008916330238012,
                            1.002012266054716, 1.000491851062930};
  double fp[4];
  for (int k = 0; k < 4; ++k) fp[k] = fp_at(opened.path, ns[k]);

  bool decreasing = fp[0] > fp[1] && fp[1] > fp[2] && fp[2] > fp[3];
  bool close = fp[3] - 1.0 <= 1e-3;
  double worst_drift = 0.0;
  for (int k = 0; k < 4; ++k)
    worst_drift = std::max(worst_drift, std::abs(fp[k] - frozen[k]));

  report(5, decreasing && close && worst_drift <= 1e-9,
         "open-path design convergence",
         fmt("F = %.9f / %.9f / %.9f / %.9f, baseline drift = %.3g", fp[0],
             fp[1], fp[2], fp[3], worst_drift));
}

// 6. The real quadratic forms reproduce conjugation of v.sigma by the
// unit-quaternion unitary, with exactly traceless matrices.
static void check_quadratic_forms() {
  std::mt19937_64 rng(424242);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  bool traceless = true;
  for (int trial = 0; trial < 1000; ++trial) {
    Eigen::Vector3d v(gauss(rng), gauss(rng), gauss(rng));
    v.normalize();
    Eigen::Vector4d x(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    x.normalize();

    auto forms = quadratic_form_matrices(v);
    unitary_op u = su2_from_s3(sphere_point(Eigen::VectorXd(x)));
    cmat vs = v(0) * pauli_x() + v(1) * pauli_y() + v(2) * pauli_z();
    Eigen::Vector3d direct =
        bloch_decompose(hermitian_op(u.mat() * vs * u.mat().adjoint()))
            .second;
    for (int k = 0; k < 3; ++k) {
      double predicted = x.dot(forms[k] * x);
      worst = std::max(worst, std::abs(predicted - direct(k)));
      if (forms[k].trace() != 0.0) traceless = false;
    }
  }
  report(6, worst <= 1e-12 && traceless, "quadratic-form conjugation oracle",
         fmt("worst component error = %.3g over 1000 draws, traces %s", worst,
             traceless ? "exactly zero" : "NONZERO"));
}

// 7. Mean gate fidelity under randomly oriented static noise at eta = 0.1:
// the driven identity beats the plain 2pi rotation, which beats both
// error-compensating composites, each ordering by at least five standard
// errors.
static void check_gate_robustness() {
  auto t0 = std::chrono::steady_clock::now();
  monte_carlo_config mc(1000, 20260823ULL);
  const double eta = 0.1;

  auto run = [&](const pulse_program& pulse, const propagation_config& cfg) {
    return noise_averaged_fidelity(pulse, noise_free_target(pulse), mc, eta,
                                   cfg);
  };
  mc_result urc =
      run(urc_pulse(axis3(0, 0, 1), axis3(0, 1, 0), 1.0),
          propagation_config(2048));
  mc_result square =
      run(composite_pulse(composite_kind::square, 1.0), propagation_config(1));
  mc_result corpse =
      run(composite_pulse(composite_kind::corpse, 1.0), propagation_config(1));
  mc_result bb1 =
      run(composite_pulse(composite_kind::bb1, 1.0), propagation_config(1));

  const mc_result& best_composite =
      corpse.mean >= bb1.mean ? corpse : bb1;
  auto sigmas = [](const mc_result& a, const mc_result& b) {
    return (a.mean - b.mean) /
           std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
  };
  double s1 = sigmas(urc, square);
  double s2 = sigmas(square, best_composite);
  double elapsed = seconds_since(t0);

  bool ok = urc.mean > square.mean && square.mean > best_composite.mean &&
            urc.mean >= 0.99 && s1 >= 5.0 && s2 >= 5.0 && elapsed < 60.0;
  report(7, ok, "static-noise gate robustness ordering",
         fmt("F = %.5f (urc) > %.5f (square) > %.5f (best composite), "
             "separations %.1f / %.1f sigma, %.1f s",
             urc.mean, square.mean, best_composite.mean, s1, s2, elapsed));
  note(fmt("corpse %.5f +- %.5f, bb1 %.5f +- %.5f", corpse.mean,
           corpse.stderr_, bb1.mean, bb1.stderr_));
}

// 8. Quantum-memory protection at equal total time: run-averaged fidelity
// over 100 frozen-noise realizations orders the repeated identity above
// XY4 above CPMG by at least three standard errors.
static void check_memory_ordering() {
  auto t0 = std::chrono::steady_clock::now();
  const double tau = 2.0 * M_PI, omega = 1.0, total = 100.0 * M_PI;
  monte_carlo_config mc(100, 97531ULL);

  int r_cpmg = equal_time_repetitions(dd_kind::cpmg, tau, omega, total);
  int r_xy4 = equal_time_repetitions(dd_kind::xy4, tau, omega, total);
  int r_urc = equal_time_repetitions(dd_kind::urc_rep, tau, omega, total);

  mc_result cpmg = memory_run_average(dd_kind::cpmg, r_cpmg, tau, omega, mc,
                                      0.05, propagation_config(1));
  mc_result xy4 = memory_run_average(dd_kind::xy4, r_xy4, tau, omega, mc,
                                     0.05, propagation_config(1));
  mc_result urc = memory_run_average(dd_kind::urc_rep, r_urc, tau, omega, mc,
                                     0.05, propagation_config(2048));

  auto sigmas = [](const mc_result& a, const mc_result& b) {
    return (a.mean - b.mean) /
           std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
  };
  double s1 = sigmas(urc, xy4);
  double s2 = sigmas(xy4, cpmg);
  double elapsed = seconds_since(t0);

  bool ok = urc.mean > xy4.mean && xy4.mean > cpmg.mean && s1 >= 3.0 &&
            s2 >= 3.0 && elapsed < 120.0;
  report(8, ok, "equal-time memory protection ordering",
         fmt("run-mean F = %.5f (urc x%d) > %.5f (xy4 x%d) > %.5f (cpmg x%d), "
             "separations %.1f / %.1f sigma, %.1f s",
             urc.mean, r_urc, xy4.mean, r_xy4, cpmg.mean, r_cpmg, s1, s2,
             elapsed));
}

// 9. Filter functions: exact dc zero, free evolution matches 4 sin^2(wT/2),
// and the driven identity filters low frequencies below the plain rotation.
static void check_filter_functions() {
  std::vector<double> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back(0.005 * k);

  pulse_program urc = urc_pulse(axis3(0, 0, 1), axis3(0, 1, 0), 1.0);
  pulse_program square = composite_pulse(composite_kind::square, 1.0);
  pulse_segment idle;
  idle.duration = 10.0;
  idle.label = "free";
  pulse_program free_pulse("free", {idle}, 1.0);

  filter_result ff_urc = filter_function(urc, grid);
  filter_result ff_square = filter_function(square, grid);
  filter_result ff_free = filter_function(free_pulse, grid);

  bool dc_zero = ff_urc.ff_x[0] == 0.0 && ff_urc.ff_y[0] == 0.0 &&
                 ff_urc.ff_z[0] == 0.0 && ff_square.ff_x[0] == 0.0 &&
                 ff_square.ff_y[0] == 0.0 && ff_square.ff_z[0] == 0.0 &&
                 ff_free.ff_x[0] == 0.0 && ff_free.ff_y[0] == 0.0 &&
                 ff_free.ff_z[0] == 0.0;

  double worst_free = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    double w = grid[k];
    double ref = 4.0 * std::pow(std::sin(w * 10.0 / 2.0), 2);
    worst_free = std::max({worst_free, std::abs(ff_free.ff_x[k] - ref),
                           std::abs(ff_free.ff_y[k] - ref),
                           std::abs(ff_free.ff_z[k] - ref)});
  }

  bool low_band_below = true;
  double worst_margin = 1e300;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (grid[k] <= 0.0 || grid[k] > 0.1 + 1e-12) continue;
    double margin = ff_square.ff_y[k] - ff_urc.ff_y[k];
    worst_margin = std::min(worst_margin, margin);
    if (!(ff_urc.ff_y[k] < ff_square.ff_y[k])) low_band_below = false;
  }

  report(9, dc_zero && worst_free <= 1e-8 && low_band_below,
         "filter-function identities and low-band ordering",
         fmt("dc %s, free-evolution err = %.3g, min margin on (0, 0.1] = %.3g",
             dc_zero ? "exact" : "NONZERO", worst_free, worst_margin));
}

// 10. Second-order fidelity on the drive-aligned noisy rotation: the closed
// form 1 - (eta T)^2/4 holds to 1e-10, and the truncation gap is required
// to shrink by a factor in [6, 10] when eta halves.
static void check_second_order_fidelity() {
  pulse_program square = composite_pulse(composite_kind::square, 1.0);
  const double total = square.total_duration();
  const axis3 y(0, 1, 0);

  double worst_identity = 0.0;
  for (double eta : {0.01, 0.05, 0.12}) {
    double predicted = 1.0 - eta * eta * total * total / 4.0;
    double computed = fidelity_second_order(square, noise_spec(y, eta), 1024);
    worst_identity = std::max(worst_identity, std::abs(computed - predicted));
  }

  auto gap = [&](const axis3& axis, double eta) {
    double exact = exact_square_fidelity(noise_spec(axis, eta));
    double approx = fidelity_second_order(square, noise_spec(axis, eta), 8192);
    return std::abs(exact - approx);
  };
  double ratio_aligned = gap(y, 0.04) / gap(y, 0.02);

  bool ok = worst_identity <= 1e-10 && ratio_aligned >= 6.0 &&
            ratio_aligned <= 10.0;
  report(10, ok, "second-order fidelity closed form and truncation order",
         fmt("identity err = %.3g, gap ratio when eta halves = %.2f "
             "(required within [6, 10])",
             worst_identity, ratio_aligned));
  if (ratio_aligned < 6.0 || ratio_aligned > 10.0) {
    note("the drive-aligned case commutes, so the cubic term of the");
    note("truncation gap vanishes and the gap shrinks quartically");
    note(fmt("(measured factor %.2f, consistent with 16); a tilted noise",
             ratio_aligned));
    axis3 tilted(0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    double ratio_tilted = gap(tilted, 0.04) / gap(tilted, 0.02);
    note(fmt("axis restores the generic cubic shrinkage: factor %.2f",
             ratio_tilted));
  }
}

int main() {
  check_design_identities();
  check_curve_metrics();
  check_curve_moments();
  check_first_moment_cancellation();
  check_open_path_convergence();
  check_quadratic_forms();
  check_gate_robustness();
  check_memory_ordering();
  check_filter_functions();
  check_second_order_fidelity();

  std::printf("%d of 10 checks passed\n", 10 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
