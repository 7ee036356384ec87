#pragma once

// Single-qubit pulse synthesis and noisy propagation: inverse-engineered
// robust pulses, composite pulses, dynamical-decoupling sequences, fidelity
// metrics, Monte Carlo noise averaging, and filter functions.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "udesign/design.hpp"
#include "udesign/qmat.hpp"
#include "udesign/upath.hpp"

namespace udesign {

struct pulse_segment {
  double duration = 0.0;
  Eigen::Vector3d u = Eigen::Vector3d::Zero();
  // Set for time-varying drives; receives local time in [0, duration].
  std::function<Eigen::Vector3d(double)> analytic;
  std::string label = "drive";

  bool is_constant() const { return !analytic; }
  Eigen::Vector3d drive(double local_t) const {
    return analytic ? analytic(local_t) : u;
  }
};

class pulse_program {
 public:
  pulse_program(std::string kind, std::vector<pulse_segment> segments,
                double omega_max)
      : kind_(std::move(kind)),
        segments_(std::move(segments)),
        omega_max_(omega_max) {
    if (omega_max_ <= 0.0)
      throw std::invalid_argument("Rabi bound must be positive");
    if (segments_.empty())
      throw std::invalid_argument("pulse needs at least one segment");
    total_ = 0.0;
    for (const auto& seg : segments_) {
      if (!(seg.duration > 0.0))
        throw std::invalid_argument("segment durations must be positive");
      total_ += seg.duration;
      if (seg.is_constant()) {
        check_amplitude(seg.u);
      } else {
        for (int j = 0; j <= 256; ++j)
          check_amplitude(seg.analytic(seg.duration * j / 256.0));
      }
    }
  }

  const std::string& kind() const { return kind_; }
  const std::vector<pulse_segment>& segments() const { return segments_; }
  double omega_max() const { return omega_max_; }
  double total_duration() const { return total_; }

  Eigen::Vector3d drive_at(double t) const {
    if (t < -1e-12 || t > total_ + 1e-12)
      throw std::domain_error("time outside [0, T]");
    double start = 0.0;
    for (std::size_t j = 0; j < segments_.size(); ++j) {
      double end = start + segments_[j].duration;
      if (t <= end || j + 1 == segments_.size())
        return segments_[j].drive(std::clamp(t - start, 0.0,
                                             segments_[j].duration));
      start = end;
    }
    return segments_.back().u;
  }

 private:
  void check_amplitude(const Eigen::Vector3d& u) const {
    if (u.norm() > omega_max_ + 1e-9)
      throw std::invalid_argument("drive amplitude exceeds the Rabi bound");
  }

  std::string kind_;
  std::vector<pulse_segment> segments_;
  double omega_max_;
  double total_ = 0.0;
};

struct noise_spec {
  axis3 direction;
  double strength;

  noise_spec(axis3 v, double eta) : direction(v), strength(eta) {
    if (strength < 0.0) throw std::invalid_argument("noise strength < 0");
  }
  static noise_spec none() { return noise_spec(axis3(0, 0, 1), 0.0); }
};

enum class eta_mode { fixed_value, uniform_up_to };

struct monte_carlo_config {
  int trials = 1;
  std::uint64_t seed = 0;
  eta_mode mode = eta_mode::fixed_value;

  monte_carlo_config(int n, std::uint64_t s,
                     eta_mode m = eta_mode::fixed_value)
      : trials(n), seed(s), mode(m) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  }
};

struct propagation_config {
  int steps_per_segment = 1;

  explicit propagation_config(int steps) : steps_per_segment(steps) {
    if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  }
};

enum class composite_kind { square, corpse, bb1 };
enum class dd_kind { cpmg, xy4, urc_rep };

// ---------------------------------------------------------------------------
// Pulse synthesis

// Robust identity pulse driving U(t) = R_n1(theta) R_n2(2 theta) through a
// full sweep: u = (dtheta/dt) [n1 + 2 cos(theta) n2 + 2 sin(theta) n1 x n2].
// The linear sweep saturates |u| = omega for T = 2 pi sqrt(5) / omega.
inline pulse_program urc_pulse(const axis3& n1, const axis3& n2, double omega,
                               const reparam_pl& theta_profile,
                               double total_duration) {
  detail::require_perpendicular(n1, n2, "urc_pulse");
  if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
  if (total_duration <= 0.0)
    throw std::invalid_argument("duration must be positive");
  const auto& knots = theta_profile.knots();
  if (std::abs(knots.front().second) > 1e-12 ||
      std::abs(knots.back().second - 2.0 * M_PI) > 1e-9)
    throw std::invalid_argument("sweep must run from 0 to 2 pi");

  Eigen::Vector3d a = n1.vec(), b = n2.vec();
  Eigen::Vector3d c = a.cross(b);
  std::vector<pulse_segment> segs;
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    double ds = knots[j + 1].first - knots[j].first;
    double slope = (knots[j + 1].second - knots[j].second) / ds;
    double rate = slope / total_duration;
    if (std::abs(rate) > omega / std::sqrt(5.0) + 1e-9)
      throw std::invalid_argument("sweep rate exceeds the Rabi bound");
    double theta0 = knots[j].second;
    pulse_segment seg;
    seg.duration = ds * total_duration;
    seg.label = "urc";
    seg.analytic = [a, b, c, theta0, rate](double t) {
      double theta = theta0 + rate * t;
      return Eigen::Vector3d(rate *
                             (a + 2.0 * std::cos(theta) * b +
                              2.0 * std::sin(theta) * c));
    };
    segs.push_back(std::move(seg));
  }
  return pulse_program("urc", std::move(segs), omega);
}

inline pulse_program urc_pulse(const axis3& n1, const axis3& n2,
                               double omega) {
  return urc_pulse(n1, n2, omega, reparam_pl({{0.0, 0.0}, {1.0, 2.0 * M_PI}}),
                   2.0 * M_PI * std::sqrt(5.0) / omega);
}

namespace ctrl_detail {

inline pulse_segment plane_rotation(double angle, double phase, double omega,
                                    const std::string& label) {
  pulse_segment seg;
  seg.duration = angle / omega;
  seg.u = omega * Eigen::Vector3d(std::cos(phase), std::sin(phase), 0.0);
  seg.label = label;
  return seg;
}

inline pulse_segment free_evolution(double tau) {
  pulse_segment seg;
  seg.duration = tau;
  seg.u.setZero();
  seg.label = "free";
  return seg;
}

}  // namespace ctrl_detail

// Rectangular 2 pi rotation and its two classic error-compensating
// expansions. Phases are in-plane azimuths; each segment runs at amplitude
// omega for (angle / omega).
inline pulse_program composite_pulse(composite_kind kind, double omega) {
  using ctrl_detail::plane_rotation;
  if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
  std::vector<pulse_segment> segs;
  std::string name;
  switch (kind) {
    case composite_kind::square:
      name = "square";
      segs.push_back(plane_rotation(2 * M_PI, M_PI / 2, omega, "pulse"));
      break;
    case composite_kind::corpse:
      name = "corpse";
      segs.push_back(plane_rotation(3 * M_PI, M_PI / 2, omega, "pulse"));
      segs.push_back(plane_rotation(2 * M_PI, 3 * M_PI / 2, omega, "pulse"));
      segs.push_back(plane_rotation(M_PI, M_PI / 2, omega, "pulse"));
      break;
    case composite_kind::bb1:
      name = "bb1";
      // The quoted third phase is 5 pi / 2; only its direction matters.
      segs.push_back(plane_rotation(M_PI, 7 * M_PI / 6, omega, "pulse"));
      segs.push_back(plane_rotation(2 * M_PI, M_PI / 2, omega, "pulse"));
      segs.push_back(plane_rotation(M_PI, 7 * M_PI / 6, omega, "pulse"));
      segs.push_back(plane_rotation(2 * M_PI, M_PI / 2, omega, "pulse"));
      break;
  }
  return pulse_program(name, std::move(segs), omega);
}

inline double dd_cycle_duration(dd_kind kind, double tau, double omega) {
  switch (kind) {
    case dd_kind::cpmg:
      return 4.0 * tau + 2.0 * M_PI / omega;
    case dd_kind::xy4:
      return 8.0 * tau + 4.0 * M_PI / omega;
    case dd_kind::urc_rep:
      return 2.0 * M_PI * std::sqrt(5.0) / omega;
  }
  throw std::logic_error("unknown sequence kind");
}

// One decoupling cycle, optionally repeated. Pi pulses are finite-width
// rectangles of duration pi/omega at full amplitude; free segments idle.
inline pulse_program dd_sequence(dd_kind kind, double tau, double omega,
                                 int repetitions = 1) {
  using ctrl_detail::free_evolution;
  using ctrl_detail::plane_rotation;
  if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
  if (tau < 0.0) throw std::invalid_argument("tau must be >= 0");
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");

  std::vector<pulse_segment> cycle;
  std::string name;
  const double py = M_PI / 2;  // y-axis azimuth
  const double px = 0.0;
  switch (kind) {
    case dd_kind::cpmg:
      name = "cpmg";
      cycle.push_back(free_evolution(tau));
      cycle.push_back(plane_rotation(M_PI, py, omega, "pulse"));
      cycle.push_back(free_evolution(2 * tau));
      cycle.push_back(plane_rotation(M_PI, py, omega, "pulse"));
      cycle.push_back(free_evolution(tau));
      break;
    case dd_kind::xy4:
      name = "xy4";
      cycle.push_back(free_evolution(tau));
      cycle.push_back(plane_rotation(M_PI, py, omega, "pulse"));
      cycle.push_back(free_evolution(2 * tau));
      cycle.push_back(plane_rotation(M_PI, px, omega, "pulse"));
      cycle.push_back(free_evolution(2 * tau));
      cycle.push_back(plane_rotation(M_PI, py, omega, "pulse"));
      cycle.push_back(free_evolution(2 * tau));
      cycle.push_back(plane_rotation(M_PI, px, omega, "pulse"));
      cycle.push_back(free_evolution(tau));
      break;
    case dd_kind::urc_rep: {
      name = "urc-rep";
      pulse_program one = urc_pulse(axis3(0, 0, 1), axis3(0, 1, 0), omega);
      cycle = one.segments();
      break;
    }
  }
  // Zero-length free segments (tau = 0) would violate the duration
  // invariant; drop them.
  std::vector<pulse_segment> segs;
  for (int r = 0; r < repetitions; ++r)
    for (const auto& seg : cycle)
      if (seg.duration > 0.0) segs.push_back(seg);
  return pulse_program(name, std::move(segs), omega);
}

inline int count_pulse_segments(const pulse_program& p) {
  int n = 0;
  for (const auto& seg : p.segments())
    if (seg.label == "pulse") ++n;
  return n;
}

// Repetition count bringing kind closest to the requested total time.
inline int equal_time_repetitions(dd_kind kind, double tau, double omega,
                                  double total_time) {
  double cycle = dd_cycle_duration(kind, tau, omega);
  int r = static_cast<int>(std::lround(total_time / cycle));
  return std::max(1, r);
}

// ---------------------------------------------------------------------------
// Propagation

inline hermitian_op hamiltonian_at(const pulse_program& pulse,
                                   const noise_spec& noise, double t) {
  Eigen::Vector3d u = pulse.drive_at(t);
  Eigen::Vector3d c = 0.5 * u + 0.5 * noise.strength * noise.direction.vec();
  return bloch_compose(0.0, c);
}

namespace ctrl_detail {

// Exact exponential exp(-i (c . sigma) h) for a real coefficient vector,
// written entrywise to keep the propagation loop allocation-free.
inline Eigen::Matrix2cd spin_step(const Eigen::Vector3d& c, double h) {
  Eigen::Matrix2cd out;
  double r = c.norm();
  if (r * h == 0.0) {
    out.setIdentity();
    return out;
  }
  double angle = r * h;
  double ca = std::cos(angle);
  double scale = std::sin(angle) / r;
  double s1 = scale * c(0), s2 = scale * c(1), s3 = scale * c(2);
  out(0, 0) = complexd(ca, -s3);
  out(0, 1) = complexd(-s2, -s1);
  out(1, 0) = complexd(s2, -s1);
  out(1, 1) = complexd(ca, s3);
  return out;
}

// Column-wise Gram-Schmidt; counters the slow unitarity drift of very long
// step products.
inline void reorthonormalize(Eigen::Matrix2cd& u) {
  u.col(0) /= u.col(0).norm();
  u.col(1) -= (u.col(0).adjoint() * u.col(1))(0, 0) * u.col(0);
  u.col(1) /= u.col(1).norm();
}

inline Eigen::Vector3d coeff_at(const pulse_segment& seg,
                                const noise_spec& noise, double local_t) {
  return 0.5 * seg.drive(local_t) +
         0.5 * noise.strength * noise.direction.vec();
}

inline int auto_steps(const pulse_segment& seg, const noise_spec& noise,
                      double omega) {
  if (seg.is_constant()) return 1;
  double rotation = (omega + noise.strength) * seg.duration;
  return std::max(1, static_cast<int>(std::ceil(64.0 * rotation / M_PI)));
}

inline cmat propagate_raw(const pulse_program& pulse, const noise_spec& noise,
                          const std::vector<int>& steps) {
  Eigen::Matrix2cd u = Eigen::Matrix2cd::Identity();
  const auto& segs = pulse.segments();
  long since_renorm = 0;
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const pulse_segment& seg = segs[j];
    int n = steps[j];
    double h = seg.duration / n;
    for (int k = 0; k < n; ++k) {
      Eigen::Vector3d c = coeff_at(seg, noise, (k + 0.5) * h);
      u = (spin_step(c, h) * u).eval();
      if (++since_renorm >= 4096) {
        reorthonormalize(u);
        since_renorm = 0;
      }
    }
  }
  if (since_renorm >= 2048) reorthonormalize(u);
  return cmat(u);
}

}  // namespace ctrl_detail

// Midpoint-sampled product of exact segment exponentials at a fixed step
// count per segment. Constant segments are exact with a single step.
inline unitary_op propagate(const pulse_program& pulse,
                            const noise_spec& noise,
                            const propagation_config& cfg) {
  std::vector<int> steps(pulse.segments().size(), cfg.steps_per_segment);
  return unitary_op(ctrl_detail::propagate_raw(pulse, noise, steps), true);
}

// Adaptive variant: start from a fixed angular density and double the
// time-varying segments until the result settles below 1e-8.
inline unitary_op propagate(const pulse_program& pulse,
                            const noise_spec& noise) {
  const auto& segs = pulse.segments();
  std::vector<int> steps(segs.size());
  bool any_analytic = false;
  for (std::size_t j = 0; j < segs.size(); ++j) {
    steps[j] = ctrl_detail::auto_steps(segs[j], noise, pulse.omega_max());
    any_analytic = any_analytic || !segs[j].is_constant();
  }
  cmat u = ctrl_detail::propagate_raw(pulse, noise, steps);
  if (!any_analytic) return unitary_op(u, true);
  for (int iter = 0; iter < 16; ++iter) {
    std::vector<int> finer = steps;
    for (std::size_t j = 0; j < segs.size(); ++j)
      if (!segs[j].is_constant()) finer[j] *= 2;
    cmat v = ctrl_detail::propagate_raw(pulse, noise, finer);
    double diff = (u - v).cwiseAbs().maxCoeff();
    u = v;
    steps = finer;
    if (diff < 1e-8) break;
  }
  return unitary_op(u, true);
}

inline unitary_op noise_free_target(const pulse_program& pulse) {
  return propagate(pulse, noise_spec::none());
}

inline unitary_op propagate(const pulse_program& pulse,
                            const noise_spec& noise,
                            const std::optional<propagation_config>& cfg) {
  return cfg ? propagate(pulse, noise, *cfg) : propagate(pulse, noise);
}

inline double gate_fidelity(const unitary_op& target,
                            const unitary_op& actual) {
  if (target.dim() != actual.dim())
    throw std::invalid_argument("dimension mismatch");
  double tr = overlap(target, actual);
  double d = static_cast<double>(target.dim());
  return (tr * tr) / (d * d);
}

namespace ctrl_detail {

struct trajectory_sample {
  double t_mid;
  double h;
  cmat u_mid;  // noise-free propagator at the step midpoint
};

// Noise-free propagator sampled at step midpoints. total_samples == 0 uses
// a per-segment density tied to the accumulated rotation angle (idle
// segments need a single sample); otherwise samples are spread over
// segments in proportion to duration.
inline std::vector<trajectory_sample> noise_free_trajectory(
    const pulse_program& pulse, int total_samples = 0) {
  const auto& segs = pulse.segments();
  const noise_spec off = noise_spec::none();
  std::vector<int> steps(segs.size());
  for (std::size_t j = 0; j < segs.size(); ++j) {
    if (total_samples <= 0) {
      double rate =
          segs[j].is_constant() ? segs[j].u.norm() : pulse.omega_max();
      double rotation = rate * segs[j].duration;
      steps[j] =
          std::max(1, static_cast<int>(std::ceil(256.0 * rotation / M_PI)));
    } else {
      double share = segs[j].duration / pulse.total_duration();
      steps[j] = std::max(
          1, static_cast<int>(std::lround(share * total_samples)));
    }
  }
  std::vector<trajectory_sample> out;
  cmat u = cmat::Identity(2, 2);
  double start = 0.0;
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const pulse_segment& seg = segs[j];
    double h = seg.duration / steps[j];
    for (int k = 0; k < steps[j]; ++k) {
      Eigen::Vector3d c = coeff_at(seg, off, (k + 0.5) * h);
      cmat half = spin_step(c, 0.5 * h);
      cmat mid = half * u;
      out.push_back({start + (k + 0.5) * h, h, mid});
      u = half * mid;
    }
    start += seg.duration;
  }
  return out;
}

}  // namespace ctrl_detail

// Time integral of U0†(t) V U0(t) over the noise-free evolution, by
// midpoint quadrature with n samples.
inline cmat time_first_moment(const pulse_program& pulse, const cmat& v,
                              int n) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  if (v.rows() != 2 || v.cols() != 2)
    throw std::invalid_argument("operator must be 2x2");
  cmat acc = cmat::Zero(2, 2);
  for (const auto& s : ctrl_detail::noise_free_trajectory(pulse, n))
    acc += s.h * (s.u_mid.adjoint() * v * s.u_mid);
  return acc;
}

// Second-order fidelity estimate 1 - Tr(M^2)/d with M the integrated
// first moment of the noise operator along the noise-free evolution.
inline double fidelity_second_order(const pulse_program& pulse,
                                    const noise_spec& noise, int n) {
  cmat v = 0.5 * noise.strength *
           (noise.direction.x() * pauli_x() + noise.direction.y() * pauli_y() +
            noise.direction.z() * pauli_z());
  cmat m = time_first_moment(pulse, v, n);
  double correction = (m * m).trace().real() / 2.0;
  return 1.0 - correction;
}

// ---------------------------------------------------------------------------
// Monte Carlo noise averaging

namespace ctrl_detail {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 trial_rng(std::uint64_t seed, int trial) {
  return std::mt19937_64(mix64(seed ^ mix64(static_cast<std::uint64_t>(trial) + 1)));
}

inline int worker_count(int trials) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("UDESIGN_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::min(n, trials);
}

// Evaluates work(trial) for every trial on a small pool; results land in a
// vector indexed by trial so the reduction never depends on thread timing.
inline std::vector<double> run_trials(
    int trials, const std::function<double(int)>& work) {
  std::vector<double> out(trials, 0.0);
  int workers = worker_count(trials);
  if (workers <= 1) {
    for (int t = 0; t < trials; ++t) out[t] = work(t);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&]() {
      for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
        out[t] = work(t);
    });
  for (auto& th : pool) th.join();
  return out;
}

struct mean_stderr {
  double mean;
  double stderr_;
};

inline mean_stderr reduce(std::vector<double> values) {
  std::vector<double> terms = values;
  double mean = detail::pairwise_sum(terms) / values.size();
  if (values.size() == 1) return {mean, 0.0};
  std::vector<double> sq(values.size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    double d = values[j] - mean;
    sq[j] = d * d;
  }
  double var = detail::pairwise_sum(sq) / (values.size() - 1.0);
  return {mean, std::sqrt(var / values.size())};
}

}  // namespace ctrl_detail

// Uniform direction on the sphere from a normalized 3-vector of Gaussians
// (generated by an explicit Box-Muller transform for cross-platform
// reproducibility).
inline axis3 sample_noise_direction(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::Vector3d g;
  do {
    double u1 = unit(rng), u2 = unit(rng), u3 = unit(rng), u4 = unit(rng);
    double r1 = std::sqrt(-2.0 * std::log(1.0 - u1));
    double r2 = std::sqrt(-2.0 * std::log(1.0 - u3));
    g(0) = r1 * std::cos(2.0 * M_PI * u2);
    g(1) = r1 * std::sin(2.0 * M_PI * u2);
    g(2) = r2 * std::cos(2.0 * M_PI * u4);
  } while (g.norm() < 1e-8);
  return axis3(g.normalized());
}

struct mc_result {
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Mean gate fidelity over seeded random noise directions. Each trial uses
// its own RNG stream keyed by (seed, trial), so the result is independent of
// scheduling and reproducible bit-for-bit.
inline mc_result noise_averaged_fidelity(
    const pulse_program& pulse, const unitary_op& target,
    const monte_carlo_config& mc, double eta,
    const std::optional<propagation_config>& cfg = std::nullopt) {
  auto work = [&](int trial) {
    std::mt19937_64 rng = ctrl_detail::trial_rng(mc.seed, trial);
    axis3 v = sample_noise_direction(rng);
    double strength = eta;
    if (mc.mode == eta_mode::uniform_up_to) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      strength = eta * unit(rng);
    }
    unitary_op u = propagate(pulse, noise_spec(v, strength), cfg);
    return gate_fidelity(target, u);
  };
  auto stats = ctrl_detail::reduce(ctrl_detail::run_trials(mc.trials, work));
  return {stats.mean, stats.stderr_};
}

struct memory_point {
  int repetition = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Identity-memory fidelity after r = 1..repetitions cycles of a decoupling
// sequence. Noise direction and strength (uniform in [0, eta_max]) are
// frozen per realization; the cycle propagator is raised to matrix powers.
inline std::vector<memory_point> memory_decay(
    dd_kind kind, int repetitions, double tau, double omega,
    const monte_carlo_config& mc, double eta_max,
    const std::optional<propagation_config>& cfg = std::nullopt) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  pulse_program cycle = dd_sequence(kind, tau, omega, 1);
  std::vector<std::vector<double>> per_rep(
      repetitions, std::vector<double>(mc.trials, 0.0));
  auto work = [&](int trial) {
    std::mt19937_64 rng = ctrl_detail::trial_rng(mc.seed, trial);
    axis3 v = sample_noise_direction(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double strength = eta_max * unit(rng);
    cmat uc = propagate(cycle, noise_spec(v, strength), cfg).mat();
    cmat ur = cmat::Identity(2, 2);
    for (int r = 0; r < repetitions; ++r) {
      ur = uc * ur;
      double tr = std::abs(ur.trace());
      per_rep[r][trial] = tr * tr / 4.0;
    }
    return 0.0;
  };
  ctrl_detail::run_trials(mc.trials, work);
  std::vector<memory_point> out;
  out.reserve(repetitions);
  for (int r = 0; r < repetitions; ++r) {
    auto stats = ctrl_detail::reduce(per_rep[r]);
    out.push_back({r + 1, stats.mean, stats.stderr_});
  }
  return out;
}

// Mean fidelity across the whole run (all repetitions), one value per
// realization, then averaged over realizations.
inline mc_result memory_run_average(
    dd_kind kind, int repetitions, double tau, double omega,
    const monte_carlo_config& mc, double eta_max,
    const std::optional<propagation_config>& cfg = std::nullopt) {
  if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
  pulse_program cycle = dd_sequence(kind, tau, omega, 1);
  auto work = [&](int trial) {
    std::mt19937_64 rng = ctrl_detail::trial_rng(mc.seed, trial);
    axis3 v = sample_noise_direction(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double strength = eta_max * unit(rng);
    cmat uc = propagate(cycle, noise_spec(v, strength), cfg).mat();
    cmat ur = cmat::Identity(2, 2);
    double acc = 0.0;
    for (int r = 0; r < repetitions; ++r) {
      ur = uc * ur;
      double tr = std::abs(ur.trace());
      acc += tr * tr / 4.0;
    }
    return acc / repetitions;
  };
  auto stats = ctrl_detail::reduce(ctrl_detail::run_trials(mc.trials, work));
  return {stats.mean, stats.stderr_};
}

// ---------------------------------------------------------------------------
// Filter functions

struct filter_result {
  std::vector<double> omega;
  std::vector<double> ff_x, ff_y, ff_z;
};

// First-order filter function of the noise-free evolution:
//   FF_a(w) = sum_k | -i w  integral R_ak(t) e^{iwt} dt |^2
// with R the Bloch rotation matrix of U0(t). R is held at its step-midpoint
// value while the oscillatory factor is integrated exactly per step, which
// keeps free evolution exact at any step count.
inline filter_result filter_function(const pulse_program& pulse,
                                     const std::vector<double>& omega_grid,
                                     int samples = 0) {
  for (double w : omega_grid)
    if (w < 0.0) throw std::invalid_argument("frequencies must be >= 0");
  auto traj = ctrl_detail::noise_free_trajectory(pulse, samples);

  // Bloch rotation entries per sample: R[a][k](t) = Tr(U† s_a U s_k)/2.
  const cmat sigma[3] = {pauli_x(), pauli_y(), pauli_z()};
  std::vector<Eigen::Matrix3d> rot(traj.size());
  for (std::size_t j = 0; j < traj.size(); ++j) {
    const cmat& u = traj[j].u_mid;
    for (int a = 0; a < 3; ++a) {
      cmat left = u.adjoint() * sigma[a] * u;
      for (int k = 0; k < 3; ++k)
        rot[j](a, k) = 0.5 * (left * sigma[k]).trace().real();
    }
  }

  filter_result out;
  out.omega = omega_grid;
  out.ff_x.resize(omega_grid.size());
  out.ff_y.resize(omega_grid.size());
  out.ff_z.resize(omega_grid.size());
  for (std::size_t wi = 0; wi < omega_grid.size(); ++wi) {
    double w = omega_grid[wi];
    double ff[3] = {0.0, 0.0, 0.0};
    if (w > 0.0) {
      Eigen::Matrix3cd acc = Eigen::Matrix3cd::Zero();
      for (std::size_t j = 0; j < traj.size(); ++j) {
        double t0 = traj[j].t_mid - 0.5 * traj[j].h;
        complexd weight =
            std::exp(complexd(0, w * t0)) *
            (std::exp(complexd(0, w * traj[j].h)) - 1.0) / complexd(0, w);
        acc += weight * rot[j].cast<complexd>();
      }
      for (int a = 0; a < 3; ++a)
        for (int k = 0; k < 3; ++k)
          ff[a] += std::norm(complexd(0, -w) * acc(a, k));
    }
    out.ff_x[wi] = ff[0];
    out.ff_y[wi] = ff[1];
    out.ff_z[wi] = ff[2];
  }
  return out;
}

}  // namespace udesign
