#pragma once

// Unit-sphere geometry: the trigonometric curve families, their moments,
// discrete design checks, and the fixed maps between spheres.
//
// Every curve here is stored as a list of complex components, each a short
// harmonic sum  sum_t c_t exp(i f_t theta)  with theta = 2 pi s.  Real
// coordinates interleave as (Re z1, Im z1, Re z2, Im z2, ...).  Evaluation,
// differentiation, speed and bandwidth all fall out of that one table.

#include "udesign/qmat.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace udesign {

// Unit vector on S^{m-1}, ambient dimension m >= 2.
class sphere_point {
 public:
  explicit sphere_point(Eigen::VectorXd v) : v_(std::move(v)) {
    if (v_.size() < 2)
      throw std::invalid_argument("sphere_point: ambient dimension >= 2 required");
    if (std::abs(v_.norm() - 1.0) > 1e-12)
      throw std::invalid_argument("sphere_point: vector is not unit length");
  }

  const Eigen::VectorXd& vec() const { return v_; }
  Eigen::Index dim() const { return v_.size(); }
  double operator[](Eigen::Index i) const { return v_(i); }

 private:
  Eigen::VectorXd v_;
};

enum class curve_kind {
  xi,
  gamma,
  gamma_tilde,
  xi_prime,
  gamma_prime,
  gamma_tilde_prime,
  xi_phase,
  gamma_phase,
  gamma_tilde_phase,
  harmonic_ladder,  // (cos ktheta, sin ktheta)_{k=1..d} / sqrt(d) on S^{2d-1}
};

inline bool kind_takes_phase(curve_kind k) {
  return k == curve_kind::xi_phase || k == curve_kind::gamma_phase ||
         k == curve_kind::gamma_tilde_phase;
}

struct curve_spec {
  curve_kind kind = curve_kind::xi;
  double phase = 0.0;  // used by the *_phase kinds, must lie in [0, pi]
  int half_dim = 1;    // used by harmonic_ladder: ambient dimension is 2*half_dim

  curve_spec(curve_kind k = curve_kind::xi, double ph = 0.0, int hd = 1)
      : kind(k), phase(ph), half_dim(hd) {
    if (kind_takes_phase(kind) && (phase < 0.0 || phase > M_PI))
      throw std::invalid_argument("curve_spec: phase must lie in [0, pi]");
    if (kind == curve_kind::harmonic_ladder && half_dim < 1)
      throw std::invalid_argument("curve_spec: half_dim must be >= 1");
  }
};

struct discrete_design {
  std::vector<sphere_point> points;
  int strength = 1;
};

namespace detail {

struct harmonic_term {
  complexd coeff;
  double freq;  // in units of theta = 2 pi s
};

struct harmonic_curve {
  std::vector<std::vector<harmonic_term>> comps;

  int ambient_dim() const { return 2 * static_cast<int>(comps.size()); }

  cvec eval_complex(double theta) const {
    cvec z(comps.size());
    for (std::size_t j = 0; j < comps.size(); ++j) {
      complexd acc = 0.0;
      for (const auto& t : comps[j]) acc += t.coeff * std::exp(complexd(0, t.freq * theta));
      z(static_cast<Eigen::Index>(j)) = acc;
    }
    return z;
  }

  // d/ds of the complex components (theta = 2 pi s).
  cvec deriv_complex(double theta) const {
    cvec z(comps.size());
    for (std::size_t j = 0; j < comps.size(); ++j) {
      complexd acc = 0.0;
      for (const auto& t : comps[j])
        acc += t.coeff * complexd(0, 2.0 * M_PI * t.freq) *
               std::exp(complexd(0, t.freq * theta));
      z(static_cast<Eigen::Index>(j)) = acc;
    }
    return z;
  }

  double speed(double s) const { return deriv_complex(2.0 * M_PI * s).norm(); }

  double max_freq() const {
    double f = 0.0;
    for (const auto& comp : comps)
      for (const auto& t : comp) f = std::max(f, std::abs(t.freq));
    return f;
  }

  // True when all frequencies are integers, so the curve closes at s = 1.
  bool closed() const {
    for (const auto& comp : comps)
      for (const auto& t : comp)
        if (std::abs(t.freq - std::round(t.freq)) > 1e-12) return false;
    return true;
  }
};

inline harmonic_curve build_curve(const curve_spec& spec) {
  const double r2 = 1.0 / std::sqrt(2.0);
  const complexd i(0, 1);
  harmonic_curve c;
  // The *_prime kinds are the phase-0 members of the matching phase family.
  double ph = kind_takes_phase(spec.kind) ? spec.phase : 0.0;
  const complexd e = std::exp(-i * ph);
  switch (spec.kind) {
    case curve_kind::xi:
      c.comps = {{{r2, 1.0}}, {{r2, 2.0}}};
      break;
    case curve_kind::gamma:
      c.comps = {{{r2, 1.0}}, {{r2, -3.0}}};
      break;
    case curve_kind::gamma_tilde:
      c.comps = {{{r2, 0.5}}, {{r2, -1.5}}};
      break;
    case curve_kind::xi_prime:
    case curve_kind::xi_phase:
      c.comps = {{{0.5, 2.0}, {0.5, 1.0}},
                 {{0.5 * i * e, 2.0}, {-0.5 * i * e, 1.0}}};
      break;
    case curve_kind::gamma_prime:
    case curve_kind::gamma_phase:
      c.comps = {{{0.5, 1.0}, {0.5, -3.0}},
                 {{-0.5 * i * e, 1.0}, {0.5 * i * e, -3.0}}};
      break;
    case curve_kind::gamma_tilde_prime:
    case curve_kind::gamma_tilde_phase:
      c.comps = {{{0.5, 0.5}, {0.5, -1.5}},
                 {{-0.5 * i * e, 0.5}, {0.5 * i * e, -1.5}}};
      break;
    case curve_kind::harmonic_ladder: {
      const double rd = 1.0 / std::sqrt(static_cast<double>(spec.half_dim));
      c.comps.resize(spec.half_dim);
      for (int k = 1; k <= spec.half_dim; ++k)
        c.comps[k - 1] = {{rd, static_cast<double>(k)}};
      break;
    }
  }
  // All tabulated curves traverse at constant speed; guard against edits
  // that would silently break the uniform-s sampling assumption.
  double lo = c.speed(0.0), hi = lo;
  for (int k = 1; k <= 64; ++k) {
    double v = c.speed(k / 64.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if ((hi - lo) > 1e-9 * hi)
    throw std::logic_error("build_curve: speed is not constant in s");
  return c;
}

inline Eigen::VectorXd interleave(const cvec& z) {
  Eigen::VectorXd x(2 * z.size());
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    x(2 * j) = z(j).real();
    x(2 * j + 1) = z(j).imag();
  }
  return x;
}

inline double check_domain_s(double s) {
  if (s < 0.0 || s > 1.0)
    throw std::domain_error("curve parameter s must lie in [0, 1]");
  return s;
}

// Adaptive Simpson quadrature with an absolute tolerance per subinterval.
template <typename F>
double adaptive_simpson(const F& f, double a, double b, double fa, double fm,
                        double fb, double whole, double tol, int depth) {
  double m = (a + b) / 2.0;
  double lm = (a + m) / 2.0, rm = (m + b) / 2.0;
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

inline int curve_ambient_dim(const curve_spec& spec) {
  return detail::build_curve(spec).ambient_dim();
}

inline bool curve_is_closed(const curve_spec& spec) {
  return detail::build_curve(spec).closed();
}

// Complex components (z_1, ..., z_{m/2}) of the curve at parameter s.
inline cvec eval_curve_complex(const curve_spec& spec, double s) {
  detail::check_domain_s(s);
  return detail::build_curve(spec).eval_complex(2.0 * M_PI * s);
}

inline sphere_point eval_curve(const curve_spec& spec, double s) {
  return sphere_point(detail::interleave(eval_curve_complex(spec, s)));
}

// Length of the full sweep s in [0, 1], by adaptive quadrature of the
// analytic speed to a relative tolerance of 1e-9.
inline double arc_length(const curve_spec& spec) {
  detail::harmonic_curve c = detail::build_curve(spec);
  auto f = [&c](double s) { return c.speed(s); };
  double fa = f(0.0), fm = f(0.5), fb = f(1.0);
  double whole = (fa + 4.0 * fm + fb) / 6.0;
  return detail::adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, whole,
                                  1e-9 * std::abs(whole), 40);
}

struct moment_result {
  Eigen::VectorXd m1;
  Eigen::MatrixXd m2;
  int num_samples = 0;
  bool undersampled = false;
};

// First and second moments of a weighted point set; weights default uniform.
inline moment_result point_moments(const std::vector<sphere_point>& pts,
                                   const std::vector<double>& weights = {}) {
  if (pts.empty()) throw std::invalid_argument("point_moments: empty point set");
  if (!weights.empty() && weights.size() != pts.size())
    throw std::invalid_argument("point_moments: weight count mismatch");
  const Eigen::Index m = pts.front().dim();
  moment_result r;
  r.m1 = Eigen::VectorXd::Zero(m);
  r.m2 = Eigen::MatrixXd::Zero(m, m);
  r.num_samples = static_cast<int>(pts.size());
  double wsum = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].dim() != m)
      throw std::invalid_argument("point_moments: mixed ambient dimensions");
    double w = weights.empty() ? 1.0 : weights[k];
    if (w < 0.0) throw std::invalid_argument("point_moments: negative weight");
    wsum += w;
    r.m1 += w * pts[k].vec();
    r.m2 += w * (pts[k].vec() * pts[k].vec().transpose());
  }
  if (wsum <= 0.0) throw std::invalid_argument("point_moments: zero total weight");
  r.m1 /= wsum;
  r.m2 /= wsum;
  return r;
}

inline int default_num_samples(const curve_spec& spec) {
  if (spec.kind == curve_kind::harmonic_ladder)
    return 8 * spec.half_dim * spec.half_dim;
  return 128;
}

// Moments of the curve sampled at s_k = k/N, k = 0..N-1.  If N is below
// twice the trigonometric bandwidth of the quadratic integrand the result
// carries a warning flag instead of throwing.
inline moment_result curve_moments(const curve_spec& spec, int num_samples = 0) {
  if (num_samples == 0) num_samples = default_num_samples(spec);
  if (num_samples < 1)
    throw std::invalid_argument("curve_moments: need at least one sample");
  detail::harmonic_curve c = detail::build_curve(spec);
  std::vector<sphere_point> pts;
  pts.reserve(num_samples);
  for (int k = 0; k < num_samples; ++k)
    pts.emplace_back(detail::interleave(
        c.eval_complex(2.0 * M_PI * static_cast<double>(k) / num_samples)));
  moment_result r = point_moments(pts);
  const double integrand_bandwidth = 2.0 * c.max_freq();
  r.undersampled = num_samples < 2.0 * integrand_bandwidth;
  return r;
}

struct design_check {
  bool ok = false;
  double m1_residual = 0.0;  // Euclidean norm of the first moment
  double m2_residual = 0.0;  // max-abs deviation of m2 from I/m (strength 2)
};

inline design_check check_moments(const moment_result& mom, int strength,
                                  double tol) {
  if (strength != 1 && strength != 2)
    throw std::invalid_argument("design strength must be 1 or 2");
  design_check out;
  out.m1_residual = mom.m1.norm();
  if (strength == 2) {
    const Eigen::Index m = mom.m1.size();
    Eigen::MatrixXd target =
        Eigen::MatrixXd::Identity(m, m) / static_cast<double>(m);
    out.m2_residual = (mom.m2 - target).cwiseAbs().maxCoeff();
  }
  out.ok = out.m1_residual <= tol && out.m2_residual <= tol;
  return out;
}

inline design_check is_spherical_design(const std::vector<sphere_point>& pts,
                                        int strength, double tol,
                                        const std::vector<double>& weights = {}) {
  return check_moments(point_moments(pts, weights), strength, tol);
}

inline design_check is_spherical_design(const curve_spec& spec, int strength,
                                        double tol, int num_samples = 0) {
  return check_moments(curve_moments(spec, num_samples), strength, tol);
}

// Vertices of the regular simplex inscribed in S^{m-1}: m+1 unit points with
// pairwise inner product -1/m and centroid at the origin.
inline discrete_design simplex_vertices(int ambient_dim) {
  if (ambient_dim < 2)
    throw std::invalid_argument("simplex_vertices: ambient dimension >= 2 required");
  // Build recursively as raw vectors: the 1-sphere case is {+1, -1}, and each
  // step places one vertex at e_1 and shrinks the lower simplex into the
  // orthogonal complement.
  std::vector<Eigen::VectorXd> verts = {Eigen::VectorXd::Constant(1, 1.0),
                                        Eigen::VectorXd::Constant(1, -1.0)};
  for (int m = 2; m <= ambient_dim; ++m) {
    std::vector<Eigen::VectorXd> next;
    next.reserve(verts.size() + 1);
    Eigen::VectorXd top = Eigen::VectorXd::Zero(m);
    top(0) = 1.0;
    next.push_back(top);
    const double shrink = std::sqrt(1.0 - 1.0 / (static_cast<double>(m) * m));
    for (const auto& v : verts) {
      Eigen::VectorXd w(m);
      w(0) = -1.0 / m;
      w.tail(m - 1) = shrink * v;
      next.push_back(w);
    }
    verts = std::move(next);
  }
  discrete_design d;
  d.strength = 2;
  for (const auto& v : verts) d.points.emplace_back(v);
  return d;
}

// S^3 -> S^2, (z1, z2) -> (|z1|^2 - |z2|^2, 2 Re(z1 conj z2), 2 Im(z1 conj z2)).
inline sphere_point hopf_map(const sphere_point& p) {
  if (p.dim() != 4) throw std::invalid_argument("hopf_map: S^3 point required");
  complexd z1(p[0], p[1]), z2(p[2], p[3]);
  complexd cross = 2.0 * z1 * std::conj(z2);
  Eigen::VectorXd out(3);
  out << std::norm(z1) - std::norm(z2), cross.real(), cross.imag();
  return sphere_point(out);
}

// The flat torus embedded in S^3.
inline sphere_point clifford_torus(double theta, double phi) {
  Eigen::VectorXd v(4);
  v << std::cos(theta), std::sin(theta), std::cos(phi), std::sin(phi);
  return sphere_point(v / std::sqrt(2.0));
}

// S^3 minus the pole x4 = -1, projected to R^3 from that pole.
inline Eigen::Vector3d stereographic_project(const sphere_point& p) {
  if (p.dim() != 4)
    throw std::invalid_argument("stereographic_project: S^3 point required");
  const double denom = 1.0 + p[3];
  if (std::abs(denom) < 1e-12)
    throw std::domain_error("stereographic_project: point at the projection pole");
  return Eigen::Vector3d(p[0], p[1], p[2]) / denom;
}

enum class fixed_rotation {
  plane_mix,     // couples the (1,3) and (2,4) coordinate pairs
  swap_rotate,   // exchanges axes 2 and 3 with a phase-angle rotation
  reflect_last,  // negates the fourth coordinate
};

inline Eigen::Matrix4d fixed_rotation_matrix(fixed_rotation which,
                                             double phase = 0.0) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  switch (which) {
    case fixed_rotation::plane_mix: {
      const double r2 = 1.0 / std::sqrt(2.0);
      m << 1, 0, 1, 0,
           0, 1, 0, 1,
           0, 1, 0, -1,
           -1, 0, 1, 0;
      m *= r2;
      break;
    }
    case fixed_rotation::swap_rotate: {
      const double c = std::cos(phase), s = std::sin(phase);
      m(0, 0) = 1.0;
      m(1, 2) = 1.0;
      m(2, 1) = c;
      m(2, 3) = -s;
      m(3, 1) = s;
      m(3, 3) = c;
      break;
    }
    case fixed_rotation::reflect_last:
      m = Eigen::Matrix4d::Identity();
      m(3, 3) = -1.0;
      break;
  }
  if ((m.transpose() * m - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() >
      1e-14)
    throw std::logic_error("fixed_rotation_matrix: matrix is not orthogonal");
  return m;
}

inline sphere_point apply_fixed_rotation(fixed_rotation which,
                                         const sphere_point& p,
                                         double phase = 0.0) {
  if (p.dim() != 4)
    throw std::invalid_argument("apply_fixed_rotation: S^3 point required");
  return sphere_point(fixed_rotation_matrix(which, phase) * p.vec());
}

}  // namespace udesign
