#pragma once

// Continuous paths of unitaries whose uniform samplings average like the
// full group: two-axis and rotating-axis SU(2) paths, open paths steered
// to a target gate, tensor-product qubit paths, coset lifts into SU(d),
// and shift/clock phase-ladder paths.

#include "udesign/qmat.hpp"
#include "udesign/sphere.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace udesign {

enum class path_closure { closed, closed_up_to_phase, open };

// A map s in [0,1] -> U(s); evaluation revalidates unitarity every call.
class unitary_path {
 public:
  unitary_path(std::string kind, int dim, path_closure closure, bool special,
               std::function<cmat(double)> fn)
      : kind_(std::move(kind)),
        dim_(dim),
        closure_(closure),
        special_(special),
        fn_(std::move(fn)) {}

  unitary_op eval(double s) const {
    if (s < 0.0 || s > 1.0)
      throw std::domain_error("unitary_path: parameter outside [0, 1]");
    return unitary_op(fn_(s), special_);
  }

  const std::string& kind() const { return kind_; }
  int dim() const { return dim_; }
  path_closure closure() const { return closure_; }
  bool special() const { return special_; }

 private:
  std::string kind_;
  int dim_;
  path_closure closure_;
  bool special_;
  std::function<cmat(double)> fn_;
};

// U = [[x1 + i x2, x3 + i x4], [-x3 + i x4, x1 - i x2]].
inline unitary_op su2_from_s3(const sphere_point& p) {
  if (p.dim() != 4)
    throw std::invalid_argument("su2_from_s3: S^3 point required");
  cmat u(2, 2);
  u << complexd(p[0], p[1]), complexd(p[2], p[3]),
      complexd(-p[2], p[3]), complexd(p[0], -p[1]);
  return unitary_op(std::move(u), true);
}

inline sphere_point s3_from_su2(const unitary_op& u) {
  if (u.dim() != 2)
    throw std::invalid_argument("s3_from_su2: 2x2 unitary required");
  if (std::abs(u.mat().determinant() - complexd(1, 0)) > det_tol)
    throw std::invalid_argument("s3_from_su2: determinant must be 1");
  Eigen::VectorXd x(4);
  x << u.mat()(0, 0).real(), u.mat()(0, 0).imag(), u.mat()(0, 1).real(),
      u.mat()(0, 1).imag();
  return sphere_point(x);
}

namespace detail {

inline void require_perpendicular(const axis3& a, const axis3& b,
                                  const char* what) {
  if (std::abs(a.vec().dot(b.vec())) > 1e-12)
    throw std::invalid_argument(std::string(what) +
                                ": axes must be perpendicular");
}

inline cmat two_axis_mat(const axis3& n1, const axis3& n2, double theta) {
  return su2_rotation(n1, theta).mat() * su2_rotation(n2, 2.0 * theta).mat();
}

}  // namespace detail

// U(theta) = R_{n1}(theta) R_{n2}(2 theta), theta = 2 pi s.
inline unitary_path two_axis_path(const axis3& n1, const axis3& n2) {
  detail::require_perpendicular(n1, n2, "two_axis_path");
  return unitary_path(
      "two-axis", 2, path_closure::closed_up_to_phase, true,
      [n1, n2](double s) {
        return detail::two_axis_mat(n1, n2, 2.0 * M_PI * s);
      });
}

// U(theta) = R_n(theta) R_{a(theta)}(pi/2) with the quarter-turn axis
// a(theta) = cos(2 theta) n_perp + sin(2 theta) (n_perp x n) sweeping the
// plane perpendicular to n twice per period.
inline unitary_path fixed_angle_path(const axis3& n, const axis3& n_perp) {
  detail::require_perpendicular(n, n_perp, "fixed_angle_path");
  Eigen::Vector3d third = n_perp.vec().cross(n.vec());
  return unitary_path(
      "fixed-angle", 2, path_closure::closed_up_to_phase, true,
      [n, n_perp, third](double s) {
        const double theta = 2.0 * M_PI * s;
        axis3 a(std::cos(2.0 * theta) * n_perp.vec() +
                std::sin(2.0 * theta) * third);
        return cmat(su2_rotation(n, theta).mat() *
                    su2_rotation(a, M_PI / 2.0).mat());
      });
}

// Continuous piecewise-linear angle profile theta(s) over knots whose s
// values increase strictly from 0 to 1.
class reparam_pl {
 public:
  explicit reparam_pl(std::vector<std::pair<double, double>> knots)
      : knots_(std::move(knots)) {
    if (knots_.size() < 2)
      throw std::invalid_argument("reparam_pl: need at least two knots");
    if (std::abs(knots_.front().first) > 1e-14 ||
        std::abs(knots_.back().first - 1.0) > 1e-14)
      throw std::invalid_argument("reparam_pl: s must span [0, 1]");
    for (std::size_t k = 1; k < knots_.size(); ++k)
      if (knots_[k].first <= knots_[k - 1].first)
        throw std::invalid_argument("reparam_pl: s must increase strictly");
  }

  double operator()(double s) const {
    if (s < 0.0 || s > 1.0)
      throw std::domain_error("reparam_pl: parameter outside [0, 1]");
    std::size_t k = 1;
    while (k + 1 < knots_.size() && s > knots_[k].first) ++k;
    const auto& [s0, t0] = knots_[k - 1];
    const auto& [s1, t1] = knots_[k];
    return t0 + (t1 - t0) * (s - s0) / (s1 - s0);
  }

  const std::vector<std::pair<double, double>>& knots() const {
    return knots_;
  }

 private:
  std::vector<std::pair<double, double>> knots_;
};

struct open_path {
  unitary_path path;
  double s_star = 0.0;
  unitary_op conjugator;
  reparam_pl reparam;
  bool degenerate = false;  // target was the identity up to phase
};

namespace detail {

// |Tr U| / 2 for 2x2; the phase-blind distance of U from the identity.
inline double half_trace_mag(const cmat& m) {
  return std::abs(m.trace()) / 2.0;
}

// Eigenvectors of a 2x2 unitary, columns ordered by eigenvalue phase in
// [-pi, pi) and each column phase-fixed through its largest entry.
inline std::pair<cmat, cvec> sorted_eigensystem(const cmat& u) {
  Eigen::ComplexEigenSolver<cmat> es(u);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("sorted_eigensystem: decomposition failed");
  cmat v = es.eigenvectors();
  cvec lam = es.eigenvalues();
  if (std::arg(lam(1)) < std::arg(lam(0))) {
    std::swap(lam(0), lam(1));
    v.col(0).swap(v.col(1));
  }
  for (int c = 0; c < 2; ++c) {
    int imax = std::abs(v(0, c)) >= std::abs(v(1, c)) ? 0 : 1;
    complexd ph = v(imax, c) / std::abs(v(imax, c));
    v.col(c) /= ph;
    v.col(c).normalize();
  }
  return {v, lam};
}

}  // namespace detail

// Reshape a two-axis loop into an open path from I to `target` (up to a
// global phase): find the sweep angle where the loop is as far from the
// identity as the target is, conjugate the loop to pass through the target
// there, then retime so the approach and return halves run at double speed.
inline open_path build_open_path(const unitary_path& base,
                                 const unitary_op& target) {
  if (base.dim() != 2 || base.kind() != "two-axis")
    throw std::invalid_argument("build_open_path: two-axis base required");
  if (target.dim() != 2)
    throw std::invalid_argument("build_open_path: 2x2 target required");
  if (std::abs(target.mat().determinant() - complexd(1, 0)) > det_tol)
    throw std::invalid_argument("build_open_path: target must be special unitary");

  const double target_level = detail::half_trace_mag(target.mat());
  unitary_op identity2(cmat::Identity(2, 2), true);
  if (target_level > 1.0 - 1e-9) {
    // Nothing to steer toward; hand the closed loop back unchanged.
    return {base, 0.0, identity2,
            reparam_pl({{0.0, 0.0}, {1.0, 2.0 * M_PI}}), true};
  }

  auto base_at = [&base](double theta) {
    return base.eval(theta / (2.0 * M_PI)).mat();
  };

  double theta_star = -1.0;
  cmat w = cmat::Identity(2, 2);

  // First look for a sweep angle where the loop hits the target on the
  // nose (up to phase); that choice keeps the conjugator trivial and
  // matches the hand construction for trace-zero targets.
  {
    auto miss = [&](double th) {
      // Periodic in th: re-entering the period only flips the loop's sign,
      // which the magnitude ignores.
      th -= 2.0 * M_PI * std::floor(th / (2.0 * M_PI));
      return 2.0 - std::abs((target.mat().adjoint() * base_at(th)).trace());
    };
    const int grid = 1024;
    int best = -1;
    double best_val = 1e-3;
    for (int k = 0; k < grid; ++k) {
      double v = miss(2.0 * M_PI * k / grid);
      if (v < best_val) {
        best_val = v;
        best = k;
      }
    }
    if (best >= 0) {
      double lo = 2.0 * M_PI * (best - 1) / grid;
      double hi = 2.0 * M_PI * (best + 1) / grid;
      for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (miss(m1) < miss(m2))
          hi = m2;
        else
          lo = m1;
      }
      double th = (lo + hi) / 2.0;
      // The miss function bottoms out quadratically; a parabola through
      // three nearby values pins the vertex far below the noise floor.
      // Refitting on a shrinking stencil cancels the cubic-term bias of
      // the first fit.
      for (double dd : {1e-3, 1e-5}) {
        double f0 = miss(th - dd), f1 = miss(th), f2 = miss(th + dd);
        double denom = f0 - 2.0 * f1 + f2;
        if (std::abs(denom) > 1e-300) {
          double vertex = th + dd * (f0 - f2) / (2.0 * denom);
          if (miss(vertex) <= f1) th = vertex;
        }
      }
      if (miss(th) <= 1e-9) theta_star = th;
    }
  }

  if (theta_star < 0.0) {
    // Otherwise bisect the signed half-trace, which sweeps 1 -> -1 over a
    // full turn, down to the target's level, then build the conjugator from
    // phase-matched eigenbases.
    auto g = [&](double th) {
      return base_at(th).trace().real() / 2.0 - target_level;
    };
    const int cells = 256;
    double lo = 0.0, hi = 0.0;
    bool found = false;
    double g_lo = g(0.0);
    for (int k = 1; k <= cells; ++k) {
      double th = 2.0 * M_PI * k / cells;
      double g_hi = g(th);
      if ((g_lo >= 0.0) != (g_hi >= 0.0)) {
        lo = 2.0 * M_PI * (k - 1) / cells;
        hi = th;
        found = true;
        break;
      }
      g_lo = g_hi;
    }
    if (!found)
      throw std::runtime_error("build_open_path: no matching sweep angle");
    while (hi - lo > 1e-12) {
      double mid = (lo + hi) / 2.0;
      if ((g(lo) >= 0.0) == (g(mid) >= 0.0))
        lo = mid;
      else
        hi = mid;
    }
    theta_star = (lo + hi) / 2.0;

    cmat u_star = base_at(theta_star);
    auto [vu, lu] = detail::sorted_eigensystem(u_star);
    auto [vt, lt] = detail::sorted_eigensystem(target.mat());
    auto try_w = [&](const cmat& vt_cols) {
      cmat cand = vt_cols * vu.adjoint();
      double hit = std::abs(
          (target.mat().adjoint() * (cand * u_star * cand.adjoint())).trace());
      return std::pair<cmat, double>(cand, hit);
    };
    auto [w1, hit1] = try_w(vt);
    cmat vt_swapped(2, 2);
    vt_swapped.col(0) = vt.col(1);
    vt_swapped.col(1) = vt.col(0);
    auto [w2, hit2] = try_w(vt_swapped);
    w = hit1 >= hit2 ? w1 : w2;
    if (std::max(hit1, hit2) < 2.0 - 1e-8)
      throw std::runtime_error("build_open_path: conjugation failed");
    w /= std::sqrt(w.determinant());
  }

  const double s_star = theta_star / (2.0 * M_PI);
  reparam_pl profile({{0.0, 0.0},
                      {s_star / 2.0, theta_star},
                      {1.0 - s_star / 2.0, 2.0 * M_PI},
                      {1.0, 2.0 * M_PI + theta_star}});
  unitary_op conj(w, true);
  auto fn = [base, w, profile](double s) {
    double theta = profile(s);
    double sign = 1.0;
    if (theta > 2.0 * M_PI) {
      // A two-axis loop re-enters its period with a flipped sign.
      theta -= 2.0 * M_PI;
      sign = -1.0;
    }
    cmat u = base.eval(std::min(theta / (2.0 * M_PI), 1.0)).mat();
    return cmat(sign * (w * u * w.adjoint()));
  };
  return {unitary_path("open-target", 2, path_closure::open, true, fn),
          s_star, conj, profile, false};
}

// Tensor product of per-qubit two-axis factors; factor m runs 4^{m-1}
// times faster than the first, so the first factor is the slowest.
inline unitary_path tensor_qubit_path(
    const std::vector<std::pair<axis3, axis3>>& axes) {
  if (axes.empty())
    throw std::invalid_argument("tensor_qubit_path: need at least one qubit");
  for (const auto& [a, b] : axes)
    detail::require_perpendicular(a, b, "tensor_qubit_path");
  const int dim = 1 << axes.size();
  return unitary_path(
      "tensor-qubits", dim, path_closure::closed_up_to_phase, true,
      [axes](double s) {
        const double theta = 2.0 * M_PI * s;
        cmat u = cmat::Identity(1, 1);
        double mult = 1.0;
        for (const auto& [n1, n2] : axes) {
          u = tensor(u, detail::two_axis_mat(n1, n2, mult * theta));
          mult *= 4.0;
        }
        return u;
      });
}

// Smallest equiangular sample count at which the dimension-d coset-lift
// path averages exactly: 5, 25, 125, ...
inline int fiber_sampling_threshold(int d) {
  if (d < 2)
    throw std::invalid_argument("fiber_sampling_threshold: d >= 2 required");
  int n = 1;
  for (int k = 2; k <= d; ++k) n *= 5;
  return n;
}

// Base-space curve (1, e^{i N' theta}, ..., e^{i (d-1) N' theta}) / sqrt(d)
// with N' the sampling threshold one dimension down.
inline cvec fiber_base_point(int d, double theta) {
  if (d < 3)
    throw std::invalid_argument("fiber_base_point: d >= 3 required");
  const int stride = fiber_sampling_threshold(d - 1);
  const double rd = 1.0 / std::sqrt(static_cast<double>(d));
  cvec c(d);
  for (int j = 0; j < d; ++j)
    c(j) = rd * std::exp(complexd(0, stride * j * theta));
  return c;
}

// Special unitary whose first row is c, defined on the chart |c_d| > 0.
// The 3x3 case follows the closed-form completion row by row, with the
// final row sign-adjusted so the determinant is +1; higher dimensions fall
// back to Gram-Schmidt below the first row plus the same det adjustment.
inline unitary_op fiber_coset_representative(const cvec& c) {
  const int d = static_cast<int>(c.size());
  if (d < 2)
    throw std::invalid_argument("fiber_coset_representative: need dim >= 2");
  if (std::abs(c.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("fiber_coset_representative: row is not unit");
  if (std::abs(c(d - 1)) < 1e-12)
    throw std::domain_error(
        "fiber_coset_representative: point lies on the chart boundary");

  cmat m(d, d);
  m.row(0) = c.transpose();
  if (d == 2) {
    m(1, 0) = -std::conj(c(1));
    m(1, 1) = std::conj(c(0));
    return unitary_op(std::move(m), true);
  }
  if (d == 3) {
    const double r = std::sqrt(1.0 - std::norm(c(0)));
    m(1, 0) = 0.0;
    m(1, 1) = std::conj(c(2)) / r;
    m(1, 2) = -std::conj(c(1)) / r;
    m(2, 0) = -r;
    m(2, 1) = c(1) * std::conj(c(0)) / r;
    m(2, 2) = c(2) * std::conj(c(0)) / r;
    return unitary_op(std::move(m), true);
  }

  std::vector<cvec> ortho = {c};
  for (int k = 1; k < d; ++k) {
    cvec v = cvec::Zero(d);
    v(k - 1) = 1.0;
    for (const cvec& u : ortho) v -= u.dot(v) * u;
    double norm = v.norm();
    if (norm < 1e-8)
      throw std::runtime_error("fiber_coset_representative: degenerate basis");
    ortho.push_back(v / norm);
    // Completion seeded by e_k lands in row d+1-k, mirroring the 3x3 form.
    m.row(d - k) = (v / norm).transpose();
  }
  complexd det = m.determinant();
  m.row(d - 1) /= det;
  return unitary_op(std::move(m), true);
}

// Inductive coset lift: embed the based dimension d-1 path below the first
// coordinate and multiply by the representative of the base-space curve,
// then rebase so the path starts at the identity.
inline unitary_path fiber_path(int d) {
  if (d < 2) throw std::invalid_argument("fiber_path: d >= 2 required");
  if (d == 2) {
    const curve_spec seed(curve_kind::xi);
    const cmat u0_inv = su2_from_s3(eval_curve(seed, 0.0)).mat().adjoint();
    return unitary_path("fiber", 2, path_closure::closed, true,
                        [seed, u0_inv](double s) {
                          return cmat(su2_from_s3(eval_curve(seed, s)).mat() *
                                      u0_inv);
                        });
  }
  unitary_path inner = fiber_path(d - 1);
  const cmat base0_inv =
      fiber_coset_representative(fiber_base_point(d, 0.0)).mat().adjoint();
  return unitary_path(
      "fiber", d, path_closure::closed, true,
      [inner, d, base0_inv](double s) {
        const double theta = 2.0 * M_PI * s;
        cmat embedded = cmat::Identity(d, d);
        embedded.block(1, 1, d - 1, d - 1) = inner.eval(s).mat();
        cmat rep = fiber_coset_representative(fiber_base_point(d, theta)).mat();
        return cmat(embedded * rep * base0_inv);
      });
}

// Shift and clock matrices with their Fourier intertwiner and the d-th
// root of the shift.
struct hw_ops {
  int d = 0;
  unitary_op shift;       // X: |j> -> |j+1 mod d>
  unitary_op clock;       // Z: |j> -> omega^j |j>
  unitary_op fourier;     // W: W Z W^dag = X
  unitary_op shift_root;  // Q: Q^d = X
  complexd omega;
};

inline hw_ops make_hw_set(int d) {
  if (d < 2) throw std::invalid_argument("make_hw_set: d >= 2 required");
  const complexd omega = std::exp(complexd(0, 2.0 * M_PI / d));
  cmat x = cmat::Zero(d, d), z = cmat::Zero(d, d), w(d, d), qdiag = cmat::Zero(d, d);
  const double rd = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j) {
    x((j + 1) % d, j) = 1.0;
    z(j, j) = std::exp(complexd(0, 2.0 * M_PI * j / d));
    qdiag(j, j) = std::exp(complexd(0, 2.0 * M_PI * j / (d * d)));
    for (int k = 0; k < d; ++k)
      w(k, j) = rd * std::exp(complexd(0, -2.0 * M_PI * k * j / d));
  }
  cmat q = w * qdiag * w.adjoint();

  auto near = [](const cmat& a, const cmat& b) {
    return (a - b).cwiseAbs().maxCoeff() <= 1e-11;
  };
  cmat xp = cmat::Identity(d, d), zp = cmat::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    xp = xp * x;
    zp = zp * z;
  }
  if (!near(xp, cmat::Identity(d, d)) || !near(zp, cmat::Identity(d, d)) ||
      !near(omega * x * z, z * x) || !near(w * z * w.adjoint(), x))
    throw std::logic_error("make_hw_set: algebra checks failed");

  return {d, unitary_op(x), unitary_op(z), unitary_op(w), unitary_op(q),
          omega};
}

// U(theta) = W diag(e^{i k theta}) W^dag diag(e^{i k d theta}); at the d^2
// equally spaced angles this walks the whole shift/clock ladder.
inline unitary_path hw_path(int d) {
  hw_ops hw = make_hw_set(d);
  const cmat w = hw.fourier.mat();
  return unitary_path(
      "hw", d, path_closure::closed, false, [d, w](double s) {
        const double theta = 2.0 * M_PI * s;
        cvec ramp(d), ramp_d(d);
        for (int k = 0; k < d; ++k) {
          ramp(k) = std::exp(complexd(0, k * theta));
          ramp_d(k) = std::exp(complexd(0, k * d * theta));
        }
        return cmat(w * ramp.asDiagonal() * w.adjoint() *
                    cmat(ramp_d.asDiagonal()));
      });
}

}  // namespace udesign
