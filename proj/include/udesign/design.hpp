#pragma once

// Numerical 1-design diagnostics for finite unitary ensembles and sampled
// unitary paths: frame potential, twirl deviation over a traceless operator
// basis, first-moment averages, and convergence scans.

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "udesign/qmat.hpp"
#include "udesign/upath.hpp"

namespace udesign {

struct sampled_ensemble {
  std::vector<unitary_op> unitaries;
  std::vector<double> weights;

  sampled_ensemble(std::vector<unitary_op> us, std::vector<double> ws = {})
      : unitaries(std::move(us)), weights(std::move(ws)) {
    if (unitaries.empty())
      throw std::invalid_argument("ensemble must contain at least one unitary");
    const int d = unitaries.front().dim();
    for (const auto& u : unitaries)
      if (u.dim() != d)
        throw std::invalid_argument("ensemble dimensions are inconsistent");
    if (weights.empty()) {
      weights.assign(unitaries.size(), 1.0 / unitaries.size());
      return;
    }
    if (weights.size() != unitaries.size())
      throw std::invalid_argument("one weight per unitary required");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("weights must be nonnegative");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
      throw std::invalid_argument("weights must sum to 1");
  }

  int dim() const { return unitaries.front().dim(); }
  std::size_t size() const { return unitaries.size(); }
};

struct design_report {
  double frame_potential_t1 = 0.0;
  double twirl_deviation = 0.0;
  int num_samples = 0;
  bool verdict = false;
};

namespace detail {

// Tree reduction keeps the result stable against reordering of the inputs.
inline double pairwise_sum(std::vector<double>& terms) {
  if (terms.empty()) return 0.0;
  std::size_t n = terms.size();
  while (n > 1) {
    std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < n / 2; ++i)
      terms[i] = terms[2 * i] + terms[2 * i + 1];
    if (n % 2 == 1) terms[half - 1] = terms[n - 1];
    n = half;
  }
  return terms[0];
}

inline bool is_power_of_two(int d) { return d >= 1 && (d & (d - 1)) == 0; }

}  // namespace detail

// Traceless operator basis with Tr(P†P) = d: Pauli strings for qubit
// registers, shift/clock words otherwise.
inline std::vector<cmat> traceless_basis(int d) {
  if (d < 2) throw std::invalid_argument("basis requires dim >= 2");
  std::vector<cmat> basis;
  if (detail::is_power_of_two(d)) {
    int num_qubits = 0;
    for (int m = d; m > 1; m /= 2) ++num_qubits;
    for (const auto& lp : pauli_basis(num_qubits)) {
      if (lp.label == std::string(num_qubits, 'I')) continue;
      basis.push_back(lp.mat);
    }
    return basis;
  }
  hw_ops hw = make_hw_set(d);
  std::vector<cmat> xpow(d), zpow(d);
  xpow[0] = cmat::Identity(d, d);
  zpow[0] = cmat::Identity(d, d);
  for (int j = 1; j < d; ++j) {
    xpow[j] = xpow[j - 1] * hw.shift.mat();
    zpow[j] = zpow[j - 1] * hw.clock.mat();
  }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      if (a == 0 && b == 0) continue;
      basis.push_back(xpow[a] * zpow[b]);
    }
  return basis;
}

inline double frame_potential(const sampled_ensemble& e, int t = 1) {
  if (t < 1) throw std::invalid_argument("moment order must be >= 1");
  const std::size_t n = e.size();
  std::vector<double> terms;
  terms.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < n; ++k) {
      complexd tr =
          e.unitaries[j].mat().conjugate().cwiseProduct(e.unitaries[k].mat())
              .sum();
      terms.push_back(e.weights[j] * e.weights[k] *
                      std::pow(std::norm(tr), t));
    }
  return detail::pairwise_sum(terms);
}

// Largest Frobenius norm of the ensemble-averaged conjugation U P U† over
// the traceless basis. Zero exactly when the ensemble is a 1-design.
inline double twirl_deviation(const sampled_ensemble& e) {
  const int d = e.dim();
  std::vector<double> norms;
  for (const cmat& p : traceless_basis(d)) {
    cmat avg = cmat::Zero(d, d);
    for (std::size_t j = 0; j < e.size(); ++j)
      avg += e.weights[j] *
             (e.unitaries[j].mat() * p * e.unitaries[j].mat().adjoint());
    norms.push_back(avg.norm());
  }
  double best = 0.0;
  for (double v : norms) best = std::max(best, v);
  return best;
}

// Equiangular samples s_k = k/n + offset. The offset shifts the whole comb
// by a fraction of one spacing and must stay below 1/n.
inline sampled_ensemble sample_path(const unitary_path& path, int n,
                                    double offset = 0.0) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  if (offset < 0.0 || offset >= 1.0 / n)
    throw std::invalid_argument("offset must lie in [0, 1/n)");
  std::vector<unitary_op> us;
  us.reserve(n);
  for (int k = 0; k < n; ++k)
    us.push_back(path.eval(static_cast<double>(k) / n + offset));
  return sampled_ensemble(std::move(us));
}

inline cmat path_first_moment(const unitary_path& path, const cmat& v,
                              int n) {
  if (n < 1) throw std::invalid_argument("need at least one sample");
  if (v.rows() != path.dim() || v.cols() != path.dim())
    throw std::invalid_argument("operator dimension must match the path");
  cmat avg = cmat::Zero(path.dim(), path.dim());
  for (int k = 0; k < n; ++k) {
    cmat u = path.eval(static_cast<double>(k) / n).mat();
    avg += u.adjoint() * v * u;
  }
  return avg / static_cast<double>(n);
}

inline cmat path_first_moment(const unitary_path& path, const hermitian_op& v,
                              int n) {
  return path_first_moment(path, v.mat(), n);
}

inline cmat ensemble_first_moment(const sampled_ensemble& e, const cmat& v) {
  if (v.rows() != e.dim() || v.cols() != e.dim())
    throw std::invalid_argument("operator dimension must match the ensemble");
  cmat avg = cmat::Zero(e.dim(), e.dim());
  for (std::size_t j = 0; j < e.size(); ++j) {
    const cmat& u = e.unitaries[j].mat();
    avg += e.weights[j] * (u.adjoint() * v * u);
  }
  return avg;
}

inline design_report analyze_ensemble(const sampled_ensemble& e,
                                      double fp_tol = 1e-9,
                                      double twirl_tol = 1e-6) {
  design_report report;
  report.frame_potential_t1 = frame_potential(e, 1);
  report.twirl_deviation = twirl_deviation(e);
  report.num_samples = static_cast<int>(e.size());
  report.verdict = report.frame_potential_t1 <= 1.0 + fp_tol &&
                   report.twirl_deviation <= twirl_tol;
  return report;
}

inline std::vector<std::pair<int, double>> design_scan(
    const unitary_path& path, const std::vector<int>& n_list) {
  std::vector<std::pair<int, double>> out;
  out.reserve(n_list.size());
  for (int n : n_list)
    out.emplace_back(n, frame_potential(sample_path(path, n), 1));
  return out;
}

// Smallest equiangular sample count that reproduces the continuous design
// exactly, by path kind. Zero means only asymptotic convergence.
inline int recommended_min_samples(const unitary_path& path) {
  const std::string& kind = path.kind();
  if (kind == "two-axis" || kind == "fixed-angle") return 8;
  if (kind == "tensor-qubits") {
    int m = 0;
    for (int d = path.dim(); d > 1; d /= 2) ++m;
    int mult = 1;
    for (int j = 1; j < m; ++j) mult *= 4;
    return 8 * mult;
  }
  if (kind == "fiber") return fiber_sampling_threshold(path.dim());
  if (kind == "hw") return path.dim() * path.dim();
  return 0;
}

// Real quadratic forms reproducing conjugation of v·sigma: with U the
// unit-quaternion unitary of x, the Bloch vector of U(v·sigma)U† is
// (x·A1x, x·A2x, x·A3x).
inline std::array<Eigen::Matrix4d, 3> quadratic_form_matrices(
    const Eigen::Vector3d& v) {
  const double v1 = v(0), v2 = v(1), v3 = v(2);
  std::array<Eigen::Matrix4d, 3> a;
  a[0] << v1, v2, -v3, 0,
          v2, -v1, 0, v3,
          -v3, 0, -v1, v2,
          0, v3, v2, v1;
  a[1] << v2, -v1, 0, v3,
          -v1, -v2, v3, 0,
          0, v3, v2, v1,
          v3, 0, v1, -v2;
  a[2] << v3, 0, v1, -v2,
          0, v3, v2, v1,
          v1, v2, -v3, 0,
          -v2, v1, 0, -v3;
  return a;
}

}  // namespace udesign
