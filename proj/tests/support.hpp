#pragma once

// Shared fixtures for the unit and acceptance tests: seeded random problems
// and small dense helpers written independently of the library's fast paths.

#include "crf_model.hpp"
#include "kernels.hpp"

#include <cmath>
#include <vector>

namespace lrsdcut::testing {

inline Mat random_matrix(Index rows, Index cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng = make_rng(seed, 0x7e57);
  return scale * gaussian_matrix(rows, cols, rng);
}

inline Mat random_uniform(Index rows, Index cols, std::uint64_t seed, double lo = 0.0, double hi = 1.0) {
  Rng rng = make_rng(seed, 0x0a1f);
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

inline Mat random_symmetric(Index n, std::uint64_t seed) {
  const Mat g = random_matrix(n, n, seed);
  return 0.5 * (g + g.transpose());
}

inline Mat random_mu(Index labels, std::uint64_t seed) {
  const Mat r = random_uniform(labels, labels, seed);
  Mat mu = Mat::Zero(labels, labels);
  for (Index a = 0; a < labels; ++a)
    for (Index b = a + 1; b < labels; ++b) mu(a, b) = mu(b, a) = r(a, b);
  return mu;
}

/// Unary U(0, 1); one low-rank kernel with Gaussian factor / sqrt(rank).
inline CrfProblem random_problem(Index n, Index labels, Index rank, std::uint64_t seed, double weight = 1.0,
                                 bool general = false) {
  Mat unary = random_uniform(n, labels, seed);
  Mat phi = random_matrix(n, rank, mix_seed(seed, 1), 1.0 / std::sqrt(static_cast<double>(rank)));
  std::vector<KernelTerm> ks;
  ks.emplace_back(LowRankKernel{LowRankFactor(std::move(phi))}, weight);
  Compatibility c = general ? Compatibility::general(random_mu(labels, mix_seed(seed, 2))) : Compatibility::potts(labels);
  return CrfProblem(std::move(unary), std::move(ks), std::move(c));
}

inline CrfProblem problem_with_kernel(Mat unary, Mat phi, Compatibility c) {
  std::vector<KernelTerm> ks;
  ks.emplace_back(LowRankKernel{LowRankFactor(std::move(phi))}, 1.0);
  return CrfProblem(std::move(unary), std::move(ks), std::move(c));
}

inline Labeling random_labeling(Index n, Index labels, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x1abe);
  std::uniform_int_distribution<int> d(0, static_cast<int>(labels) - 1);
  Labeling x;
  for (Index i = 0; i < n; ++i) x.labels.push_back(d(rng));
  return x;
}

/// Dense Gaussian Gram matrix, scalar loop.
inline Mat dense_gaussian(const Mat& x, double theta) {
  Mat k(x.rows(), x.rows());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.rows(); ++j) {
      double s = 0.0;
      for (Index d = 0; d < x.cols(); ++d) s += (x(i, d) - x(j, d)) * (x(i, d) - x(j, d));
      k(i, j) = std::exp(-s / (2.0 * theta * theta));
    }
  return k;
}

/// ||K - K_r||_F for the best rank-r approximation (PSD K).
inline double optimal_truncation_error(const Mat& k, Index r) {
  Eigen::SelfAdjointEigenSolver<Mat> es(k);
  const Vec& lam = es.eigenvalues();  // ascending
  double s = 0.0;
  for (Index i = 0; i < lam.size() - r; ++i) s += lam[i] * lam[i];
  return std::sqrt(s);
}

/// Projector onto the eigenvectors of `m` with eigenvalue > thresh, with
/// eigenvalue weights: sum_{lambda > thresh} lambda v v^T.
inline Mat dense_positive_part(const Mat& m, double thresh = 0.0) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  Mat out = Mat::Zero(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    if (es.eigenvalues()[i] > thresh)
      out += es.eigenvalues()[i] * es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose();
  return out;
}

inline double rel_err(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace lrsdcut::testing
