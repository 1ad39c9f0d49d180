#pragma once

// Fully connected pairwise CRF: problem definition, energies, and the
// lifting between labelings, indicator matrices and their vectorization.
//
// Labels are 0-based throughout the library. All energies refer to the
// factored (approximated) kernel.

#include "common.hpp"
#include "kernels.hpp"

#include <vector>

namespace lrsdcut {

/// Potts, or a general symmetric mu: L x L -> [0, 1] with zero diagonal.
class Compatibility {
 public:
  static Compatibility potts(Index labels);
  static Compatibility general(Mat mu);

  bool is_potts() const { return potts_; }
  Index labels() const { return mu_.rows(); }
  const Mat& matrix() const { return mu_; }
  double operator()(Index l, Index lp) const { return mu_(l, lp); }

 private:
  Compatibility(Mat mu, bool potts) : mu_(std::move(mu)), potts_(potts) {}
  Mat mu_;
  bool potts_ = true;
};

struct Labeling {
  std::vector<int> labels;

  Index size() const { return static_cast<Index>(labels.size()); }
  int operator[](Index i) const { return labels[static_cast<std::size_t>(i)]; }
  bool operator==(const Labeling&) const = default;
};

class CrfProblem {
 public:
  CrfProblem(Mat unary, std::vector<KernelTerm> kernels, Compatibility compat);

  Index n_vars() const { return unary_.rows(); }
  Index n_labels() const { return unary_.cols(); }
  const Mat& unary() const { return unary_; }
  const std::vector<KernelTerm>& kernels() const { return kernels_; }
  const Compatibility& compatibility() const { return compat_; }
  bool is_potts() const { return compat_.is_potts(); }

  /// K D with K = sum_m w_m K_m, applied to each column of D (N x c).
  Mat kernel_apply(const Mat& d) const;
  Vec kernel_apply(const Vec& d) const;
  /// diag(K).
  Vec kernel_diagonal() const;
  /// Sum of factor ranks over all kernel terms.
  Index kernel_rank() const;

  void validate_labeling(const Labeling& x) const;

 private:
  Mat unary_;
  std::vector<KernelTerm> kernels_;
  Compatibility compat_;
};

/// N x L one-hot matrix, X(i, l) = [x_i == l].
class IndicatorMatrix {
 public:
  static IndicatorMatrix from_labeling(const Labeling& x, Index labels);
  /// Validates that every row is one-hot.
  explicit IndicatorMatrix(Mat x);

  const Mat& matrix() const { return x_; }
  Labeling to_labeling() const;
  /// y with y[i * L + l] = X(i, l).
  Vec vectorized() const;

 private:
  Mat x_;
};

double energy(const CrfProblem& problem, const Labeling& x);
/// <H, X> - 1/2 <X X^T, K>; Potts only.
double lifted_energy(const CrfProblem& problem, const IndicatorMatrix& x);
/// h^T y + 1/2 y^T (U (x) K) y with U = mu - 1 1^T; general mu only.
double lifted_energy_general(const CrfProblem& problem, const Vec& y);
/// 1/2 1^T K 1.
double energy_offset(const CrfProblem& problem);

/// Per-variable unary argmin (ties to the smallest label).
Labeling unary_argmin(const CrfProblem& problem);

}  // namespace lrsdcut
