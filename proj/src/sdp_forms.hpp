#pragma once

// Structured SDP relaxations of the lifted energy.
//
// Potts form: Y in S^{N+L}, rows/cols ordered [labels (L) | variables (N)],
//   A = 1/2 [[0, H^T], [H, -K]],
//   u = [u1 (L) | u2 (L(L-1)/2) | u3 (N) | u4 (N)],
//   b = [1 | 0 | 1 | 1].
// General form: Y in S^{NL}, index i*L + l,
//   A = Diag(h) + 1/2 K (x) U (variable-major Kronecker), U = mu - 1 1^T,
//   u = [u1 (N) | u2_1 .. u2_N (L(L-1)/2 each)],
//   b = [1 | 0].
//
// Off-diagonal label pairs (a, b), a < b, are packed with a outer, b inner.
//
// A shift nu replaces A by A - nu I; constraint operators are never shifted.

#include "common.hpp"
#include "crf_model.hpp"

#include <memory>
#include <vector>

namespace lrsdcut {

inline Index pair_count(Index labels) { return labels * (labels - 1) / 2; }
/// Packed position of the unordered pair {a, b}, a != b.
Index pair_index(Index a, Index b, Index labels);

class SdpForm {
 public:
  explicit SdpForm(const CrfProblem& crf) : crf_(&crf) {}
  virtual ~SdpForm() = default;

  const CrfProblem& crf() const { return *crf_; }

  virtual Index dim() const = 0;
  virtual double eta() const = 0;
  virtual Index constraints() const = 0;
  const Vec& rhs() const { return b_; }

  double shift() const { return shift_; }
  void set_shift(double nu) { shift_ = nu; }

  /// Unshifted A d.
  virtual void apply_a(const Vec& d, Vec& out) const = 0;
  /// (sum_i u_i B_i) d.
  virtual void apply_constraints(const Vec& u, const Vec& d, Vec& out) const = 0;
  /// [<Z Z^T, B_i>]_i without forming Z Z^T.
  virtual Vec constraint_products(const Mat& z) const = 0;

  /// C(u) d = -(A - nu I) d - (sum_i u_i B_i) d.
  Vec apply_c(const Vec& u, const Vec& d) const;

  /// Number of Gaussian columns drawn per rounding sample.
  virtual Index projection_cols() const = 0;
  /// Candidate N x L score matrices from Psi P (dim x projection_cols).
  virtual std::vector<Mat> rounding_scores(const Mat& psi_p) const = 0;
  /// Lifted energy of a labeling under this relaxation's objective.
  virtual double lifted_objective(const Labeling& x) const = 0;

 protected:
  void check_u(const Vec& u) const;
  void check_d(const Vec& d) const;

  const CrfProblem* crf_;
  Vec b_;
  double shift_ = 0.0;
};

class PottsSdp final : public SdpForm {
 public:
  explicit PottsSdp(const CrfProblem& crf);

  Index dim() const override { return n_ + l_; }
  double eta() const override { return static_cast<double>(n_ + l_); }
  Index constraints() const override { return 2 * n_ + l_ * (l_ + 1) / 2; }

  void apply_a(const Vec& d, Vec& out) const override;
  void apply_constraints(const Vec& u, const Vec& d, Vec& out) const override;
  Vec constraint_products(const Mat& z) const override;

  Index projection_cols() const override { return l_; }
  std::vector<Mat> rounding_scores(const Mat& psi_p) const override;
  double lifted_objective(const Labeling& x) const override;

  // block offsets into u
  Index u1_offset() const { return 0; }
  Index u2_offset() const { return l_; }
  Index u3_offset() const { return l_ + pair_count(l_); }
  Index u4_offset() const { return l_ + pair_count(l_) + n_; }

 private:
  Index n_, l_;
};

class GeneralSdp final : public SdpForm {
 public:
  explicit GeneralSdp(const CrfProblem& crf);

  Index dim() const override { return n_ * l_; }
  double eta() const override { return static_cast<double>(n_); }
  Index constraints() const override { return n_ + n_ * pair_count(l_); }

  void apply_a(const Vec& d, Vec& out) const override;
  void apply_constraints(const Vec& u, const Vec& d, Vec& out) const override;
  Vec constraint_products(const Mat& z) const override;

  Index projection_cols() const override { return 1; }
  std::vector<Mat> rounding_scores(const Mat& psi_p) const override;
  double lifted_objective(const Labeling& x) const override;

 private:
  Index n_, l_;
  Mat u_;  // mu - 1 1^T
};

/// Potts problems get the (N+L) form, general mu the (NL) form.
std::unique_ptr<SdpForm> make_sdp_form(const CrfProblem& crf);

}  // namespace lrsdcut
