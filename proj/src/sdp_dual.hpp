#pragma once

// Dual of the penalized SDP:
//   d(u) = -(gamma/2) ||(C(u))_+||_F^2 - u^T b - eta^2 / (2 gamma),
//   grad d(u) = gamma [<(C(u))_+, B_i>]_i - b   (dC/du_i = -B_i).

#include "eig_lanczos.hpp"
#include "sdp_forms.hpp"

namespace lrsdcut {

struct DualSettings {
  double gamma = 1000.0;
  double tol = 1e-8;
  Index max_rank = 0;       // 0 = dim
  Index initial_rank = 0;   // 0 = eigensolver default
  std::uint64_t seed = 0;
};

struct DualEvaluation {
  double value = 0.0;
  Vec gradient;
  PsdFactor psd;
  /// The PSD factor was truncated; value is not a certified bound.
  bool approximate = false;
};

LinearOperator c_operator(const SdpForm& form, const Vec& u);

PsdFactor psd_part_of_c(const SdpForm& form, const Vec& u, const DualSettings& s);

double dual_objective(const SdpForm& form, const Vec& u, const PsdFactor& psd, double gamma);
Vec dual_gradient(const SdpForm& form, const Vec& u, const PsdFactor& psd, double gamma);

DualEvaluation evaluate_dual(const SdpForm& form, const Vec& u, const DualSettings& s);

/// nu = r-th smallest eigenvalue of the unshifted A (Lanczos on -A); stores it
/// in the form. Afterwards rank((C(0))_+) <= r.
double spectral_shift_init(SdpForm& form, Index r, std::uint64_t seed, double tol = 1e-10);

/// <Y, A> for Y = scale * Z Z^T, unshifted A.
double primal_objective(const SdpForm& form, const Mat& z, double scale);

}  // namespace lrsdcut
