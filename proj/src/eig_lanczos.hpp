#pragma once

// Partial symmetric eigendecomposition of matrix-free operators.
//
// The core is a thick-restart Lanczos iteration with full
// reorthogonalization. Eigenvectors already found can be locked; later
// passes then work in their orthogonal complement, which is how repeated
// eigenvalues (invisible to a single Krylov sequence) are recovered.

#include "common.hpp"

#include <functional>

namespace lrsdcut {

struct LinearOperator {
  Index dim = 0;
  std::function<void(const Vec& in, Vec& out)> apply;

  Vec operator()(const Vec& in) const {
    Vec out(dim);
    apply(in, out);
    return out;
  }
};

/// Positive part of a symmetric operator: Gamma_+ Diag(lambda_+) Gamma_+^T.
struct PsdFactor {
  Mat vectors;  // n x R_Y, orthonormal columns
  Vec values;   // length R_Y, descending, strictly positive
  /// More positive eigenvalues exist beyond the rank cap.
  bool truncated = false;
  /// Largest |eigenvalue| seen while computing the factor.
  double spectral_radius = 0.0;

  Index rank() const { return values.size(); }
  Index dim() const { return vectors.rows(); }
  /// Gamma_+ Diag(sqrt(lambda_+)); Z Z^T is the positive part.
  Mat scaled_vectors() const;
};

struct LanczosOptions {
  double tol = 1e-8;
  int max_restarts = 50;
  std::uint64_t seed = 0;
};

struct EigenPairs {
  Mat vectors;     // descending by value
  Vec values;
  Vec residuals;   // ||A v - theta v|| per pair
  double spectral_radius = 0.0;
  bool converged = false;
  int restarts = 0;
  Index matvecs = 0;
};

/// The `nev` largest (algebraic) eigenpairs of `op` restricted to the
/// orthogonal complement of the orthonormal columns of `locked`.
/// Converged when every wanted residual <= tol * spectral radius estimate.
/// Returns the best effort with converged == false after the restart cap.
EigenPairs largest_eigenpairs(const LinearOperator& op, Index nev, const LanczosOptions& opt,
                              const Mat& locked = Mat());

/// Thrown when the restart cap is exhausted; carries what was found.
class EigenSolverError : public Error {
 public:
  EigenSolverError(const std::string& what, PsdFactor best, Vec residuals)
      : Error(ErrorCode::NotConverged, what), best_(std::move(best)), residuals_(std::move(residuals)) {}
  const PsdFactor& best_effort() const { return best_; }
  const Vec& residuals() const { return residuals_; }

 private:
  PsdFactor best_;
  Vec residuals_;
};

/// All eigenpairs with lambda > tol * max(|lambda|_max, 1), up to max_rank.
/// The requested count starts at `initial_request` (default min(max_rank, 8))
/// and doubles while every returned pair is still positive; a final pass on
/// the complement of the accepted vectors confirms nothing positive remains.
/// Sets `truncated` if positive spectrum remains once max_rank is reached.
PsdFactor leading_psd_part(const LinearOperator& op, Index max_rank, double tol,
                           std::uint64_t seed, Index initial_request = 0);

/// sum_i lambda_i^2 = ||(Y)_+||_F^2.
double psd_frob_norm_sq(const PsdFactor& factor);

}  // namespace lrsdcut
