#pragma once

// SPSD kernel construction, Nystrom factorization and factored matvecs.
//
// Every kernel the engine touches is held in factored form; the N x N matrix
// is never built outside of the oracle module.

#include "common.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lrsdcut {

/// N rows of D-dimensional features.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(Mat rows);

  Index size() const { return rows_.rows(); }
  Index dim() const { return rows_.cols(); }
  const Mat& rows() const { return rows_; }

 private:
  Mat rows_;
};

/// Tall factor Phi (N x R) representing K ~= Phi Phi^T.
class LowRankFactor {
 public:
  LowRankFactor() = default;
  explicit LowRankFactor(Mat phi);

  Index n() const { return phi_.rows(); }
  Index rank() const { return phi_.cols(); }
  const Mat& phi() const { return phi_; }

 private:
  Mat phi_;
};

/// Block-diagonal image partition stored as boundary offsets
/// {0, n_1, n_1 + n_2, ..., N}. Cross-block kernel entries are zero.
class BlockMask {
 public:
  BlockMask() = default;
  BlockMask(std::vector<Index> offsets, Index n);

  Index blocks() const { return static_cast<Index>(offsets_.size()) - 1; }
  Index begin(Index b) const { return offsets_[static_cast<std::size_t>(b)]; }
  Index length(Index b) const { return begin(b + 1) - begin(b); }
  const std::vector<Index>& offsets() const { return offsets_; }

 private:
  std::vector<Index> offsets_;
};

// ---------------------------------------------------------------------------
// Gaussian kernel

/// exp(-sum_b |f_i^b - f_j^b|^2 / (2 theta_b^2)); block_dims partitions the
/// feature vector, one bandwidth per block.
double gaussian_eval(std::span<const double> fi, std::span<const double> fj,
                     std::span<const Index> block_dims, std::span<const double> thetas);

/// Single-block convenience overload.
double gaussian_eval(std::span<const double> fi, std::span<const double> fj, double theta);

// ---------------------------------------------------------------------------
// Nystrom

/// k-means (squared Euclidean, k-means++ seeding, Lloyd iterations) followed by
/// picking the data point nearest each centroid. Returns sorted distinct indices.
std::vector<Index> select_landmarks(const FeatureSet& features, Index count, int iters,
                                    std::uint64_t seed);

/// Writes column j of K into out (length N).
using KernelColumnOracle = std::function<void(Index j, Eigen::Ref<Vec> out)>;

struct NystromResult {
  LowRankFactor factor;
  Index requested_rank = 0;
  Index effective_rank = 0;
};

inline constexpr double kDefaultEigFloor = 1e-10;

/// Phi = C Gamma_R Sigma_R^{-1/2}, C = sampled columns, (Gamma, Sigma) leading
/// eigenpairs of the landmark block W with eigenvalue > eig_floor * lambda_max(W).
/// Throws NonPsd if W has an eigenvalue below -eig_floor * lambda_max(W).
NystromResult nystrom_factor(Index n, const KernelColumnOracle& column,
                             std::span<const Index> landmarks, Index rank,
                             double eig_floor = kDefaultEigFloor);

/// Nystrom of a single-block Gaussian kernel on `features`.
NystromResult gaussian_nystrom(const FeatureSet& features, double theta, Index landmarks,
                               Index rank, std::uint64_t seed, int kmeans_iters = 25);

// ---------------------------------------------------------------------------
// Factored matvecs

/// Phi (Phi^T d).
Vec lowrank_matvec(const LowRankFactor& factor, const Vec& d);
Mat lowrank_matvec(const LowRankFactor& factor, const Mat& d);

/// (K_p o K_c) d = ((Phi_p Phi_p^T (Diag(d) Phi_c)) o Phi_c) 1, optionally
/// restricted block-diagonally by `mask`.
Vec hadamard_matvec(const LowRankFactor& factor_p, const LowRankFactor& factor_c, const Vec& d,
                    const BlockMask* mask = nullptr);

/// K = scale * (Omega_N - Phi Phi^T), Omega_N the centering projector.
struct CenteredFactor {
  LowRankFactor phi;
  double scale = 0.0;
};

/// Phi = Omega_N Phi~ (kappa N I + Phi~^T Phi~)^{-1/2}, scale = 1 / (kappa N).
CenteredFactor centered_discriminative_factor(const LowRankFactor& phi_tilde, double kappa);

/// scale * (d - mean(d) 1 - Phi (Phi^T d)).
Vec centered_matvec(const CenteredFactor& k, const Vec& d);

// ---------------------------------------------------------------------------
// Kernel terms

struct LowRankKernel {
  LowRankFactor factor;
};
struct HadamardKernel {
  LowRankFactor factor_p;
  LowRankFactor factor_c;
};
struct CenteredKernel {
  CenteredFactor factor;
};

using KernelForm = std::variant<LowRankKernel, HadamardKernel, CenteredKernel>;

/// One weighted SPSD kernel w * K in factored form.
class KernelTerm {
 public:
  KernelTerm(KernelForm form, double weight, std::optional<BlockMask> mask = std::nullopt);

  Index n() const { return n_; }
  double weight() const { return weight_; }
  const KernelForm& form() const { return form_; }
  const std::optional<BlockMask>& mask() const { return mask_; }
  std::string kind() const;

  /// w * K d, column by column.
  Mat apply(const Mat& d) const;
  Vec apply(const Vec& d) const;
  /// diag(w * K).
  Vec diagonal() const;
  /// Total factor storage rank (R_K contribution).
  Index rank() const;

 private:
  Vec apply_unweighted(const Vec& d) const;

  KernelForm form_;
  double weight_;
  std::optional<BlockMask> mask_;
  Index n_ = 0;
};

// ---------------------------------------------------------------------------
// Factor cache: "LRKF", u32 N, u32 R, then N*R little-endian f64 row-major.

void write_factor_cache(const std::string& path, const LowRankFactor& factor);
LowRankFactor read_factor_cache(const std::string& path);
std::string encode_factor_cache(const LowRankFactor& factor);
LowRankFactor decode_factor_cache(const std::string& bytes);

}  // namespace lrsdcut
