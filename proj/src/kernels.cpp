#include "kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace lrsdcut {

FeatureSet::FeatureSet(Mat rows) : rows_(std::move(rows)) {
  require(rows_.rows() >= 1, "feature set needs at least one row");
  require(rows_.cols() >= 1, "feature dimension must be >= 1");
  require(rows_.allFinite(), "feature entries must be finite");
}

LowRankFactor::LowRankFactor(Mat phi) : phi_(std::move(phi)) {
  require(phi_.allFinite(), "low-rank factor entries must be finite");
}

BlockMask::BlockMask(std::vector<Index> offsets, Index n) : offsets_(std::move(offsets)) {
  require(offsets_.size() >= 2, "block mask needs at least two offsets");
  require(offsets_.front() == 0, "block mask must start at 0");
  require(offsets_.back() == n, "block mask must end at N");
  for (std::size_t k = 1; k < offsets_.size(); ++k)
    require(offsets_[k] > offsets_[k - 1], "block mask offsets must be strictly increasing");
}

// ---------------------------------------------------------------------------

double gaussian_eval(std::span<const double> fi, std::span<const double> fj,
                     std::span<const Index> block_dims, std::span<const double> thetas) {
  require(fi.size() == fj.size(), "gaussian_eval: feature dimension mismatch");
  require(block_dims.size() == thetas.size(), "gaussian_eval: one bandwidth per block");
  Index total = 0;
  for (Index d : block_dims) {
    require(d >= 1, "gaussian_eval: empty feature block");
    total += d;
  }
  require(total == static_cast<Index>(fi.size()), "gaussian_eval: blocks do not cover features");
  double expo = 0.0;
  std::size_t at = 0;
  for (std::size_t b = 0; b < block_dims.size(); ++b) {
    require(thetas[b] > 0.0, "gaussian_eval: bandwidth must be positive");
    double sq = 0.0;
    for (Index k = 0; k < block_dims[b]; ++k, ++at) {
      const double diff = fi[at] - fj[at];
      sq += diff * diff;
    }
    expo += sq / (2.0 * thetas[b] * thetas[b]);
  }
  return std::exp(-expo);
}

double gaussian_eval(std::span<const double> fi, std::span<const double> fj, double theta) {
  const Index dims[1] = {static_cast<Index>(fi.size())};
  const double th[1] = {theta};
  return gaussian_eval(fi, fj, dims, th);
}

// ---------------------------------------------------------------------------

std::vector<Index> select_landmarks(const FeatureSet& features, Index count, int iters,
                                    std::uint64_t seed) {
  const Index n = features.size();
  require(count >= 1, "select_landmarks: need at least one landmark");
  require(count <= n, "select_landmarks: more landmarks requested than data points");
  const Mat& x = features.rows();
  Rng rng = make_rng(seed, 0x6b6d);

  // k-means++ seeding
  Mat centers(count, x.cols());
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  Vec best_d2 = Vec::Constant(n, std::numeric_limits<double>::infinity());
  std::uniform_int_distribution<Index> pick_any(0, n - 1);
  Index first = pick_any(rng);
  centers.row(0) = x.row(first);
  taken[static_cast<std::size_t>(first)] = 1;
  for (Index c = 1; c < count; ++c) {
    for (Index i = 0; i < n; ++i)
      best_d2[i] = std::min(best_d2[i], (x.row(i) - centers.row(c - 1)).squaredNorm());
    double total = 0.0;
    for (Index i = 0; i < n; ++i)
      if (!taken[static_cast<std::size_t>(i)]) total += best_d2[i];
    Index chosen = -1;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)]) continue;
        target -= best_d2[i];
        chosen = i;
        if (target <= 0.0 && best_d2[i] > 0.0) break;
      }
    }
    if (chosen < 0 || taken[static_cast<std::size_t>(chosen)]) {
      // all remaining points coincide with chosen centers
      std::vector<Index> free;
      for (Index i = 0; i < n; ++i)
        if (!taken[static_cast<std::size_t>(i)]) free.push_back(i);
      std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
      chosen = free[pick(rng)];
    }
    centers.row(c) = x.row(chosen);
    taken[static_cast<std::size_t>(chosen)] = 1;
  }

  // Lloyd iterations
  std::vector<Index> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < iters; ++it) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < count; ++c) {
        const double d2 = (x.row(i) - centers.row(c)).squaredNorm();
        if (d2 < bd) {
          bd = d2;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        changed = true;
        assign[static_cast<std::size_t>(i)] = best;
      }
    }
    Mat sums = Mat::Zero(count, x.cols());
    Vec counts = Vec::Zero(count);
    for (Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
      counts[assign[static_cast<std::size_t>(i)]] += 1.0;
    }
    for (Index c = 0; c < count; ++c)
      if (counts[c] > 0) centers.row(c) = sums.row(c) / counts[c];  // empty clusters keep their center
    if (!changed) break;
  }

  // nearest unused data point per centroid
  std::fill(taken.begin(), taken.end(), 0);
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index c = 0; c < count; ++c) {
    Index best = -1;
    double bd = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      if (taken[static_cast<std::size_t>(i)]) continue;
      const double d2 = (x.row(i) - centers.row(c)).squaredNorm();
      if (d2 < bd) {
        bd = d2;
        best = i;
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    out.push_back(best);
  }
  std::sort(out.begin(), out.end());
  return out;
}

NystromResult nystrom_factor(Index n, const KernelColumnOracle& column,
                             std::span<const Index> landmarks, Index rank, double eig_floor) {
  const Index r0 = static_cast<Index>(landmarks.size());
  require(r0 >= 1, "nystrom_factor: no landmarks");
  require(rank >= 1 && rank <= r0, "nystrom_factor: rank must lie in [1, #landmarks]");
  Mat c(n, r0);
  for (Index k = 0; k < r0; ++k) {
    const Index j = landmarks[static_cast<std::size_t>(k)];
    require(j >= 0 && j < n, "nystrom_factor: landmark index out of range");
    column(j, c.col(k));
  }
  Mat w(r0, r0);
  for (Index a = 0; a < r0; ++a) w.row(a) = c.row(landmarks[static_cast<std::size_t>(a)]);
  w = 0.5 * (w + w.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Mat> es(w);
  const Vec& lam = es.eigenvalues();  // ascending
  const double lmax = lam[r0 - 1];
  NystromResult res;
  res.requested_rank = rank;
  if (lmax <= 0.0) {
    res.factor = LowRankFactor(Mat::Zero(n, 0));
    return res;
  }
  if (lam[0] < -eig_floor * lmax)
    throw Error(ErrorCode::NonPsd,
                "nystrom_factor: landmark block is indefinite (lambda_min = " +
                    std::to_string(lam[0]) + ", lambda_max = " + std::to_string(lmax) + ")");
  Index keep = 0;
  while (keep < rank && lam[r0 - 1 - keep] > eig_floor * lmax) ++keep;
  Mat proj(r0, keep);
  for (Index k = 0; k < keep; ++k)
    proj.col(k) = es.eigenvectors().col(r0 - 1 - k) / std::sqrt(lam[r0 - 1 - k]);
  res.factor = LowRankFactor(c * proj);
  res.effective_rank = keep;
  return res;
}

NystromResult gaussian_nystrom(const FeatureSet& features, double theta, Index landmarks,
                               Index rank, std::uint64_t seed, int kmeans_iters) {
  require(theta > 0.0, "gaussian_nystrom: bandwidth must be positive");
  const Index n = features.size();
  const Index r0 = std::min(landmarks, n);
  auto idx = select_landmarks(features, r0, kmeans_iters, seed);
  const Mat& x = features.rows();
  const double inv = 1.0 / (2.0 * theta * theta);
  KernelColumnOracle col = [&](Index j, Eigen::Ref<Vec> out) {
    for (Index i = 0; i < n; ++i) out[i] = std::exp(-(x.row(i) - x.row(j)).squaredNorm() * inv);
  };
  return nystrom_factor(n, col, idx, std::min(rank, r0));
}

// ---------------------------------------------------------------------------

Vec lowrank_matvec(const LowRankFactor& factor, const Vec& d) {
  require(d.size() == factor.n(), "lowrank_matvec: length mismatch");
  if (factor.rank() == 0) return Vec::Zero(d.size());
  return factor.phi() * (factor.phi().transpose() * d);
}

Mat lowrank_matvec(const LowRankFactor& factor, const Mat& d) {
  require(d.rows() == factor.n(), "lowrank_matvec: length mismatch");
  if (factor.rank() == 0) return Mat::Zero(d.rows(), d.cols());
  return factor.phi() * (factor.phi().transpose() * d);
}

namespace {

Vec hadamard_block(const Mat& pp, const Mat& pc, const Eigen::Ref<const Vec>& d) {
  if (pp.cols() == 0 || pc.cols() == 0) return Vec::Zero(d.size());
  const Mat t = d.asDiagonal() * pc;             // N x Rc
  const Mat s = pp.transpose() * t;              // Rp x Rc
  const Mat u = pp * s;                          // N x Rc
  return u.cwiseProduct(pc).rowwise().sum();
}

}  // namespace

Vec hadamard_matvec(const LowRankFactor& factor_p, const LowRankFactor& factor_c, const Vec& d,
                    const BlockMask* mask) {
  require(factor_p.n() == factor_c.n(), "hadamard_matvec: factors disagree on N");
  require(d.size() == factor_p.n(), "hadamard_matvec: length mismatch");
  if (mask == nullptr) return hadamard_block(factor_p.phi(), factor_c.phi(), d);
  require(mask->offsets().back() == d.size(), "hadamard_matvec: mask does not cover N");
  Vec out(d.size());
  for (Index b = 0; b < mask->blocks(); ++b) {
    const Index s = mask->begin(b), len = mask->length(b);
    out.segment(s, len) = hadamard_block(factor_p.phi().middleRows(s, len),
                                         factor_c.phi().middleRows(s, len), d.segment(s, len));
  }
  return out;
}

CenteredFactor centered_discriminative_factor(const LowRankFactor& phi_tilde, double kappa) {
  require(kappa > 0.0, "centered_discriminative_factor: kappa must be positive");
  const Index n = phi_tilde.n();
  require(n >= 1, "centered_discriminative_factor: empty factor");
  const double kn = kappa * static_cast<double>(n);
  const Mat& pt = phi_tilde.phi();
  Mat centered = pt.rowwise() - pt.colwise().mean();
  CenteredFactor out;
  out.scale = 1.0 / kn;
  if (pt.cols() == 0) {
    out.phi = LowRankFactor(Mat::Zero(n, 0));
    return out;
  }
  Mat m = pt.transpose() * pt;
  m.diagonal().array() += kn;
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  const Mat inv_sqrt = es.eigenvectors() *
                       es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                       es.eigenvectors().transpose();
  out.phi = LowRankFactor(centered * inv_sqrt);
  return out;
}

Vec centered_matvec(const CenteredFactor& k, const Vec& d) {
  require(d.size() == k.phi.n(), "centered_matvec: length mismatch");
  Vec out = d.array() - d.mean();
  if (k.phi.rank() > 0) out -= k.phi.phi() * (k.phi.phi().transpose() * d);
  return k.scale * out;
}

// ---------------------------------------------------------------------------

KernelTerm::KernelTerm(KernelForm form, double weight, std::optional<BlockMask> mask)
    : form_(std::move(form)), weight_(weight), mask_(std::move(mask)) {
  require(weight_ >= 0.0 && std::isfinite(weight_), "kernel weight must be finite and >= 0");
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LowRankKernel>) {
          n_ = f.factor.n();
        } else if constexpr (std::is_same_v<T, HadamardKernel>) {
          require(f.factor_p.n() == f.factor_c.n(), "hadamard kernel factors disagree on N");
          n_ = f.factor_p.n();
        } else {
          require(f.factor.scale > 0.0, "centered kernel scale must be positive");
          n_ = f.factor.phi.n();
        }
      },
      form_);
  if (mask_) {
    require(mask_->offsets().back() == n_, "kernel mask does not cover N");
    require(!std::holds_alternative<CenteredKernel>(form_),
            "centered discriminative kernels couple all images and cannot be masked");
  }
}

std::string KernelTerm::kind() const {
  switch (form_.index()) {
    case 0: return "lowrank";
    case 1: return "hadamard";
    default: return "centered_discriminative";
  }
}

Index KernelTerm::rank() const {
  return std::visit(
      [](const auto& f) -> Index {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LowRankKernel>) return f.factor.rank();
        else if constexpr (std::is_same_v<T, HadamardKernel>)
          return f.factor_p.rank() * f.factor_c.rank();
        else return f.factor.phi.rank();
      },
      form_);
}

Vec KernelTerm::apply_unweighted(const Vec& d) const {
  const BlockMask* mask = mask_ ? &*mask_ : nullptr;
  return std::visit(
      [&](const auto& f) -> Vec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LowRankKernel>) {
          if (mask == nullptr) return lowrank_matvec(f.factor, d);
          Vec out(d.size());
          const Mat& phi = f.factor.phi();
          for (Index b = 0; b < mask->blocks(); ++b) {
            const Index s = mask->begin(b), len = mask->length(b);
            out.segment(s, len) =
                phi.middleRows(s, len) * (phi.middleRows(s, len).transpose() * d.segment(s, len));
          }
          return out;
        } else if constexpr (std::is_same_v<T, HadamardKernel>) {
          return hadamard_matvec(f.factor_p, f.factor_c, d, mask);
        } else {
          return centered_matvec(f.factor, d);
        }
      },
      form_);
}

Vec KernelTerm::apply(const Vec& d) const {
  require(d.size() == n_, "kernel apply: length mismatch");
  if (weight_ == 0.0) return Vec::Zero(n_);
  return weight_ * apply_unweighted(d);
}

Mat KernelTerm::apply(const Mat& d) const {
  require(d.rows() == n_, "kernel apply: length mismatch");
  Mat out(d.rows(), d.cols());
  if (weight_ == 0.0) return Mat::Zero(d.rows(), d.cols());
  if (const auto* lr = std::get_if<LowRankKernel>(&form_); lr != nullptr && !mask_)
    return weight_ * lowrank_matvec(lr->factor, d);
  for (Index c = 0; c < d.cols(); ++c) out.col(c) = weight_ * apply_unweighted(d.col(c));
  return out;
}

Vec KernelTerm::diagonal() const {
  Vec diag = std::visit(
      [&](const auto& f) -> Vec {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, LowRankKernel>) {
          return f.factor.phi().rowwise().squaredNorm();
        } else if constexpr (std::is_same_v<T, HadamardKernel>) {
          return f.factor_p.phi().rowwise().squaredNorm().cwiseProduct(
              f.factor_c.phi().rowwise().squaredNorm());
        } else {
          const double nn = static_cast<double>(f.factor.phi.n());
          Vec dd = Vec::Constant(f.factor.phi.n(), 1.0 - 1.0 / nn);
          if (f.factor.phi.rank() > 0) dd -= f.factor.phi.phi().rowwise().squaredNorm();
          return f.factor.scale * dd;
        }
      },
      form_);
  return weight_ * diag;
}

// ---------------------------------------------------------------------------

namespace {

void put_u32(std::string& s, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint32_t get_u32(const std::string& s, std::size_t at) {
  std::uint32_t v = 0;
  for (int k = 0; k < 4; ++k)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(s[at + k])) << (8 * k);
  return v;
}

}  // namespace

std::string encode_factor_cache(const LowRankFactor& factor) {
  require(factor.n() <= std::numeric_limits<std::uint32_t>::max() &&
              factor.rank() <= std::numeric_limits<std::uint32_t>::max(),
          "factor too large for cache format");
  std::string out = "LRKF";
  put_u32(out, static_cast<std::uint32_t>(factor.n()));
  put_u32(out, static_cast<std::uint32_t>(factor.rank()));
  out.reserve(out.size() + static_cast<std::size_t>(factor.n() * factor.rank()) * 8);
  for (Index i = 0; i < factor.n(); ++i)
    for (Index j = 0; j < factor.rank(); ++j) {
      const auto bits = std::bit_cast<std::uint64_t>(factor.phi()(i, j));
      for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((bits >> (8 * k)) & 0xff));
    }
  return out;
}

LowRankFactor decode_factor_cache(const std::string& bytes) {
  if (bytes.size() < 12 || bytes.compare(0, 4, "LRKF") != 0)
    throw Error(ErrorCode::Parse, "factor cache: bad magic");
  const std::uint32_t n = get_u32(bytes, 4), r = get_u32(bytes, 8);
  const std::size_t need = 12 + static_cast<std::size_t>(n) * r * 8;
  if (bytes.size() != need)
    throw Error(ErrorCode::Parse, "factor cache: expected " + std::to_string(need) +
                                      " bytes, found " + std::to_string(bytes.size()));
  Mat phi(n, r);
  std::size_t at = 12;
  for (std::uint32_t i = 0; i < n; ++i)
    for (std::uint32_t j = 0; j < r; ++j, at += 8) {
      std::uint64_t bits = 0;
      for (int k = 0; k < 8; ++k)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + k])) << (8 * k);
      phi(i, j) = std::bit_cast<double>(bits);
    }
  return LowRankFactor(std::move(phi));
}

void write_factor_cache(const std::string& path, const LowRankFactor& factor) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open factor cache for writing: " + path);
  const std::string bytes = encode_factor_cache(factor);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::Io, "failed writing factor cache: " + path);
}

LowRankFactor read_factor_cache(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open factor cache: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return decode_factor_cache(ss.str());
}

}  // namespace lrsdcut
