#include "eig_lanczos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lrsdcut {

Mat PsdFactor::scaled_vectors() const {
  return vectors * values.cwiseSqrt().asDiagonal();
}

double psd_frob_norm_sq(const PsdFactor& factor) { return factor.values.squaredNorm(); }

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Orthogonalize w against the locked columns and the first `cols` columns of
// basis, two classical Gram-Schmidt passes. Returns the basis coefficients.
Vec orthogonalize(Vec& w, const Mat& locked, const Mat& basis, Index cols) {
  Vec coeff = Vec::Zero(cols);
  for (int pass = 0; pass < 2; ++pass) {
    if (locked.cols() > 0) w.noalias() -= locked * (locked.transpose() * w);
    if (cols > 0) {
      const Vec h = basis.leftCols(cols).transpose() * w;
      w.noalias() -= basis.leftCols(cols) * h;
      coeff += h;
    }
  }
  return coeff;
}

// Random unit vector orthogonal to locked and basis[:, :cols]; zero if the
// space is exhausted.
Vec random_orthogonal(Index n, Rng& rng, const Mat& locked, const Mat& basis, Index cols) {
  for (int attempt = 0; attempt < 3; ++attempt) {
    Vec v = gaussian_vector(n, rng);
    const double before = v.norm();
    orthogonalize(v, locked, basis, cols);
    const double nv = v.norm();
    if (nv > 1e-8 * before) return v / nv;
  }
  return Vec::Zero(n);
}

}  // namespace

EigenPairs largest_eigenpairs(const LinearOperator& op, Index nev, const LanczosOptions& opt,
                              const Mat& locked) {
  const Index n = op.dim;
  require(n >= 1, "largest_eigenpairs: empty operator");
  require(locked.cols() == 0 || locked.rows() == n, "largest_eigenpairs: locked basis has wrong size");
  const Index avail = n - locked.cols();
  EigenPairs out;
  nev = std::min(nev, avail);
  if (nev <= 0) {
    out.vectors = Mat(n, 0);
    out.converged = true;
    return out;
  }
  const Index m = std::min<Index>(2 * nev + 10, avail);

  Rng rng = make_rng(opt.seed, 0x4c61);
  Mat basis = Mat::Zero(n, m + 1);
  Mat t = Mat::Zero(m, m);
  basis.col(0) = random_orthogonal(n, rng, locked, basis, 0);

  Index kept = 0;
  Vec w(n);
  for (int restart = 0;; ++restart) {
    double beta_last = 0.0;
    Index built = m;
    for (Index j = kept; j < m; ++j) {
      op.apply(basis.col(j), w);
      ++out.matvecs;
      const Vec h = orthogonalize(w, locked, basis, j + 1);
      t.block(0, j, j + 1, 1) = h;
      t.block(j, 0, 1, j + 1) = h.transpose();
      const double beta = w.norm();
      const double scale = std::max(t.topLeftCorner(j + 1, j + 1).cwiseAbs().maxCoeff(), 1e-300);
      beta_last = beta;
      if (beta <= 64 * kEps * scale) {
        // invariant subspace reached
        beta_last = 0.0;
        Vec v = random_orthogonal(n, rng, locked, basis, j + 1);
        if (v.squaredNorm() == 0.0) {
          built = j + 1;  // complement exhausted
          basis.col(j + 1).setZero();
          break;
        }
        basis.col(j + 1) = v;
      } else {
        basis.col(j + 1) = w / beta;
      }
    }

    Eigen::SelfAdjointEigenSolver<Mat> es(t.topLeftCorner(built, built));
    const Vec& theta = es.eigenvalues();  // ascending
    const Mat& s = es.eigenvectors();
    const double radius = std::max(std::abs(theta[0]), std::abs(theta[built - 1]));
    out.spectral_radius = std::max(out.spectral_radius, radius);
    const Index want = std::min(nev, built);

    Vec res(want);
    bool all_conv = true;
    for (Index k = 0; k < want; ++k) {
      const Index idx = built - 1 - k;
      res[k] = std::abs(beta_last * s(built - 1, idx));
      if (res[k] > opt.tol * std::max(out.spectral_radius, 1e-300)) all_conv = false;
    }
    if (built < m) all_conv = true;  // exact invariant subspace of the whole complement

    if (all_conv || restart >= opt.max_restarts) {
      out.values.resize(want);
      out.vectors.resize(n, want);
      for (Index k = 0; k < want; ++k) {
        const Index idx = built - 1 - k;
        out.values[k] = theta[idx];
        out.vectors.col(k) = basis.leftCols(built) * s.col(idx);
      }
      out.residuals = res;
      out.converged = all_conv;
      out.restarts = restart;
      return out;
    }

    // thick restart: keep the leading Ritz vectors plus the residual direction
    const Index keep = std::min<Index>(nev + std::max<Index>((m - nev) / 2, 1), m - 1);
    Mat sk(m, keep);
    for (Index k = 0; k < keep; ++k) sk.col(k) = s.col(m - 1 - k);
    const Vec resid_dir = basis.col(m);
    basis.leftCols(keep) = basis.leftCols(m) * sk;
    basis.col(keep) = resid_dir;
    t.setZero();
    for (Index k = 0; k < keep; ++k) {
      t(k, k) = theta[m - 1 - k];
      t(keep, k) = t(k, keep) = beta_last * sk(m - 1, k);
    }
    if (basis.col(keep).squaredNorm() == 0.0)
      basis.col(keep) = random_orthogonal(n, rng, locked, basis, keep);
    kept = keep;
  }
}

PsdFactor leading_psd_part(const LinearOperator& op, Index max_rank, double tol,
                           std::uint64_t seed, Index initial_request) {
  const Index n = op.dim;
  require(max_rank >= 1 && max_rank <= n, "leading_psd_part: max_rank must lie in [1, n]");
  require(tol > 0.0, "leading_psd_part: tol must be positive");
  PsdFactor f;
  f.vectors = Mat(n, 0);
  f.values = Vec(0);
  Index want = initial_request > 0 ? std::min(initial_request, max_rank) : std::min<Index>(max_rank, 8);
  Vec all_res(0);

  auto threshold = [&] { return tol * std::max(f.spectral_radius, 1.0); };

  for (std::uint64_t pass = 0;; ++pass) {
    const Index found = f.rank();
    const Index room = std::min(max_rank, n) - found;
    if (found >= n) break;
    if (room <= 0) {
      LanczosOptions probe_opt{tol, 50, mix_seed(seed, pass)};
      auto probe = largest_eigenpairs(op, 1, probe_opt, f.vectors);
      f.spectral_radius = std::max(f.spectral_radius, probe.spectral_radius);
      f.truncated = probe.values.size() > 0 && probe.values[0] > threshold();
      break;
    }
    const Index nev = std::min(want, room);
    LanczosOptions o{tol, 50, mix_seed(seed, pass)};
    EigenPairs res = largest_eigenpairs(op, nev, o, f.vectors);
    f.spectral_radius = std::max(f.spectral_radius, res.spectral_radius);
    Index accepted = 0;
    while (accepted < res.values.size() && res.values[accepted] > threshold()) ++accepted;
    if (accepted > 0) {
      Mat v(n, found + accepted);
      v << f.vectors, res.vectors.leftCols(accepted);
      Vec lam(found + accepted);
      lam << f.values, res.values.head(accepted);
      f.vectors = std::move(v);
      f.values = std::move(lam);
      Vec r(all_res.size() + accepted);
      r << all_res, res.residuals.head(accepted);
      all_res = std::move(r);
    }
    if (!res.converged) {
      throw EigenSolverError("leading_psd_part: Lanczos did not converge within the restart cap",
                             f, all_res);
    }
    if (accepted == 0) break;
    if (accepted < nev) want = std::min<Index>(nev, 4);  // confirmation pass
    else want = 2 * want;
  }

  // sort descending; passes on the complement may surface larger values late
  std::vector<Index> order(static_cast<std::size_t>(f.rank()));
  for (Index k = 0; k < f.rank(); ++k) order[static_cast<std::size_t>(k)] = k;
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return f.values[a] > f.values[b]; });
  PsdFactor sorted;
  sorted.vectors.resize(n, f.rank());
  sorted.values.resize(f.rank());
  for (Index k = 0; k < f.rank(); ++k) {
    sorted.vectors.col(k) = f.vectors.col(order[static_cast<std::size_t>(k)]);
    sorted.values[k] = f.values[order[static_cast<std::size_t>(k)]];
  }
  sorted.truncated = f.truncated;
  sorted.spectral_radius = f.spectral_radius;
  return sorted;
}

}  // namespace lrsdcut
