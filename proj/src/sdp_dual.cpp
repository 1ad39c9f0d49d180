#include "sdp_dual.hpp"

#include <algorithm>

namespace lrsdcut {

LinearOperator c_operator(const SdpForm& form, const Vec& u) {
  require(u.size() == form.constraints(), "c_operator: dual vector has wrong length");
  LinearOperator op;
  op.dim = form.dim();
  op.apply = [&form, u](const Vec& in, Vec& out) { out = form.apply_c(u, in); };
  return op;
}

PsdFactor psd_part_of_c(const SdpForm& form, const Vec& u, const DualSettings& s) {
  const Index n = form.dim();
  const Index cap = s.max_rank > 0 ? std::min(s.max_rank, n) : n;
  return leading_psd_part(c_operator(form, u), cap, s.tol, s.seed, s.initial_rank);
}

double dual_objective(const SdpForm& form, const Vec& u, const PsdFactor& psd, double gamma) {
  require(gamma > 0.0, "gamma must be positive");
  const double eta = form.eta();
  return -0.5 * gamma * psd_frob_norm_sq(psd) - u.dot(form.rhs()) - eta * eta / (2.0 * gamma);
}

Vec dual_gradient(const SdpForm& form, const Vec& u, const PsdFactor& psd, double gamma) {
  require(u.size() == form.constraints(), "dual_gradient: dual vector has wrong length");
  if (psd.rank() == 0) return -form.rhs();
  return gamma * form.constraint_products(psd.scaled_vectors()) - form.rhs();
}

DualEvaluation evaluate_dual(const SdpForm& form, const Vec& u, const DualSettings& s) {
  DualEvaluation ev;
  ev.psd = psd_part_of_c(form, u, s);
  ev.value = dual_objective(form, u, ev.psd, s.gamma);
  ev.gradient = dual_gradient(form, u, ev.psd, s.gamma);
  ev.approximate = ev.psd.truncated;
  return ev;
}

double spectral_shift_init(SdpForm& form, Index r, std::uint64_t seed, double tol) {
  const Index n = form.dim();
  require(r >= 1 && r <= n, "spectral_shift_init: r must lie in [1, n]");
  LinearOperator neg_a;
  neg_a.dim = n;
  neg_a.apply = [&form](const Vec& in, Vec& out) {
    form.apply_a(in, out);
    out = -out;
  };
  LanczosOptions opt{tol, 100, mix_seed(seed, 0x5348)};
  EigenPairs top = largest_eigenpairs(neg_a, r, opt);
  // later passes on the complement catch repeated eigenvalues among the r largest
  for (std::uint64_t pass = 1; top.values.size() == r && pass < 8; ++pass) {
    LanczosOptions o{tol, 100, mix_seed(seed, 0x5348 + pass)};
    EigenPairs more = largest_eigenpairs(neg_a, 1, o, top.vectors);
    if (more.values.size() == 0 || more.values[0] <= top.values[r - 1]) break;
    Mat v(n, r + 1);
    v << top.vectors, more.vectors.col(0);
    Vec lam(r + 1);
    lam << top.values, more.values[0];
    std::vector<Index> order(static_cast<std::size_t>(r + 1));
    for (Index k = 0; k <= r; ++k) order[static_cast<std::size_t>(k)] = k;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return lam[a] > lam[b]; });
    for (Index k = 0; k < r; ++k) {
      top.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
      top.values[k] = lam[order[static_cast<std::size_t>(k)]];
    }
  }
  if (!top.converged)
    throw Error(ErrorCode::NotConverged, "spectral_shift_init: eigensolver did not converge");
  const double nu = -top.values[r - 1];
  form.set_shift(nu);
  return nu;
}

double primal_objective(const SdpForm& form, const Mat& z, double scale) {
  require(z.rows() == form.dim(), "primal_objective: factor has wrong row count");
  double acc = 0.0;
  Vec az(form.dim());
  for (Index k = 0; k < z.cols(); ++k) {
    form.apply_a(z.col(k), az);
    acc += z.col(k).dot(az);
  }
  return scale * acc;
}

}  // namespace lrsdcut
