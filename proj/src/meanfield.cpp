#include "meanfield.hpp"

#include <cmath>
#include <limits>

namespace lrsdcut {

namespace {

constexpr double kFixedPointTol = 1e-6;

// Row-wise softmax of -logits.
Eigen::RowVectorXd softmax_neg(const Eigen::RowVectorXd& logits) {
  const double m = logits.minCoeff();
  Eigen::RowVectorXd out = (-(logits.array() - m)).exp().matrix();
  return out / out.sum();
}

// (K Q - diag(K) o Q) mu, the pairwise field seen by each site.
Mat pairwise_field(const CrfProblem& problem, const Mat& q) {
  Mat kq = problem.kernel_apply(q);
  kq -= problem.kernel_diagonal().asDiagonal() * q;
  return kq * problem.compatibility().matrix();
}

}  // namespace

Marginals::Marginals(Mat q) : q_(std::move(q)) {
  require(q_.rows() >= 1 && q_.cols() >= 2, "marginals need N >= 1 rows and L >= 2 columns");
  for (Index i = 0; i < q_.rows(); ++i) {
    require(q_.row(i).minCoeff() >= 0.0, "marginals must be non-negative");
    require(std::abs(q_.row(i).sum() - 1.0) <= 1e-9, "marginal rows must sum to 1");
  }
}

Labeling Marginals::decode() const {
  Labeling x;
  x.labels.resize(static_cast<std::size_t>(q_.rows()));
  for (Index i = 0; i < q_.rows(); ++i) {
    Index best = 0;
    for (Index l = 1; l < q_.cols(); ++l)
      if (q_(i, l) > q_(i, best)) best = l;
    x.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return x;
}

Marginals mf_init(const CrfProblem& problem, std::uint64_t seed, MfInit mode) {
  const Index n = problem.n_vars(), l = problem.n_labels();
  Mat q(n, l);
  switch (mode) {
    case MfInit::Uniform:
      q.setConstant(1.0 / static_cast<double>(l));
      break;
    case MfInit::Unary:
      for (Index i = 0; i < n; ++i) q.row(i) = softmax_neg(problem.unary().row(i));
      break;
    case MfInit::Random: {
      Rng rng = make_rng(seed, 0x4d46);
      std::exponential_distribution<double> expo(1.0);
      for (Index i = 0; i < n; ++i) {
        for (Index k = 0; k < l; ++k) q(i, k) = expo(rng);
        q.row(i) /= q.row(i).sum();
      }
      break;
    }
  }
  return Marginals(std::move(q));
}

void mf_update_site(const CrfProblem& problem, Marginals& q, Index i) {
  const Index n = problem.n_vars();
  require(i >= 0 && i < n, "mf_update_site: site out of range");
  Vec e = Vec::Zero(n);
  e[i] = 1.0;
  Vec k_col = problem.kernel_apply(e);
  k_col[i] = 0.0;
  const Eigen::RowVectorXd field =
      (k_col.transpose() * q.q_) * problem.compatibility().matrix();
  q.q_.row(i) = softmax_neg(problem.unary().row(i) + field);
}

Marginals mf_update(const CrfProblem& problem, const Marginals& q, MfSchedule schedule) {
  require(q.matrix().rows() == problem.n_vars() && q.matrix().cols() == problem.n_labels(),
          "marginals do not match the problem");
  if (schedule == MfSchedule::Sequential) {
    Marginals out = q;
    for (Index i = 0; i < problem.n_vars(); ++i) mf_update_site(problem, out, i);
    return out;
  }
  const Mat logits = problem.unary() + pairwise_field(problem, q.matrix());
  Mat next(q.matrix().rows(), q.matrix().cols());
  for (Index i = 0; i < next.rows(); ++i) next.row(i) = softmax_neg(logits.row(i));
  return Marginals(std::move(next));
}

double mf_free_energy(const CrfProblem& problem, const Marginals& q) {
  const Mat& m = q.matrix();
  double entropy = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index l = 0; l < m.cols(); ++l)
      if (m(i, l) > 0.0) entropy += m(i, l) * std::log(m(i, l));
  const double unary = m.cwiseProduct(problem.unary()).sum();
  const double pair = 0.5 * m.cwiseProduct(pairwise_field(problem, m)).sum();
  return entropy + unary + pair;
}

MeanFieldResult mf_solve(const CrfProblem& problem, int max_iters, int restarts, std::uint64_t seed) {
  require(max_iters >= 1, "max_iters must be >= 1");
  require(restarts >= 1, "restarts must be >= 1");
  MeanFieldResult best;
  best.energy = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    Marginals q = r == 0 ? mf_init(problem, seed, MfInit::Unary)
                         : mf_init(problem, mix_seed(seed, static_cast<std::uint64_t>(r)), MfInit::Random);
    std::vector<double> trace{mf_free_energy(problem, q)};
    int it = 0;
    while (it < max_iters) {
      Marginals next = mf_update(problem, q, MfSchedule::Parallel);
      ++it;
      const double change = (next.matrix() - q.matrix()).cwiseAbs().maxCoeff();
      q = std::move(next);
      trace.push_back(mf_free_energy(problem, q));
      if (change < kFixedPointTol) break;
    }
    Labeling x = q.decode();
    const double e = energy(problem, x);
    if (e < best.energy) {
      best.energy = e;
      best.labels = std::move(x);
      best.free_energy = std::move(trace);
      best.restart = r;
      best.iterations = it;
    }
  }
  return best;
}

}  // namespace lrsdcut
