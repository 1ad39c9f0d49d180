#include "crf_model.hpp"

#include <cmath>

namespace lrsdcut {

Compatibility Compatibility::potts(Index labels) {
  require(labels >= 2, "need at least two labels");
  Mat mu = Mat::Ones(labels, labels);
  mu.diagonal().setZero();
  return Compatibility(std::move(mu), true);
}

Compatibility Compatibility::general(Mat mu) {
  require(mu.rows() == mu.cols(), "compatibility matrix must be square");
  require(mu.rows() >= 2, "need at least two labels");
  for (Index l = 0; l < mu.rows(); ++l) {
    require(mu(l, l) == 0.0, "compatibility must vanish on the diagonal");
    for (Index k = 0; k < mu.cols(); ++k) {
      require(std::isfinite(mu(l, k)) && mu(l, k) >= 0.0 && mu(l, k) <= 1.0,
              "compatibility entries must lie in [0, 1]");
      require(mu(l, k) == mu(k, l), "compatibility must be symmetric");
    }
  }
  return Compatibility(std::move(mu), false);
}

CrfProblem::CrfProblem(Mat unary, std::vector<KernelTerm> kernels, Compatibility compat)
    : unary_(std::move(unary)), kernels_(std::move(kernels)), compat_(std::move(compat)) {
  require(unary_.rows() >= 1, "problem needs at least one variable");
  require(unary_.cols() >= 2, "problem needs at least two labels");
  require(unary_.allFinite(), "unary potentials must be finite");
  require(compat_.labels() == unary_.cols(), "compatibility size does not match label count");
  for (const auto& k : kernels_) require(k.n() == unary_.rows(), "kernel size does not match N");
}

Mat CrfProblem::kernel_apply(const Mat& d) const {
  require(d.rows() == n_vars(), "kernel_apply: length mismatch");
  Mat out = Mat::Zero(d.rows(), d.cols());
  for (const auto& k : kernels_) out += k.apply(d);
  return out;
}

Vec CrfProblem::kernel_apply(const Vec& d) const {
  require(d.size() == n_vars(), "kernel_apply: length mismatch");
  Vec out = Vec::Zero(d.size());
  for (const auto& k : kernels_) out += k.apply(d);
  return out;
}

Vec CrfProblem::kernel_diagonal() const {
  Vec out = Vec::Zero(n_vars());
  for (const auto& k : kernels_) out += k.diagonal();
  return out;
}

Index CrfProblem::kernel_rank() const {
  Index r = 0;
  for (const auto& k : kernels_) r += k.rank();
  return r;
}

void CrfProblem::validate_labeling(const Labeling& x) const {
  require(x.size() == n_vars(), "labeling length does not match N");
  for (int l : x.labels) require(l >= 0 && l < n_labels(), "label out of range");
}

// ---------------------------------------------------------------------------

IndicatorMatrix IndicatorMatrix::from_labeling(const Labeling& x, Index labels) {
  Mat m = Mat::Zero(x.size(), labels);
  for (Index i = 0; i < x.size(); ++i) {
    require(x[i] >= 0 && x[i] < labels, "label out of range");
    m(i, x[i]) = 1.0;
  }
  return IndicatorMatrix(std::move(m));
}

IndicatorMatrix::IndicatorMatrix(Mat x) : x_(std::move(x)) {
  for (Index i = 0; i < x_.rows(); ++i) {
    int ones = 0;
    for (Index l = 0; l < x_.cols(); ++l) {
      require(x_(i, l) == 0.0 || x_(i, l) == 1.0, "indicator entries must be 0 or 1");
      ones += x_(i, l) == 1.0;
    }
    require(ones == 1, "indicator rows must sum to exactly one");
  }
}

Labeling IndicatorMatrix::to_labeling() const {
  Labeling x;
  x.labels.resize(static_cast<std::size_t>(x_.rows()));
  for (Index i = 0; i < x_.rows(); ++i) {
    Index l = 0;
    x_.row(i).maxCoeff(&l);
    x.labels[static_cast<std::size_t>(i)] = static_cast<int>(l);
  }
  return x;
}

Vec IndicatorMatrix::vectorized() const {
  const Index n = x_.rows(), l = x_.cols();
  Vec y(n * l);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < l; ++k) y[i * l + k] = x_(i, k);
  return y;
}

// ---------------------------------------------------------------------------

double lifted_energy(const CrfProblem& problem, const IndicatorMatrix& x) {
  require(problem.is_potts(), "lifted_energy requires Potts compatibility; use lifted_energy_general",
          ErrorCode::InvalidState);
  const Mat& xm = x.matrix();
  require(xm.rows() == problem.n_vars() && xm.cols() == problem.n_labels(),
          "indicator shape does not match problem");
  const Mat kx = problem.kernel_apply(xm);
  return (problem.unary().array() * xm.array()).sum() - 0.5 * (xm.array() * kx.array()).sum();
}

double lifted_energy_general(const CrfProblem& problem, const Vec& y) {
  require(!problem.is_potts(), "lifted_energy_general requires a general compatibility",
          ErrorCode::InvalidState);
  const Index n = problem.n_vars(), l = problem.n_labels();
  require(y.size() == n * l, "vectorized indicator has wrong length");
  // D(i, k) = y[i L + k]
  const Mat d = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      y.data(), n, l);
  const Mat u = problem.compatibility().matrix().array() - 1.0;
  const Mat kd = problem.kernel_apply(d);
  return (problem.unary().array() * d.array()).sum() + 0.5 * (d.array() * (kd * u).array()).sum();
}

double energy_offset(const CrfProblem& problem) {
  const Vec ones = Vec::Ones(problem.n_vars());
  return 0.5 * ones.dot(problem.kernel_apply(ones));
}

double energy(const CrfProblem& problem, const Labeling& x) {
  problem.validate_labeling(x);
  const auto ind = IndicatorMatrix::from_labeling(x, problem.n_labels());
  const double lifted =
      problem.is_potts() ? lifted_energy(problem, ind) : lifted_energy_general(problem, ind.vectorized());
  return lifted + energy_offset(problem);
}

Labeling unary_argmin(const CrfProblem& problem) {
  Labeling x;
  x.labels.resize(static_cast<std::size_t>(problem.n_vars()));
  for (Index i = 0; i < problem.n_vars(); ++i) {
    Index best = 0;
    for (Index l = 1; l < problem.n_labels(); ++l)
      if (problem.unary()(i, l) < problem.unary()(i, best)) best = l;
    x.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return x;
}

}  // namespace lrsdcut
