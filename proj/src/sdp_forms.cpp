#include "sdp_forms.hpp"

namespace lrsdcut {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Index pair_index(Index a, Index b, Index labels) {
  require(a != b && a >= 0 && b >= 0 && a < labels && b < labels, "pair_index: invalid pair");
  if (a > b) std::swap(a, b);
  return a * labels - a * (a + 1) / 2 + (b - a - 1);
}

void SdpForm::check_u(const Vec& u) const {
  require(u.size() == constraints(), "dual vector has wrong length");
}

void SdpForm::check_d(const Vec& d) const {
  require(d.size() == dim(), "operand has wrong length");
}

Vec SdpForm::apply_c(const Vec& u, const Vec& d) const {
  check_u(u);
  check_d(d);
  Vec a(dim()), bu(dim());
  apply_a(d, a);
  apply_constraints(u, d, bu);
  return -(a - shift_ * d) - bu;
}

// ---------------------------------------------------------------------------

PottsSdp::PottsSdp(const CrfProblem& crf) : SdpForm(crf), n_(crf.n_vars()), l_(crf.n_labels()) {
  require(crf.is_potts(), "PottsSdp requires a Potts problem", ErrorCode::InvalidState);
  b_ = Vec::Zero(constraints());
  b_.segment(u1_offset(), l_).setOnes();
  b_.segment(u3_offset(), n_).setOnes();
  b_.segment(u4_offset(), n_).setOnes();
}

void PottsSdp::apply_a(const Vec& d, Vec& out) const {
  check_d(d);
  const auto d1 = d.head(l_);
  const auto d2 = d.tail(n_);
  const Mat& h = crf().unary();
  out.resize(dim());
  out.head(l_) = 0.5 * (h.transpose() * d2);
  out.tail(n_) = 0.5 * (h * d1 - crf().kernel_apply(Vec(d2)));
}

void PottsSdp::apply_constraints(const Vec& u, const Vec& d, Vec& out) const {
  check_u(u);
  check_d(d);
  const auto d1 = d.head(l_);
  const auto d2 = d.tail(n_);
  const auto u1 = u.segment(u1_offset(), l_);
  const auto u2 = u.segment(u2_offset(), pair_count(l_));
  const auto u3 = u.segment(u3_offset(), n_);
  const auto u4 = u.segment(u4_offset(), n_);
  out.resize(dim());
  const double u3d2 = u3.dot(d2);
  for (Index a = 0; a < l_; ++a) {
    double acc = u1[a] * d1[a] + 0.5 * u3d2;
    for (Index b = 0; b < l_; ++b)
      if (b != a) acc += 0.5 * u2[pair_index(a, b, l_)] * d1[b];
    out[a] = acc;
  }
  out.tail(n_) = 0.5 * d1.sum() * u3 + u4.cwiseProduct(d2);
}

Vec PottsSdp::constraint_products(const Mat& z) const {
  require(z.rows() == dim(), "constraint_products: factor has wrong row count");
  Vec g(constraints());
  const auto zl = z.topRows(l_);
  const auto zv = z.bottomRows(n_);
  for (Index a = 0; a < l_; ++a) g[u1_offset() + a] = zl.row(a).squaredNorm();
  for (Index a = 0; a < l_; ++a)
    for (Index b = a + 1; b < l_; ++b) g[u2_offset() + pair_index(a, b, l_)] = zl.row(a).dot(zl.row(b));
  const Vec label_sum = zl.colwise().sum().transpose();
  g.segment(u3_offset(), n_) = zv * label_sum;
  g.segment(u4_offset(), n_) = zv.rowwise().squaredNorm();
  return g;
}

std::vector<Mat> PottsSdp::rounding_scores(const Mat& psi_p) const {
  return {psi_p.bottomRows(n_)};
}

double PottsSdp::lifted_objective(const Labeling& x) const {
  return lifted_energy(crf(), IndicatorMatrix::from_labeling(x, l_));
}

// ---------------------------------------------------------------------------

GeneralSdp::GeneralSdp(const CrfProblem& crf) : SdpForm(crf), n_(crf.n_vars()), l_(crf.n_labels()) {
  u_ = crf.compatibility().matrix().array() - 1.0;
  b_ = Vec::Zero(constraints());
  b_.head(n_).setOnes();
}

void GeneralSdp::apply_a(const Vec& d, Vec& out) const {
  check_d(d);
  const Mat dm = Eigen::Map<const RowMajor>(d.data(), n_, l_);
  const Mat kdu = crf().kernel_apply(dm) * u_;
  const RowMajor hd = crf().unary().cwiseProduct(dm) + 0.5 * kdu;
  out = Eigen::Map<const Vec>(hd.data(), n_ * l_);
}

void GeneralSdp::apply_constraints(const Vec& u, const Vec& d, Vec& out) const {
  check_u(u);
  check_d(d);
  const Index p = pair_count(l_);
  out.resize(dim());
  for (Index i = 0; i < n_; ++i) {
    const auto u2 = u.segment(n_ + i * p, p);
    for (Index a = 0; a < l_; ++a) {
      double acc = u[i] * d[i * l_ + a];
      for (Index b = 0; b < l_; ++b)
        if (b != a) acc += 0.5 * u2[pair_index(a, b, l_)] * d[i * l_ + b];
      out[i * l_ + a] = acc;
    }
  }
}

Vec GeneralSdp::constraint_products(const Mat& z) const {
  require(z.rows() == dim(), "constraint_products: factor has wrong row count");
  const Index p = pair_count(l_);
  Vec g(constraints());
  for (Index i = 0; i < n_; ++i) {
    const auto zi = z.middleRows(i * l_, l_);
    g[i] = zi.squaredNorm();
    for (Index a = 0; a < l_; ++a)
      for (Index b = a + 1; b < l_; ++b) g[n_ + i * p + pair_index(a, b, l_)] = zi.row(a).dot(zi.row(b));
  }
  return g;
}

std::vector<Mat> GeneralSdp::rounding_scores(const Mat& psi_p) const {
  require(psi_p.cols() == 1, "general rounding expects a single projection column");
  const Mat s = Eigen::Map<const RowMajor>(psi_p.data(), n_, l_);
  return {s, -s};
}

double GeneralSdp::lifted_objective(const Labeling& x) const {
  return lifted_energy_general(crf(), IndicatorMatrix::from_labeling(x, l_).vectorized());
}

std::unique_ptr<SdpForm> make_sdp_form(const CrfProblem& crf) {
  if (crf.is_potts()) return std::make_unique<PottsSdp>(crf);
  return std::make_unique<GeneralSdp>(crf);
}

}  // namespace lrsdcut
