#include "oracle.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <variant>

namespace lrsdcut::oracle {

namespace {

Mat outer(const Mat& phi) {
  Mat k(phi.rows(), phi.rows());
  for (Index i = 0; i < phi.rows(); ++i)
    for (Index j = 0; j < phi.rows(); ++j) {
      double s = 0.0;
      for (Index r = 0; r < phi.cols(); ++r) s += phi(i, r) * phi(j, r);
      k(i, j) = s;
    }
  return k;
}

void apply_mask(Mat& k, const BlockMask& mask) {
  std::vector<Index> block(static_cast<std::size_t>(k.rows()));
  for (Index b = 0; b < mask.blocks(); ++b)
    for (Index i = mask.begin(b); i < mask.begin(b + 1); ++i) block[static_cast<std::size_t>(i)] = b;
  for (Index i = 0; i < k.rows(); ++i)
    for (Index j = 0; j < k.cols(); ++j)
      if (block[static_cast<std::size_t>(i)] != block[static_cast<std::size_t>(j)]) k(i, j) = 0.0;
}

double mu(const CrfProblem& p, int a, int b) {
  if (p.is_potts()) return a == b ? 0.0 : 1.0;
  return p.compatibility().matrix()(a, b);
}

void check_enumerable(const CrfProblem& p) {
  const double count = std::pow(static_cast<double>(p.n_labels()), static_cast<double>(p.n_vars()));
  if (count > kMaxEnumeration) {
    std::ostringstream os;
    os << "brute force refused: L^N = " << p.n_labels() << "^" << p.n_vars() << " = " << count
       << " exceeds " << kMaxEnumeration;
    throw Error(ErrorCode::TooLarge, os.str());
  }
}

}  // namespace

Mat dense_kernel(const CrfProblem& problem) {
  const Index n = problem.n_vars();
  Mat total = Mat::Zero(n, n);
  for (const KernelTerm& t : problem.kernels()) {
    Mat k;
    if (const auto* lr = std::get_if<LowRankKernel>(&t.form())) {
      k = outer(lr->factor.phi());
    } else if (const auto* hd = std::get_if<HadamardKernel>(&t.form())) {
      const Mat kp = outer(hd->factor_p.phi());
      const Mat kc = outer(hd->factor_c.phi());
      k = Mat(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) k(i, j) = kp(i, j) * kc(i, j);
    } else {
      const auto& cf = std::get<CenteredKernel>(t.form()).factor;
      const Mat pp = outer(cf.phi.phi());
      k = Mat(n, n);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
          k(i, j) = cf.scale * ((i == j ? 1.0 : 0.0) - 1.0 / static_cast<double>(n) - pp(i, j));
    }
    if (t.mask()) apply_mask(k, *t.mask());
    total += t.weight() * k;
  }
  return total;
}

double dense_energy(const CrfProblem& problem, const Mat& k, const Labeling& x) {
  const Index n = problem.n_vars();
  double e = 0.0;
  for (Index i = 0; i < n; ++i) e += problem.unary()(i, x[i]);
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) e += k(i, j) * mu(problem, x[i], x[j]);
  return e;
}

MapResult brute_force_map(const CrfProblem& problem) {
  check_enumerable(problem);
  const Mat k = dense_kernel(problem);
  const Index n = problem.n_vars();
  const int l = static_cast<int>(problem.n_labels());
  Labeling x;
  x.labels.assign(static_cast<std::size_t>(n), 0);
  MapResult best;
  best.energy = std::numeric_limits<double>::infinity();
  // odometer with the last variable fastest: lexicographic order
  while (true) {
    const double e = dense_energy(problem, k, x);
    ++best.enumerated;
    if (e < best.energy) {
      best.energy = e;
      best.labels = x;
    }
    Index pos = n - 1;
    while (pos >= 0 && x.labels[static_cast<std::size_t>(pos)] == l - 1) {
      x.labels[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++x.labels[static_cast<std::size_t>(pos)];
  }
  return best;
}

MapResult brute_force_map_recursive(const CrfProblem& problem) {
  check_enumerable(problem);
  const Mat k = dense_kernel(problem);
  const Index n = problem.n_vars();
  const int l = static_cast<int>(problem.n_labels());
  MapResult best;
  best.energy = std::numeric_limits<double>::infinity();
  std::vector<int> cur(static_cast<std::size_t>(n));
  std::function<void(Index, double)> visit = [&](Index i, double partial) {
    if (i == n) {
      ++best.enumerated;
      if (partial < best.energy) {
        best.energy = partial;
        best.labels.labels = cur;
      }
      return;
    }
    for (int a = 0; a < l; ++a) {
      double inc = problem.unary()(i, a);
      for (Index j = 0; j < i; ++j) inc += k(j, i) * mu(problem, cur[static_cast<std::size_t>(j)], a);
      cur[static_cast<std::size_t>(i)] = a;
      visit(i + 1, partial + inc);
    }
  };
  visit(0, 0.0);
  return best;
}

DenseSdp dense_sdp(const CrfProblem& problem) {
  const Index n = problem.n_vars(), l = problem.n_labels();
  const Mat k = dense_kernel(problem);
  const Mat& h = problem.unary();
  DenseSdp s;
  std::vector<double> rhs;
  auto unit = [](Index dim, Index a, Index b) {
    Mat m = Mat::Zero(dim, dim);
    m(a, b) += 0.5;
    m(b, a) += 0.5;
    return m;
  };
  if (problem.is_potts()) {
    const Index dim = n + l;
    require(dim <= kMaxDenseDim, "dense_sdp: dimension exceeds the dense guard", ErrorCode::TooLarge);
    s.eta = static_cast<double>(dim);
    s.a = Mat::Zero(dim, dim);
    for (Index i = 0; i < n; ++i)
      for (Index a = 0; a < l; ++a) {
        s.a(l + i, a) = 0.5 * h(i, a);
        s.a(a, l + i) = 0.5 * h(i, a);
      }
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < n; ++j) s.a(l + i, l + j) = -0.5 * k(i, j);
    // Y_aa = 1
    for (Index a = 0; a < l; ++a) {
      s.b_mats.push_back(unit(dim, a, a));
      rhs.push_back(1.0);
    }
    // Y_ab = 0, a < b
    for (Index a = 0; a < l; ++a)
      for (Index b = a + 1; b < l; ++b) {
        s.b_mats.push_back(unit(dim, a, b));
        rhs.push_back(0.0);
      }
    // sum_a Y_{i, a} = 1
    for (Index i = 0; i < n; ++i) {
      Mat m = Mat::Zero(dim, dim);
      for (Index a = 0; a < l; ++a) m += unit(dim, l + i, a);
      s.b_mats.push_back(m);
      rhs.push_back(1.0);
    }
    // Y_ii = 1
    for (Index i = 0; i < n; ++i) {
      s.b_mats.push_back(unit(dim, l + i, l + i));
      rhs.push_back(1.0);
    }
  } else {
    const Index dim = n * l;
    require(dim <= kMaxDenseDim, "dense_sdp: dimension exceeds the dense guard", ErrorCode::TooLarge);
    s.eta = static_cast<double>(n);
    const Mat& m = problem.compatibility().matrix();
    s.a = Mat::Zero(dim, dim);
    for (Index i = 0; i < n; ++i)
      for (Index a = 0; a < l; ++a)
        for (Index j = 0; j < n; ++j)
          for (Index b = 0; b < l; ++b)
            s.a(i * l + a, j * l + b) = 0.5 * k(i, j) * (m(a, b) - 1.0) + (i == j && a == b ? h(i, a) : 0.0);
    for (Index i = 0; i < n; ++i) {
      Mat t = Mat::Zero(dim, dim);
      for (Index a = 0; a < l; ++a) t(i * l + a, i * l + a) = 1.0;
      s.b_mats.push_back(t);
      rhs.push_back(1.0);
    }
    for (Index i = 0; i < n; ++i)
      for (Index a = 0; a < l; ++a)
        for (Index b = a + 1; b < l; ++b) {
          s.b_mats.push_back(unit(dim, i * l + a, i * l + b));
          rhs.push_back(0.0);
        }
  }
  s.b = Eigen::Map<Vec>(rhs.data(), static_cast<Index>(rhs.size()));
  return s;
}

Mat dense_psd_part(const Mat& symmetric) {
  Eigen::SelfAdjointEigenSolver<Mat> es(symmetric);
  const Vec lam = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

DenseSdpPieces dense_sdp_pieces(const DenseSdp& sdp, const Vec& u, double gamma, double nu) {
  require(u.size() == static_cast<Index>(sdp.b_mats.size()), "dense_sdp_pieces: dual vector has wrong length");
  const Index dim = sdp.a.rows();
  DenseSdpPieces out;
  out.c = -(sdp.a - nu * Mat::Identity(dim, dim));
  for (std::size_t i = 0; i < sdp.b_mats.size(); ++i) out.c -= u[static_cast<Index>(i)] * sdp.b_mats[i];
  Eigen::SelfAdjointEigenSolver<Mat> es(out.c);
  out.eigenvalues = es.eigenvalues();
  const Vec lam = es.eigenvalues().cwiseMax(0.0);
  out.c_plus = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
  out.dual = -0.5 * gamma * out.c_plus.squaredNorm() - u.dot(sdp.b) - sdp.eta * sdp.eta / (2.0 * gamma);
  out.gradient.resize(u.size());
  for (std::size_t i = 0; i < sdp.b_mats.size(); ++i)
    out.gradient[static_cast<Index>(i)] =
        gamma * out.c_plus.cwiseProduct(sdp.b_mats[i]).sum() - sdp.b[static_cast<Index>(i)];
  return out;
}

Mat lifted_matrix(const CrfProblem& problem, const Labeling& x) {
  const Index n = problem.n_vars(), l = problem.n_labels();
  if (problem.is_potts()) {
    Mat v = Mat::Zero(n + l, l);
    for (Index a = 0; a < l; ++a) v(a, a) = 1.0;
    for (Index i = 0; i < n; ++i) v(l + i, x[i]) = 1.0;
    return v * v.transpose();
  }
  Vec y = Vec::Zero(n * l);
  for (Index i = 0; i < n; ++i) y[i * l + x[i]] = 1.0;
  return y * y.transpose();
}

}  // namespace lrsdcut::oracle
