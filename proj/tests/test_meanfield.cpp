#include "meanfield.hpp"
#include "oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace lrsdcut;
using namespace lrsdcut::testing;

namespace {

// Q_i(l) ~ exp(-psi_i(l) - sum_{j != i} sum_l' Q_j(l') K_ij mu(l, l'))
Mat double_loop_update(const Mat& h, const Mat& k, const Mat& mu, const Mat& q) {
  Mat out(q.rows(), q.cols());
  for (Index i = 0; i < q.rows(); ++i) {
    for (Index l = 0; l < q.cols(); ++l) {
      double s = h(i, l);
      for (Index j = 0; j < q.rows(); ++j) {
        if (j == i) continue;
        for (Index lp = 0; lp < q.cols(); ++lp) s += q(j, lp) * k(i, j) * mu(l, lp);
      }
      out(i, l) = std::exp(-s);
    }
    out.row(i) /= out.row(i).sum();
  }
  return out;
}

}  // namespace

TEST_CASE("mf_init") {
  const CrfProblem p(random_uniform(3, 4, 1), {}, Compatibility::potts(4));
  CHECK(mf_init(p, 0, MfInit::Uniform).matrix().isApproxToConstant(0.25));

  const CrfProblem flat(Mat::Zero(3, 2), {}, Compatibility::potts(2));
  CHECK(mf_init(flat, 0, MfInit::Unary).matrix().isApproxToConstant(0.5));

  Mat h(1, 2);
  h << 0.0, std::log(3.0);
  const CrfProblem two(h, {}, Compatibility::potts(2));
  const Mat q = mf_init(two, 0, MfInit::Unary).matrix();
  CHECK(q(0, 0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(q(0, 1) == doctest::Approx(0.25).epsilon(1e-14));

  const Mat r1 = mf_init(p, 9, MfInit::Random).matrix();
  CHECK(r1 == mf_init(p, 9, MfInit::Random).matrix());
  CHECK(r1 != mf_init(p, 10, MfInit::Random).matrix());
  CHECK((r1.rowwise().sum() - Vec::Ones(3)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("mf_update") {
  SUBCASE("no pairwise term: one step reaches the unary softmax") {
    const CrfProblem p(random_uniform(4, 3, 2), {}, Compatibility::potts(3));
    const Marginals q = mf_update(p, mf_init(p, 1, MfInit::Random), MfSchedule::Parallel);
    CHECK((q.matrix() - mf_init(p, 0, MfInit::Unary).matrix()).norm() <= 1e-14);
  }
  SUBCASE("matches the double-loop update") {
    for (bool general : {false, true}) {
      const CrfProblem p = random_problem(5, 3, 3, 3, 1.0, general);
      const Mat k = oracle::dense_kernel(p);
      const Mat mu = general ? p.compatibility().matrix() : Mat(Mat::Ones(3, 3) - Mat::Identity(3, 3));
      const Marginals q0 = mf_init(p, 4, MfInit::Random);
      const Marginals q1 = mf_update(p, q0, MfSchedule::Parallel);
      CHECK((q1.matrix() - double_loop_update(p.unary(), k, mu, q0.matrix())).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
  SUBCASE("sequential sweep lowers the free energy at every site") {
    const CrfProblem p = random_problem(6, 2, 3, 5, 2.0);
    Marginals q = mf_init(p, 6, MfInit::Random);
    double prev = mf_free_energy(p, q);
    for (int sweep = 0; sweep < 3; ++sweep)
      for (Index i = 0; i < 6; ++i) {
        mf_update_site(p, q, i);
        const double cur = mf_free_energy(p, q);
        CHECK(cur <= prev + 1e-9);
        prev = cur;
      }
  }
}

TEST_CASE("mf_free_energy") {
  const CrfProblem p = random_problem(4, 2, 2, 7);
  const Labeling x = random_labeling(4, 2, 8);
  const Marginals onehot(IndicatorMatrix::from_labeling(x, 2).matrix());
  CHECK(std::abs(mf_free_energy(p, onehot) - energy(p, x)) <= 1e-12);

  const CrfProblem flat(Mat::Zero(5, 3), {}, Compatibility::potts(3));
  CHECK(mf_free_energy(flat, mf_init(flat, 0, MfInit::Uniform)) == doctest::Approx(-5.0 * std::log(3.0)));

  // exhaustive expectation over the 16 labelings
  const Marginals q = mf_init(p, 9, MfInit::Random);
  double expect = 0.0;
  for (int code = 0; code < 16; ++code) {
    Labeling y;
    double prob = 1.0;
    for (Index i = 0; i < 4; ++i) {
      const int l = (code >> i) & 1;
      y.labels.push_back(l);
      prob *= q.matrix()(i, l);
    }
    expect += prob * (energy(p, y) + std::log(prob));
  }
  CHECK(std::abs(mf_free_energy(p, q) - expect) <= 1e-9);
}

TEST_CASE("mf_solve") {
  const CrfProblem p(random_uniform(6, 3, 10), {}, Compatibility::potts(3));
  const MeanFieldResult r = mf_solve(p, 100, 1, 0);
  CHECK(r.labels == unary_argmin(p));
  CHECK(r.iterations <= 2);

  const CrfProblem q = random_problem(10, 3, 3, 11);
  const MeanFieldResult a = mf_solve(q, 100, 1, 12), b = mf_solve(q, 100, 1, 12);
  CHECK(a.labels == b.labels);
  CHECK(a.free_energy == b.free_energy);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const CrfProblem c = random_problem(8, 2, 3, 100 + s);
    const MeanFieldResult m = mf_solve(c, 100, 5, s);
    CHECK(m.energy >= oracle::brute_force_map(c).energy - 1e-12);
    CHECK(m.energy == energy(c, m.labels));
  }
  CHECK_THROWS_AS(mf_solve(q, 0, 1, 0), Error);
}
