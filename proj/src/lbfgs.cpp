#include "lbfgs.hpp"

#include <cmath>
#include <vector>

namespace lrsdcut {

LbfgsAscent::LbfgsAscent(int memory, double armijo, int max_halvings)
    : memory_(memory), armijo_(armijo), max_halvings_(max_halvings) {
  require(memory >= 1, "L-BFGS memory must be >= 1");
  require(armijo > 0.0 && armijo < 1.0, "Armijo constant must lie in (0, 1)");
  require(max_halvings >= 1, "need at least one line-search trial");
}

Vec LbfgsAscent::direction(const Vec& grad) const {
  // two-loop recursion on the descent gradient -grad; returns H grad
  Vec q = -grad;
  const std::size_t m = s_.size();
  std::vector<double> alpha(m), rho(m);
  for (std::size_t k = m; k-- > 0;) {
    rho[k] = 1.0 / s_[k].dot(y_[k]);
    alpha[k] = rho[k] * s_[k].dot(q);
    q -= alpha[k] * y_[k];
  }
  double h0;
  if (m > 0) {
    h0 = s_.back().dot(y_.back()) / y_.back().squaredNorm();
  } else {
    h0 = 1.0 / std::max(1.0, grad.norm());
  }
  Vec r = h0 * q;
  for (std::size_t k = 0; k < m; ++k) {
    const double beta = rho[k] * y_[k].dot(r);
    r += (alpha[k] - beta) * s_[k];
  }
  return -r;
}

AscentStep LbfgsAscent::step(const Vec& u, double value, const Vec& grad,
                             const ObjectiveGradient& f, double grad_tol) {
  require(u.size() == grad.size(), "L-BFGS: gradient length mismatch");
  AscentStep out;
  out.u = u;
  out.value = value;
  out.gradient = grad;
  if (grad.norm() <= grad_tol) {
    out.converged = true;
    return out;
  }
  Vec p = direction(grad);
  double slope = grad.dot(p);
  if (!(slope > 0.0)) {
    reset();
    p = direction(grad);
    slope = grad.dot(p);
  }
  double rho = 1.0;
  Vec trial_grad(u.size());
  for (int k = 0; k < max_halvings_; ++k, rho *= 0.5) {
    const Vec trial = u + rho * p;
    const double fv = f(trial, trial_grad);
    ++out.evaluations;
    if (std::isfinite(fv) && fv >= value + armijo_ * rho * slope) {
      const Vec s = trial - u;
      const Vec y = -(trial_grad - grad);
      if (s.dot(y) > 1e-12) {
        s_.push_back(s);
        y_.push_back(y);
        if (static_cast<int>(s_.size()) > memory_) {
          s_.pop_front();
          y_.pop_front();
        }
      }
      out.u = trial;
      out.value = fv;
      out.gradient = trial_grad;
      out.step = rho;
      return out;
    }
  }
  out.stalled = true;
  return out;
}

}  // namespace lrsdcut
