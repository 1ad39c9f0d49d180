#pragma once

// Limited-memory BFGS ascent, one step per call, for a concave objective
// whose gradient is available (minimizes -f internally).

#include "common.hpp"

#include <deque>
#include <functional>

namespace lrsdcut {

/// Returns f(u) and writes grad f(u).
using ObjectiveGradient = std::function<double(const Vec& u, Vec& grad)>;

struct AscentStep {
  Vec u;
  double value = 0.0;
  Vec gradient;
  double step = 0.0;       // accepted rho
  int evaluations = 0;
  bool converged = false;  // ||grad|| <= grad_tol at the input point
  bool stalled = false;    // line search failed; u is the input point
};

class LbfgsAscent {
 public:
  explicit LbfgsAscent(int memory = 10, double armijo = 1e-4, int max_halvings = 30);

  /// One step from (u, value, grad). Backtracks rho = 1, 1/2, ... until
  /// f(u + rho p) >= f(u) + armijo * rho * grad^T p.
  /// The last call of `f` made inside is always at the returned point unless stalled.
  AscentStep step(const Vec& u, double value, const Vec& grad, const ObjectiveGradient& f,
                  double grad_tol = 0.0);

  void reset() {
    s_.clear();
    y_.clear();
  }
  std::size_t pairs() const { return s_.size(); }

 private:
  Vec direction(const Vec& grad) const;

  int memory_;
  double armijo_;
  int max_halvings_;
  std::deque<Vec> s_, y_;  // y holds differences of the gradient of -f
};

}  // namespace lrsdcut
