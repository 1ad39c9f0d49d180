#pragma once

// Naive mean field for the dense CRF, built on the factored kernel matvecs.
// Messages follow the minimizer of the free energy:
//   Q_i(l) ~ exp(-psi_i(l) - sum_{j != i} K_ij sum_l' mu(l, l') Q_j(l')).

#include "crf_model.hpp"

#include <vector>

namespace lrsdcut {

/// N x L, rows on the probability simplex.
class Marginals {
 public:
  explicit Marginals(Mat q);
  const Mat& matrix() const { return q_; }
  Labeling decode() const;  // row argmax, ties to the smallest label

 private:
  friend void mf_update_site(const CrfProblem&, Marginals&, Index);
  Mat q_;
};

enum class MfInit { Unary, Uniform, Random };
enum class MfSchedule { Parallel, Sequential };

Marginals mf_init(const CrfProblem& problem, std::uint64_t seed, MfInit mode);

/// One update. Parallel: every row from the same Q. Sequential: a sweep
/// i = 0..N-1 with immediate updates.
Marginals mf_update(const CrfProblem& problem, const Marginals& q, MfSchedule schedule);

/// Single-site update of row i in place.
void mf_update_site(const CrfProblem& problem, Marginals& q, Index i);

/// sum Q log Q + <Q, H> + 1/2 sum_{i != j} K_ij Q_i^T mu Q_j.
double mf_free_energy(const CrfProblem& problem, const Marginals& q);

struct MeanFieldResult {
  Labeling labels;
  double energy = 0.0;
  std::vector<double> free_energy;  // per iteration, winning restart
  int restart = 0;                  // winning restart
  int iterations = 0;               // of the winning restart
};

/// Restart 0 starts from the unary softmax, later restarts from random
/// Dirichlet(1) rows. Stops a restart when max |dQ| < 1e-6.
MeanFieldResult mf_solve(const CrfProblem& problem, int max_iters = 100, int restarts = 5,
                         std::uint64_t seed = 0);

}  // namespace lrsdcut
