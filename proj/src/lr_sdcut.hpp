#pragma once

// LR-SDCut: quasi-Newton ascent on the penalized SDP dual with randomized
// rounding after every iterate.
//
// Energies and bounds are reported on the energy() scale:
//   lower bound = d_gamma(u) + nu * eta + 1/2 1^T K 1.

#include "crf_model.hpp"
#include "eig_lanczos.hpp"

#include <string>
#include <vector>

namespace lrsdcut {

struct SolveParams {
  double gamma = 1000.0;
  int kmax = 10;          // ascent iterations
  Index rank_init = 20;   // r for the spectral shift
  double tau = 1e-5;      // relative dual improvement stop
  int memory = 10;        // L-BFGS pairs
  Index samples = 20;     // rounding draws per iterate
  std::uint64_t seed = 0;
  double eig_tol = 1e-8;
};

struct IterationRecord {
  int iter = 0;
  double dual = 0.0;            // energy scale
  double rounded_energy = 0.0;  // energy of this iterate's rounding
  double best_energy = 0.0;     // best so far
  Index rank = 0;
  bool truncated = false;
  double ms = 0.0;
};

struct SolveReport {
  Labeling labels;
  double best_energy = 0.0;
  /// Max dual over untruncated iterates; -inf if none qualified.
  double lower_bound = 0.0;
  std::vector<IterationRecord> trajectory;
  std::vector<std::string> warnings;

  // final dual state, for primal recovery Y* = gamma (C(u*))_+
  double shift = 0.0;
  Vec dual_vars;
  PsdFactor psd;
  double raw_dual = 0.0;  // d_gamma(u*) on the shifted problem
};

SolveReport lr_sdcut_solve(const CrfProblem& problem, const SolveParams& params);

}  // namespace lrsdcut
