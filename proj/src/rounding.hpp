#pragma once

// Randomized rounding of Y = Psi Psi^T: project onto Gaussian directions,
// then take the row-wise argmax.

#include "eig_lanczos.hpp"
#include "sdp_forms.hpp"

namespace lrsdcut {

/// Row argmax; ties go to the smallest label.
Labeling discretize(const Mat& scores);

struct RoundingResult {
  Labeling labeling;
  double lifted_energy = 0.0;
  Index sample = 0;  // index of the winning draw
};

/// Psi = Gamma_+ Diag(sqrt(gamma lambda_+)); draws n_samples projections
/// Psi P with P_ij ~ N(0, 1) and keeps the lowest lifted energy.
/// Sample s uses its own stream derived from (seed, s).
RoundingResult round_solution(const PsdFactor& psd, const SdpForm& form, double gamma,
                              std::uint64_t seed, Index n_samples);

}  // namespace lrsdcut
