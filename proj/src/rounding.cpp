#include "rounding.hpp"

#include "parallel.hpp"

#include <cmath>
#include <limits>

namespace lrsdcut {

Labeling discretize(const Mat& scores) {
  Labeling x;
  x.labels.resize(static_cast<std::size_t>(scores.rows()));
  for (Index i = 0; i < scores.rows(); ++i) {
    Index best = 0;
    for (Index l = 1; l < scores.cols(); ++l)
      if (scores(i, l) > scores(i, best)) best = l;
    x.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return x;
}

RoundingResult round_solution(const PsdFactor& psd, const SdpForm& form, double gamma,
                              std::uint64_t seed, Index n_samples) {
  require(n_samples >= 1, "round_solution: need at least one sample");
  require(gamma > 0.0, "round_solution: gamma must be positive");
  require(psd.dim() == form.dim() || psd.rank() == 0, "round_solution: factor does not match form");
  const Mat psi = psd.rank() > 0 ? Mat(psd.vectors * (gamma * psd.values).cwiseSqrt().asDiagonal())
                                 : Mat::Zero(form.dim(), 0);
  std::vector<RoundingResult> per(static_cast<std::size_t>(n_samples));
  parallel_for(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
    Rng rng = make_rng(seed, s);
    const Mat p = gaussian_matrix(psi.cols(), form.projection_cols(), rng);
    const Mat proj = psi.cols() > 0 ? Mat(psi * p) : Mat::Zero(form.dim(), form.projection_cols());
    RoundingResult best;
    best.lifted_energy = std::numeric_limits<double>::infinity();
    for (const Mat& scores : form.rounding_scores(proj)) {
      Labeling x = discretize(scores);
      const double e = form.lifted_objective(x);
      if (e < best.lifted_energy) {
        best.lifted_energy = e;
        best.labeling = std::move(x);
      }
    }
    best.sample = static_cast<Index>(s);
    per[s] = std::move(best);
  });
  std::size_t win = 0;
  for (std::size_t s = 1; s < per.size(); ++s)
    if (per[s].lifted_energy < per[win].lifted_energy) win = s;
  return per[win];
}

}  // namespace lrsdcut
