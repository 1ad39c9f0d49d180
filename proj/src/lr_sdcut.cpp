#include "lr_sdcut.hpp"

#include "lbfgs.hpp"
#include "rounding.hpp"
#include "sdp_dual.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace lrsdcut {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

}  // namespace

SolveReport lr_sdcut_solve(const CrfProblem& problem, const SolveParams& p) {
  require(p.gamma > 0.0, "gamma must be positive");
  require(p.kmax >= 0, "kmax must be non-negative");
  require(p.rank_init >= 1, "rank_init must be >= 1");
  require(p.tau >= 0.0, "tau must be non-negative");
  require(p.samples >= 1, "samples must be >= 1");

  auto form = make_sdp_form(problem);
  const Index n = form->dim();
  const double offset = energy_offset(problem);

  SolveReport rep;
  rep.lower_bound = -std::numeric_limits<double>::infinity();
  rep.best_energy = std::numeric_limits<double>::infinity();

  const Index r = std::min(p.rank_init, n);
  rep.shift = spectral_shift_init(*form, r, mix_seed(p.seed, 1));
  const double to_energy = rep.shift * form->eta() + offset;

  DualSettings ds;
  ds.gamma = p.gamma;
  ds.tol = p.eig_tol;
  ds.max_rank = std::min<Index>(n, 8 * r);
  ds.initial_rank = std::min<Index>(r + 10, ds.max_rank);

  std::uint64_t evals = 0;
  DualEvaluation last;
  auto evaluate = [&](const Vec& u) {
    DualSettings s = ds;
    s.seed = mix_seed(p.seed, 0x100 + evals++);
    try {
      last = evaluate_dual(*form, u, s);
    } catch (const EigenSolverError& e) {
      last.psd = e.best_effort();
      last.value = dual_objective(*form, u, last.psd, p.gamma);
      last.gradient = dual_gradient(*form, u, last.psd, p.gamma);
      last.approximate = true;
      rep.warnings.push_back("eigensolver did not converge at evaluation " + std::to_string(evals) +
                             "; dual value is approximate");
    }
    // keep the next request near the current rank
    if (last.psd.rank() > 0)
      ds.initial_rank = std::clamp<Index>(last.psd.rank() + 10, 1, ds.max_rank);
    return last.value;
  };

  auto record = [&](int iter, const Vec& u, Clock::time_point t0) {
    const RoundingResult rr =
        round_solution(last.psd, *form, p.gamma, mix_seed(p.seed, 0x200 + iter), p.samples);
    IterationRecord rec;
    rec.iter = iter;
    rec.dual = last.value + to_energy;
    rec.rounded_energy = rr.lifted_energy + offset;
    rec.rank = last.psd.rank();
    rec.truncated = last.approximate;
    if (rec.rounded_energy < rep.best_energy) {
      rep.best_energy = rec.rounded_energy;
      rep.labels = rr.labeling;
    }
    rec.best_energy = rep.best_energy;
    if (!last.approximate) rep.lower_bound = std::max(rep.lower_bound, rec.dual);
    rec.ms = elapsed_ms(t0);
    rep.trajectory.push_back(rec);
    rep.dual_vars = u;
    rep.psd = last.psd;
    rep.raw_dual = last.value;
  };

  auto t0 = Clock::now();
  Vec u = Vec::Zero(form->constraints());
  double value = evaluate(u);
  Vec grad = last.gradient;
  record(0, u, t0);

  const ObjectiveGradient f = [&](const Vec& x, Vec& g) {
    const double v = evaluate(x);
    g = last.gradient;
    return v;
  };
  LbfgsAscent ascent(p.memory);
  for (int k = 1; k <= p.kmax; ++k) {
    t0 = Clock::now();
    const DualEvaluation before = last;
    AscentStep st = ascent.step(u, value, grad, f);
    if (st.converged) break;
    if (st.stalled) {
      last = before;
      rep.warnings.push_back("line search stalled at iteration " + std::to_string(k));
      break;
    }
    const double prev = value;
    u = std::move(st.u);
    value = st.value;
    grad = std::move(st.gradient);
    record(k, u, t0);
    const double denom = std::max({std::abs(value), std::abs(prev), 1.0});
    if ((value - prev) / denom <= p.tau) break;
  }
  if (!std::isfinite(rep.lower_bound))
    rep.warnings.push_back("every iterate had a truncated PSD factor; no certified lower bound");
  return rep;
}

}  // namespace lrsdcut
