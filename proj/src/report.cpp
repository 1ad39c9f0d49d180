#include "report.hpp"

#include "meanfield.hpp"
#include "oracle.hpp"

#include <chrono>
#include <cmath>

namespace lrsdcut {

namespace {

using nlohmann::json;

json params_json(Method m, const RunParams& p) {
  json j;
  if (m == Method::LrSdcut) {
    j = {{"gamma", p.sdp.gamma}, {"kmax", p.sdp.kmax}, {"rank_init", p.sdp.rank_init},
         {"tau", p.sdp.tau},     {"memory", p.sdp.memory}, {"samples", p.sdp.samples},
         {"seed", p.sdp.seed},   {"eig_tol", p.sdp.eig_tol}};
  } else if (m == Method::MeanField) {
    j = {{"restarts", p.restarts}, {"max_iters", p.mf_iters}, {"seed", p.sdp.seed}};
  } else {
    j = json::object();
  }
  return j;
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::LrSdcut: return "lrsdcut";
    case Method::MeanField: return "meanfield";
    case Method::Brute: return "brute";
  }
  return "unknown";
}

RunResult run_method(const CrfProblem& problem, Method method, const RunParams& params) {
  RunResult r;
  r.method = method;
  r.params = params_json(method, params);
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::LrSdcut: {
      SolveReport s = lr_sdcut_solve(problem, params.sdp);
      r.labels = std::move(s.labels);
      r.best_energy = s.best_energy;
      if (std::isfinite(s.lower_bound)) r.lower_bound = s.lower_bound;
      for (const IterationRecord& it : s.trajectory)
        r.trajectory.push_back({{"iter", it.iter},
                                {"dual", it.dual},
                                {"rounded_energy", it.rounded_energy},
                                {"best_energy", it.best_energy},
                                {"rank", it.rank},
                                {"truncated", it.truncated},
                                {"ms", it.ms}});
      r.warnings = std::move(s.warnings);
      break;
    }
    case Method::MeanField: {
      MeanFieldResult m = mf_solve(problem, params.mf_iters, params.restarts, params.sdp.seed);
      r.labels = std::move(m.labels);
      r.best_energy = m.energy;
      for (std::size_t k = 0; k < m.free_energy.size(); ++k)
        r.trajectory.push_back({{"iter", k}, {"free_energy", m.free_energy[k]}});
      if (m.iterations >= params.mf_iters)
        r.warnings.push_back("winning restart hit the iteration limit before reaching a fixed point");
      break;
    }
    case Method::Brute: {
      oracle::MapResult b = oracle::brute_force_map(problem);
      r.labels = std::move(b.labels);
      r.best_energy = b.energy;
      r.lower_bound = b.energy;
      break;
    }
  }
  r.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

json report_json(const RunResult& r, const std::string& instance_hash) {
  json j;
  j["method"] = method_name(r.method);
  j["instance_hash"] = instance_hash;
  j["params"] = r.params;
  j["best_energy"] = r.best_energy;
  j["lower_bound"] = r.lower_bound ? json(*r.lower_bound) : json(nullptr);
  j["labels"] = r.labels.labels;
  j["trajectory"] = r.trajectory;
  j["warnings"] = r.warnings;
  j["wall_ms"] = r.wall_ms;
  return j;
}

}  // namespace lrsdcut
