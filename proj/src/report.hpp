#pragma once

// Uniform run records for the three methods and their JSON form:
//   {"method", "instance_hash", "params", "best_energy", "lower_bound",
//    "labels", "trajectory", "warnings", "wall_ms"}

#include "lr_sdcut.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace lrsdcut {

enum class Method { LrSdcut, MeanField, Brute };

std::string method_name(Method m);

struct RunParams {
  SolveParams sdp;
  int restarts = 5;   // mean field
  int mf_iters = 100;
};

struct RunResult {
  Method method = Method::LrSdcut;
  Labeling labels;
  double best_energy = 0.0;
  std::optional<double> lower_bound;
  nlohmann::json trajectory = nlohmann::json::array();
  std::vector<std::string> warnings;
  double wall_ms = 0.0;
  nlohmann::json params;
};

RunResult run_method(const CrfProblem& problem, Method method, const RunParams& params);

nlohmann::json report_json(const RunResult& r, const std::string& instance_hash);

}  // namespace lrsdcut
