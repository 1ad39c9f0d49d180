#pragma once

// Synthetic instances, returned as instance JSON. Output depends only on the
// parameters, and the seed is always written into the document.

#include <json.hpp>

#include <cstdint>
#include <string>

namespace lrsdcut {

struct GenParams {
  std::string kind = "random";  // clusters | random | grid
  long n = 8;                   // clusters, random
  long width = 20, height = 20; // grid
  long labels = 2;
  std::uint64_t seed = 0;
  double noise = 0.3;           // unary corruption (clusters, grid)
  double theta_pos = 20.0;
  double theta_col = 30.0;
  double weight = -1.0;         // < 0: per-kind default
  long landmarks = 64;
  long rank = 32;               // Nystrom rank, or factor rank for random
  bool general_mu = false;      // random: draw a general compatibility matrix
};

nlohmann::json generate_instance(const GenParams& p);

}  // namespace lrsdcut
