#pragma once

// Instance JSON <-> CrfProblem.
//
// Kernel entries:
//   gaussian: "feature_blocks" (list of N x D_b arrays), "thetas" (one per
//     block), "nystrom": {"landmarks", "rank", "seed"}. One block gives a
//     low-rank kernel, two blocks a Hadamard pair with a separate Nystrom
//     factor per block, more blocks one Nystrom factor on the concatenated
//     features scaled by 1 / theta_b.
//   lowrank: "factor_file" (LRKF cache, relative to the instance) or an
//     inline "factor" array.
//   centered_discriminative: as lowrank plus "kappa".
// Top-level "image_blocks" masks every kernel except the centered one.

#include "crf_model.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>

namespace lrsdcut {

struct Instance {
  std::shared_ptr<const CrfProblem> problem;
  nlohmann::json source;
  std::uint64_t hash = 0;
  std::optional<Labeling> planted;
  std::optional<std::uint64_t> seed;

  std::string hash_hex() const;
};

/// Throws Parse for malformed content, Io for unreadable files.
Instance parse_instance(const std::string& text, const std::string& base_dir = ".");
Instance load_instance(const std::string& path);

/// Compact JSON with a trailing newline; stable byte-for-byte.
std::string dump_instance(const nlohmann::json& doc);
void save_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// FNV-1a 64.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL);

}  // namespace lrsdcut
