#include "instance_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lrsdcut {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::Parse, "instance: " + msg); }

const json& field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) fail(what + " must be a number");
  return v.get<double>();
}

Index count(const json& v, const std::string& what) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(what + " must be an integer");
  const auto x = v.get<std::int64_t>();
  if (x < 0) fail(what + " must be non-negative");
  return static_cast<Index>(x);
}

Mat matrix(const json& v, const std::string& what, Index rows = -1) {
  if (!v.is_array() || v.empty()) fail(what + " must be a non-empty array of rows");
  const Index n = static_cast<Index>(v.size());
  if (rows >= 0 && n != rows) fail(what + " has " + std::to_string(n) + " rows, expected " + std::to_string(rows));
  if (!v[0].is_array() || v[0].empty()) fail(what + " rows must be non-empty arrays");
  const Index d = static_cast<Index>(v[0].size());
  Mat m(n, d);
  for (Index i = 0; i < n; ++i) {
    const json& row = v[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != d) fail(what + " rows have unequal length");
    for (Index j = 0; j < d; ++j) m(i, j) = number(row[static_cast<std::size_t>(j)], what);
  }
  return m;
}

struct Context {
  std::string base_dir;
  std::uint64_t hash;
};

LowRankFactor factor_of(const json& k, Index n, Context& ctx) {
  LowRankFactor f;
  if (k.contains("factor_file")) {
    const auto& rel = field(k, "factor_file");
    if (!rel.is_string()) fail("factor_file must be a string");
    const std::filesystem::path p = std::filesystem::path(ctx.base_dir) / rel.get<std::string>();
    const std::string bytes = read_text(p.string());
    ctx.hash = fnv1a(bytes, ctx.hash);
    f = decode_factor_cache(bytes);
  } else if (k.contains("factor")) {
    f = LowRankFactor(matrix(k["factor"], "factor", n));
  } else {
    fail("kernel needs \"factor_file\" or \"factor\"");
  }
  if (f.n() != n) fail("factor has " + std::to_string(f.n()) + " rows, expected " + std::to_string(n));
  return f;
}

KernelForm gaussian_form(const json& k, Index n) {
  const json& blocks = field(k, "feature_blocks");
  const json& thetas = field(k, "thetas");
  if (!blocks.is_array() || blocks.empty()) fail("feature_blocks must be a non-empty list");
  if (!thetas.is_array() || thetas.size() != blocks.size()) fail("thetas must list one bandwidth per block");
  Index landmarks = std::min<Index>(n, 64), rank = -1;
  std::uint64_t seed = 0;
  if (k.contains("nystrom")) {
    const json& ny = k["nystrom"];
    if (ny.contains("landmarks")) landmarks = count(ny["landmarks"], "nystrom.landmarks");
    if (ny.contains("rank")) rank = count(ny["rank"], "nystrom.rank");
    if (ny.contains("seed")) seed = static_cast<std::uint64_t>(count(ny["seed"], "nystrom.seed"));
  }
  if (landmarks < 1) fail("nystrom.landmarks must be >= 1");
  landmarks = std::min(landmarks, n);
  if (rank < 0) rank = landmarks;
  if (rank < 1 || rank > landmarks) fail("nystrom.rank must lie in [1, landmarks]");
  std::vector<Mat> feats;
  std::vector<double> th;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    feats.push_back(matrix(blocks[b], "feature_blocks[" + std::to_string(b) + "]", n));
    th.push_back(number(thetas[b], "theta"));
    if (!(th.back() > 0.0)) fail("thetas must be positive");
  }
  if (feats.size() == 1)
    return LowRankKernel{gaussian_nystrom(FeatureSet(feats[0]), th[0], landmarks, rank, seed).factor};
  if (feats.size() == 2) {
    auto fp = gaussian_nystrom(FeatureSet(feats[0]), th[0], landmarks, rank, mix_seed(seed, 0)).factor;
    auto fc = gaussian_nystrom(FeatureSet(feats[1]), th[1], landmarks, rank, mix_seed(seed, 1)).factor;
    return HadamardKernel{std::move(fp), std::move(fc)};
  }
  Index width = 0;
  for (const Mat& f : feats) width += f.cols();
  Mat all(n, width);
  Index col = 0;
  for (std::size_t b = 0; b < feats.size(); ++b) {
    all.middleCols(col, feats[b].cols()) = feats[b] / th[b];
    col += feats[b].cols();
  }
  return LowRankKernel{gaussian_nystrom(FeatureSet(all), 1.0, landmarks, rank, seed).factor};
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string Instance::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void save_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

std::string dump_instance(const nlohmann::json& doc) { return doc.dump() + "\n"; }

Instance parse_instance(const std::string& text, const std::string& base_dir) {
  Instance inst;
  try {
    inst.source = json::parse(text);
  } catch (const json::exception& e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  const json& doc = inst.source;
  if (!doc.is_object()) fail("top level must be an object");
  Context ctx{base_dir, fnv1a(text)};

  try {
    const Index n = count(field(doc, "n_vars"), "n_vars");
    const Index l = count(field(doc, "n_labels"), "n_labels");
    if (n < 1) fail("n_vars must be >= 1");
    if (l < 2) fail("n_labels must be >= 2");
    Mat unary = matrix(field(doc, "unary"), "unary", n);
    if (unary.cols() != l) fail("unary must have n_labels columns");

    std::optional<BlockMask> mask;
    if (doc.contains("image_blocks")) {
      const json& ob = doc["image_blocks"];
      if (!ob.is_array()) fail("image_blocks must be an offset list");
      std::vector<Index> offsets;
      for (const json& o : ob) offsets.push_back(count(o, "image_blocks entry"));
      mask = BlockMask(std::move(offsets), n);
    }

    std::vector<KernelTerm> kernels;
    const json& ks = doc.contains("kernels") ? doc["kernels"] : json::array();
    if (!ks.is_array()) fail("kernels must be a list");
    for (const json& k : ks) {
      if (!k.is_object()) fail("kernel entries must be objects");
      const json& type = field(k, "type");
      if (!type.is_string()) fail("kernel type must be a string");
      const std::string t = type.get<std::string>();
      const double w = k.contains("weight") ? number(k["weight"], "weight") : 1.0;
      if (!(w >= 0.0)) fail("kernel weight must be >= 0");
      if (t == "gaussian") {
        kernels.emplace_back(gaussian_form(k, n), w, mask);
      } else if (t == "lowrank") {
        kernels.emplace_back(LowRankKernel{factor_of(k, n, ctx)}, w, mask);
      } else if (t == "centered_discriminative") {
        const double kappa = number(field(k, "kappa"), "kappa");
        kernels.emplace_back(CenteredKernel{centered_discriminative_factor(factor_of(k, n, ctx), kappa)}, w);
      } else {
        fail("unknown kernel type \"" + t + "\"");
      }
    }

    const json& cj = doc.contains("compatibility") ? doc["compatibility"] : json("potts");
    Compatibility compat = Compatibility::potts(l);
    if (cj.is_string()) {
      if (cj.get<std::string>() != "potts") fail("compatibility must be \"potts\" or a matrix");
    } else {
      Mat mu = matrix(cj, "compatibility", l);
      if (mu.cols() != l) fail("compatibility must be n_labels x n_labels");
      compat = Compatibility::general(std::move(mu));
    }

    if (doc.contains("planted_labels")) {
      Labeling x;
      for (const json& v : doc["planted_labels"]) x.labels.push_back(static_cast<int>(count(v, "planted label")));
      inst.planted = std::move(x);
    }
    if (doc.contains("seed")) inst.seed = static_cast<std::uint64_t>(count(doc["seed"], "seed"));

    auto problem = std::make_shared<CrfProblem>(std::move(unary), std::move(kernels), std::move(compat));
    if (inst.planted) problem->validate_labeling(*inst.planted);
    inst.problem = std::move(problem);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) fail(e.what());
    throw;
  } catch (const json::exception& e) {
    fail(e.what());
  }
  inst.hash = ctx.hash;
  return inst;
}

Instance load_instance(const std::string& path) {
  const std::string text = read_text(path);
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_instance(text, dir.empty() ? std::string(".") : dir.string());
}

}  // namespace lrsdcut
