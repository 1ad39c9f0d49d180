#include "generators.hpp"

#include "common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lrsdcut {

namespace {

using nlohmann::json;

json rows_of(const Mat& m) {
  json out = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

json base_doc(const GenParams& p, Index n, const Mat& unary) {
  json doc;
  doc["n_vars"] = n;
  doc["n_labels"] = p.labels;
  doc["seed"] = p.seed;
  doc["generator"] = {{"kind", p.kind},     {"labels", p.labels},       {"noise", p.noise},
                      {"theta_pos", p.theta_pos}, {"theta_col", p.theta_col}, {"weight", p.weight},
                      {"landmarks", p.landmarks}, {"rank", p.rank}};
  doc["unary"] = rows_of(unary);
  doc["compatibility"] = "potts";
  return doc;
}

// Unary with cost `margin` off the hinted label; hints are flipped with
// probability `noise` and every entry carries N(0, noise^2) jitter.
Mat hinted_unary(const std::vector<int>& truth, Index labels, double noise, Rng& rng) {
  const Index n = static_cast<Index>(truth.size());
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat h(n, labels);
  for (Index i = 0; i < n; ++i) {
    int hint = truth[static_cast<std::size_t>(i)];
    if (noise > 0.0 && uni(rng) < noise) hint = static_cast<int>((hint + 1 + static_cast<Index>(uni(rng) * (labels - 1))) % labels);
    for (Index l = 0; l < labels; ++l) h(i, l) = (l == hint ? 0.0 : 1.0) + noise * nd(rng);
  }
  return h;
}

json gaussian_kernel(const Mat& pos, const Mat& col, const GenParams& p, double weight) {
  const Index landmarks = std::min<Index>(p.landmarks, pos.rows());
  return {{"type", "gaussian"},
          {"feature_blocks", {rows_of(pos), rows_of(col)}},
          {"thetas", {p.theta_pos, p.theta_col}},
          {"weight", weight},
          {"nystrom", {{"landmarks", landmarks}, {"rank", std::min<Index>(p.rank, landmarks)}, {"seed", p.seed}}}};
}

json clusters(const GenParams& p) {
  const Index n = p.n, l = p.labels;
  Rng rng = make_rng(p.seed, 1);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<int> truth(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) truth[static_cast<std::size_t>(i)] = static_cast<int>(i % l);
  std::shuffle(truth.begin(), truth.end(), rng);
  Mat pos(n, 2), col(n, 3);
  const double pi = std::acos(-1.0);
  for (Index i = 0; i < n; ++i) {
    const int c = truth[static_cast<std::size_t>(i)];
    const double angle = 2.0 * pi * c / static_cast<double>(l);
    pos(i, 0) = 50.0 + 30.0 * std::cos(angle) + 15.0 * nd(rng);
    pos(i, 1) = 50.0 + 30.0 * std::sin(angle) + 15.0 * nd(rng);
    for (Index k = 0; k < 3; ++k) col(i, k) = 255.0 * ((c + k) % l) / static_cast<double>(l) + 25.0 * nd(rng);
  }
  const Mat unary = hinted_unary(truth, l, p.noise, rng);
  json doc = base_doc(p, n, unary);
  doc["generator"]["n"] = p.n;
  const double w = p.weight >= 0.0 ? p.weight : 24.0 / static_cast<double>(n);
  doc["kernels"] = json::array({gaussian_kernel(pos, col, p, w)});
  doc["planted_labels"] = truth;
  return doc;
}

json random_instance(const GenParams& p) {
  const Index n = p.n, l = p.labels, r = std::max<long>(1, std::min<long>(p.rank, p.n));
  Rng rng = make_rng(p.seed, 2);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Mat unary(n, l);
  for (Index i = 0; i < n; ++i)
    for (Index k = 0; k < l; ++k) unary(i, k) = uni(rng);
  const Mat phi = gaussian_matrix(n, r, rng) / std::sqrt(static_cast<double>(r));
  json doc = base_doc(p, n, unary);
  doc["generator"]["n"] = p.n;
  doc["generator"]["general_mu"] = p.general_mu;
  const double w = p.weight >= 0.0 ? p.weight : 0.5;
  doc["kernels"] = json::array({{{"type", "lowrank"}, {"factor", rows_of(phi)}, {"weight", w}}});
  if (p.general_mu) {
    Mat mu = Mat::Zero(l, l);
    for (Index a = 0; a < l; ++a)
      for (Index b = a + 1; b < l; ++b) mu(a, b) = mu(b, a) = uni(rng);
    doc["compatibility"] = rows_of(mu);
  }
  return doc;
}

json grid(const GenParams& p) {
  const Index w = p.width, h = p.height, n = w * h, l = p.labels;
  Rng rng = make_rng(p.seed, 3);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  // L bands separated by wavy boundaries
  const double phase = 2.0 * std::acos(-1.0) * uni(rng);
  Mat pos(n, 2), col(n, 3), palette(l, 3);
  for (Index k = 0; k < l; ++k)
    for (Index c = 0; c < 3; ++c) palette(k, c) = 255.0 * uni(rng);
  std::vector<int> truth(static_cast<std::size_t>(n));
  for (Index y = 0; y < h; ++y)
    for (Index x = 0; x < w; ++x) {
      const Index i = y * w + x;
      const double t = (static_cast<double>(x) + 0.15 * w * std::sin(phase + 6.0 * y / static_cast<double>(h))) / w;
      const int c = static_cast<int>(std::clamp<double>(std::floor(t * l), 0.0, static_cast<double>(l - 1)));
      truth[static_cast<std::size_t>(i)] = c;
      pos(i, 0) = static_cast<double>(x);
      pos(i, 1) = static_cast<double>(y);
      for (Index k = 0; k < 3; ++k) col(i, k) = palette(c, k) + 20.0 * nd(rng);
    }
  const Mat unary = hinted_unary(truth, l, p.noise, rng);
  json doc = base_doc(p, n, unary);
  doc["generator"]["width"] = p.width;
  doc["generator"]["height"] = p.height;
  const double wt = p.weight >= 0.0 ? p.weight : 0.2;
  doc["kernels"] = json::array({gaussian_kernel(pos, col, p, wt)});
  doc["planted_labels"] = truth;
  return doc;
}

}  // namespace

nlohmann::json generate_instance(const GenParams& p) {
  require(p.labels >= 2, "generator: labels must be >= 2");
  require(p.noise >= 0.0, "generator: noise must be >= 0");
  require(p.theta_pos > 0.0 && p.theta_col > 0.0, "generator: bandwidths must be positive");
  require(p.landmarks >= 1 && p.rank >= 1, "generator: landmarks and rank must be >= 1");
  if (p.kind == "clusters") {
    require(p.n >= 1, "generator: n must be >= 1");
    return clusters(p);
  }
  if (p.kind == "random") {
    require(p.n >= 1, "generator: n must be >= 1");
    return random_instance(p);
  }
  if (p.kind == "grid") {
    require(p.width >= 1 && p.height >= 1, "generator: grid sides must be >= 1");
    return grid(p);
  }
  throw Error(ErrorCode::InvalidArgument, "generator: unknown kind \"" + p.kind + "\"");
}

}  // namespace lrsdcut
