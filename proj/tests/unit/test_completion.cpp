#include "gasd/completion.hpp"
#include "gasd/error.hpp"
#include "gasd/synthetic.hpp"

#include "support/scenes.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace gasd;

namespace {

SparseDepthMap sparse_from(int w, int h, const std::vector<std::pair<std::size_t, double>>& samples) {
  DepthMap d(w, h);
  for (const auto& [i, z] : samples) d.set(i, z);
  return {d};
}

// Brute-force IDW over all samples sorted by (distance, index).
double brute_idw(const SparseDepthMap& sparse, int u, int v, const CompletionConfig& cfg) {
  struct C {
    double d2;
    std::size_t i;
  };
  std::vector<C> all;
  const DepthMap& d = sparse.depth;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!d.valid(i)) continue;
    const double du = static_cast<double>(i % d.width()) - u;
    const double dv = static_cast<double>(i / d.width()) - v;
    all.push_back({du * du + dv * dv, i});
  }
  std::sort(all.begin(), all.end(), [](const C& a, const C& b) {
    return a.d2 != b.d2 ? a.d2 < b.d2 : a.i < b.i;
  });
  all.resize(std::min<std::size_t>(all.size(), cfg.neighbors));
  if (all.front().d2 == 0.0) return d.value(all.front().i);
  long double num = 0.0L;
  long double den = 0.0L;
  for (const C& c : all) {
    const long double w = 1.0L / (std::pow(static_cast<long double>(c.d2), cfg.power / 2.0L) + 1e-9L);
    num += w * d.value(c.i);
    den += w;
  }
  return static_cast<double>(num / den);
}

TEST(CompleteIdw, SingleSampleFillsEverything) {
  const DepthMap out = complete_idw(sparse_from(7, 5, {{12, 2.5}}), {});
  ASSERT_EQ(out.valid_count(), 35u);
  for (const double z : out.values()) EXPECT_DOUBLE_EQ(z, 2.5);
}

TEST(CompleteIdw, ExactHitReturnsSample) {
  const DepthMap out = complete_idw(sparse_from(6, 6, {{0, 1.0}, {7, 3.0}, {35, 9.0}}), {});
  EXPECT_EQ(out.value(0), 1.0);
  EXPECT_EQ(out.value(7), 3.0);
  EXPECT_EQ(out.value(35), 9.0);
}

TEST(CompleteIdw, MidpointWithLinearPower) {
  // Samples at u=0 and u=2 on one row, query at u=1: distance 1 to both.
  CompletionConfig cfg;
  cfg.power = 1.0;
  const DepthMap out = complete_idw(sparse_from(3, 1, {{0, 1.0}, {2, 3.0}}), cfg);
  EXPECT_NEAR(out.value(1), 2.0, 1e-12);

  // Distances 1 and 2 with power 2: weights 1 and 1/4.
  cfg.power = 2.0;
  const DepthMap out2 = complete_idw(sparse_from(4, 1, {{0, 1.0}, {3, 6.0}}), cfg);
  EXPECT_NEAR(out2.value(1), (1.0 * 1.0 + 0.25 * 6.0) / 1.25, 1e-9);
}

TEST(CompleteIdw, NeighborLimit) {
  CompletionConfig cfg;
  cfg.neighbors = 1;
  const DepthMap out = complete_idw(sparse_from(5, 1, {{0, 1.0}, {4, 5.0}}), cfg);
  EXPECT_EQ(out.value(1), 1.0);
  EXPECT_EQ(out.value(3), 5.0);
  // Equidistant tie goes to the lower sample index.
  EXPECT_EQ(out.value(2), 1.0);
}

TEST(CompleteIdw, MatchesBruteForce) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int w = 13 + trial % 7 * 5;
    const int h = 9 + trial % 5 * 4;
    std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(w * h - 1));
    std::uniform_real_distribution<double> depth(0.5, 4.0);
    const std::size_t n = 1 + static_cast<std::size_t>(trial * 3 % 40);
    std::vector<std::pair<std::size_t, double>> samples;
    for (std::size_t s = 0; s < n; ++s) samples.emplace_back(pick(rng), depth(rng));
    const SparseDepthMap sparse = sparse_from(w, h, samples);
    CompletionConfig cfg;
    cfg.neighbors = 1 + trial % 10;
    cfg.power = 1.0 + 0.5 * (trial % 4);
    const DepthMap out = complete_idw(sparse, cfg);
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        ASSERT_NEAR(out.at(u, v), brute_idw(sparse, u, v, cfg), 1e-12)
            << "trial " << trial << " (" << u << "," << v << ")";
      }
    }
  }
}

TEST(CompleteIdw, BoundedBySamples) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> pick(0, 40 * 30 - 1);
  std::uniform_real_distribution<double> depth(1.0, 2.0);
  std::vector<std::pair<std::size_t, double>> samples;
  for (int s = 0; s < 25; ++s) samples.emplace_back(pick(rng), depth(rng));
  const SparseDepthMap sparse = sparse_from(40, 30, samples);
  double lo = 1e9;
  double hi = -1e9;
  for (std::size_t i = 0; i < sparse.depth.size(); ++i) {
    if (!sparse.depth.valid(i)) continue;
    lo = std::min(lo, sparse.depth.value(i));
    hi = std::max(hi, sparse.depth.value(i));
  }
  const DepthMap out = complete_idw(sparse, {});
  EXPECT_EQ(out.valid_count(), out.size());
  for (const double z : out.values()) {
    EXPECT_GE(z, lo);
    EXPECT_LE(z, hi);
  }
}

TEST(CompleteIdw, Errors) {
  EXPECT_THROW(complete_idw(sparse_from(4, 4, {}), {}), InvalidInput);
  CompletionConfig bad;
  bad.power = 0.0;
  EXPECT_THROW(complete_idw(sparse_from(4, 4, {{0, 1.0}}), bad), InvalidInput);
  bad = {};
  bad.neighbors = 0;
  EXPECT_THROW(complete_idw(sparse_from(4, 4, {{0, 1.0}}), bad), InvalidInput);
}

TEST(Metrics, HandComputed) {
  const DepthMap gt = DepthMap::from_values(3, 1, {1.0, 2.0, 3.0});
  const DepthMap pred = DepthMap::from_values(3, 1, {1.0, 2.3, 2.6});
  const MetricsReport m = compute_metrics(pred, gt, gt.mask());
  EXPECT_NEAR(m.mae, 0.2333333333333333, 1e-15);
  EXPECT_NEAR(m.rmse, 0.28867513459481287, 1e-15);
  EXPECT_EQ(m.evaluated_pixels, 3u);

  const MetricsReport same = compute_metrics(gt, gt, gt.mask());
  EXPECT_EQ(same.mae, 0.0);
  EXPECT_EQ(same.rmse, 0.0);
}

TEST(Metrics, ConstantErrorGivesEqualMaeAndRmse) {
  std::vector<double> g(50), p(50);
  for (int i = 0; i < 50; ++i) {
    g[i] = 1.0 + 0.01 * i;
    p[i] = g[i] + 0.1;
  }
  const DepthMap gt = DepthMap::from_values(10, 5, g);
  const MetricsReport m = compute_metrics(DepthMap::from_values(10, 5, p), gt, gt.mask());
  EXPECT_NEAR(m.mae, 0.1, 1e-12);
  EXPECT_EQ(m.mae, m.rmse);
}

TEST(Metrics, MaeNeverExceedsRmse) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> z(0.5, 5.0);
  std::exponential_distribution<double> e(3.0);
  for (int t = 0; t < 500; ++t) {
    const int n = 1 + t % 37;
    std::vector<double> g(n), p(n);
    for (int i = 0; i < n; ++i) {
      g[i] = z(rng);
      p[i] = g[i] + (t % 5 == 0 ? 0.125 : e(rng));
    }
    const DepthMap gt = DepthMap::from_values(n, 1, g);
    const MetricsReport m = compute_metrics(DepthMap::from_values(n, 1, p), gt, gt.mask());
    EXPECT_LE(m.mae, m.rmse);
  }
}

TEST(Metrics, MaskHandling) {
  const DepthMap gt = DepthMap::from_values(2, 2, {1.0, 0.0, 3.0, 4.0});
  const DepthMap pred = DepthMap::from_values(2, 2, {2.0, 5.0, 3.0, 0.0});
  EXPECT_THROW(compute_metrics(pred, gt, gt.mask()), InvalidInput);  // pred missing pixel 3
  const Mask m{1, 0, 1, 0};
  const MetricsReport r = compute_metrics(pred, gt, m);
  EXPECT_EQ(r.evaluated_pixels, 2u);
  EXPECT_DOUBLE_EQ(r.mae, 0.5);
  EXPECT_THROW(compute_metrics(pred, gt, Mask{0, 1, 0, 0}), InvalidInput);  // no gt
  EXPECT_THROW(compute_metrics(pred, gt, Mask{0, 0, 0, 0}), InvalidInput);
  EXPECT_THROW(compute_metrics(pred, gt, Mask{1, 0, 1}), InvalidInput);
  EXPECT_THROW(compute_metrics(DepthMap(3, 2), gt, m), InvalidInput);
}

TEST(EvaluationMask, ProtocolRestrictions) {
  std::vector<double> z(5 * 4);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 0.5 * static_cast<double>(i);
  const DepthMap gt = DepthMap::from_values(5, 4, z);  // pixel 0 is a hole
  EXPECT_EQ(std::count(gt.mask().begin(), gt.mask().end(), 1), 19);

  EvalProtocol p;
  p.max_depth = 5.0;
  const Mask capped = evaluation_mask(gt, p);
  EXPECT_EQ(std::count(capped.begin(), capped.end(), 1), 10);  // 0.5 .. 5.0

  p = {};
  p.border_crop = 1;
  const Mask cropped = evaluation_mask(gt, p);
  EXPECT_EQ(std::count(cropped.begin(), cropped.end(), 1), 3 * 2);
  EXPECT_TRUE(cropped[gt.index(1, 1)]);
  EXPECT_FALSE(cropped[gt.index(0, 1)]);
}

ComparisonConfig small_config() {
  ComparisonConfig cfg;
  cfg.neighborhood = {5, 0.2, 5};
  cfg.k_values = {10, 30};
  cfg.n_seeds = 2;
  cfg.base_seed = 100;
  return cfg;
}

TEST(RunComparison, NoiselessFullSupportIsExact) {
  const SceneSpec spec = gasd::testing::plane_scene(12, 10, 12, 30.0, 1.0);
  const DepthMap gt = render_scene(spec).depth;
  ComparisonConfig cfg = small_config();
  cfg.neighborhood.radius = 1.0;
  cfg.k_values = {gt.valid_count()};
  const auto rows = run_comparison(gt, spec.intrinsics, cfg);
  ASSERT_EQ(rows.size(), 4u);
  for (const ComparisonRow& r : rows) {
    EXPECT_EQ(r.metrics.mae, 0.0);
    EXPECT_EQ(r.metrics.rmse, 0.0);
    EXPECT_EQ(r.metrics.evaluated_pixels, 120u);
  }
}

TEST(RunComparison, RowLayoutAndDeterminism) {
  const SceneSpec spec = gasd::testing::corner_scene(40, 30, 40, 70.0, 2.0);
  const RenderedScene scene = render_scene(spec);
  ComparisonConfig cfg = small_config();
  cfg.noise.sigma0 = 0.005;
  cfg.noise.angle_gain = 1.0;
  const auto rows = run_comparison(scene.depth, spec.intrinsics, cfg, &scene.normals);
  ASSERT_EQ(rows.size(), 2u * 2u * 2u);
  EXPECT_EQ(rows[0].strategy, Strategy::geometry_aware);
  EXPECT_EQ(rows[0].k, 10u);
  EXPECT_EQ(rows[0].seed, 100u);
  EXPECT_EQ(rows[1].seed, 101u);
  EXPECT_EQ(rows[2].k, 30u);
  EXPECT_EQ(rows[4].strategy, Strategy::uniform);
  for (const ComparisonRow& r : rows) {
    EXPECT_GT(r.metrics.mae, 0.0);
    EXPECT_LE(r.metrics.mae, r.metrics.rmse);
  }

  const auto again = run_comparison(scene.depth, spec.intrinsics, cfg, &scene.normals);
  std::ostringstream a, b;
  write_comparison_csv(a, rows);
  write_comparison_csv(b, again);
  EXPECT_EQ(a.str(), b.str());

  cfg.base_seed = 200;
  std::ostringstream c;
  write_comparison_csv(c, run_comparison(scene.depth, spec.intrinsics, cfg, &scene.normals));
  EXPECT_NE(a.str(), c.str());
}

TEST(RunComparison, CsvFormat) {
  std::vector<ComparisonRow> rows{
      {Strategy::geometry_aware, 100, 0, {0.5, 0.75, 10}},
      {Strategy::geometry_aware, 100, 1, {0.25, 0.25, 12}},
      {Strategy::uniform, 100, 0, {1.0, 2.0, 10}},
  };
  std::ostringstream out;
  write_comparison_csv(out, rows);
  EXPECT_EQ(out.str(),
            "strategy,k,seed,mae,rmse,evaluated_pixels\n"
            "geometry,100,0,0.5,0.75,10\n"
            "geometry,100,1,0.25,0.25,12\n"
            "uniform,100,0,1,2,10\n"
            "geometry,100,mean,0.375,0.5,11\n"
            "uniform,100,mean,1,2,10\n");
}

TEST(RunComparison, Errors) {
  const SceneSpec spec = gasd::testing::plane_scene(12, 10, 12, 0.0, 1.0);
  const DepthMap gt = render_scene(spec).depth;
  ComparisonConfig cfg = small_config();
  cfg.k_values.clear();
  EXPECT_THROW(run_comparison(gt, spec.intrinsics, cfg), InvalidInput);
  cfg = small_config();
  cfg.k_values = {121};
  EXPECT_THROW(run_comparison(gt, spec.intrinsics, cfg), InfeasibleSample);
}

}  // namespace
