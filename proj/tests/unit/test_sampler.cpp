#include "gasd/error.hpp"
#include "gasd/sampler.hpp"
#include "gasd/synthetic.hpp"

#include "support/oracles.hpp"
#include "support/scenes.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <numeric>
#include <set>

using namespace gasd;

namespace {

ProbabilityVector from_weights(const std::vector<double>& w) {
  ProbabilityVector pv;
  const double sum = std::accumulate(w.begin(), w.end(), 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    pv.indices.push_back(i);
    pv.probs.push_back(w[i] / sum);
  }
  return pv;
}

TEST(SampleWithoutReplacement, SinglePositiveWeight) {
  const ProbabilityVector pv = from_weights({0.0, 0.0, 5.0, 0.0});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    EXPECT_EQ(sample_without_replacement(pv, 1, seed), std::vector<std::size_t>{2});
  }
  EXPECT_THROW(sample_without_replacement(pv, 2, 0), InfeasibleSample);
}

TEST(SampleWithoutReplacement, KEqualsSupport) {
  const ProbabilityVector pv = from_weights({1, 2, 3, 4, 5});
  auto got = sample_without_replacement(pv, 5, 42);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_THROW(sample_without_replacement(pv, 6, 42), InfeasibleSample);
  EXPECT_THROW(sample_without_replacement(pv, 0, 42), InvalidInput);
}

TEST(SampleWithoutReplacement, EnumerationOracleFrozenValues) {
  // Exact rational enumeration of all 8*7*6 ordered outcomes.
  const std::vector<double> w{1, 1, 2, 2, 3, 3, 4, 4};
  const std::vector<double> frozen{0.17136681258198286, 0.17136681258198286,
                                   0.32237021664266247, 0.32237021664266247,
                                   0.4507633620249719,  0.4507633620249719,
                                   0.5554996087503827,  0.5554996087503827};
  const auto exact = oracle::sequential_inclusion(w, 3);
  for (std::size_t i = 0; i < w.size(); ++i) EXPECT_NEAR(exact[i], frozen[i], 1e-14);
}

TEST(SampleWithoutReplacement, InclusionMatchesSequentialDraws) {
  const std::vector<double> w{1, 1, 2, 2, 3, 3, 4, 4};
  const auto exact = oracle::sequential_inclusion(w, 3);
  const ProbabilityVector pv = from_weights(w);
  constexpr int kDraws = 100000;
  std::vector<double> freq(w.size(), 0.0);
  for (int s = 0; s < kDraws; ++s) {
    const auto got = sample_without_replacement(pv, 3, static_cast<std::uint64_t>(s));
    ASSERT_EQ(std::set<std::size_t>(got.begin(), got.end()).size(), 3u);
    for (const std::size_t i : got) freq[i] += 1.0 / kDraws;
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) tv += 0.5 * std::abs(freq[i] - exact[i]);
  EXPECT_LT(tv, 0.01);
}

TEST(SampleWithoutReplacement, SmallCasesAgainstOracle) {
  // Marginals for assorted N <= 8, k <= 3.
  const std::vector<std::vector<double>> cases{{5, 1}, {1, 2, 7}, {0.5, 0.5, 3, 1, 2}, {9, 1, 1, 1, 1, 1}};
  for (const auto& w : cases) {
    for (std::size_t k = 1; k <= std::min<std::size_t>(3, w.size()); ++k) {
      const auto exact = oracle::sequential_inclusion(w, k);
      const ProbabilityVector pv = from_weights(w);
      constexpr int kDraws = 100000;
      std::vector<double> freq(w.size(), 0.0);
      for (int s = 0; s < kDraws; ++s) {
        for (const std::size_t i : sample_without_replacement(pv, k, 1000003ULL * s + k)) {
          freq[i] += 1.0 / kDraws;
        }
      }
      double tv = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) tv += 0.5 * std::abs(freq[i] - exact[i]);
      EXPECT_LT(tv, 0.01) << "N=" << w.size() << " k=" << k;
    }
  }
}

TEST(SampleWithoutReplacement, DeterministicGivenSeed) {
  std::vector<double> w(500);
  std::iota(w.begin(), w.end(), 1.0);
  const ProbabilityVector pv = from_weights(w);
  EXPECT_EQ(sample_without_replacement(pv, 50, 9), sample_without_replacement(pv, 50, 9));
  EXPECT_NE(sample_without_replacement(pv, 50, 9), sample_without_replacement(pv, 50, 10));
}

TEST(SampleUniform, EdgeCases) {
  const std::vector<std::size_t> eligible{4, 9, 11};
  auto all = sample_uniform(eligible, 3, 1);
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, eligible);
  EXPECT_EQ(sample_uniform(std::vector<std::size_t>{17}, 1, 5), std::vector<std::size_t>{17});
  EXPECT_THROW(sample_uniform(eligible, 4, 1), InfeasibleSample);
}

TEST(SampleUniform, InclusionProbabilityIsKOverN) {
  std::vector<std::size_t> eligible(10);
  std::iota(eligible.begin(), eligible.end(), 100);
  constexpr int kDraws = 100000;
  std::vector<double> freq(10, 0.0);
  for (int s = 0; s < kDraws; ++s) {
    const auto got = sample_uniform(eligible, 3, static_cast<std::uint64_t>(s));
    ASSERT_EQ(std::set<std::size_t>(got.begin(), got.end()).size(), 3u);
    for (const std::size_t i : got) freq[i - 100] += 1.0 / kDraws;
  }
  for (const double f : freq) EXPECT_NEAR(f, 0.3, 0.01);
}

TEST(BuildSparseDepth, ConstantMapSingleSample) {
  const DepthMap src = DepthMap::from_values(5, 4, std::vector<double>(20, 1.7));
  const SparseDepthMap sparse = build_sparse_depth(src, collect_samples(src, {13}));
  EXPECT_EQ(sparse.sample_count(), 1u);
  EXPECT_EQ(sparse.depth.value(13), 1.7);
}

TEST(BuildSparseDepth, FullSupportReproducesSource) {
  const DepthMap src = DepthMap::from_values(3, 2, {1.0, 0.0, 2.0, 3.0, 4.0, 0.0});
  const SparseDepthMap sparse = build_sparse_depth(src, collect_samples(src, {0, 2, 3, 4}));
  EXPECT_EQ(sparse.depth, src);
}

TEST(BuildSparseDepth, HandConstructedGrid) {
  std::vector<double> z(16);
  std::iota(z.begin(), z.end(), 1.0);
  const DepthMap src = DepthMap::from_values(4, 4, z);
  const SampleSet samples = collect_samples(src, {5, 10, 3});
  const SparseDepthMap sparse = build_sparse_depth(src, samples);
  const std::vector<double> expected{0, 0, 0, 4,  //
                                     0, 6, 0, 0,  //
                                     0, 0, 11, 0,  //
                                     0, 0, 0, 0};
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(sparse.depth.value(i), expected[i]) << i;
  EXPECT_EQ(samples.depths, (std::vector<double>{6, 11, 4}));
  // Conservation of the sampled depth mass.
  double total = 0.0;
  for (const double d : sparse.depth.values()) total += d;
  EXPECT_EQ(total, 6.0 + 11.0 + 4.0);
}

TEST(BuildSparseDepth, RejectsInvalidSamples) {
  const DepthMap src = DepthMap::from_values(2, 2, {1.0, 0.0, 2.0, 3.0});
  EXPECT_THROW(collect_samples(src, {1}), InvalidSample);
  EXPECT_THROW(collect_samples(src, {4}), InvalidSample);
  SampleSet forged{{1}, {5.0}};
  EXPECT_THROW(build_sparse_depth(src, forged), InvalidSample);
  SampleSet twice{{0, 0}, {1.0, 1.0}};
  EXPECT_THROW(build_sparse_depth(src, twice), InvalidSample);
}

TEST(SampleFrame, UniformOnFullFrame) {
  const SceneSpec spec = gasd::testing::plane_scene(40, 30, 40, 20.0, 1.0);
  const DepthMap depth = render_scene(spec).depth;
  const FrameSample fs =
      sample_frame(depth, spec.intrinsics, {}, {}, {100, 3, Strategy::uniform});
  EXPECT_EQ(fs.sparse.sample_count(), 100u);
  EXPECT_FALSE(fs.reliability.has_value());
  EXPECT_THROW(sample_frame(depth, spec.intrinsics, {}, {}, {1201, 3, Strategy::uniform}),
               InfeasibleSample);
}

TEST(SampleFrame, DeterministicAndSupportRestricted) {
  const SceneSpec spec = gasd::testing::corner_scene(48, 36, 300, 85.0, 2.0);
  const DepthMap depth = render_scene(spec).depth;
  const NeighborhoodConfig ncfg{5, 0.1, 5};
  const SamplerConfig scfg{200, 77, Strategy::geometry_aware};
  const FrameSample a = sample_frame(depth, spec.intrinsics, ncfg, {}, scfg);
  const FrameSample b = sample_frame(depth, spec.intrinsics, ncfg, {}, scfg);
  EXPECT_EQ(a.samples.indices, b.samples.indices);
  EXPECT_EQ(a.sparse.depth, b.sparse.depth);
  ASSERT_TRUE(a.reliability);
  for (const std::size_t i : a.samples.indices) {
    EXPECT_TRUE(a.reliability->valid[i]);
    EXPECT_GT(a.reliability->scores[i], 0.0);
  }
}

TEST(SampleFrame, FrontalPlaneIsStatisticallyUniform) {
  // Narrow field of view, so every pixel sees the plane head-on.
  const SceneSpec spec = gasd::testing::plane_scene(24, 16, 4000, 0.0, 1.0);
  const DepthMap depth = render_scene(spec).depth;
  const NeighborhoodConfig ncfg{3, 0.01, 3};
  const std::size_t n = depth.size();
  std::vector<double> counts(n, 0.0);
  constexpr int kSeeds = 4000;
  constexpr std::size_t kK = 8;
  for (int s = 0; s < kSeeds; ++s) {
    const FrameSample fs = sample_frame(depth, spec.intrinsics, ncfg, {},
                                        {kK, static_cast<std::uint64_t>(s), Strategy::geometry_aware});
    for (const std::size_t i : fs.samples.indices) counts[i] += 1.0;
  }
  const double expected = static_cast<double>(kSeeds * kK) / static_cast<double>(n);
  double chi2 = 0.0;
  for (const double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(static_cast<double>(n - 1));
  const double p_value = boost::math::cdf(boost::math::complement(dist, chi2));
  EXPECT_GT(p_value, 0.01) << "chi2=" << chi2;
}

TEST(SampleFrame, GrazingHalfIsAvoided) {
  const SceneSpec spec = gasd::testing::corner_scene(64, 48, 400, 80.0, 2.0);
  const DepthMap depth = render_scene(spec).depth;
  const NeighborhoodConfig ncfg{5, 0.1, 5};

  const FrameSample first =
      sample_frame(depth, spec.intrinsics, ncfg, {}, {20, 0, Strategy::geometry_aware});
  const ReliabilityMap& rel = *first.reliability;
  double frontal_mass = 0.0;
  double total_mass = 0.0;
  std::size_t frontal_area = 0;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    const bool frontal = static_cast<int>(i % 64) < 32;
    frontal_area += frontal;
    total_mass += rel.scores[i];
    if (frontal) frontal_mass += rel.scores[i];
  }
  const double expected_fraction = frontal_mass / total_mass;

  std::size_t on_frontal = 0;
  std::size_t drawn = 0;
  for (std::uint64_t s = 0; s < 500; ++s) {
    const FrameSample fs =
        sample_frame(depth, spec.intrinsics, ncfg, {}, {20, s, Strategy::geometry_aware});
    for (const std::size_t i : fs.samples.indices) {
      on_frontal += static_cast<int>(i % 64) < 32;
      ++drawn;
    }
  }
  const double fraction = static_cast<double>(on_frontal) / static_cast<double>(drawn);
  const double area_fraction = static_cast<double>(frontal_area) / static_cast<double>(rel.size());
  EXPECT_NEAR(area_fraction, 0.5, 1e-12);
  EXPECT_GT(fraction, 0.9);
  EXPECT_NEAR(fraction, expected_fraction, 0.02);
}

TEST(Strategy, ParseAndPrint) {
  EXPECT_EQ(parse_strategy("geometry"), Strategy::geometry_aware);
  EXPECT_EQ(parse_strategy("uniform"), Strategy::uniform);
  EXPECT_EQ(to_string(Strategy::geometry_aware), "geometry");
  EXPECT_THROW(parse_strategy("poisson"), InvalidInput);
}

}  // namespace
