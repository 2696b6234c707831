#include "gasd/sampler.hpp"

#include "gasd/error.hpp"
#include "gasd/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace gasd {

namespace {

// Stream purposes, so the two strategies never share per-pixel variates.
constexpr std::uint64_t kWeightedKeys = 0x77656967687465ULL;
constexpr std::uint64_t kUniformKeys = 0x756e69666f726dULL;

struct Keyed {
  double key;
  std::size_t index;
};

std::vector<std::size_t> top_k(std::vector<Keyed> keyed, std::size_t k) {
  const auto better = [](const Keyed& a, const Keyed& b) {
    return a.key != b.key ? a.key > b.key : a.index < b.index;
  };
  std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(k), keyed.end(),
                    better);
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = keyed[j].index;
  return out;
}

std::string infeasible(std::size_t k, std::size_t support, const char* what) {
  return "cannot draw k=" + std::to_string(k) + " samples: only " + std::to_string(support) +
         " " + what;
}

}  // namespace

std::string_view to_string(Strategy strategy) noexcept {
  switch (strategy) {
    case Strategy::geometry_aware:
      return "geometry";
    case Strategy::uniform:
      return "uniform";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "geometry" || name == "geometry_aware") return Strategy::geometry_aware;
  if (name == "uniform") return Strategy::uniform;
  throw InvalidInput("unknown sampling strategy '" + std::string(name) + "'");
}

std::vector<std::size_t> sample_without_replacement(const ProbabilityVector& probabilities,
                                                    std::size_t k, std::uint64_t seed) {
  if (probabilities.indices.size() != probabilities.probs.size()) {
    throw InvalidInput("sample_without_replacement: indices and probabilities differ in length");
  }
  if (k == 0) throw InvalidInput("sample_without_replacement: k must be >= 1");

  const std::uint64_t stream_seed = derive_seed(seed, kWeightedKeys);
  std::vector<Keyed> keyed;
  keyed.reserve(probabilities.indices.size());
  for (std::size_t j = 0; j < probabilities.indices.size(); ++j) {
    const double p = probabilities.probs[j];
    if (!(p > 0.0)) continue;
    const std::size_t index = probabilities.indices[j];
    KeyedStream stream(stream_seed, index);
    // log of the exponential-race key u^(1/p).
    keyed.push_back({std::log(stream.uniform()) / p, index});
  }
  if (k > keyed.size()) {
    throw InfeasibleSample(infeasible(k, keyed.size(), "pixels have positive probability"));
  }
  return top_k(std::move(keyed), k);
}

std::vector<std::size_t> sample_uniform(std::span<const std::size_t> eligible, std::size_t k,
                                        std::uint64_t seed) {
  if (k == 0) throw InvalidInput("sample_uniform: k must be >= 1");
  if (k > eligible.size()) {
    throw InfeasibleSample(infeasible(k, eligible.size(), "pixels are eligible"));
  }
  const std::uint64_t stream_seed = derive_seed(seed, kUniformKeys);
  std::vector<Keyed> keyed;
  keyed.reserve(eligible.size());
  for (const std::size_t index : eligible) {
    KeyedStream stream(stream_seed, index);
    keyed.push_back({stream.uniform(), index});
  }
  return top_k(std::move(keyed), k);
}

SampleSet collect_samples(const DepthMap& source, std::vector<std::size_t> indices) {
  SampleSet out;
  out.depths.reserve(indices.size());
  for (const std::size_t i : indices) {
    if (i >= source.size() || !source.valid(i)) {
      throw InvalidSample("sample index " + std::to_string(i) +
                          " has no valid source depth");
    }
    out.depths.push_back(source.value(i));
  }
  out.indices = std::move(indices);
  return out;
}

SparseDepthMap build_sparse_depth(const DepthMap& source, const SampleSet& samples) {
  SparseDepthMap out{DepthMap(source.width(), source.height())};
  for (const std::size_t i : samples.indices) {
    if (i >= source.size() || !source.valid(i)) {
      throw InvalidSample("sample index " + std::to_string(i) +
                          " has no valid source depth");
    }
    if (out.depth.valid(i)) {
      throw InvalidSample("sample index " + std::to_string(i) + " appears twice");
    }
    out.depth.set(i, source.value(i));
  }
  return out;
}

FrameSample sample_frame(const DepthMap& depth, const CameraIntrinsics& intrinsics,
                         const NeighborhoodConfig& neighborhood,
                         const ReliabilityConfig& reliability, const SamplerConfig& sampler) {
  FrameSample out;
  std::vector<std::size_t> indices;

  if (sampler.strategy == Strategy::uniform) {
    intrinsics.validate_for(depth.width(), depth.height());
    std::vector<std::size_t> eligible;
    eligible.reserve(depth.size());
    for (std::size_t i = 0; i < depth.size(); ++i) {
      if (depth.valid(i)) eligible.push_back(i);
    }
    indices = sample_uniform(eligible, sampler.k, sampler.seed);
  } else {
    const PointCloud cloud = backproject_map(depth, intrinsics);
    const NormalMap normals = estimate_normal_map(cloud, neighborhood);
    ReliabilityMap rel = reliability_map(normals, cloud, reliability);
    if (rel.valid_count() == 0) {
      throw InfeasibleSample("geometry-aware sampling: no pixel has a valid normal");
    }
    const ProbabilityVector probs = to_probabilities(rel);
    out.uniform_fallback = probs.uniform_fallback;
    indices = sample_without_replacement(probs, sampler.k, sampler.seed);
    out.reliability = std::move(rel);
  }

  out.samples = collect_samples(depth, std::move(indices));
  out.sparse = build_sparse_depth(depth, out.samples);
  return out;
}

}  // namespace gasd
