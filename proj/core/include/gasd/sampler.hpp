#pragma once

#include "gasd/geometry.hpp"
#include "gasd/normals.hpp"
#include "gasd/reliability.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace gasd {

enum class Strategy { geometry_aware, uniform };

std::string_view to_string(Strategy strategy) noexcept;
/// Accepts "geometry", "geometry_aware" and "uniform".
Strategy parse_strategy(std::string_view name);

struct SamplerConfig {
  std::size_t k = 100;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::geometry_aware;
};

struct SampleSet {
  std::vector<std::size_t> indices;
  std::vector<double> depths;

  std::size_t size() const noexcept { return indices.size(); }
};

/// Source depth at sampled pixels and 0 (invalid) elsewhere.
struct SparseDepthMap {
  DepthMap depth;

  std::size_t sample_count() const noexcept { return depth.valid_count(); }
};

/// Weighted k-subset without replacement, distributed as k sequential draws
/// each proportional to the remaining weights. Every positive-probability
/// index gets the key log(u) / p from its own (seed, index) stream and the k
/// largest keys win (lower index on ties). Indices come back in draw order.
/// Throws InfeasibleSample if fewer than k entries have p > 0.
std::vector<std::size_t> sample_without_replacement(const ProbabilityVector& probabilities,
                                                    std::size_t k, std::uint64_t seed);

/// Uniform k-subset of `eligible`. Throws InfeasibleSample if k > |eligible|.
std::vector<std::size_t> sample_uniform(std::span<const std::size_t> eligible, std::size_t k,
                                        std::uint64_t seed);

/// Attaches source depths. Throws InvalidSample for an index that is out of
/// range or invalid in `source`.
SampleSet collect_samples(const DepthMap& source, std::vector<std::size_t> indices);

SparseDepthMap build_sparse_depth(const DepthMap& source, const SampleSet& samples);

struct FrameSample {
  SparseDepthMap sparse;
  SampleSet samples;
  /// Present for the geometry-aware strategy only.
  std::optional<ReliabilityMap> reliability;
  bool uniform_fallback = false;
};

/// Full pipeline: back-projection, normals, reliability, probabilities,
/// weighted sampling and sparse map. The uniform strategy skips geometry and
/// samples uniformly over valid depth pixels.
FrameSample sample_frame(const DepthMap& depth, const CameraIntrinsics& intrinsics,
                         const NeighborhoodConfig& neighborhood,
                         const ReliabilityConfig& reliability, const SamplerConfig& sampler);

}  // namespace gasd
