#pragma once

#include "gasd/geometry.hpp"
#include "gasd/normals.hpp"
#include "gasd/reliability.hpp"
#include "gasd/sampler.hpp"
#include "gasd/synthetic.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace gasd {

/// Inverse-distance weighting over the `neighbors` nearest samples.
struct CompletionConfig {
  double power = 2.0;
  int neighbors = 8;

  void validate() const;
};

/// Dense map: sum(w_j d_j) / sum(w_j), w_j = 1 / (dist_j^power + 1e-9),
/// over the nearest samples in pixel distance (ties by sample index). A pixel
/// carrying a sample returns that sample exactly. Throws InvalidInput when
/// the sparse map has no samples.
DepthMap complete_idw(const SparseDepthMap& sparse, const CompletionConfig& config);

struct MetricsReport {
  double mae = 0.0;
  double rmse = 0.0;
  std::size_t evaluated_pixels = 0;
};

/// Optional restrictions of the evaluation mask.
struct EvalProtocol {
  std::optional<double> max_depth;
  /// Pixels dropped on every image side.
  int border_crop = 0;
};

/// Ground-truth validity narrowed by the protocol.
Mask evaluation_mask(const DepthMap& gt, const EvalProtocol& protocol);

/// MAE and RMSE of pred against gt over `mask`. Throws InvalidInput on shape
/// mismatch, an empty mask, a mask pixel without ground truth, or a mask
/// pixel where the prediction is missing.
MetricsReport compute_metrics(const DepthMap& pred, const DepthMap& gt,
                              std::span<const std::uint8_t> mask);

struct ComparisonConfig {
  NeighborhoodConfig neighborhood;
  ReliabilityConfig reliability;
  CompletionConfig completion;
  /// `noise.seed` is ignored; every run derives its own noise seed.
  NoiseModel noise;
  EvalProtocol protocol;
  std::vector<std::size_t> k_values{100, 200, 300, 500};
  std::size_t n_seeds = 1;
  std::uint64_t base_seed = 0;
};

struct ComparisonRow {
  Strategy strategy = Strategy::geometry_aware;
  std::size_t k = 0;
  std::uint64_t seed = 0;
  MetricsReport metrics;
};

/// For every seed: perturb `gt` with the noise model, then for every k and
/// both strategies sample the noisy frame, complete it and score against the
/// clean `gt`. Both strategies of a seed see the same noisy frame. Rows are
/// sorted by (strategy, k, seed). `gt_normals` drives the noise incidence;
/// when absent it is estimated from `gt`.
std::vector<ComparisonRow> run_comparison(const DepthMap& gt, const CameraIntrinsics& intrinsics,
                                          const ComparisonConfig& config,
                                          const NormalMap* gt_normals = nullptr);

struct ComparisonSummary {
  Strategy strategy = Strategy::geometry_aware;
  std::size_t k = 0;
  double mean_mae = 0.0;
  double mean_rmse = 0.0;
  double mean_evaluated_pixels = 0.0;
};

std::vector<ComparisonSummary> summarize(std::span<const ComparisonRow> rows);

/// CSV with header `strategy,k,seed,mae,rmse,evaluated_pixels`, one row per
/// run, followed by one `mean` row per (strategy, k).
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows);

}  // namespace gasd
