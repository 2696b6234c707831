#include "gasd/completion.hpp"

#include "gasd/error.hpp"
#include "gasd/numeric.hpp"
#include "gasd/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

namespace gasd {

namespace {

constexpr double kIdwEpsilon = 1e-9;
constexpr std::uint64_t kNoisePurpose = 0x6e6f697365ULL;

struct Sample {
  int u;
  int v;
  double depth;
  std::size_t index;
};

struct Candidate {
  double dist2;
  std::size_t sample;
};

bool closer(const Candidate& a, const Candidate& b) {
  return a.dist2 != b.dist2 ? a.dist2 < b.dist2 : a.sample < b.sample;
}

// Uniform bucket grid over the image for k-nearest-sample queries.
class SampleGrid {
 public:
  SampleGrid(std::vector<Sample> samples, int width, int height)
      : samples_(std::move(samples)) {
    const double area = static_cast<double>(width) * static_cast<double>(height);
    cell_ = std::max(1, static_cast<int>(std::sqrt(area / static_cast<double>(samples_.size()))));
    cols_ = (width + cell_ - 1) / cell_;
    rows_ = (height + cell_ - 1) / cell_;
    buckets_.resize(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_));
    for (std::size_t s = 0; s < samples_.size(); ++s) {
      buckets_[bucket(samples_[s].u / cell_, samples_[s].v / cell_)].push_back(s);
    }
  }

  const Sample& sample(std::size_t s) const { return samples_[s]; }

  // Fills `out` with the `count` nearest samples to (u, v), nearest first.
  void nearest(int u, int v, std::size_t count, std::vector<Candidate>& out) const {
    out.clear();
    count = std::min(count, samples_.size());
    const int cu = u / cell_;
    const int cv = v / cell_;
    const int max_ring = std::max({cu, cols_ - 1 - cu, cv, rows_ - 1 - cv});

    for (int ring = 0; ring <= max_ring; ++ring) {
      for (int row = cv - ring; row <= cv + ring; ++row) {
        if (row < 0 || row >= rows_) continue;
        const bool edge_row = (row == cv - ring || row == cv + ring);
        const int step = edge_row ? 1 : 2 * ring;
        for (int col = cu - ring; col <= cu + ring; col += std::max(step, 1)) {
          if (col < 0 || col >= cols_) continue;
          for (const std::size_t s : buckets_[bucket(col, row)]) {
            const double du = samples_[s].u - u;
            const double dv = samples_[s].v - v;
            out.push_back({du * du + dv * dv, s});
          }
        }
      }
      if (out.size() >= count) {
        std::nth_element(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(count - 1),
                         out.end(), closer);
        // Unvisited samples are at least ring * cell_ pixels away.
        const double bound = static_cast<double>(ring) * cell_;
        if (out[count - 1].dist2 < bound * bound) break;
      }
    }
    std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(count), out.end(),
                      closer);
    out.resize(count);
  }

 private:
  std::size_t bucket(int col, int row) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  std::vector<Sample> samples_;
  std::vector<std::vector<std::size_t>> buckets_;
  int cell_ = 1;
  int cols_ = 1;
  int rows_ = 1;
};

void append_number(std::string& line, double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  line += buf;
}

}  // namespace

void CompletionConfig::validate() const {
  if (!(power > 0.0) || !std::isfinite(power)) {
    throw InvalidInput("completion: power must be positive");
  }
  if (neighbors < 1) {
    throw InvalidInput("completion: neighbors must be >= 1");
  }
}

DepthMap complete_idw(const SparseDepthMap& sparse, const CompletionConfig& config) {
  config.validate();
  const DepthMap& in = sparse.depth;

  std::vector<Sample> samples;
  for (int v = 0; v < in.height(); ++v) {
    for (int u = 0; u < in.width(); ++u) {
      const std::size_t i = in.index(u, v);
      if (in.valid(i)) samples.push_back({u, v, in.value(i), i});
    }
  }
  if (samples.empty()) {
    throw InvalidInput("complete_idw: sparse map has no samples");
  }

  const SampleGrid grid(std::move(samples), in.width(), in.height());
  const auto count = static_cast<std::size_t>(config.neighbors);
  DepthMap out(in.width(), in.height());
  std::vector<Candidate> nearest;

  for (int v = 0; v < in.height(); ++v) {
    for (int u = 0; u < in.width(); ++u) {
      const std::size_t i = in.index(u, v);
      if (in.valid(i)) {
        out.set(i, in.value(i));
        continue;
      }
      grid.nearest(u, v, count, nearest);
      double num = 0.0;
      double den = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (const Candidate& c : nearest) {
        const double d = grid.sample(c.sample).depth;
        const double w = 1.0 / (std::pow(std::sqrt(c.dist2), config.power) + kIdwEpsilon);
        num += w * d;
        den += w;
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
      out.set(i, std::clamp(num / den, lo, hi));
    }
  }
  return out;
}

Mask evaluation_mask(const DepthMap& gt, const EvalProtocol& protocol) {
  Mask mask = gt.mask();
  const int crop = std::max(0, protocol.border_crop);
  for (int v = 0; v < gt.height(); ++v) {
    for (int u = 0; u < gt.width(); ++u) {
      const std::size_t i = gt.index(u, v);
      if (!mask[i]) continue;
      const bool cropped =
          u < crop || v < crop || u >= gt.width() - crop || v >= gt.height() - crop;
      const bool too_far = protocol.max_depth && gt.value(i) > *protocol.max_depth;
      if (cropped || too_far) mask[i] = 0;
    }
  }
  return mask;
}

MetricsReport compute_metrics(const DepthMap& pred, const DepthMap& gt,
                              std::span<const std::uint8_t> mask) {
  if (pred.width() != gt.width() || pred.height() != gt.height() || mask.size() != gt.size()) {
    throw InvalidInput("compute_metrics: prediction, ground truth and mask shapes differ");
  }
  CompensatedSum abs_sum;
  CompensatedSum sq_sum;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    if (!gt.valid(i)) {
      throw InvalidInput("compute_metrics: mask selects pixel " + std::to_string(i) +
                         " without ground truth");
    }
    if (!pred.valid(i)) {
      throw InvalidInput("compute_metrics: prediction is missing pixel " + std::to_string(i));
    }
    const double e = pred.value(i) - gt.value(i);
    abs_sum.add(std::abs(e));
    sq_sum.add(e * e);
    ++n;
  }
  if (n == 0) throw InvalidInput("compute_metrics: empty evaluation mask");

  MetricsReport report;
  report.evaluated_pixels = n;
  report.mae = abs_sum.value() / static_cast<double>(n);
  // MAE <= RMSE holds exactly; the max only removes last-ulp rounding.
  report.rmse = std::max(std::sqrt(sq_sum.value() / static_cast<double>(n)), report.mae);
  return report;
}

std::vector<ComparisonRow> run_comparison(const DepthMap& gt, const CameraIntrinsics& intrinsics,
                                          const ComparisonConfig& config,
                                          const NormalMap* gt_normals) {
  config.neighborhood.validate();
  config.reliability.validate();
  config.completion.validate();
  config.noise.validate();
  if (config.k_values.empty() || config.n_seeds == 0) {
    throw InvalidInput("run_comparison: need at least one k and one seed");
  }

  const PointCloud gt_cloud = backproject_map(gt, intrinsics);
  NormalMap estimated;
  if (gt_normals == nullptr) {
    estimated = estimate_normal_map(gt_cloud, config.neighborhood);
    gt_normals = &estimated;
  }
  const Mask mask = evaluation_mask(gt, config.protocol);

  std::vector<ComparisonRow> rows;
  for (std::size_t s = 0; s < config.n_seeds; ++s) {
    const std::uint64_t seed = config.base_seed + s;
    NoiseModel noise = config.noise;
    noise.seed = derive_seed(seed, kNoisePurpose);
    const DepthMap noisy = apply_noise(gt, *gt_normals, gt_cloud, noise).depth;

    // Per-seed stages shared across k; identical to what sample_frame does.
    const PointCloud cloud = backproject_map(noisy, intrinsics);
    const NormalMap normals = estimate_normal_map(cloud, config.neighborhood);
    const ReliabilityMap rel = reliability_map(normals, cloud, config.reliability);
    if (rel.valid_count() == 0) {
      throw InfeasibleSample("geometry-aware sampling: no pixel has a valid normal");
    }
    const ProbabilityVector probs = to_probabilities(rel);
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < noisy.size(); ++i) {
      if (noisy.valid(i)) eligible.push_back(i);
    }

    for (const std::size_t k : config.k_values) {
      for (const Strategy strategy : {Strategy::geometry_aware, Strategy::uniform}) {
        std::vector<std::size_t> indices = strategy == Strategy::geometry_aware
                                               ? sample_without_replacement(probs, k, seed)
                                               : sample_uniform(eligible, k, seed);
        const SampleSet samples = collect_samples(noisy, std::move(indices));
        const DepthMap pred =
            complete_idw(build_sparse_depth(noisy, samples), config.completion);
        rows.push_back({strategy, k, seed, compute_metrics(pred, gt, mask)});
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
    return std::tie(a.strategy, a.k, a.seed) < std::tie(b.strategy, b.k, b.seed);
  });
  return rows;
}

std::vector<ComparisonSummary> summarize(std::span<const ComparisonRow> rows) {
  struct Acc {
    CompensatedSum mae, rmse, pixels;
    std::size_t n = 0;
  };
  std::map<std::pair<Strategy, std::size_t>, Acc> groups;
  for (const ComparisonRow& row : rows) {
    Acc& acc = groups[{row.strategy, row.k}];
    acc.mae.add(row.metrics.mae);
    acc.rmse.add(row.metrics.rmse);
    acc.pixels.add(static_cast<double>(row.metrics.evaluated_pixels));
    ++acc.n;
  }
  std::vector<ComparisonSummary> out;
  for (const auto& [key, acc] : groups) {
    const auto n = static_cast<double>(acc.n);
    out.push_back({key.first, key.second, acc.mae.value() / n, acc.rmse.value() / n,
                   acc.pixels.value() / n});
  }
  return out;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
  out << "strategy,k,seed,mae,rmse,evaluated_pixels\n";
  for (const ComparisonRow& row : rows) {
    std::string line(to_string(row.strategy));
    line += ',' + std::to_string(row.k) + ',' + std::to_string(row.seed) + ',';
    append_number(line, row.metrics.mae);
    line += ',';
    append_number(line, row.metrics.rmse);
    line += ',' + std::to_string(row.metrics.evaluated_pixels) + '\n';
    out << line;
  }
  for (const ComparisonSummary& s : summarize(rows)) {
    std::string line(to_string(s.strategy));
    line += ',' + std::to_string(s.k) + ",mean,";
    append_number(line, s.mean_mae);
    line += ',';
    append_number(line, s.mean_rmse);
    line += ',';
    append_number(line, s.mean_evaluated_pixels);
    line += '\n';
    out << line;
  }
}

}  // namespace gasd
