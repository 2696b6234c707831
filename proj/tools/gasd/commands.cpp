#include "commands.hpp"

#include "gasd/completion.hpp"
#include "gasd/error.hpp"
#include "gasd/geometry.hpp"
#include "gasd/io.hpp"
#include "gasd/normals.hpp"
#include "gasd/reliability.hpp"
#include "gasd/sampler.hpp"
#include "gasd/synthetic.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gasd::cli {

namespace {

struct NeighborhoodFlags {
  NeighborhoodConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--window", config.window, "Odd pixel window side length")
        ->capture_default_str();
    cmd->add_option("--radius", config.radius, "3D neighbor radius in meters")
        ->capture_default_str();
    cmd->add_option("--min-points", config.min_points, "Minimum neighbors for a valid normal")
        ->capture_default_str();
  }
};

struct ReliabilityFlags {
  ReliabilityConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--beta", config.beta, "Grazing-angle exponent (>= 1)")
        ->capture_default_str();
    cmd->add_flag("--curvature-gate", config.curvature_gate,
                  "Multiply reliability by max(0, 1 - kappa / kappa_max)");
    cmd->add_option("--kappa-max", config.kappa_max, "Curvature gate scale")
        ->capture_default_str();
  }
};

struct CompletionFlags {
  CompletionConfig config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--power", config.power, "IDW distance exponent")->capture_default_str();
    cmd->add_option("--neighbors", config.neighbors, "IDW nearest samples per pixel")
        ->capture_default_str();
  }
};

struct ProtocolFlags {
  std::optional<double> max_depth;
  int crop = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--max-depth", max_depth, "Ignore ground truth beyond this depth (m)");
    cmd->add_option("--crop", crop, "Pixels dropped on every border for evaluation")
        ->capture_default_str();
  }

  EvalProtocol protocol() const { return {max_depth, crop}; }
};

NoiseModel noise_from(const std::vector<double>& values) {
  if (values.size() != 3) {
    throw InvalidInput("--noise expects sigma0,gain,dropout_deg");
  }
  NoiseModel model;
  model.sigma0 = values[0];
  model.angle_gain = values[1];
  model.dropout_angle = values[2] * std::numbers::pi / 180.0;
  return model;
}

std::string version_text() {
  const NeighborhoodConfig n;
  const ReliabilityConfig r;
  std::ostringstream out;
  out << "gasd " << kVersion << "\n"
      << "defaults: beta=" << r.beta << " window=" << n.window << " radius=" << n.radius
      << " min-points=" << n.min_points;
  return out.str();
}

void write_csv_metrics(std::ostream& out, const MetricsReport& m) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "mae,rmse,evaluated_pixels\n%.9g,%.9g,%zu\n", m.mae, m.rmse,
                m.evaluated_pixels);
  out << buf;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Geometry-aware sparse depth sampling"};
  app.set_version_flag("--version", version_text());
  app.set_config("--config", "", "TOML/INI file supplying any flag; command line wins");
  app.require_subcommand(1);

  double depth_scale = 1000.0;
  app.add_option("--depth-scale", depth_scale, "16-bit PNG units per meter")
      ->capture_default_str();

  std::function<void()> action;

  // normals
  {
    auto* cmd = app.add_subcommand("normals", "Estimate PCA normals and curvature");
    auto flags = std::make_shared<NeighborhoodFlags>();
    auto depth = std::make_shared<std::string>();
    auto intrinsics = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto curvature_out = std::make_shared<std::string>();
    auto rgb_out = std::make_shared<std::string>();
    cmd->add_option("--depth", *depth, "Depth map (.png or float image)")->required();
    cmd->add_option("--intrinsics", *intrinsics, "Intrinsics text file")->required();
    cmd->add_option("--out", *out, "Normal-map record stream output")->required();
    cmd->add_option("--curvature-out", *curvature_out, "Curvature PNG (kappa * 3 * 255)");
    cmd->add_option("--rgb-out", *rgb_out, "Normal RGB PNG ((n + 1) / 2)");
    flags->attach(cmd);
    cmd->callback([=, &action, &depth_scale] {
      action = [=, &depth_scale] {
        const DepthMap d = read_depth(*depth, {depth_scale});
        const CameraIntrinsics k = read_intrinsics(*intrinsics);
        const NormalMap normals = estimate_normal_map(backproject_map(d, k), flags->config);
        write_normal_map(normals, *out);
        if (!curvature_out->empty()) write_curvature_png(normals, *curvature_out);
        if (!rgb_out->empty()) write_normal_rgb_png(normals, *rgb_out);
      };
    });
  }

  // sample
  {
    auto* cmd = app.add_subcommand("sample", "Draw a sparse depth map");
    auto nflags = std::make_shared<NeighborhoodFlags>();
    auto rflags = std::make_shared<ReliabilityFlags>();
    auto depth = std::make_shared<std::string>();
    auto intrinsics = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto rel_out = std::make_shared<std::string>();
    auto rel_float_out = std::make_shared<std::string>();
    auto samples_out = std::make_shared<std::string>();
    auto strategy = std::make_shared<std::string>("geometry");
    auto k = std::make_shared<std::size_t>(0);
    auto seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--depth", *depth, "Ground-truth depth map")->required();
    cmd->add_option("--intrinsics", *intrinsics, "Intrinsics text file")->required();
    cmd->add_option("--k", *k, "Number of samples")->required();
    cmd->add_option("--strategy", *strategy, "geometry or uniform")
        ->check(CLI::IsMember({"geometry", "geometry_aware", "uniform"}))
        ->capture_default_str();
    cmd->add_option("--seed", *seed, "RNG seed")->required();
    cmd->add_option("--out", *out, "Sparse depth output")->required();
    cmd->add_option("--reliability-out", *rel_out, "Reliability PNG (geometry strategy)");
    cmd->add_option("--reliability-float-out", *rel_float_out,
                    "Reliability float image (geometry strategy)");
    cmd->add_option("--samples-out", *samples_out, "Sample list text file");
    nflags->attach(cmd);
    rflags->attach(cmd);
    cmd->callback([=, &action, &depth_scale] {
      action = [=, &depth_scale] {
        const DepthMap d = read_depth(*depth, {depth_scale});
        const CameraIntrinsics intr = read_intrinsics(*intrinsics);
        const SamplerConfig scfg{*k, *seed, parse_strategy(*strategy)};
        const FrameSample result = sample_frame(d, intr, nflags->config, rflags->config, scfg);
        if (result.uniform_fallback) {
          std::cerr << "note: every reliability score is zero; sampled uniformly\n";
        }
        write_depth(result.sparse.depth, *out, {depth_scale});
        if (!samples_out->empty()) write_sample_list(result.samples, d.width(), *samples_out);
        if (result.reliability) {
          if (!rel_out->empty()) write_reliability_png(*result.reliability, *rel_out);
          if (!rel_float_out->empty()) write_reliability_float(*result.reliability, *rel_float_out);
        } else if (!rel_out->empty() || !rel_float_out->empty()) {
          std::cerr << "note: uniform strategy computes no reliability map; skipped\n";
        }
      };
    });
  }

  // synth
  {
    auto* cmd = app.add_subcommand("synth", "Render an analytic scene, optionally with noise");
    auto scene = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto intrinsics_out = std::make_shared<std::string>();
    auto normals_out = std::make_shared<std::string>();
    auto noisy_out = std::make_shared<std::string>();
    auto error_out = std::make_shared<std::string>();
    auto noise = std::make_shared<std::vector<double>>();
    auto seed = std::make_shared<std::optional<std::uint64_t>>();
    cmd->add_option("--scene", *scene, "Scene key-value file")->required();
    cmd->add_option("--out", *out, "Clean depth output")->required();
    cmd->add_option("--intrinsics-out", *intrinsics_out, "Write the scene intrinsics");
    cmd->add_option("--normals-out", *normals_out, "Analytic normal-map record stream");
    cmd->add_option("--noise", *noise, "sigma0,gain,dropout_deg")->delimiter(',')->expected(3);
    cmd->add_option("--seed", *seed, "Noise seed (required with --noise)");
    cmd->add_option("--noisy-out", *noisy_out, "Noisy depth output (requires --noise)");
    cmd->add_option("--error-out", *error_out, "Absolute error float image (requires --noise)");
    cmd->callback([=, &action, &depth_scale] {
      action = [=, &depth_scale] {
        const SceneSpec spec = read_scene_spec(*scene);
        const RenderedScene rendered = render_scene(spec);
        write_depth(rendered.depth, *out, {depth_scale});
        if (!intrinsics_out->empty()) write_intrinsics(spec.intrinsics, *intrinsics_out);
        if (!normals_out->empty()) write_normal_map(rendered.normals, *normals_out);

        if (noise->empty()) {
          if (!noisy_out->empty() || !error_out->empty()) {
            throw InvalidInput("--noisy-out/--error-out need --noise");
          }
          return;
        }
        if (!seed->has_value()) throw InvalidInput("--noise needs an explicit --seed");
        NoiseModel model = noise_from(*noise);
        model.seed = **seed;
        const NoisyFrame noisy =
            apply_noise(rendered.depth, rendered.normals,
                        backproject_map(rendered.depth, spec.intrinsics), model);
        if (!noisy_out->empty()) write_depth(noisy.depth, *noisy_out, {depth_scale});
        if (!error_out->empty()) {
          write_float_image(*error_out, spec.width, spec.height, noisy.error);
        }
      };
    });
  }

  // complete
  {
    auto* cmd = app.add_subcommand("complete", "IDW completion of a sparse depth map");
    auto cflags = std::make_shared<CompletionFlags>();
    auto sparse = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--sparse", *sparse, "Sparse depth map")->required();
    cmd->add_option("--out", *out, "Dense depth output")->required();
    cflags->attach(cmd);
    cmd->callback([=, &action, &depth_scale] {
      action = [=, &depth_scale] {
        const SparseDepthMap s{read_depth(*sparse, {depth_scale})};
        write_depth(complete_idw(s, cflags->config), *out, {depth_scale});
      };
    });
  }

  // eval
  {
    auto* cmd = app.add_subcommand("eval", "MAE / RMSE of a prediction against ground truth");
    auto pflags = std::make_shared<ProtocolFlags>();
    auto pred = std::make_shared<std::string>();
    auto gt = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--pred", *pred, "Predicted depth")->required();
    cmd->add_option("--gt", *gt, "Ground-truth depth")->required();
    cmd->add_option("--out", *out, "CSV output (default: stdout)");
    pflags->attach(cmd);
    cmd->callback([=, &action, &depth_scale] {
      action = [=, &depth_scale] {
        const DepthMap p = read_depth(*pred, {depth_scale});
        const DepthMap g = read_depth(*gt, {depth_scale});
        const MetricsReport report = compute_metrics(p, g, evaluation_mask(g, pflags->protocol()));
        if (out->empty()) {
          write_csv_metrics(std::cout, report);
        } else {
          std::ofstream f(*out);
          if (!f) throw FormatError(*out + ": cannot open for writing");
          write_csv_metrics(f, report);
        }
      };
    });
  }

  // compare
  {
    auto* cmd = app.add_subcommand("compare", "Geometry-aware vs uniform sampling table");
    auto nflags = std::make_shared<NeighborhoodFlags>();
    auto rflags = std::make_shared<ReliabilityFlags>();
    auto cflags = std::make_shared<CompletionFlags>();
    auto pflags = std::make_shared<ProtocolFlags>();
    auto gt = std::make_shared<std::string>();
    auto intrinsics = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto k_list = std::make_shared<std::vector<std::size_t>>(
        std::vector<std::size_t>{100, 200, 300, 500});
    auto noise = std::make_shared<std::vector<double>>(std::vector<double>{0.0, 0.0, 90.0});
    auto seeds = std::make_shared<std::size_t>(1);
    auto seed = std::make_shared<std::uint64_t>(0);
    cmd->add_option("--gt", *gt, "Clean ground-truth depth")->required();
    cmd->add_option("--intrinsics", *intrinsics, "Intrinsics text file")->required();
    cmd->add_option("--out", *out, "CSV output")->required();
    cmd->add_option("--k-list", *k_list, "Comma-separated sample counts")
        ->delimiter(',')
        ->capture_default_str();
    cmd->add_option("--seeds", *seeds, "Number of seeds per k")->capture_default_str();
    cmd->add_option("--seed", *seed, "First seed")->required();
    cmd->add_option("--noise", *noise, "sigma0,gain,dropout_deg")
        ->delimiter(',')
        ->expected(3)
        ->capture_default_str();
    nflags->attach(cmd);
    rflags->attach(cmd);
    cflags->attach(cmd);
    pflags->attach(cmd);
    cmd->callback([=, &action, &depth_scale] {
      action = [=, &depth_scale] {
        ComparisonConfig config;
        config.neighborhood = nflags->config;
        config.reliability = rflags->config;
        config.completion = cflags->config;
        config.protocol = pflags->protocol();
        config.noise = noise_from(*noise);
        config.k_values = *k_list;
        config.n_seeds = *seeds;
        config.base_seed = *seed;
        const DepthMap g = read_depth(*gt, {depth_scale});
        const CameraIntrinsics k = read_intrinsics(*intrinsics);
        const auto rows = run_comparison(g, k, config);
        std::ofstream f(*out, std::ios::binary | std::ios::trunc);
        if (!f) throw FormatError(*out + ": cannot open for writing");
        write_comparison_csv(f, rows);
        if (!f) throw FormatError(*out + ": write failed");
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "gasd: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (action) action();
    return kOk;
  } catch (const InfeasibleSample& e) {
    std::cerr << "gasd: infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "gasd: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace gasd::cli
