// camchain: extract frame-to-frame camera motion from video frames, replay
// it onto still images, and compare motions between clips.
//
// Exit codes: 0 success, 2 partial result (failed pairs, substituted gaps,
// tolerated low coverage), 1 error.

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "camchain/adapters.hpp"
#include "camchain/camera_score.hpp"
#include "camchain/frame_io.hpp"
#include "camchain/oracle.hpp"
#include "camchain/warp.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitPartial = 2;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("CAMCHAIN_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<std::uint64_t>(v);
    std::fprintf(stderr, "warning: ignoring non-numeric CAMCHAIN_SEED\n");
  }
  return 1;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw camchain::Error(camchain::ErrorCode::io_failure, "cannot create " + path.string());
  out << text;
  if (!out) throw camchain::Error(camchain::ErrorCode::io_failure, "write failed on " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw camchain::Error(camchain::ErrorCode::io_failure, "cannot open " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// A chain argument is either a serialized chain file or a directory of
// frames to extract from.
camchain::MotionChain resolve_chain(const std::filesystem::path& path,
                                    const camchain::RansacParams& params) {
  if (!std::filesystem::exists(path))
    throw camchain::Error(camchain::ErrorCode::missing_path, path.string());
  if (std::filesystem::is_directory(path))
    return camchain::extract_motion_chain(camchain::load_sequence(path), params);
  return camchain::parse_chain(read_text(path));
}

int chain_exit_code(const camchain::MotionChain& chain) {
  for (const camchain::PairEntry& p : chain.pairs)
    if (p.status != camchain::PairStatus::ok) return kExitPartial;
  return kExitOk;
}

struct CommonOptions {
  std::uint64_t seed = default_seed();
  double threshold = camchain::RansacParams{}.inlier_threshold;
  double confidence = camchain::RansacParams{}.confidence;
  int max_iterations = camchain::RansacParams{}.max_iterations;

  camchain::RansacParams ransac() const {
    return camchain::RansacParams{threshold, confidence, max_iterations, seed};
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--seed", seed, "RNG seed (default: CAMCHAIN_SEED or 1)");
    cmd->add_option("--threshold", threshold, "RANSAC inlier threshold, px");
    cmd->add_option("--confidence", confidence, "RANSAC confidence in (0,1)");
    cmd->add_option("--max-iters", max_iterations, "RANSAC iteration cap");
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"camera motion chains: extraction, transfer, comparison"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file mirroring the flags");

  CommonOptions common;

  // extract
  std::string extract_input, extract_output;
  CLI::App* extract = app.add_subcommand("extract", "estimate a motion chain from frames");
  extract->add_option("frames", extract_input, "frame directory or single image")->required();
  extract->add_option("output", extract_output, "chain JSON path")->required();
  common.attach(extract);

  // warp
  std::string warp_image, warp_chain, warp_output;
  bool warp_skip_gaps = false, warp_masks = false;
  CLI::App* warp = app.add_subcommand("warp", "replay a chain on a still image");
  warp->add_option("image", warp_image, "input PPM image")->required();
  warp->add_option("chain", warp_chain, "chain JSON path")->required();
  warp->add_option("output", warp_output, "output directory")->required();
  warp->add_flag("--skip-gaps", warp_skip_gaps, "substitute identity for failed pairs");
  warp->add_flag("--masks", warp_masks, "also write validity masks as PGM");

  // score
  std::string score_ref, score_gen, score_report;
  bool score_allow_low = false, score_resample = false;
  CLI::App* score = app.add_subcommand("score", "compare two motions (lower is closer)");
  score->add_option("reference", score_ref, "chain JSON or frame directory")->required();
  score->add_option("generated", score_gen, "chain JSON or frame directory")->required();
  score->add_option("--report", score_report, "write a JSON report here");
  score->add_flag("--allow-low-coverage", score_allow_low,
                  "score even when too few pairs are comparable");
  score->add_flag("--resample", score_resample, "align differing pair counts");
  common.attach(score);

  // classify
  std::string classify_chain;
  CLI::App* classify = app.add_subcommand("classify", "label each pair's dominant motion");
  classify->add_option("chain", classify_chain, "chain JSON path")->required();

  // oracle
  std::string oracle_motion = "pan", oracle_output;
  camchain::OracleSpec oracle_spec;
  double oracle_angle_deg = 0.0;
  CLI::App* oracle = app.add_subcommand("oracle", "synthesize a sequence with known motion");
  oracle->add_option("output", oracle_output, "output directory")->required();
  oracle->add_option("--motion", oracle_motion, "pan | zoom | rotate")
      ->check(CLI::IsMember({"pan", "zoom", "rotate"}));
  oracle->add_option("--dx", oracle_spec.dx, "pan step, normalized units");
  oracle->add_option("--dy", oracle_spec.dy, "pan step, normalized units");
  oracle->add_option("--scale", oracle_spec.scale, "zoom step ratio");
  oracle->add_option("--angle-deg", oracle_angle_deg, "rotation step, degrees");
  oracle->add_option("--frames", oracle_spec.frame_count, "frame count");
  oracle->add_option("--width", oracle_spec.width, "frame width");
  oracle->add_option("--height", oracle_spec.height, "frame height");
  oracle->add_option("--seed", oracle_spec.texture_seed, "texture seed");

  // adapters
  CLI::App* adapters = app.add_subcommand("adapters", "low-rank adapter numerics");
  adapters->require_subcommand(1);
  int gradcheck_seeds = 20;
  double gradcheck_tolerance = 1e-5;
  CLI::App* gradcheck = adapters->add_subcommand(
      "gradcheck", "verify analytic gradients against finite differences");
  gradcheck->add_option("--seeds", gradcheck_seeds, "number of random trials");
  gradcheck->add_option("--tolerance", gradcheck_tolerance, "max relative error");
  std::uint64_t demo_seed = default_seed();
  CLI::App* demo = adapters->add_subcommand("demo", "worked example of the adapter math");
  demo->add_option("--seed", demo_seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and friends exit 0; every usage mistake is a plain error.
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*extract) {
      camchain::FrameSequence frames = camchain::load_sequence(extract_input);
      camchain::MotionChain chain = camchain::extract_motion_chain(frames, common.ransac());
      write_text(extract_output, camchain::serialize_chain(chain));
      return chain_exit_code(chain);
    }

    if (*warp) {
      camchain::Frame image = camchain::load_frame(warp_image);
      camchain::MotionChain chain = camchain::parse_chain(read_text(warp_chain));
      camchain::SynthesisResult result = camchain::synthesize_pseudo_video(
          image, chain, camchain::SynthesisOptions{warp_skip_gaps});

      std::filesystem::path dir(warp_output);
      camchain::save_sequence(camchain::FrameSequence(result.frames), dir);
      if (warp_masks) {
        for (std::size_t i = 0; i < result.masks.size(); ++i) {
          char name[32];
          std::snprintf(name, sizeof(name), "mask_%04zu.pgm", i + 1);
          std::vector<std::uint8_t> gray(result.masks[i].bits.size());
          for (std::size_t p = 0; p < gray.size(); ++p)
            gray[p] = result.masks[i].bits[p] ? 255 : 0;
          camchain::save_pgm(result.masks[i].width, result.masks[i].height, gray, dir / name);
        }
      }
      if (warp_skip_gaps) {
        nlohmann::json meta;
        meta["substituted_pairs"] = result.substituted_pairs;
        write_text(dir / "warp_meta.json", meta.dump(2) + "\n");
      }
      return result.substituted_pairs.empty() ? kExitOk : kExitPartial;
    }

    if (*score) {
      camchain::MotionChain ref = resolve_chain(score_ref, common.ransac());
      camchain::MotionChain gen = resolve_chain(score_gen, common.ransac());
      if (gen.frame_count != ref.frame_count) {
        if (!score_resample)
          throw camchain::Error(camchain::ErrorCode::length_mismatch,
                                "pair counts differ (pass --resample to align them)");
        gen = camchain::resample_chain(gen, ref.frame_count);
      }
      camchain::CameraScoreReport report =
          camchain::camera_score(ref, gen, camchain::ScoreOptions{score_allow_low});
      std::printf("%.17g\n", report.score);
      if (!score_report.empty()) write_text(score_report, camchain::report_to_json(report));
      return report.coverage < camchain::kMinCoverage ? kExitPartial : kExitOk;
    }

    if (*classify) {
      camchain::MotionChain chain = camchain::parse_chain(read_text(classify_chain));
      for (const camchain::PairEntry& entry : chain.pairs) {
        if (entry.status == camchain::PairStatus::ok) {
          camchain::MotionLabel label = camchain::classify_motion(*entry.h);
          std::printf("%d\t%s\t%.9g\t%.9g\t%.9g\n", entry.index, to_string(label.kind),
                      label.translation, label.scale, label.rotation);
        } else {
          std::printf("%d\t%s\t-\t-\t-\n", entry.index, to_string(entry.status));
        }
      }
      return kExitOk;
    }

    if (*oracle) {
      if (oracle_motion == "pan") oracle_spec.motion = camchain::OracleMotion::pan;
      if (oracle_motion == "zoom") oracle_spec.motion = camchain::OracleMotion::zoom;
      if (oracle_motion == "rotate") {
        oracle_spec.motion = camchain::OracleMotion::rotate;
        oracle_spec.angle = oracle_angle_deg * 3.14159265358979323846 / 180.0;
      }
      camchain::OracleResult result = camchain::generate_sequence(oracle_spec);
      std::filesystem::path dir(oracle_output);
      camchain::save_sequence(result.frames, dir);
      write_text(dir / "chain.json", camchain::serialize_chain(result.ground_truth));
      return kExitOk;
    }

    if (*gradcheck) {
      std::vector<camchain::GradCheckResult> checks =
          camchain::run_gradient_checks(gradcheck_seeds, gradcheck_tolerance);
      bool all_passed = true;
      std::printf("seed\tmax_rel_err_B\tmax_rel_err_A\tresult\n");
      for (const camchain::GradCheckResult& c : checks) {
        std::printf("%" PRIu64 "\t%.3e\t%.3e\t%s\n", c.seed, c.max_rel_error_b,
                    c.max_rel_error_a, c.passed ? "pass" : "FAIL");
        all_passed = all_passed && c.passed;
      }
      return all_passed ? kExitOk : kExitError;
    }

    if (*demo) {
      std::mt19937_64 rng(demo_seed);
      auto draw = [&rng](int rows, int cols) {
        Eigen::MatrixXd m(rows, cols);
        for (int i = 0; i < rows; ++i)
          for (int j = 0; j < cols; ++j)
            m(i, j) = (static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0)) * 2.0 - 1.0;
        return m;
      };
      camchain::LowRankAdapter spatial(Eigen::MatrixXd::Zero(4, 4), draw(4, 2), draw(2, 4));
      camchain::LowRankAdapter temporal(Eigen::MatrixXd::Zero(4, 4), draw(4, 2), draw(2, 4));
      std::printf("effective_weight_norm\t%.9g\n",
                  camchain::effective_weight(spatial).norm());
      std::printf("ortho_loss\t%.9g\n", camchain::ortho_loss(spatial, temporal));
      std::printf("first_stage_loss(1.0, 0.5, delta=0.3)\t%.9g\n",
                  camchain::first_stage_loss(1.0, 0.5, 0.3));
      std::printf("second_stage_loss(0.5, ortho, lambda=0.1)\t%.9g\n",
                  camchain::second_stage_loss(0.5, camchain::ortho_loss(spatial, temporal), 0.1));
      camchain::Tensor z{{4}, {1.0, -0.5, 0.25, 2.0}};
      camchain::Tensor prior{{4}, {0.0, 0.0, 0.0, 0.0}};
      std::printf("guidance_residual\n");
      for (int n = 0; n <= 6; ++n) {
        double norm = 0.0;
        for (double v : z.values) norm += v * v;
        std::printf("  step %d\t%.9g\n", n, std::sqrt(norm));
        z = camchain::guidance_update(camchain::GuidanceState{z, prior, 0.25, std::nullopt});
      }
      return kExitOk;
    }
  } catch (const camchain::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
