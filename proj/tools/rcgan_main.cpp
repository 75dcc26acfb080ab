// Command-line surface: train, generate, derain, evaluate, synth, ablate.
// Exit codes: 0 success, 1 partial results (skips), 2 validation/usage
// error, 3 numeric abort.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "rcgan/checkpoint.hpp"
#include "rcgan/config.hpp"
#include "rcgan/data.hpp"
#include "rcgan/errors.hpp"
#include "rcgan/metrics.hpp"
#include "rcgan/png_io.hpp"
#include "rcgan/trainer.hpp"

namespace fs = std::filesystem;
using namespace rcgan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

// Flag holders: values are applied onto the config only when the flag was
// actually given, so precedence is flags > config file > defaults.
struct TrainFlags {
  std::string config_path;
  std::string data_dir;
  std::string out_dir;
  std::uint64_t seed = 0;
  int epochs = 0;
  int image_size = 0;
  bool no_labels = false;
  std::string activation;
  int suppression_ratio = 0;
  std::string resume;
  double lr_gen = 0.0;
  double lr_dis = 0.0;
  int gen_width = 0;
  int dis_width = 0;
  int rmi_width = 0;
  int feat_width = 0;
  int checkpoint_every = 0;
  int sample_every = 0;
  std::string identity_mode;
  int n_rmi = 0;
};

void add_train_options(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config_path, "Config file (flat key = value text)");
  cmd->add_option("--data", f.data_dir, "Dataset root directory");
  cmd->add_option("--out", f.out_dir, "Output/run directory");
  cmd->add_option("--seed", f.seed, "Master seed");
  cmd->add_option("--epochs", f.epochs, "Number of epochs");
  cmd->add_option("--image-size", f.image_size, "Square training resolution (divisible by 4)");
  cmd->add_flag("--no-labels", f.no_labels, "Disable intensity-label conditioning");
  cmd->add_option("--activation", f.activation, "Discriminator activation: sigmoid|leakyrelu");
  cmd->add_option("--suppression-ratio", f.suppression_ratio,
                  "Generator updates per discriminator update");
  cmd->add_option("--lr-gen", f.lr_gen, "Generator-side learning rate");
  cmd->add_option("--lr-dis", f.lr_dis, "Discriminator learning rate");
  cmd->add_option("--gen-width", f.gen_width, "Generator base channel width");
  cmd->add_option("--dis-width", f.dis_width, "Discriminator base channel width");
  cmd->add_option("--rmi-width", f.rmi_width, "Rain-mask network channel width");
  cmd->add_option("--feat-width", f.feat_width, "Feature extractor channel width");
  cmd->add_option("--checkpoint-every", f.checkpoint_every, "Checkpoint interval in epochs");
  cmd->add_option("--sample-every", f.sample_every, "Sample-grid interval in epochs");
  cmd->add_option("--identity-mode", f.identity_mode,
                  "Decomposition-identity loss mode: pixel|feature");
  cmd->add_option("--n-rmi", f.n_rmi, "Recurrent mask-estimation steps");
}

TrainConfig build_config(const CLI::App* cmd, const TrainFlags& f) {
  TrainConfig cfg;
  if (cmd->count("--config")) cfg = load_config_file(f.config_path);
  if (cmd->count("--data")) cfg.data_dir = f.data_dir;
  if (cmd->count("--out")) cfg.out_dir = f.out_dir;
  if (cmd->count("--seed")) cfg.seed = f.seed;
  if (cmd->count("--epochs")) cfg.epochs = f.epochs;
  if (cmd->count("--image-size")) cfg.image_size = f.image_size;
  if (cmd->count("--no-labels")) cfg.use_labels = false;
  if (cmd->count("--activation")) cfg.activation = parse_activation(f.activation);
  if (cmd->count("--suppression-ratio")) cfg.suppression_ratio = f.suppression_ratio;
  if (cmd->count("--lr-gen")) cfg.lr_gen = f.lr_gen;
  if (cmd->count("--lr-dis")) cfg.lr_dis = f.lr_dis;
  if (cmd->count("--gen-width")) cfg.gen_width = f.gen_width;
  if (cmd->count("--dis-width")) cfg.dis_width = f.dis_width;
  if (cmd->count("--rmi-width")) cfg.rmi_width = f.rmi_width;
  if (cmd->count("--feat-width")) cfg.feat_width = f.feat_width;
  if (cmd->count("--checkpoint-every")) cfg.checkpoint_every = f.checkpoint_every;
  if (cmd->count("--sample-every")) cfg.sample_every = f.sample_every;
  if (cmd->count("--identity-mode")) cfg.identity_mode = parse_identity_mode(f.identity_mode);
  if (cmd->count("--n-rmi")) cfg.n_rmi = f.n_rmi;
  return cfg;
}

int cmd_train(const CLI::App* cmd, const TrainFlags& f) {
  TrainConfig cfg = build_config(cmd, f);
  if (cfg.data_dir.empty()) throw ConfigError("train: --data (or data_dir in the config) required");
  if (cfg.out_dir.empty()) throw ConfigError("train: --out (or out_dir in the config) required");
  cfg.validate();

  const DatasetManifest dataset = load_dataset(cfg.data_dir, DatasetRole::Train);
  for (const std::string& warning : dataset.warnings)
    std::cerr << "warning: excluded " << warning << "\n";
  std::cout << "dataset: sunny=" << dataset.count(RainIntensity::Sunny)
            << " light=" << dataset.count(RainIntensity::Light)
            << " medium=" << dataset.count(RainIntensity::Medium)
            << " heavy=" << dataset.count(RainIntensity::Heavy) << "\n";

  std::optional<fs::path> resume;
  if (cmd->count("--resume")) resume = fs::path(f.resume);

  const Checkpoint final_ckpt = run_training(cfg, dataset, cfg.out_dir, resume);
  std::cout << "training complete: epochs=" << final_ckpt.epoch
            << " steps=" << final_ckpt.global_step << "\n";
  if (!final_ckpt.loss_tail.empty())
    std::cout << "final total loss: " << final_ckpt.loss_tail.back().total << "\n";
  std::cout << "effective config: " << (fs::path(cfg.out_dir) / "config.txt").string() << "\n";
  return kExitOk;
}

// Shared by generate/derain: load the networks exactly as the checkpoint's
// embedded config describes them.
struct LoadedModel {
  TrainConfig cfg;
  Networks nets;
};

LoadedModel load_model(const std::string& checkpoint_path) {
  const Checkpoint ck = load_checkpoint(checkpoint_path);
  TrainConfig cfg = parse_config_text(ck.config_text);
  LoadedModel m{cfg, Networks(cfg)};
  m.nets.load_named_tensors(ck.tensors);
  return m;
}

// Reads an input image into model space at a resolution rounded down to the
// nearest multiple of 4 (warning when rounding changes the size).
ImageTensor read_model_input(const fs::path& path) {
  ImageTensor px = read_png(path);
  ImageTensor rgb;
  rgb.space = ImageSpace::Pixel;
  if (px.channels() == 1) {
    rgb.data = Tensor({3, px.height(), px.width()});
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < px.height(); ++y)
        for (int x = 0; x < px.width(); ++x) rgb.data.at(c, y, x) = px.data.at(0, y, x);
  } else {
    rgb.data = px.data;
  }
  const int h4 = (rgb.height() / 4) * 4;
  const int w4 = (rgb.width() / 4) * 4;
  if (h4 < 4 || w4 < 4) throw ConfigError("input too small (needs at least 4x4): " + path.string());
  if (h4 != rgb.height() || w4 != rgb.width()) {
    std::cerr << "warning: " << path.string() << " resized " << rgb.width() << "x" << rgb.height()
              << " -> " << w4 << "x" << h4 << " (multiple of 4)\n";
    // Bilinear via the dataset preprocessor is square-only; do a direct crop
    // to keep content unscaled.
    Tensor cropped({3, h4, w4});
    for (int c = 0; c < 3; ++c)
      for (int y = 0; y < h4; ++y)
        for (int x = 0; x < w4; ++x) cropped.at(c, y, x) = rgb.data.at(c, y, x);
    rgb.data = std::move(cropped);
  }
  return to_model_space(rgb);
}

std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> files;
  for (const std::string& in : inputs) {
    const fs::path p(in);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".png") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(p)) {
      files.push_back(p);
    } else {
      throw ConfigError("input not found: " + in);
    }
  }
  if (files.empty()) throw ConfigError("no input images given");
  return files;
}

int run_translation(const std::string& checkpoint_path, const std::vector<std::string>& inputs,
                    const std::string& out_dir, RainIntensity target, const char* suffix) {
  const LoadedModel model = load_model(checkpoint_path);
  const std::vector<fs::path> files = expand_inputs(inputs);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output dir " + out_dir + ": " + ec.message());

  for (const fs::path& file : files) {
    const ImageTensor input = read_model_input(file);
    const Tensor mask = model.nets.rmi.infer(input.data);
    ImageTensor out;
    out.space = ImageSpace::Model;
    out.data = target == RainIntensity::Sunny
                   ? model.nets.g_n.infer(input.data, mask, RainIntensity::Sunny)
                   : model.nets.g_r.infer(input.data, mask, target);
    const fs::path out_path =
        fs::path(out_dir) / (file.stem().string() + "_" + suffix + ".png");
    write_png(out_path, to_pixel_space(out));
    std::cout << out_path.string() << "\n";
  }
  return kExitOk;
}

int cmd_evaluate(const std::string& generated, const std::string& reference,
                 const std::string& out_csv, const std::string& mode_name) {
  const SsimMode mode = parse_ssim_mode(mode_name);
  const MetricReport report = evaluate_pairs(generated, reference, mode);
  if (report.pairs.empty()) {
    std::cerr << "error: no comparable pairs between " << generated << " and " << reference
              << "\n";
    for (const std::string& s : report.skipped) std::cerr << "skipped: " << s << "\n";
    return kExitValidation;
  }
  if (!out_csv.empty()) write_report_csv(report, out_csv);
  std::cout << "pairs: " << report.pairs.size() << "\n";
  std::cout << "psnr_db mean=" << report.psnr_mean << " min=" << report.psnr_min
            << " max=" << report.psnr_max << "\n";
  std::cout << "ssim (" << ssim_mode_name(mode) << ") mean=" << report.ssim_mean
            << " min=" << report.ssim_min << " max=" << report.ssim_max << "\n";
  if (!report.skipped.empty()) {
    for (const std::string& s : report.skipped) std::cerr << "skipped: " << s << "\n";
    return kExitPartial;
  }
  return kExitOk;
}

int cmd_synth(int n, int size, std::uint64_t seed, const std::string& out_dir) {
  const DatasetManifest m = make_synthetic_dataset(n, size, seed, out_dir);
  std::cout << "synthetic dataset at " << out_dir << ": sunny=" << m.count(RainIntensity::Sunny)
            << " light=" << m.count(RainIntensity::Light)
            << " medium=" << m.count(RainIntensity::Medium)
            << " heavy=" << m.count(RainIntensity::Heavy) << " pairs=" << m.pairs.size() << "\n";
  return kExitOk;
}

int cmd_ablate(const CLI::App* cmd, const TrainFlags& f) {
  TrainConfig cfg = build_config(cmd, f);
  if (cfg.data_dir.empty())
    throw ConfigError("ablate: --data (or data_dir in the config) required");
  if (cfg.out_dir.empty()) throw ConfigError("ablate: --out (or out_dir in the config) required");
  cfg.validate();

  const DatasetManifest dataset = load_dataset(cfg.data_dir, DatasetRole::Test);
  const AblationReport report = run_ablation(cfg, dataset, cfg.out_dir);
  for (const AblationStageResult& stage : report.stages) {
    std::cout << stage.name << ": activation=" << activation_name(stage.config.activation)
              << " labels=" << (stage.config.use_labels ? 1 : 0)
              << " ratio=" << stage.config.suppression_ratio
              << " final_total=" << stage.final_losses.total;
    if (!std::isnan(stage.psnr_mean))
      std::cout << " psnr=" << stage.psnr_mean << " ssim=" << stage.ssim_mean;
    std::cout << "\n";
  }
  std::cout << "comparison CSV: " << report.csv_path.string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional cycle-consistent rain image generation and removal"};
  app.require_subcommand(1);

  // train
  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "Train the full model");
  add_train_options(train, train_flags);
  train->add_option("--resume", train_flags.resume, "Checkpoint to resume from");

  // generate
  std::string gen_ckpt, gen_out = ".", gen_intensity = "medium";
  std::vector<std::string> gen_inputs;
  CLI::App* generate = app.add_subcommand("generate", "Sunny -> rain translation");
  generate->add_option("--checkpoint", gen_ckpt, "Trained checkpoint")->required();
  generate->add_option("--input", gen_inputs, "Input PNG files or directories")->required();
  generate->add_option("--intensity", gen_intensity, "Target intensity: light|medium|heavy");
  generate->add_option("--out", gen_out, "Output directory");

  // derain
  std::string der_ckpt, der_out = ".";
  std::vector<std::string> der_inputs;
  CLI::App* derain = app.add_subcommand("derain", "Rain -> sunny translation");
  derain->add_option("--checkpoint", der_ckpt, "Trained checkpoint")->required();
  derain->add_option("--input", der_inputs, "Input PNG files or directories")->required();
  derain->add_option("--out", der_out, "Output directory");

  // evaluate
  std::string eval_gen, eval_ref, eval_out, eval_mode = "windowed";
  CLI::App* evaluate = app.add_subcommand("evaluate", "PSNR/SSIM over paired directories");
  evaluate->add_option("--generated", eval_gen, "Directory of generated images")->required();
  evaluate->add_option("--reference", eval_ref, "Directory of reference images")->required();
  evaluate->add_option("--out", eval_out, "Metrics CSV path");
  evaluate->add_option("--ssim-mode", eval_mode, "windowed|global");

  // synth
  int synth_n = 4, synth_size = 32;
  std::uint64_t synth_seed = 1;
  std::string synth_out;
  CLI::App* synth = app.add_subcommand("synth", "Create a paired synthetic dataset");
  synth->add_option("--n", synth_n, "Images per class");
  synth->add_option("--size", synth_size, "Square image size (divisible by 4)");
  synth->add_option("--seed", synth_seed, "Seed");
  synth->add_option("--out", synth_out, "Output dataset root")->required();

  // ablate
  TrainFlags ablate_flags;
  CLI::App* ablate = app.add_subcommand("ablate", "Run the 3-stage enhancement ladder");
  add_train_options(ablate, ablate_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    if (train->parsed()) return cmd_train(train, train_flags);
    if (generate->parsed()) {
      const RainIntensity level = parse_intensity(gen_intensity);
      if (level == RainIntensity::Sunny)
        throw ConfigError("generate: --intensity must be light|medium|heavy");
      return run_translation(gen_ckpt, gen_inputs, gen_out, level, gen_intensity.c_str());
    }
    if (derain->parsed()) {
      return run_translation(der_ckpt, der_inputs, der_out, RainIntensity::Sunny, "derained");
    }
    if (evaluate->parsed()) return cmd_evaluate(eval_gen, eval_ref, eval_out, eval_mode);
    if (synth->parsed()) return cmd_synth(synth_n, synth_size, synth_seed, synth_out);
    if (ablate->parsed()) return cmd_ablate(ablate, ablate_flags);
  } catch (const NumericError& e) {
    std::cerr << "numeric abort: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {  // ConfigError, ShapeError included
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {  // IoError and the rest
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
