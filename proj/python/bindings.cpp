// Python bindings for the rain-translation core: metrics, synthetic data,
// training, and checkpoint-driven inference.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcgan/checkpoint.hpp"
#include "rcgan/config.hpp"
#include "rcgan/data.hpp"
#include "rcgan/errors.hpp"
#include "rcgan/image.hpp"
#include "rcgan/metrics.hpp"
#include "rcgan/models.hpp"
#include "rcgan/png_io.hpp"
#include "rcgan/trainer.hpp"

namespace py = pybind11;
using namespace rcgan;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Tensor tensor_from_array(const DoubleArray& arr) {
  const py::buffer_info info = arr.request();
  std::vector<int> dims;
  dims.reserve(info.ndim);
  for (py::ssize_t i = 0; i < info.ndim; ++i) {
    dims.push_back(static_cast<int>(info.shape[i]));
  }
  if (dims.empty()) throw std::invalid_argument("expected a non-scalar array");
  Tensor t(dims);
  const double* src = static_cast<const double*>(info.ptr);
  std::copy(src, src + t.size(), t.data());
  return t;
}

py::array_t<double> array_from_tensor(const Tensor& t) {
  std::vector<py::ssize_t> shape(t.dims().begin(), t.dims().end());
  py::array_t<double> out(shape);
  std::copy(t.data(), t.data() + t.size(), static_cast<double*>(out.request().ptr));
  return out;
}

// Arrays are interpreted as images: (h,w) grayscale or (c,h,w) channel-major.
ImageTensor image_from_array(const DoubleArray& arr, ImageSpace space) {
  const py::buffer_info info = arr.request();
  std::vector<int> dims;
  if (info.ndim == 2) dims.push_back(1);
  for (py::ssize_t i = 0; i < info.ndim; ++i) dims.push_back(static_cast<int>(info.shape[i]));
  if (dims.size() != 3) throw std::invalid_argument("expected a (h,w) or (c,h,w) array");
  Tensor t(dims);
  const double* src = static_cast<const double*>(info.ptr);
  std::copy(src, src + t.size(), t.data());
  ImageTensor img{std::move(t), space};
  validate_image(img, "image_from_array");
  return img;
}

py::dict breakdown_dict(const LossBreakdown& b) {
  py::dict d;
  d["dis"] = b.dis;
  d["gen"] = b.gen;
  d["cycle"] = b.cycle;
  d["ident_m"] = b.ident_m;
  d["ident_f"] = b.ident_f;
  d["total"] = b.total;
  return d;
}

py::dict report_dict(const MetricReport& report) {
  py::list pairs;
  for (const PairMetrics& p : report.pairs) {
    py::dict row;
    row["pair_id"] = p.pair_id;
    row["psnr_db"] = p.psnr_db;
    row["ssim"] = p.ssim;
    pairs.append(row);
  }
  py::dict d;
  d["pairs"] = pairs;
  d["skipped"] = report.skipped;
  d["psnr_mean"] = report.psnr_mean;
  d["psnr_min"] = report.psnr_min;
  d["psnr_max"] = report.psnr_max;
  d["ssim_mean"] = report.ssim_mean;
  d["ssim_min"] = report.ssim_min;
  d["ssim_max"] = report.ssim_max;
  d["complete"] = report.complete();
  return d;
}

py::dict manifest_dict(const DatasetManifest& m) {
  py::dict d;
  d["root"] = m.root.string();
  d["role"] = role_name(m.role);
  py::dict counts;
  for (int i = 0; i < kNumIntensities; ++i) {
    const auto level = static_cast<RainIntensity>(i);
    counts[intensity_name(level)] = m.count(level);
  }
  d["counts"] = counts;
  d["n_pairs"] = m.pairs.size();
  d["warnings"] = m.warnings;
  return d;
}

// Rebuilds the networks a checkpoint was written with, using its embedded
// config echo.
struct LoadedModel {
  TrainConfig cfg;
  std::unique_ptr<Networks> nets;
};

LoadedModel load_model(const std::filesystem::path& ckpt_path) {
  const Checkpoint c = load_checkpoint(ckpt_path);
  LoadedModel m;
  m.cfg = parse_config_text(c.config_text);
  m.nets = std::make_unique<Networks>(m.cfg);
  m.nets->load_named_tensors(c.tensors);
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Conditional cycle-consistent rain translation core";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(mod, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(mod, "IoError", PyExc_OSError);

  py::class_<TrainConfig>(mod, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("image_size", &TrainConfig::image_size)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch", &TrainConfig::batch)
      .def_readwrite("adam_beta1", &TrainConfig::adam_beta1)
      .def_readwrite("adam_beta2", &TrainConfig::adam_beta2)
      .def_readwrite("lr_gen", &TrainConfig::lr_gen)
      .def_readwrite("lr_dis", &TrainConfig::lr_dis)
      .def_readwrite("decay_epoch_half", &TrainConfig::decay_epoch_half)
      .def_readwrite("decay_epoch_quarter", &TrainConfig::decay_epoch_quarter)
      .def_readwrite("n_rmi", &TrainConfig::n_rmi)
      .def_readwrite("suppression_ratio", &TrainConfig::suppression_ratio)
      .def_readwrite("use_labels", &TrainConfig::use_labels)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("gen_width", &TrainConfig::gen_width)
      .def_readwrite("dis_width", &TrainConfig::dis_width)
      .def_readwrite("rmi_width", &TrainConfig::rmi_width)
      .def_readwrite("feat_width", &TrainConfig::feat_width)
      .def_readwrite("feature_weights", &TrainConfig::feature_weights)
      .def_readwrite("feature_seed", &TrainConfig::feature_seed)
      .def_readwrite("checkpoint_every", &TrainConfig::checkpoint_every)
      .def_readwrite("sample_every", &TrainConfig::sample_every)
      .def_readwrite("data_dir", &TrainConfig::data_dir)
      .def_readwrite("out_dir", &TrainConfig::out_dir)
      .def_property(
          "activation",
          [](const TrainConfig& c) { return std::string(activation_name(c.activation)); },
          [](TrainConfig& c, const std::string& s) { c.activation = parse_activation(s); })
      .def_property(
          "identity_mode",
          [](const TrainConfig& c) { return std::string(identity_mode_name(c.identity_mode)); },
          [](TrainConfig& c, const std::string& s) { c.identity_mode = parse_identity_mode(s); })
      .def("validate", &TrainConfig::validate)
      .def("__repr__", [](const TrainConfig& c) {
        return "<TrainConfig image_size=" + std::to_string(c.image_size) +
               " epochs=" + std::to_string(c.epochs) + ">";
      });

  mod.def("serialize_config", &serialize_config, py::arg("config"));
  mod.def("load_config_file",
          [](const std::filesystem::path& p) { return load_config_file(p); }, py::arg("path"));

  // --- metrics ---------------------------------------------------------
  mod.def(
      "mse",
      [](const DoubleArray& a, const DoubleArray& b) {
        return mse(image_from_array(a, ImageSpace::Pixel), image_from_array(b, ImageSpace::Pixel));
      },
      py::arg("a"), py::arg("b"),
      "Mean squared error between two pixel-space images (values in [0,255]).");
  mod.def(
      "psnr",
      [](const DoubleArray& g, const DoubleArray& o, int bit_depth) {
        return psnr(image_from_array(g, ImageSpace::Pixel), image_from_array(o, ImageSpace::Pixel),
                    bit_depth);
      },
      py::arg("generated"), py::arg("original"), py::arg("bit_depth") = 8,
      "Peak signal-to-noise ratio in dB; +inf for identical images.");
  mod.def(
      "ssim",
      [](const DoubleArray& x, const DoubleArray& y, const std::string& mode,
         const std::string& gray) {
        GrayMode g = GrayMode::Luma601;
        if (gray == "mean") g = GrayMode::ChannelMean;
        else if (gray != "luma601") throw std::invalid_argument("gray must be 'luma601' or 'mean'");
        return ssim(image_from_array(x, ImageSpace::Pixel), image_from_array(y, ImageSpace::Pixel),
                    parse_ssim_mode(mode), g);
      },
      py::arg("x"), py::arg("y"), py::arg("mode") = "windowed", py::arg("gray") = "luma601",
      "Structural similarity; 'global' uses whole-image statistics, 'windowed' an 11x11 "
      "Gaussian sliding window.");
  mod.def(
      "evaluate_pairs",
      [](const std::filesystem::path& gen_dir, const std::filesystem::path& ref_dir,
         const std::string& mode) {
        return report_dict(evaluate_pairs(gen_dir, ref_dir, parse_ssim_mode(mode)));
      },
      py::arg("generated_dir"), py::arg("reference_dir"), py::arg("mode") = "windowed",
      "Match PNGs by filename across two directories and report PSNR/SSIM per pair.");

  // --- data ------------------------------------------------------------
  mod.def(
      "make_synthetic_dataset",
      [](const std::filesystem::path& out_dir, int n_per_class, int size, std::uint64_t seed) {
        return manifest_dict(make_synthetic_dataset(n_per_class, size, seed, out_dir));
      },
      py::arg("out_dir"), py::arg("n_per_class") = 4, py::arg("size") = 32, py::arg("seed") = 1,
      "Write a fully paired synthetic rain dataset and return its manifest summary.");
  mod.def(
      "load_dataset",
      [](const std::filesystem::path& root, const std::string& role) {
        return manifest_dict(load_dataset(root, parse_role(role)));
      },
      py::arg("root"), py::arg("role") = "train");
  mod.def(
      "synthesize_rain",
      [](const DoubleArray& background, const std::string& intensity, std::uint64_t seed) {
        StreakParams params;
        params.rng_seed = seed;
        const PairedSample s =
            synthesize_rain(to_model_space(image_from_array(background, ImageSpace::Pixel)),
                            params, parse_intensity(intensity));
        py::dict d;
        d["rain"] = array_from_tensor(to_pixel_space(s.rain).data);
        d["mask"] = array_from_tensor(s.mask);
        return d;
      },
      py::arg("background"), py::arg("intensity") = "medium", py::arg("seed") = 0,
      "Composite additive rain onto a pixel-space background; returns the rain image "
      "(pixel space) and the [0,1] rain mask.");

  // --- training --------------------------------------------------------
  mod.def(
      "train",
      [](const TrainConfig& cfg, const std::filesystem::path& data_dir,
         const std::filesystem::path& out_dir, std::optional<std::filesystem::path> resume) {
        TrainConfig eff = cfg;
        eff.data_dir = data_dir.string();
        eff.out_dir = out_dir.string();
        const DatasetManifest dataset = load_dataset(data_dir, DatasetRole::Train);
        const Checkpoint last = run_training(eff, dataset, out_dir, resume);
        char name[64];
        std::snprintf(name, sizeof(name), "ckpt_epoch_%04lld.ckpt",
                      static_cast<long long>(last.epoch));
        py::dict d;
        d["epochs"] = last.epoch;
        d["global_step"] = last.global_step;
        d["losses"] = last.loss_tail.empty() ? py::dict() : breakdown_dict(last.loss_tail.back());
        d["checkpoint"] = (out_dir / name).string();
        return d;
      },
      py::arg("config"), py::arg("data_dir"), py::arg("out_dir"),
      py::arg("resume") = std::nullopt,
      "Run the full training loop; returns the final epoch, step, and loss breakdown.");
  mod.def(
      "train_steps",
      [](const TrainConfig& cfg, int n_steps) {
        cfg.validate();
        Trainer trainer(cfg);
        Rng rng(cfg.seed);
        std::vector<py::dict> rows;
        for (int i = 0; i < n_steps; ++i) {
          Batch b;
          b.sunny = synthetic_background(cfg.image_size, rng);
          const auto level = static_cast<RainIntensity>(1 + rng.below(3));
          StreakParams params;
          params.rng_seed = rng.next_u64();
          b.rain = synthesize_rain(b.sunny, params, level).rain;
          b.intensity = level;
          const StepResult r = trainer.step(b);
          py::dict row = breakdown_dict(r.losses);
          row["step"] = trainer.global_step();
          row["updated_discriminator"] = r.decision.update_discriminator;
          rows.push_back(row);
        }
        return rows;
      },
      py::arg("config"), py::arg("n_steps") = 1,
      "Run a few optimization steps on procedurally generated batches and return "
      "the per-step loss breakdowns (useful for smoke checks).");

  // --- inference -------------------------------------------------------
  mod.def(
      "translate",
      [](const std::filesystem::path& checkpoint, const DoubleArray& image,
         const std::string& direction, const std::string& intensity) {
        const LoadedModel m = load_model(checkpoint);
        ImageTensor input = image_from_array(image, ImageSpace::Pixel);
        input = preprocess(input, std::max(4, input.height() / 4 * 4));
        Tensor mask = m.nets->rmi.infer(input.data);
        Tensor out;
        if (direction == "generate") {
          out = m.nets->g_r.infer(input.data, mask, parse_intensity(intensity));
        } else if (direction == "derain") {
          out = m.nets->g_n.infer(input.data, mask, RainIntensity::Sunny);
        } else {
          throw std::invalid_argument("direction must be 'generate' or 'derain'");
        }
        return array_from_tensor(to_pixel_space(ImageTensor{out, ImageSpace::Model}).data);
      },
      py::arg("checkpoint"), py::arg("image"), py::arg("direction") = "derain",
      py::arg("intensity") = "medium",
      "Run one image through a trained model; returns the pixel-space result.");

  mod.def(
      "read_png",
      [](const std::filesystem::path& p) { return array_from_tensor(read_png(p).data); },
      py::arg("path"), "Read a PNG as a pixel-space (c,h,w) array.");
  mod.def(
      "write_png",
      [](const std::filesystem::path& p, const DoubleArray& arr) {
        write_png(p, image_from_array(arr, ImageSpace::Pixel));
      },
      py::arg("path"), py::arg("image"), "Write a pixel-space (c,h,w) or (h,w) array as a PNG.");

  mod.attr("__version__") = "1.0.0";
}
