#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rcgan/image.hpp"

namespace rcgan {

enum class SsimMode { Global, Windowed };
enum class GrayMode { Luma601, ChannelMean };

const char* ssim_mode_name(SsimMode m);
SsimMode parse_ssim_mode(const std::string& s);

// Mean squared error over all channels and pixels; inputs must be tagged
// pixel space and share shapes.
double mse(const ImageTensor& a, const ImageTensor& b);

// 10*log10((2^n-1)^2 / MSE) in dB. Identical images yield +infinity, the
// distinguished marker, never an error.
double psnr(const ImageTensor& g, const ImageTensor& o, int bit_depth = 8);

// Structural similarity. RGB inputs are reduced to one channel first (BT.601
// luma by default). Global mode evaluates the closed form once over the
// whole image; windowed mode averages 11x11 Gaussian (sigma 1.5) windows and
// is the reporting default. Images smaller than the window fall back to
// global.
double ssim(const ImageTensor& x, const ImageTensor& y, SsimMode mode = SsimMode::Windowed,
            GrayMode gray = GrayMode::Luma601);

struct PairMetrics {
  std::string pair_id;
  double psnr_db = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<PairMetrics> pairs;     // sorted by pair_id
  std::vector<std::string> skipped;   // "<file>: <reason>" for unmatched/unusable pairs
  double psnr_mean = 0.0, psnr_min = 0.0, psnr_max = 0.0;
  double ssim_mean = 0.0, ssim_min = 0.0, ssim_max = 0.0;

  bool complete() const { return skipped.empty(); }
};

// Compares same-named PNG files across the two directories. Unmatched or
// unreadable files become skip records, not errors.
MetricReport evaluate_pairs(const std::filesystem::path& gen_dir,
                            const std::filesystem::path& ref_dir,
                            SsimMode mode = SsimMode::Windowed);

// CSV: header, one row per pair (psnr "inf" when infinite), final aggregate
// row with the means.
std::string report_csv(const MetricReport& report);
void write_report_csv(const MetricReport& report, const std::filesystem::path& path);

}  // namespace rcgan
