#include "rcgan/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>

#include "rcgan/errors.hpp"
#include "rcgan/png_io.hpp"

namespace rcgan {

namespace {

constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

void check_metric_inputs(const ImageTensor& a, const ImageTensor& b, const char* where) {
  if (a.space != ImageSpace::Pixel || b.space != ImageSpace::Pixel)
    throw std::invalid_argument(std::string(where) + ": inputs must be pixel-space images");
  check_same_dims(a.data, b.data, where);
}

// Collapses an image to one channel for SSIM.
Tensor to_gray(const ImageTensor& img, GrayMode mode) {
  const Tensor& t = img.data;
  if (t.channels() == 1) return t;
  if (t.channels() != 3)
    throw std::invalid_argument("ssim: expected 1 or 3 channels, got " +
                                std::to_string(t.channels()));
  Tensor g({1, t.height(), t.width()});
  for (int y = 0; y < t.height(); ++y)
    for (int x = 0; x < t.width(); ++x) {
      const double r = t.at(0, y, x), gg = t.at(1, y, x), b = t.at(2, y, x);
      g.at(0, y, x) = mode == GrayMode::Luma601 ? 0.299 * r + 0.587 * gg + 0.114 * b
                                                : (r + gg + b) / 3.0;
    }
  return g;
}

double ssim_formula(double mu_x, double mu_y, double var_x, double var_y, double cov) {
  const double num = (2.0 * mu_x * mu_y + kC1) * (2.0 * cov + kC2);
  const double den = (mu_x * mu_x + mu_y * mu_y + kC1) * (var_x + var_y + kC2);
  return num / den;
}

double ssim_global(const Tensor& x, const Tensor& y) {
  const double n = static_cast<double>(x.size());
  double mu_x = 0.0, mu_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mu_x += x[i];
    mu_y += y[i];
  }
  mu_x /= n;
  mu_y /= n;
  double var_x = 0.0, var_y = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mu_x, dy = y[i] - mu_y;
    var_x += dx * dx;
    var_y += dy * dy;
    cov += dx * dy;
  }
  var_x /= n;
  var_y /= n;
  cov /= n;
  return ssim_formula(mu_x, mu_y, var_x, var_y, cov);
}

std::vector<double> gaussian_window() {
  std::vector<double> w(kWindow * kWindow);
  const int half = kWindow / 2;
  double total = 0.0;
  for (int dy = -half; dy <= half; ++dy)
    for (int dx = -half; dx <= half; ++dx) {
      const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
      w[static_cast<std::size_t>((dy + half) * kWindow + dx + half)] = v;
      total += v;
    }
  for (double& v : w) v /= total;
  return w;
}

double ssim_windowed(const Tensor& x, const Tensor& y) {
  const int h = x.height(), w = x.width();
  if (h < kWindow || w < kWindow) return ssim_global(x, y);
  static const std::vector<double> win = gaussian_window();
  const int out_h = h - kWindow + 1, out_w = w - kWindow + 1;
  double total = 0.0;
  for (int oy = 0; oy < out_h; ++oy)
    for (int ox = 0; ox < out_w; ++ox) {
      double mu_x = 0.0, mu_y = 0.0, xx = 0.0, yy = 0.0, xy = 0.0;
      for (int ky = 0; ky < kWindow; ++ky)
        for (int kx = 0; kx < kWindow; ++kx) {
          const double wv = win[static_cast<std::size_t>(ky * kWindow + kx)];
          const double xv = x.at(0, oy + ky, ox + kx);
          const double yv = y.at(0, oy + ky, ox + kx);
          mu_x += wv * xv;
          mu_y += wv * yv;
          xx += wv * xv * xv;
          yy += wv * yv * yv;
          xy += wv * xv * yv;
        }
      const double var_x = xx - mu_x * mu_x;
      const double var_y = yy - mu_y * mu_y;
      const double cov = xy - mu_x * mu_y;
      total += ssim_formula(mu_x, mu_y, var_x, var_y, cov);
    }
  return total / (static_cast<double>(out_h) * static_cast<double>(out_w));
}

std::string fmt_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

const char* ssim_mode_name(SsimMode m) { return m == SsimMode::Global ? "global" : "windowed"; }

SsimMode parse_ssim_mode(const std::string& s) {
  if (s == "global") return SsimMode::Global;
  if (s == "windowed") return SsimMode::Windowed;
  throw ConfigError("unknown ssim mode '" + s + "' (expected global|windowed)");
}

double mse(const ImageTensor& a, const ImageTensor& b) {
  check_metric_inputs(a, b, "mse");
  double s = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    s += d * d;
  }
  return s / static_cast<double>(a.data.size());
}

double psnr(const ImageTensor& g, const ImageTensor& o, int bit_depth) {
  if (bit_depth < 1 || bit_depth > 16)
    throw std::invalid_argument("psnr: bit depth out of range");
  const double err = mse(g, o);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  const double peak = std::pow(2.0, bit_depth) - 1.0;
  return 10.0 * std::log10(peak * peak / err);
}

double ssim(const ImageTensor& x, const ImageTensor& y, SsimMode mode, GrayMode gray) {
  check_metric_inputs(x, y, "ssim");
  const Tensor gx = to_gray(x, gray);
  const Tensor gy = to_gray(y, gray);
  return mode == SsimMode::Global ? ssim_global(gx, gy) : ssim_windowed(gx, gy);
}

MetricReport evaluate_pairs(const std::filesystem::path& gen_dir,
                            const std::filesystem::path& ref_dir, SsimMode mode) {
  namespace fs = std::filesystem;
  auto list_pngs = [](const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("evaluate_pairs: not a directory: " + dir.string());
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".png")
        names.insert(e.path().filename().string());
    return names;
  };

  const std::set<std::string> gen_names = list_pngs(gen_dir);
  const std::set<std::string> ref_names = list_pngs(ref_dir);

  MetricReport report;
  for (const std::string& name : gen_names)
    if (!ref_names.count(name)) report.skipped.push_back(name + ": missing in reference dir");
  for (const std::string& name : ref_names)
    if (!gen_names.count(name)) report.skipped.push_back(name + ": missing in generated dir");

  for (const std::string& name : ref_names) {
    if (!gen_names.count(name)) continue;
    ImageTensor g, r;
    try {
      g = read_png(gen_dir / name);
      r = read_png(ref_dir / name);
    } catch (const std::exception& e) {
      report.skipped.push_back(name + ": " + e.what());
      continue;
    }
    if (!g.data.same_dims(r.data)) {
      report.skipped.push_back(name + ": shape mismatch " + g.data.dims_str() + " vs " +
                               r.data.dims_str());
      continue;
    }
    PairMetrics pm;
    pm.pair_id = name;
    pm.psnr_db = psnr(g, r);
    pm.ssim = ssim(g, r, mode);
    report.pairs.push_back(std::move(pm));
  }
  std::sort(report.pairs.begin(), report.pairs.end(),
            [](const PairMetrics& a, const PairMetrics& b) { return a.pair_id < b.pair_id; });
  std::sort(report.skipped.begin(), report.skipped.end());

  if (!report.pairs.empty()) {
    const double n = static_cast<double>(report.pairs.size());
    double ps = 0.0, ss = 0.0;
    report.psnr_min = report.psnr_max = report.pairs[0].psnr_db;
    report.ssim_min = report.ssim_max = report.pairs[0].ssim;
    for (const PairMetrics& pm : report.pairs) {
      ps += pm.psnr_db;
      ss += pm.ssim;
      report.psnr_min = std::min(report.psnr_min, pm.psnr_db);
      report.psnr_max = std::max(report.psnr_max, pm.psnr_db);
      report.ssim_min = std::min(report.ssim_min, pm.ssim);
      report.ssim_max = std::max(report.ssim_max, pm.ssim);
    }
    report.psnr_mean = ps / n;
    report.ssim_mean = ss / n;
  }
  return report;
}

std::string report_csv(const MetricReport& report) {
  std::string out = "pair_id,psnr_db,ssim\n";
  for (const PairMetrics& pm : report.pairs)
    out += pm.pair_id + "," + fmt_metric(pm.psnr_db) + "," + fmt_metric(pm.ssim) + "\n";
  out += "aggregate," + fmt_metric(report.psnr_mean) + "," + fmt_metric(report.ssim_mean) + "\n";
  return out;
}

void write_report_csv(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write metrics CSV: " + path.string());
  out << report_csv(report);
  if (!out) throw IoError("write failed for metrics CSV: " + path.string());
}

}  // namespace rcgan
