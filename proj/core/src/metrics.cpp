#include "evcalib/metrics.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "evcalib/intensity.hpp"

namespace evcalib {

namespace {

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

void check_resolution(const IntensityFrame& a, const IntensityFrame& b, const char* who) {
  if (!a.values.same_size(b.values)) {
    throw std::invalid_argument(std::string(who) + ": resolution mismatch");
  }
}

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double d = i - (kWindow - 1) / 2;
    taps[static_cast<std::size_t>(i)] = std::exp(-d * d / (2.0 * kSigma * kSigma));
    sum += taps[static_cast<std::size_t>(i)];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable Gaussian filter, valid region only: (w-10) x (h-10).
Grid<double> blur_valid(const Grid<double>& in) {
  static const std::array<double, kWindow> taps = gaussian_taps();
  const int w = in.width();
  const int h = in.height();
  const int vw = w - kWindow + 1;
  const int vh = h - kWindow + 1;
  Grid<double> horiz(vw, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < vw; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += taps[static_cast<std::size_t>(i)] * in(x + i, y);
      horiz(x, y) = acc;
    }
  }
  Grid<double> out(vw, vh);
  for (int y = 0; y < vh; ++y) {
    for (int x = 0; x < vw; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kWindow; ++i) acc += taps[static_cast<std::size_t>(i)] * horiz(x, y + i);
      out(x, y) = acc;
    }
  }
  return out;
}

}  // namespace

double rmse(const IntensityFrame& a, const IntensityFrame& b) {
  check_resolution(a, b, "rmse");
  const auto& av = a.values.cells();
  const auto& bv = b.values.cells();
  double sum = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(av.size()));
}

double psnr(const IntensityFrame& a, const IntensityFrame& b) {
  const double err = rmse(a, b);
  if (err == 0.0) return kPsnrCap;
  return 20.0 * std::log10(kMaxIntensity / err);
}

double ssim(const IntensityFrame& a, const IntensityFrame& b) {
  check_resolution(a, b, "ssim");
  const int w = a.values.width();
  const int h = a.values.height();
  if (w < kWindow || h < kWindow) {
    throw std::invalid_argument("ssim: frame smaller than the 11x11 window");
  }

  Grid<double> aa(w, h), bb(w, h), ab(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double va = a.values(x, y);
      const double vb = b.values(x, y);
      aa(x, y) = va * va;
      bb(x, y) = vb * vb;
      ab(x, y) = va * vb;
    }
  }
  const Grid<double> mu_a = blur_valid(a.values);
  const Grid<double> mu_b = blur_valid(b.values);
  const Grid<double> mu_aa = blur_valid(aa);
  const Grid<double> mu_bb = blur_valid(bb);
  const Grid<double> mu_ab = blur_valid(ab);

  double acc = 0.0;
  for (int y = 0; y < mu_a.height(); ++y) {
    for (int x = 0; x < mu_a.width(); ++x) {
      const double ma = mu_a(x, y);
      const double mb = mu_b(x, y);
      const double var_a = mu_aa(x, y) - ma * ma;
      const double var_b = mu_bb(x, y) - mb * mb;
      const double cov = mu_ab(x, y) - ma * mb;
      const double num = (2.0 * ma * mb + kC1) * (2.0 * cov + kC2);
      const double den = (ma * ma + mb * mb + kC1) * (var_a + var_b + kC2);
      acc += num / den;
    }
  }
  return acc / (static_cast<double>(mu_a.width()) * static_cast<double>(mu_a.height()));
}

MetricReport compare(const IntensityFrame& a, const IntensityFrame& b) {
  return MetricReport{rmse(a, b), psnr(a, b), ssim(a, b)};
}

std::string metric_line(int index, const MetricReport& m) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%d %.6f %.6f %.6f", index, m.rmse, m.psnr, m.ssim);
  return buf;
}

}  // namespace evcalib
