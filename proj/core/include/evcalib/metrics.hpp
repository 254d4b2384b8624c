#ifndef EVCALIB_METRICS_HPP
#define EVCALIB_METRICS_HPP

#include <string>

#include "evcalib/types.hpp"

namespace evcalib {

inline constexpr double kPsnrCap = 100.0;  // dB, reported for identical images

struct MetricReport {
  double rmse = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
};

/// Root mean square error over all pixels.
double rmse(const IntensityFrame& a, const IntensityFrame& b);

/// 20*log10(255 / rmse); kPsnrCap when rmse is zero.
double psnr(const IntensityFrame& a, const IntensityFrame& b);

/// Single-scale SSIM: 11x11 Gaussian window with sigma 1.5,
/// C1 = (0.01*255)^2, C2 = (0.03*255)^2, averaged over valid window
/// positions. Both dimensions must be at least 11.
double ssim(const IntensityFrame& a, const IntensityFrame& b);

MetricReport compare(const IntensityFrame& a, const IntensityFrame& b);

/// One metrics-table line: "index rmse psnr ssim".
std::string metric_line(int index, const MetricReport& m);

}  // namespace evcalib

#endif
