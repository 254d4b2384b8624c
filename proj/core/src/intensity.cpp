#include "evcalib/intensity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace evcalib {

CalibrationMap uniform_map(int width, int height, double c0, double b0) {
  return CalibrationMap{Grid<double>(width, height, c0), Grid<double>(width, height, b0)};
}

const char* to_string(PixelClass cls) {
  switch (cls) {
    case PixelClass::nominal: return "nominal";
    case PixelClass::hot: return "hot";
    case PixelClass::cold: return "cold";
    case PixelClass::warm: return "warm";
    case PixelClass::cool: return "cool";
  }
  return "?";
}

LogFrame log_intensity(const IntensityFrame& frame) {
  LogFrame out{frame.timestamp, Grid<double>(frame.values.width(), frame.values.height())};
  for (int y = 0; y < frame.values.height(); ++y) {
    for (int x = 0; x < frame.values.width(); ++x) {
      const double v = frame.values(x, y);
      if (!(v >= 0.0 && v <= kMaxIntensity)) {
        throw std::invalid_argument("log_intensity: value " + std::to_string(v) +
                                    " outside [0, 255] at pixel (" + std::to_string(x) + ", " +
                                    std::to_string(y) + ")");
      }
      out.values(x, y) = std::log1p(v);
    }
  }
  return out;
}

double exp_intensity_value(double log_value) {
  double v = std::expm1(log_value);
  // expm1(log1p(i)) lands within a couple of ulps of i but rarely on it;
  // absorb that round-off so 8-bit frames survive the round trip bit-exactly.
  const double snapped = std::nearbyint(v);
  if (std::abs(v - snapped) <=
      32.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(snapped))) {
    v = snapped;
  }
  if (v < 0.0) return 0.0;
  if (v > kMaxIntensity) return kMaxIntensity;
  return v;
}

IntensityFrame exp_intensity(const LogFrame& frame) {
  IntensityFrame out{frame.timestamp, Grid<double>(frame.values.width(), frame.values.height())};
  for (int y = 0; y < frame.values.height(); ++y) {
    for (int x = 0; x < frame.values.width(); ++x) {
      out.values(x, y) = exp_intensity_value(frame.values(x, y));
    }
  }
  return out;
}

PixelClass classify_pixel(double c, double b, double nominal_c, double tol_c, double tol_b) {
  if (!(c > 0.0)) throw std::invalid_argument("classify_pixel: c must be positive");
  if (!(nominal_c > 0.0)) throw std::invalid_argument("classify_pixel: nominal_c must be positive");
  if (tol_c < 0.0 || tol_b < 0.0) throw std::invalid_argument("classify_pixel: negative tolerance");
  if (b < -tol_b) return PixelClass::warm;
  if (b > tol_b) return PixelClass::cool;
  if (c < nominal_c - tol_c) return PixelClass::hot;
  if (c > nominal_c + tol_c) return PixelClass::cold;
  return PixelClass::nominal;
}

IntensityFrame quantize_8bit(const IntensityFrame& frame) {
  IntensityFrame out{frame.timestamp, Grid<double>(frame.values.width(), frame.values.height())};
  for (int y = 0; y < frame.values.height(); ++y) {
    for (int x = 0; x < frame.values.width(); ++x) {
      double v = frame.values(x, y);
      if (v < 0.0) v = 0.0;
      if (v > kMaxIntensity) v = kMaxIntensity;
      out.values(x, y) = std::nearbyint(v);  // default rounding mode: ties to even
    }
  }
  return out;
}

}  // namespace evcalib
