#ifndef EVCALIB_INTENSITY_HPP
#define EVCALIB_INTENSITY_HPP

#include "evcalib/types.hpp"

namespace evcalib {

inline constexpr double kMaxIntensity = 255.0;
inline constexpr double kDefaultNominalC = 0.1;
inline constexpr double kDefaultTolC = 0.02;
inline constexpr double kDefaultTolB = 0.005;

/// Log-intensity map L = ln(I + 1), so I = 0 maps to L = 0 and L stays finite.
/// Rejects values outside [0, 255], naming the offending pixel.
LogFrame log_intensity(const IntensityFrame& frame);

/// Inverse map I = clamp(exp(L) - 1, 0, 255). Exact inverse of log_intensity
/// on integer-valued frames.
IntensityFrame exp_intensity(const LogFrame& frame);

/// Scalar version of exp_intensity.
double exp_intensity_value(double log_value);

/// Classifies one pixel against a nominal threshold. Bias deviations take
/// precedence over threshold deviations: warm if b < -tol_b, cool if
/// b > +tol_b, otherwise hot/cold by threshold, otherwise nominal.
PixelClass classify_pixel(double c, double b, double nominal_c,
                          double tol_c = kDefaultTolC, double tol_b = kDefaultTolB);

/// Rounds every value to the nearest 8-bit level (ties to even), clamped to
/// [0, 255]. Used at file export and before metric evaluation.
IntensityFrame quantize_8bit(const IntensityFrame& frame);

}  // namespace evcalib

#endif
