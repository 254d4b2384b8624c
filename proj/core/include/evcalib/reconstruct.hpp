#ifndef EVCALIB_RECONSTRUCT_HPP
#define EVCALIB_RECONSTRUCT_HPP

#include <span>

#include "evcalib/io.hpp"
#include "evcalib/types.hpp"

namespace evcalib {

/// Direct integration: per pixel, accumulates c*sigma + b over the pixel's
/// events in log space on top of the start frame and exponentiates. The log
/// accumulator is never clamped; only the final intensity is. The result is
/// timestamped at the last event (start timestamp when there are none).
IntensityFrame integrate(const IntensityFrame& start, std::span<const Event> events,
                         const CalibrationMap& map);

/// Direct integration with a uniform threshold c0 and zero bias ("DI").
IntensityFrame integrate_uncalibrated(const IntensityFrame& start, std::span<const Event> events,
                                      double c0);

/// Events between two frames of a dataset: the half-open window
/// (T_start_frame, T_end_frame].
struct IntegrationWindow {
  int start_frame = 0;
  int end_frame = 0;
  std::span<const Event> events;
};

IntegrationWindow make_window(const Dataset& dataset, int start_frame, int end_frame);

}  // namespace evcalib

#endif
