#ifndef EVCALIB_SIMULATE_HPP
#define EVCALIB_SIMULATE_HPP

#include <span>
#include <vector>

#include "evcalib/types.hpp"

namespace evcalib {

enum class Interpolation { linear };

struct SimConfig {
  double refractory = 0.0;  // minimum per-pixel inter-event gap, seconds
  Interpolation interpolation = Interpolation::linear;
};

struct SpecialPixel {
  int x = 0;
  int y = 0;
  PixelClass cls = PixelClass::nominal;
  double magnitude = 0.0;
};

using SpecialPixelSpec = std::vector<SpecialPixel>;

/// Generates the event stream a sensor with the given per-pixel thresholds
/// and biases would emit for this intensity video.
///
/// Per pixel, a reference level starts at the first frame's log intensity;
/// log intensity is interpolated linearly between frames; a +1 event fires
/// when L(t) - ref >= c + b and a -1 event when L(t) - ref <= -c + b. Each
/// event timestamps the interpolated crossing instant and resets the
/// reference to L at that instant. Output is sorted by time.
EventStream simulate_events(std::span<const IntensityFrame> video, const CalibrationMap& map,
                            const SimConfig& cfg = {});

/// Returns a copy of the map with special pixels written in:
/// hot c := nominal_c - magnitude, cold c := nominal_c + magnitude,
/// warm b := -magnitude, cool b := +magnitude. Rejects entries that would
/// leave c <= 0 or |b| >= c.
CalibrationMap inject_special_pixels(const CalibrationMap& map, const SpecialPixelSpec& spec,
                                     double nominal_c);

}  // namespace evcalib

#endif
