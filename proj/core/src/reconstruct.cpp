#include "evcalib/reconstruct.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "evcalib/intensity.hpp"

namespace evcalib {

IntensityFrame integrate(const IntensityFrame& start, std::span<const Event> events,
                         const CalibrationMap& map) {
  const int width = start.values.width();
  const int height = start.values.height();
  if (!map.c.same_size(width, height)) {
    throw std::invalid_argument("integrate: frame/map resolution mismatch");
  }
  if (events.empty()) return start;

  Grid<double> delta(width, height, 0.0);
  for (const Event& ev : events) {
    if (ev.x < 0 || ev.x >= width || ev.y < 0 || ev.y >= height) {
      throw std::invalid_argument("integrate: event at (" + std::to_string(ev.x) + ", " +
                                  std::to_string(ev.y) + ") outside frame");
    }
    delta(ev.x, ev.y) += map.c(ev.x, ev.y) * ev.polarity + map.b(ev.x, ev.y);
  }

  const LogFrame base = log_intensity(start);
  IntensityFrame out{events.back().t, Grid<double>(width, height)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double d = delta(x, y);
      // untouched pixels pass through unchanged
      out.values(x, y) = (d == 0.0) ? start.values(x, y)
                                    : exp_intensity_value(base.values(x, y) + d);
    }
  }
  return out;
}

IntensityFrame integrate_uncalibrated(const IntensityFrame& start, std::span<const Event> events,
                                      double c0) {
  if (!(c0 > 0.0)) throw std::invalid_argument("integrate_uncalibrated: c0 must be positive");
  return integrate(start, events,
                   uniform_map(start.values.width(), start.values.height(), c0, 0.0));
}

IntegrationWindow make_window(const Dataset& dataset, int start_frame, int end_frame) {
  const int frame_count = static_cast<int>(dataset.frames.size());
  if (start_frame < 0 || end_frame >= frame_count || start_frame >= end_frame) {
    throw std::invalid_argument("make_window: bad frame range [" + std::to_string(start_frame) +
                                ", " + std::to_string(end_frame) + "] of " +
                                std::to_string(frame_count) + " frames");
  }
  const double t_lo = dataset.frames[static_cast<std::size_t>(start_frame)].timestamp;
  const double t_hi = dataset.frames[static_cast<std::size_t>(end_frame)].timestamp;
  const auto& events = dataset.stream.events;
  const auto lo = std::upper_bound(events.begin(), events.end(), t_lo,
                                   [](double t, const Event& ev) { return t < ev.t; });
  const auto hi = std::upper_bound(events.begin(), events.end(), t_hi,
                                   [](double t, const Event& ev) { return t < ev.t; });
  return IntegrationWindow{start_frame, end_frame,
                           std::span<const Event>(events.data() + (lo - events.begin()),
                                                  static_cast<std::size_t>(hi - lo))};
}

}  // namespace evcalib
