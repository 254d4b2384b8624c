#include "evcalib/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <tuple>

#include "evcalib/intensity.hpp"

namespace evcalib {

namespace {

void validate_map(const CalibrationMap& map) {
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const double c = map.c(x, y);
      const double b = map.b(x, y);
      if (!(c > 0.0) || !(std::abs(b) < c)) {
        throw std::invalid_argument("simulate_events: invalid map entry c=" + std::to_string(c) +
                                    " b=" + std::to_string(b) + " at pixel (" + std::to_string(x) +
                                    ", " + std::to_string(y) + ")");
      }
    }
  }
}

}  // namespace

EventStream simulate_events(std::span<const IntensityFrame> video, const CalibrationMap& map,
                            const SimConfig& cfg) {
  if (video.size() < 2) throw std::invalid_argument("simulate_events: need at least 2 frames");
  if (cfg.refractory < 0.0) throw std::invalid_argument("simulate_events: negative refractory");
  const int width = map.width();
  const int height = map.height();
  for (const IntensityFrame& frame : video) {
    if (!frame.values.same_size(width, height)) {
      throw std::invalid_argument("simulate_events: video/map resolution mismatch");
    }
  }
  for (std::size_t i = 1; i < video.size(); ++i) {
    if (!(video[i].timestamp > video[i - 1].timestamp)) {
      throw std::invalid_argument("simulate_events: non-monotone frame timestamps");
    }
  }
  validate_map(map);

  std::vector<LogFrame> logs;
  logs.reserve(video.size());
  for (const IntensityFrame& frame : video) logs.push_back(log_intensity(frame));

  EventStream out{width, height, {}};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double up = map.c(x, y) + map.b(x, y);  // positive trigger band
      const double dn = map.c(x, y) - map.b(x, y);  // negative trigger band
      double ref = logs[0].values(x, y);
      double gate = -std::numeric_limits<double>::infinity();

      for (std::size_t seg = 0; seg + 1 < video.size(); ++seg) {
        const double t0 = video[seg].timestamp;
        const double t1 = video[seg + 1].timestamp;
        const double l0 = logs[seg].values(x, y);
        const double l1 = logs[seg + 1].values(x, y);
        const double dt = t1 - t0;
        const double dl = l1 - l0;

        for (;;) {
          // earliest t in [t0, t1] with t >= gate where the rising band
          // (L - ref >= up) or the falling band (L - ref <= -dn) is hit
          double tc = std::numeric_limits<double>::infinity();
          int pol = 0;
          if (dl > 0.0) {
            if (l1 - ref >= up) {
              double t = (ref + up <= l0) ? t0 : t0 + (ref + up - l0) / dl * dt;
              t = std::max(t, gate);
              if (t <= t1) {
                tc = std::min(t, t1);
                pol = +1;
              }
            }
            // a crossing stalled by the refractory gate may still fire before
            // the value climbs back above the lower band
            if (l0 - ref <= -dn) {
              const double t = std::max(t0, gate);
              if (t <= t1 && t < tc && (l0 + dl * ((t - t0) / dt)) - ref <= -dn) {
                tc = t;
                pol = -1;
              }
            }
          } else if (dl < 0.0) {
            if (l1 - ref <= -dn) {
              double t = (ref - dn >= l0) ? t0 : t0 + (ref - dn - l0) / dl * dt;
              t = std::max(t, gate);
              if (t <= t1) {
                tc = std::min(t, t1);
                pol = -1;
              }
            }
            if (l0 - ref >= up) {
              const double t = std::max(t0, gate);
              if (t <= t1 && t < tc && (l0 + dl * ((t - t0) / dt)) - ref >= up) {
                tc = t;
                pol = +1;
              }
            }
          } else {
            const double d = l0 - ref;
            if (d >= up || d <= -dn) {
              const double t = std::max(t0, gate);
              if (t <= t1) {
                tc = t;
                pol = (d >= up) ? +1 : -1;
              }
            }
          }
          if (pol == 0) break;

          const double level = (dl == 0.0) ? l0 : l0 + dl * ((tc - t0) / dt);
          out.events.push_back(Event{tc, x, y, pol});
          ref = level;  // reference resets to L at the event time
          gate = tc + cfg.refractory;
        }
      }
    }
  }

  std::sort(out.events.begin(), out.events.end(), [](const Event& a, const Event& b) {
    return std::tie(a.t, a.y, a.x, a.polarity) < std::tie(b.t, b.y, b.x, b.polarity);
  });
  return out;
}

CalibrationMap inject_special_pixels(const CalibrationMap& map, const SpecialPixelSpec& spec,
                                     double nominal_c) {
  if (!(nominal_c > 0.0)) throw std::invalid_argument("inject_special_pixels: nominal_c must be positive");
  CalibrationMap out = map;
  for (const SpecialPixel& sp : spec) {
    const std::string where = "(" + std::to_string(sp.x) + ", " + std::to_string(sp.y) + ")";
    if (sp.x < 0 || sp.x >= map.width() || sp.y < 0 || sp.y >= map.height()) {
      throw std::invalid_argument("inject_special_pixels: pixel " + where + " out of range");
    }
    if (!(sp.magnitude > 0.0)) {
      throw std::invalid_argument("inject_special_pixels: magnitude must be positive at " + where);
    }
    switch (sp.cls) {
      case PixelClass::hot: out.c(sp.x, sp.y) = nominal_c - sp.magnitude; break;
      case PixelClass::cold: out.c(sp.x, sp.y) = nominal_c + sp.magnitude; break;
      case PixelClass::warm: out.b(sp.x, sp.y) = -sp.magnitude; break;
      case PixelClass::cool: out.b(sp.x, sp.y) = sp.magnitude; break;
      case PixelClass::nominal:
        throw std::invalid_argument("inject_special_pixels: cannot inject 'nominal' at " + where);
    }
    const double c = out.c(sp.x, sp.y);
    const double b = out.b(sp.x, sp.y);
    if (!(c > 0.0) || !(std::abs(b) < c)) {
      throw std::invalid_argument("inject_special_pixels: result c=" + std::to_string(c) +
                                  " b=" + std::to_string(b) + " violates |b| < c, c > 0 at " + where);
    }
  }
  return out;
}

}  // namespace evcalib
