#ifndef EVCALIB_CALIB_HPP
#define EVCALIB_CALIB_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "evcalib/io.hpp"
#include "evcalib/types.hpp"

namespace evcalib {

/// One stacked equation of the per-pixel least-squares system:
/// sum_sigma * c + count * b = delta_log, summed over one frame interval.
struct RegressionRow {
  int sum_sigma = 0;  // signed event sum over the interval
  int count = 0;      // event count over the interval
  double delta_log = 0.0;  // later-minus-earlier log-frame difference
};

/// Regression rows for every pixel of a sensor, pixel-major:
/// rows for pixel (x, y) occupy [(y*width + x) * intervals, ... + intervals).
struct RowTable {
  int width = 0;
  int height = 0;
  int intervals = 0;
  std::vector<RegressionRow> rows;

  std::span<const RegressionRow> pixel_rows(int x, int y) const {
    const std::size_t base =
        (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)) *
        static_cast<std::size_t>(intervals);
    return {rows.data() + base, static_cast<std::size_t>(intervals)};
  }
};

/// Builds n rows per pixel from frame k, each spanning d frames. Events are
/// binned into half-open intervals (T_{k+jd}, T_{k+(j+1)d}]; delta_log is
/// L(T_{k+(j+1)d}) - L(T_{k+jd}).
RowTable build_rows(const Dataset& dataset, int k, int d, int n);

enum class DegenerateReason {
  none,
  too_few_events,
  too_few_rows,
  ill_conditioned,
  nonpositive_threshold,
};

const char* to_string(DegenerateReason reason);

struct PixelSolution {
  double c = 0.0;
  double b = 0.0;
  bool degenerate = false;
  DegenerateReason reason = DegenerateReason::none;
};

/// Ordinary least squares for one pixel's [c, b]. Falls back to
/// (fallback_c, fallback_b) when the pixel has fewer than min_events events,
/// fewer than min_rows rows carrying events, an ill-conditioned normal matrix
/// (condition number above 1e12), or a non-positive solved threshold.
PixelSolution solve_pixel_ols(std::span<const RegressionRow> rows, double fallback_c,
                              double fallback_b, int min_rows, int min_events);

struct DegeneratePixel {
  int x = 0;
  int y = 0;
  DegenerateReason reason = DegenerateReason::none;
};

/// Shared calibration report. OffEI fills residual_norm; OffE fills
/// median_residual and floored_residual_count.
struct CalibrationReport {
  std::size_t pixel_count = 0;
  std::size_t degenerate_count = 0;
  std::vector<DegeneratePixel> degenerate_pixels;
  Grid<double> residual_norm;
  double median_residual = 0.0;
  std::size_t floored_residual_count = 0;

  /// Line-oriented text: one "x y reason" line per degenerate pixel, then
  /// summary counters.
  std::string to_text() const;
};

struct OffEiConfig {
  int d = 40;              // frames per interval
  double fallback_c = 0.1;
  double fallback_b = 0.0;
  int min_rows = 2;
  int min_events = 1;
};

/// Offline hybrid calibration: stacks rows over the whole sequence with
/// interval length d and solves per pixel.
std::pair<CalibrationMap, CalibrationReport> calibrate_offei(const Dataset& dataset,
                                                             const OffEiConfig& cfg = {});

struct OnEiConfig {
  std::size_t big_capacity = 1'700'000;
  std::size_t small_capacity = 200'000;
  double filter_alpha = 0.1;  // exponential low-pass coefficient, in (0, 1]
  double fallback_c = 0.1;
  double fallback_b = 0.0;
  int min_rows = 2;
  int min_events = 1;
};

/// Online hybrid calibration. Frames arrive one at a time with the events
/// since the previous frame; once the buffered event total exceeds
/// big_capacity the oldest frame interval is evicted, the remaining intervals
/// are grouped into rows of roughly small_capacity events, and the estimate
/// is low-pass updated from the per-pixel solves.
///
/// Single-writer: pushes must be externally serialized. Returned maps are
/// immutable snapshots.
class OnlineCalibrator {
 public:
  OnlineCalibrator(int width, int height, OnEiConfig cfg = {});

  /// Returns the updated map when an update fired, nothing while accumulating.
  std::optional<CalibrationMap> push_frame(const IntensityFrame& frame,
                                           std::span<const Event> events);

  const CalibrationMap& estimate() const { return estimate_; }
  std::size_t buffered_events() const { return total_events_; }
  std::size_t update_count() const { return updates_; }
  const OnEiConfig& config() const { return cfg_; }

 private:
  struct Interval {
    std::vector<std::int32_t> sum_sigma;  // per pixel, row-major
    std::vector<std::int32_t> count;
    std::size_t events = 0;
  };

  OnEiConfig cfg_;
  int width_ = 0;
  int height_ = 0;
  bool has_frame_ = false;
  std::deque<LogFrame> boundaries_;  // one more than intervals_
  std::deque<Interval> intervals_;
  std::size_t total_events_ = 0;
  CalibrationMap estimate_;
  std::size_t updates_ = 0;
};

struct OffEConfig {
  int min_events = 10;  // at least 2
  double fallback_c = 0.1;
  double fallback_b = 0.0;
  double r_floor = 1e-6;  // residual floor for perfectly collinear pixels
};

/// Event-only calibration. Per pixel, fits a line to the cumulative polarity
/// sum against the event count, takes the RMS residual r about the line, and
/// sets c = median(r) / r and b = -c * slope. Pixels with fewer than
/// min_events events fall back; throws if every pixel is degenerate.
std::pair<CalibrationMap, CalibrationReport> calibrate_offe(const EventStream& stream,
                                                            const OffEConfig& cfg = {});

}  // namespace evcalib

#endif
