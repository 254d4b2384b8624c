#include "evcalib/calib.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evcalib/intensity.hpp"

namespace evcalib {

namespace {

constexpr double kConditionLimit = 1e12;

// Index of the first event with t > threshold, assuming a time-sorted stream.
std::size_t first_after(std::span<const Event> events, double threshold) {
  const auto it = std::upper_bound(events.begin(), events.end(), threshold,
                                   [](double t, const Event& ev) { return t < ev.t; });
  return static_cast<std::size_t>(it - events.begin());
}

double median_of(std::vector<double> values) {
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double m = values[mid];
  if (n % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() + mid);
    m = 0.5 * (lower + m);
  }
  return m;
}

}  // namespace

const char* to_string(DegenerateReason reason) {
  switch (reason) {
    case DegenerateReason::none: return "none";
    case DegenerateReason::too_few_events: return "too_few_events";
    case DegenerateReason::too_few_rows: return "too_few_rows";
    case DegenerateReason::ill_conditioned: return "ill_conditioned";
    case DegenerateReason::nonpositive_threshold: return "nonpositive_threshold";
  }
  return "?";
}

std::string CalibrationReport::to_text() const {
  std::ostringstream out;
  for (const DegeneratePixel& p : degenerate_pixels) {
    out << p.x << " " << p.y << " " << to_string(p.reason) << "\n";
  }
  out << "pixels " << pixel_count << "\n";
  out << "degenerate " << degenerate_count << "\n";
  if (median_residual > 0.0) out << "median_residual " << median_residual << "\n";
  if (floored_residual_count > 0) out << "floored_residual " << floored_residual_count << "\n";
  return out.str();
}

RowTable build_rows(const Dataset& dataset, int k, int d, int n) {
  const int frame_count = static_cast<int>(dataset.frames.size());
  if (d < 1 || n < 1 || k < 0 || k + n * d > frame_count - 1) {
    throw std::invalid_argument("build_rows: interval span [" + std::to_string(k) + ", " +
                                std::to_string(k + n * d) + "] outside " +
                                std::to_string(frame_count) + " frames");
  }
  const int width = dataset.stream.width;
  const int height = dataset.stream.height;
  const std::size_t npx = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);

  RowTable table{width, height, n, std::vector<RegressionRow>(npx * static_cast<std::size_t>(n))};

  LogFrame lo = log_intensity(dataset.frames[static_cast<std::size_t>(k)]);
  const std::span<const Event> events(dataset.stream.events);
  for (int j = 0; j < n; ++j) {
    const LogFrame hi = log_intensity(dataset.frames[static_cast<std::size_t>(k + (j + 1) * d)]);
    const double t_lo = lo.timestamp;
    const double t_hi = hi.timestamp;
    for (std::size_t p = 0; p < npx; ++p) {
      table.rows[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)].delta_log =
          hi.values.cells()[p] - lo.values.cells()[p];
    }
    const std::size_t begin = first_after(events, t_lo);
    const std::size_t end = first_after(events, t_hi);
    for (std::size_t i = begin; i < end; ++i) {
      const Event& ev = events[i];
      const std::size_t p = static_cast<std::size_t>(ev.y) * static_cast<std::size_t>(width) +
                            static_cast<std::size_t>(ev.x);
      RegressionRow& row = table.rows[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
      row.sum_sigma += ev.polarity;
      row.count += 1;
    }
    lo = std::move(hi);
  }
  return table;
}

PixelSolution solve_pixel_ols(std::span<const RegressionRow> rows, double fallback_c,
                              double fallback_b, int min_rows, int min_events) {
  long long events = 0;
  int usable_rows = 0;
  for (const RegressionRow& row : rows) {
    events += row.count;
    if (row.count > 0) ++usable_rows;
  }
  if (events < min_events) {
    return PixelSolution{fallback_c, fallback_b, true, DegenerateReason::too_few_events};
  }
  if (usable_rows < min_rows) {
    return PixelSolution{fallback_c, fallback_b, true, DegenerateReason::too_few_rows};
  }

  // 2x2 normal equations for A = [sum_sigma, count], z = delta_log
  double s2 = 0.0, sm = 0.0, m2 = 0.0, sz = 0.0, mz = 0.0;
  for (const RegressionRow& row : rows) {
    const double s = row.sum_sigma;
    const double m = row.count;
    s2 += s * s;
    sm += s * m;
    m2 += m * m;
    sz += s * row.delta_log;
    mz += m * row.delta_log;
  }
  const double trace = s2 + m2;
  const double det = s2 * m2 - sm * sm;
  const double disc = std::sqrt(std::max(0.0, 0.25 * trace * trace - det));
  const double eig_max = 0.5 * trace + disc;
  const double eig_min = 0.5 * trace - disc;
  if (!(eig_min > 0.0) || eig_max > kConditionLimit * eig_min) {
    return PixelSolution{fallback_c, fallback_b, true, DegenerateReason::ill_conditioned};
  }
  const double c = (m2 * sz - sm * mz) / det;
  const double b = (s2 * mz - sm * sz) / det;
  if (!(c > 0.0)) {
    return PixelSolution{fallback_c, fallback_b, true, DegenerateReason::nonpositive_threshold};
  }
  return PixelSolution{c, b, false, DegenerateReason::none};
}

std::pair<CalibrationMap, CalibrationReport> calibrate_offei(const Dataset& dataset,
                                                             const OffEiConfig& cfg) {
  if (cfg.d < 1) throw std::invalid_argument("calibrate_offei: d must be >= 1");
  if (!(cfg.fallback_c > 0.0)) throw std::invalid_argument("calibrate_offei: fallback_c must be positive");
  if (cfg.min_rows < 2) throw std::invalid_argument("calibrate_offei: min_rows must be >= 2");
  if (cfg.min_events < 1) throw std::invalid_argument("calibrate_offei: min_events must be >= 1");
  const int frame_count = static_cast<int>(dataset.frames.size());
  if (frame_count < cfg.d + 1) {
    throw std::invalid_argument("calibrate_offei: " + std::to_string(frame_count) +
                                " frames, need at least d+1 = " + std::to_string(cfg.d + 1));
  }

  const int n = (frame_count - 1) / cfg.d;
  const RowTable table = build_rows(dataset, 0, cfg.d, n);

  const int width = dataset.stream.width;
  const int height = dataset.stream.height;
  CalibrationMap map{Grid<double>(width, height), Grid<double>(width, height)};
  CalibrationReport report;
  report.pixel_count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  report.residual_norm = Grid<double>(width, height);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const auto rows = table.pixel_rows(x, y);
      const PixelSolution sol =
          solve_pixel_ols(rows, cfg.fallback_c, cfg.fallback_b, cfg.min_rows, cfg.min_events);
      map.c(x, y) = sol.c;
      map.b(x, y) = sol.b;
      double sq = 0.0;
      for (const RegressionRow& row : rows) {
        const double r = row.sum_sigma * sol.c + row.count * sol.b - row.delta_log;
        sq += r * r;
      }
      report.residual_norm(x, y) = std::sqrt(sq);
      if (sol.degenerate) {
        ++report.degenerate_count;
        report.degenerate_pixels.push_back(DegeneratePixel{x, y, sol.reason});
      }
    }
  }
  return {std::move(map), std::move(report)};
}

OnlineCalibrator::OnlineCalibrator(int width, int height, OnEiConfig cfg)
    : cfg_(cfg), width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw std::invalid_argument("OnlineCalibrator: bad resolution");
  if (cfg.small_capacity > cfg.big_capacity) {
    throw std::invalid_argument("OnlineCalibrator: small_capacity > big_capacity");
  }
  if (!(cfg.filter_alpha > 0.0 && cfg.filter_alpha <= 1.0)) {
    throw std::invalid_argument("OnlineCalibrator: filter_alpha outside (0, 1]");
  }
  if (!(cfg.fallback_c > 0.0)) throw std::invalid_argument("OnlineCalibrator: fallback_c must be positive");
  estimate_ = uniform_map(width, height, cfg.fallback_c, cfg.fallback_b);
}

std::optional<CalibrationMap> OnlineCalibrator::push_frame(const IntensityFrame& frame,
                                                           std::span<const Event> events) {
  if (!frame.values.same_size(width_, height_)) {
    throw std::invalid_argument("push_frame: frame resolution mismatch");
  }
  if (!has_frame_) {
    if (!events.empty()) {
      throw std::invalid_argument("push_frame: events before the first frame");
    }
    boundaries_.push_back(log_intensity(frame));
    has_frame_ = true;
    return std::nullopt;
  }
  const double prev_t = boundaries_.back().timestamp;
  if (!(frame.timestamp > prev_t)) {
    throw std::invalid_argument("push_frame: non-monotone frame timestamp");
  }

  const std::size_t npx = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  Interval interval{std::vector<std::int32_t>(npx, 0), std::vector<std::int32_t>(npx, 0),
                    events.size()};
  for (const Event& ev : events) {
    if (!(ev.t > prev_t && ev.t <= frame.timestamp)) {
      throw std::invalid_argument("push_frame: event at t=" + std::to_string(ev.t) +
                                  " outside (previous frame, frame] window");
    }
    if (ev.x < 0 || ev.x >= width_ || ev.y < 0 || ev.y >= height_) {
      throw std::invalid_argument("push_frame: event coordinates out of range");
    }
    const std::size_t p = static_cast<std::size_t>(ev.y) * static_cast<std::size_t>(width_) +
                          static_cast<std::size_t>(ev.x);
    interval.sum_sigma[p] += ev.polarity;
    interval.count[p] += 1;
  }
  boundaries_.push_back(log_intensity(frame));
  intervals_.push_back(std::move(interval));
  total_events_ += events.size();

  if (total_events_ <= cfg_.big_capacity) return std::nullopt;

  // Evict the oldest frame interval. One eviction is the normal case; the
  // loop keeps the buffered total within capacity when a single interval
  // carries more events than the eviction freed.
  do {
    total_events_ -= intervals_.front().events;
    intervals_.pop_front();
    boundaries_.pop_front();
  } while (total_events_ > cfg_.big_capacity && !intervals_.empty());

  // Greedy frame-aligned grouping: a group closes as soon as it reaches
  // small_capacity events. A trailing partial group stays buffered but
  // contributes no row to this update.
  struct Group {
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive interval indices
  };
  std::vector<Group> groups;
  std::size_t acc = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    acc += intervals_[i].events;
    if (acc >= cfg_.small_capacity) {
      groups.push_back(Group{start, i});
      start = i + 1;
      acc = 0;
    }
  }

  const int n = static_cast<int>(groups.size());
  std::vector<RegressionRow> rows(npx * static_cast<std::size_t>(n));
  for (int g = 0; g < n; ++g) {
    const LogFrame& lo = boundaries_[groups[static_cast<std::size_t>(g)].first];
    const LogFrame& hi = boundaries_[groups[static_cast<std::size_t>(g)].last + 1];
    for (std::size_t p = 0; p < npx; ++p) {
      rows[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(g)].delta_log =
          hi.values.cells()[p] - lo.values.cells()[p];
    }
    for (std::size_t i = groups[static_cast<std::size_t>(g)].first;
         i <= groups[static_cast<std::size_t>(g)].last; ++i) {
      const Interval& iv = intervals_[i];
      for (std::size_t p = 0; p < npx; ++p) {
        RegressionRow& row = rows[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(g)];
        row.sum_sigma += iv.sum_sigma[p];
        row.count += iv.count[p];
      }
    }
  }

  const double alpha = cfg_.filter_alpha;
  for (std::size_t p = 0; p < npx; ++p) {
    const std::span<const RegressionRow> pixel_rows(rows.data() + p * static_cast<std::size_t>(n),
                                                    static_cast<std::size_t>(n));
    const PixelSolution sol = solve_pixel_ols(pixel_rows, cfg_.fallback_c, cfg_.fallback_b,
                                              cfg_.min_rows, cfg_.min_events);
    // degenerate pixels hold their estimate; solutions with |b| >= c would
    // pull the estimate out of the valid map domain, so they hold too
    if (sol.degenerate || !(std::abs(sol.b) < sol.c)) continue;
    double& ec = estimate_.c.cells()[p];
    double& eb = estimate_.b.cells()[p];
    ec = (1.0 - alpha) * ec + alpha * sol.c;
    eb = (1.0 - alpha) * eb + alpha * sol.b;
  }
  ++updates_;
  return estimate_;
}

std::pair<CalibrationMap, CalibrationReport> calibrate_offe(const EventStream& stream,
                                                            const OffEConfig& cfg) {
  if (cfg.min_events < 2) throw std::invalid_argument("calibrate_offe: min_events must be >= 2");
  if (!(cfg.fallback_c > 0.0)) throw std::invalid_argument("calibrate_offe: fallback_c must be positive");
  if (!(cfg.r_floor > 0.0)) throw std::invalid_argument("calibrate_offe: r_floor must be positive");
  if (stream.width <= 0 || stream.height <= 0) {
    throw std::invalid_argument("calibrate_offe: bad stream resolution");
  }
  const int width = stream.width;
  const int height = stream.height;
  const std::size_t npx = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);

  auto pixel_of = [&](const Event& ev) {
    if (ev.x < 0 || ev.x >= width || ev.y < 0 || ev.y >= height) {
      throw std::invalid_argument("calibrate_offe: event coordinates out of range");
    }
    return static_cast<std::size_t>(ev.y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(ev.x);
  };

  // Pass 1: per pixel, regression sums of the points (j, S_j) where S_j is
  // the cumulative polarity sum after the j-th event of that pixel.
  std::vector<std::int64_t> n_events(npx, 0);
  std::vector<std::int64_t> cum(npx, 0);
  std::vector<double> sum_y(npx, 0.0);
  std::vector<double> sum_xy(npx, 0.0);
  for (const Event& ev : stream.events) {
    const std::size_t p = pixel_of(ev);
    cum[p] += ev.polarity;
    n_events[p] += 1;
    const double s = static_cast<double>(cum[p]);
    sum_y[p] += s;
    sum_xy[p] += static_cast<double>(n_events[p]) * s;
  }

  std::vector<double> slope(npx, 0.0);
  std::vector<double> intercept(npx, 0.0);
  std::vector<bool> degenerate(npx, false);
  for (std::size_t p = 0; p < npx; ++p) {
    const double n = static_cast<double>(n_events[p]);
    if (n_events[p] < cfg.min_events) {
      degenerate[p] = true;
      continue;
    }
    // x-values are exactly 1..n
    const double sx = 0.5 * n * (n + 1.0);
    const double sxx = n * (n + 1.0) * (2.0 * n + 1.0) / 6.0;
    const double denom = n * sxx - sx * sx;
    slope[p] = (n * sum_xy[p] - sx * sum_y[p]) / denom;
    intercept[p] = (sum_y[p] - slope[p] * sx) / n;
  }

  // Pass 2: RMS residual of S about the fitted line.
  std::vector<double> res_sq(npx, 0.0);
  std::fill(cum.begin(), cum.end(), 0);
  std::vector<std::int64_t> seen(npx, 0);
  for (const Event& ev : stream.events) {
    const std::size_t p = pixel_of(ev);
    cum[p] += ev.polarity;
    seen[p] += 1;
    if (degenerate[p]) continue;
    const double r = static_cast<double>(cum[p]) -
                     (slope[p] * static_cast<double>(seen[p]) + intercept[p]);
    res_sq[p] += r * r;
  }

  CalibrationReport report;
  report.pixel_count = npx;
  std::vector<double> residual(npx, 0.0);
  std::vector<double> valid_residuals;
  for (std::size_t p = 0; p < npx; ++p) {
    if (degenerate[p]) continue;
    double r = std::sqrt(res_sq[p] / static_cast<double>(n_events[p]));
    if (r < cfg.r_floor) {
      r = cfg.r_floor;
      ++report.floored_residual_count;
    }
    residual[p] = r;
    valid_residuals.push_back(r);
  }
  if (valid_residuals.empty()) {
    throw std::runtime_error("calibrate_offe: all pixels degenerate, no residual median exists");
  }
  const double median = median_of(std::move(valid_residuals));
  report.median_residual = median;

  CalibrationMap map{Grid<double>(width, height), Grid<double>(width, height)};
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                            static_cast<std::size_t>(x);
      if (degenerate[p]) {
        map.c(x, y) = cfg.fallback_c;
        map.b(x, y) = cfg.fallback_b;
        ++report.degenerate_count;
        report.degenerate_pixels.push_back(DegeneratePixel{x, y, DegenerateReason::too_few_events});
        continue;
      }
      const double c = median / residual[p];
      map.c(x, y) = c;
      map.b(x, y) = -c * slope[p];
    }
  }
  return {std::move(map), std::move(report)};
}

}  // namespace evcalib
