#ifndef EVCALIB_TYPES_HPP
#define EVCALIB_TYPES_HPP

#include <cstddef>
#include <vector>

namespace evcalib {

/// One asynchronous brightness-change event. Polarity is +1 (ON) or -1 (OFF),
/// never 0.
struct Event {
  double t = 0.0;  // seconds
  int x = 0;       // column
  int y = 0;       // row
  int polarity = 1;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Row-major grid of per-pixel values.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int width, int height, T value = T{})
      : width_(width),
        height_(height),
        cells_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), value) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return cells_.empty(); }
  std::size_t size() const { return cells_.size(); }

  T& operator()(int x, int y) { return cells_[index(x, y)]; }
  const T& operator()(int x, int y) const { return cells_[index(x, y)]; }

  std::vector<T>& cells() { return cells_; }
  const std::vector<T>& cells() const { return cells_; }

  bool same_size(int width, int height) const { return width_ == width && height_ == height; }
  template <typename U>
  bool same_size(const Grid<U>& other) const {
    return same_size(other.width(), other.height());
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> cells_;
};

/// Events of one sensor, sorted non-decreasing by timestamp.
struct EventStream {
  int width = 0;
  int height = 0;
  std::vector<Event> events;
};

/// Timestamped log-intensity image. Values are finite by construction
/// (log_intensity never produces -inf).
struct LogFrame {
  double timestamp = 0.0;
  Grid<double> values;
};

/// Timestamped intensity image with values in [0, 255]. Values are real, not
/// quantized; rounding to 8 bit happens only at file export.
struct IntensityFrame {
  double timestamp = 0.0;
  Grid<double> values;
};

/// Per-pixel contrast thresholds c (log-intensity units, > 0) and biases b.
/// A well-formed entry satisfies |b| < c; the event-only calibrator can emit
/// |b| = c for pathological pixels, which it flags in its report.
struct CalibrationMap {
  Grid<double> c;
  Grid<double> b;

  int width() const { return c.width(); }
  int height() const { return c.height(); }

  friend bool operator==(const CalibrationMap&, const CalibrationMap&) = default;
};

/// Builds a map with uniform threshold c0 and zero bias.
CalibrationMap uniform_map(int width, int height, double c0, double b0 = 0.0);

/// Sensor behaviour classes. Numeric order matches the gray levels of the
/// class-index image emitted by the CLI (0, 60, 120, 180, 240).
enum class PixelClass { nominal = 0, hot = 1, cold = 2, warm = 3, cool = 4 };

const char* to_string(PixelClass cls);

}  // namespace evcalib

#endif
