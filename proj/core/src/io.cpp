#include "evcalib/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "evcalib/pgm.hpp"

namespace evcalib {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

double parse_double(std::string_view token, const char* what) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string("unparsable ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

long parse_int(std::string_view token, const char* what) {
  long value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument(std::string("unparsable ") + what + " '" + std::string(token) + "'");
  }
  return value;
}

std::string format_double_shortest(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// 9 significant digits, trailing zeros kept ("0.100000000" for 0.1).
std::string format_double_9sig(double v) {
  if (v == 0.0) return "0.000000000";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%#.9g", v);
  return buf;
}

}  // namespace

Event parse_event_line(std::string_view line) {
  const auto fields = split_fields(line);
  if (fields.size() != 4) {
    throw std::invalid_argument("field count " + std::to_string(fields.size()) + ", expected 4");
  }
  Event ev;
  ev.t = parse_double(fields[0], "timestamp");
  const long x = parse_int(fields[1], "x");
  const long y = parse_int(fields[2], "y");
  const long p = parse_int(fields[3], "polarity");
  if (x < 0 || y < 0) throw std::invalid_argument("negative pixel coordinate");
  if (p != 0 && p != 1) {
    throw std::invalid_argument("polarity " + std::to_string(p) + " not in {0, 1}");
  }
  ev.x = static_cast<int>(x);
  ev.y = static_cast<int>(y);
  ev.polarity = (p == 1) ? 1 : -1;
  return ev;
}

std::string format_event_line(const Event& ev) {
  return format_double_shortest(ev.t) + " " + std::to_string(ev.x) + " " + std::to_string(ev.y) +
         " " + (ev.polarity > 0 ? "1" : "0");
}

std::vector<Event> read_events(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("events: cannot open " + path.string());
  std::vector<Event> events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      events.push_back(parse_event_line(line));
    } catch (const std::exception& e) {
      throw std::runtime_error("events: " + path.string() + ": line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return events;
}

void write_events(std::span<const Event> events, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("events: cannot open " + path.string() + " for writing");
  for (const Event& ev : events) out << format_event_line(ev) << '\n';
  if (!out) throw std::runtime_error("events: write failed: " + path.string());
}

std::vector<IntensityFrame> read_image_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("images: cannot open " + path.string());
  const std::filesystem::path base = path.parent_path();
  std::vector<IntensityFrame> frames;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (fields.size() < 2) {
      throw std::runtime_error("images: " + path.string() + ": line " + std::to_string(line_no) +
                               ": expected 'timestamp path'");
    }
    double t = 0.0;
    try {
      t = parse_double(fields[0], "timestamp");
    } catch (const std::exception& e) {
      throw std::runtime_error("images: " + path.string() + ": line " + std::to_string(line_no) +
                               ": " + e.what());
    }
    // the path is everything after the first field, so names may contain spaces
    std::string rel = line.substr(static_cast<std::size_t>(fields[1].data() - line.data()));
    while (!rel.empty() && std::isspace(static_cast<unsigned char>(rel.back()))) rel.pop_back();
    frames.push_back(read_pgm(base / rel, t));
    if (frames.size() >= 2) {
      const auto& prev = frames[frames.size() - 2];
      const auto& cur = frames.back();
      if (!(cur.timestamp > prev.timestamp)) {
        throw std::runtime_error("images: " + path.string() + ": line " + std::to_string(line_no) +
                                 ": non-monotone frame timestamps");
      }
      if (!cur.values.same_size(prev.values)) {
        throw std::runtime_error("images: " + path.string() + ": line " + std::to_string(line_no) +
                                 ": resolution mismatch between images");
      }
    }
  }
  return frames;
}

Dataset load_dataset(const std::filesystem::path& events_path,
                     const std::filesystem::path& images_index_path, LoadReport* report) {
  std::vector<IntensityFrame> frames = read_image_index(images_index_path);
  if (frames.empty()) {
    throw std::runtime_error("images: " + images_index_path.string() + ": no frames");
  }
  const int width = frames.front().values.width();
  const int height = frames.front().values.height();

  std::vector<Event> events = read_events(events_path);
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& ev = events[i];
    if (ev.x >= width || ev.y >= height) {
      throw std::runtime_error("events: " + events_path.string() + ": event " + std::to_string(i) +
                               " at (" + std::to_string(ev.x) + ", " + std::to_string(ev.y) +
                               ") outside " + std::to_string(width) + "x" + std::to_string(height));
    }
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const Event& a, const Event& b) { return a.t < b.t; });

  if (report) {
    report->event_count = events.size();
    report->events_before_first_frame = 0;
    report->events_after_last_frame = 0;
    for (const Event& ev : events) {
      if (ev.t < frames.front().timestamp) ++report->events_before_first_frame;
      if (ev.t > frames.back().timestamp) ++report->events_after_last_frame;
    }
  }

  Dataset ds;
  ds.stream = EventStream{width, height, std::move(events)};
  ds.frames = std::move(frames);
  return ds;
}

void write_calibration_map(const CalibrationMap& map, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("calibration map: cannot open " + path.string() + " for writing");
  out << "evcalib v1 " << map.width() << " " << map.height() << "\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      out << format_double_9sig(map.c(x, y)) << " " << format_double_9sig(map.b(x, y)) << "\n";
    }
  }
  if (!out) throw std::runtime_error("calibration map: write failed: " + path.string());
}

CalibrationMap read_calibration_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("calibration map: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("calibration map: " + path.string() + ": empty file");
  const auto header = split_fields(line);
  if (header.size() != 4 || header[0] != "evcalib" || header[1] != "v1") {
    throw std::runtime_error("calibration map: " + path.string() + ": bad magic");
  }
  long width = 0, height = 0;
  try {
    width = parse_int(header[2], "width");
    height = parse_int(header[3], "height");
  } catch (const std::exception& e) {
    throw std::runtime_error("calibration map: " + path.string() + ": " + e.what());
  }
  if (width <= 0 || height <= 0) {
    throw std::runtime_error("calibration map: " + path.string() + ": bad dimensions");
  }

  CalibrationMap map{Grid<double>(static_cast<int>(width), static_cast<int>(height)),
                     Grid<double>(static_cast<int>(width), static_cast<int>(height))};
  std::size_t read_rows = 0;
  const std::size_t expected = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (read_rows == expected) {
      throw std::runtime_error("calibration map: " + path.string() +
                               ": more value lines than width*height");
    }
    const auto fields = split_fields(line);
    if (fields.size() != 2) {
      throw std::runtime_error("calibration map: " + path.string() + ": line " +
                               std::to_string(line_no) + ": expected 'c b'");
    }
    double c = 0.0, b = 0.0;
    try {
      c = parse_double(fields[0], "c");
      b = parse_double(fields[1], "b");
    } catch (const std::exception& e) {
      throw std::runtime_error("calibration map: " + path.string() + ": line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    if (!(c > 0.0)) {
      throw std::runtime_error("calibration map: " + path.string() + ": line " +
                               std::to_string(line_no) + ": c must be positive");
    }
    const int x = static_cast<int>(read_rows % static_cast<std::size_t>(width));
    const int y = static_cast<int>(read_rows / static_cast<std::size_t>(width));
    map.c(x, y) = c;
    map.b(x, y) = b;
    ++read_rows;
  }
  if (read_rows != expected) {
    throw std::runtime_error("calibration map: " + path.string() + ": dimension mismatch (" +
                             std::to_string(read_rows) + " value lines, expected " +
                             std::to_string(expected) + ")");
  }
  return map;
}

}  // namespace evcalib
