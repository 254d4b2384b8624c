#ifndef EVCALIB_IO_HPP
#define EVCALIB_IO_HPP

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "evcalib/types.hpp"

namespace evcalib {

/// Event stream plus the synchronous intensity frames of one recording.
/// Frames are sorted strictly increasing by timestamp and share the stream's
/// resolution.
struct Dataset {
  EventStream stream;
  std::vector<IntensityFrame> frames;
};

/// Counters filled by load_dataset. Events outside the frame time span are
/// kept in the stream but counted here.
struct LoadReport {
  std::size_t event_count = 0;
  std::size_t events_before_first_frame = 0;
  std::size_t events_after_last_frame = 0;
};

/// Parses one "t x y p" line; p = 1 maps to polarity +1, p = 0 to -1.
Event parse_event_line(std::string_view line);

/// Inverse of parse_event_line; timestamps use shortest round-trip form.
std::string format_event_line(const Event& ev);

/// Reads a whole event file ("t x y p" per line, blank lines ignored).
/// Errors carry the 1-based line number.
std::vector<Event> read_events(const std::filesystem::path& path);

void write_events(std::span<const Event> events, const std::filesystem::path& path);

/// Reads an images index ("timestamp path" per line, paths relative to the
/// index file) and loads each graymap. Timestamps must be strictly increasing
/// and all images must share one resolution.
std::vector<IntensityFrame> read_image_index(const std::filesystem::path& path);

/// Loads events + frames into a validated Dataset. Events are sorted by
/// timestamp; coordinates outside the frame resolution are rejected.
Dataset load_dataset(const std::filesystem::path& events_path,
                     const std::filesystem::path& images_index_path,
                     LoadReport* report = nullptr);

/// Text format: header "evcalib v1 <width> <height>", then height*width lines
/// of "c b" with 9 significant digits, row-major. read(write(m)) preserves
/// every value exactly at that precision.
void write_calibration_map(const CalibrationMap& map, const std::filesystem::path& path);
CalibrationMap read_calibration_map(const std::filesystem::path& path);

}  // namespace evcalib

#endif
