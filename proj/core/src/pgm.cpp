#include "evcalib/pgm.hpp"

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "evcalib/intensity.hpp"

namespace evcalib {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error("pgm: " + path.string() + ": " + what);
}

// Reads the next integer token, skipping whitespace and '#' comment lines.
int next_header_int(std::istream& in) {
  for (;;) {
    int ch = in.peek();
    if (ch == EOF) return -1;
    if (std::isspace(ch)) {
      in.get();
      continue;
    }
    if (ch == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    break;
  }
  int value = -1;
  in >> value;
  return in ? value : -1;
}

}  // namespace

IntensityFrame read_pgm(const std::filesystem::path& path, double timestamp) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::string magic;
  in >> magic;
  if (magic != "P5") fail(path, "not a binary graymap (magic '" + magic + "')");
  const int width = next_header_int(in);
  const int height = next_header_int(in);
  const int maxval = next_header_int(in);
  if (width <= 0 || height <= 0) fail(path, "bad dimensions");
  if (maxval != 255) fail(path, "unsupported maxval " + std::to_string(maxval));
  in.get();  // single whitespace after maxval
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (static_cast<std::size_t>(in.gcount()) != bytes.size()) fail(path, "truncated pixel data");

  IntensityFrame frame{timestamp, Grid<double>(width, height)};
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    frame.values.cells()[i] = static_cast<double>(bytes[i]);
  }
  return frame;
}

void write_pgm(const IntensityFrame& frame, const std::filesystem::path& path) {
  const IntensityFrame rounded = quantize_8bit(frame);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  out << "P5\n" << frame.values.width() << " " << frame.values.height() << "\n255\n";
  std::vector<std::uint8_t> bytes(rounded.values.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    bytes[i] = static_cast<std::uint8_t>(rounded.values.cells()[i]);
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(path, "write failed");
}

}  // namespace evcalib
