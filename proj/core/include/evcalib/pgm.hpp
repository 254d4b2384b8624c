#ifndef EVCALIB_PGM_HPP
#define EVCALIB_PGM_HPP

#include <filesystem>

#include "evcalib/types.hpp"

namespace evcalib {

/// Reads a binary (P5) 8-bit portable graymap.
IntensityFrame read_pgm(const std::filesystem::path& path, double timestamp = 0.0);

/// Writes a binary (P5) 8-bit portable graymap, rounding ties to even.
void write_pgm(const IntensityFrame& frame, const std::filesystem::path& path);

}  // namespace evcalib

#endif
