#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "convtact/tensor.hpp"

namespace convtact {

// NDT tensor files, little-endian:
//   "NDT1" | u32 ndim | ndim x u64 extents (outermost first) | f64 payload, row-major
Tensor read_ndt(std::istream& in);
Tensor read_ndt(const std::filesystem::path& path);
void write_ndt(std::ostream& out, const Tensor& t);
void write_ndt(const std::filesystem::path& path, const Tensor& t);

// Binary PGM (P5). Pixels map to [0,1] as value / maxval; maxval must be
// 255 or 65535. Writing clamps to [0,1] and rounds to the nearest level.
Image read_pgm(std::istream& in);
Image read_pgm(const std::filesystem::path& path);
void write_pgm(std::ostream& out, const Image& img, unsigned maxval = 255);
void write_pgm(const std::filesystem::path& path, const Image& img, unsigned maxval = 255);

// Dispatches on extension: ".pgm" reads a PGM, anything else an NDT file.
Tensor read_tensor_file(const std::filesystem::path& path);

}  // namespace convtact
