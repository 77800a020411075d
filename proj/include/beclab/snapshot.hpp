#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "beclab/field.hpp"

namespace beclab {

/// GPF1 binary snapshot: "GPF1", u32 version = 1, u32 n, f64 xmin, xmax,
/// ymin, ymax, then n*n (f64 re, f64 im) pairs in row-major order
/// (row = y index) with NaN at masked-out nodes. Little-endian throughout.
inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const ComplexField& psi);
/// Decodes onto a freshly built grid; throws InvalidArgument on malformed
/// input or a NaN pattern that disagrees with the grid mask.
ComplexField decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const ComplexField& psi, const std::filesystem::path& path);
ComplexField read_snapshot(const std::filesystem::path& path);

}  // namespace beclab
