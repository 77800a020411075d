#include "beclab/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>

#include "beclab/error.hpp"

namespace beclab {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T take(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw InvalidArgument("truncated GPF1 snapshot");
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'G', 'P', 'F', '1'};

}  // namespace

std::vector<std::uint8_t> encode_snapshot(const ComplexField& psi) {
  const Grid& g = *psi.grid;
  const int n = g.n();
  std::vector<std::uint8_t> out;
  out.reserve(4 + 8 + 32 + static_cast<std::size_t>(n) * n * 16);
  out.insert(out.end(), kMagic, kMagic + 4);
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(n));
  for (double bound : {-1.0, 1.0, -1.0, 1.0}) put<double>(out, bound);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const Eigen::Index k = g.dof(i, j);
      const Complex v = k >= 0 ? psi.values(k) : Complex(nan, nan);
      put<double>(out, v.real());
      put<double>(out, v.imag());
    }
  }
  return out;
}

ComplexField decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw InvalidArgument("not a GPF1 snapshot (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion) throw InvalidArgument("unsupported GPF1 version " + std::to_string(version));
  const auto n = static_cast<int>(take<std::uint32_t>(bytes, pos));
  const double xmin = take<double>(bytes, pos), xmax = take<double>(bytes, pos);
  const double ymin = take<double>(bytes, pos), ymax = take<double>(bytes, pos);
  if (xmin != -1.0 || xmax != 1.0 || ymin != -1.0 || ymax != 1.0) {
    throw InvalidArgument("GPF1 snapshot must cover [-1,1]^2");
  }
  if (bytes.size() != pos + static_cast<std::size_t>(n) * n * 16) {
    throw InvalidArgument("GPF1 payload size does not match n");
  }
  ComplexField psi(make_grid(n));
  const Grid& g = *psi.grid;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double re = take<double>(bytes, pos);
      const double im = take<double>(bytes, pos);
      const Eigen::Index k = g.dof(i, j);
      const bool masked_out = std::isnan(re);
      if ((k < 0) != masked_out) throw InvalidArgument("GPF1 NaN pattern does not match the disc mask");
      if (k >= 0) psi.values(k) = Complex(re, im);
    }
  }
  return psi;
}

void write_snapshot(const ComplexField& psi, const std::filesystem::path& path) {
  const auto bytes = encode_snapshot(psi);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

ComplexField read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace beclab
