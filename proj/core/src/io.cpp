// Copyright 2026 The CBE Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cbe/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>
#include <type_traits>
#include <vector>

#include "cbe/errors.hpp"

namespace cbe {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

constexpr std::size_t kMagicSize = 4;

class ByteWriter {
 public:
  void magic(const char (&tag)[5]) { bytes_.insert(bytes_.end(), tag, tag + 4); }

  template <typename T>
  void put(T value) {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    static_assert(sizeof(T) == sizeof(U));
    auto bits = std::bit_cast<U>(value);
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
    }
  }

  void raw(std::span<const std::uint8_t> data) {
    bytes_.insert(bytes_.end(), data.begin(), data.end());
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes_.data()),
              static_cast<std::streamsize>(bytes_.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  ByteReader(const std::filesystem::path& path) : path_(path.string()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path_ + "'");
    bytes_.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading '" + path_ + "'");
  }

  void expect_magic(const char (&tag)[5]) {
    if (bytes_.size() < kMagicSize) {
      throw TruncatedError(path_ + ": file too short for a header");
    }
    if (std::memcmp(bytes_.data(), tag, kMagicSize) != 0) {
      throw BadMagicError(path_ + ": bad magic, expected '" + std::string(tag) + "'");
    }
    pos_ = kMagicSize;
  }

  void expect_version() {
    const auto version = get<std::uint32_t>();
    if (version != kFormatVersion) {
      throw VersionError(path_ + ": unsupported format version " +
                         std::to_string(version));
    }
  }

  template <typename T>
  T get() {
    static_assert(std::is_arithmetic_v<T>);
    using U = std::conditional_t<sizeof(T) == 1, std::uint8_t,
              std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>>;
    need(sizeof(U));
    U bits = 0;
    for (std::size_t b = 0; b < sizeof(U); ++b) {
      bits |= static_cast<U>(static_cast<U>(bytes_[pos_ + b]) << (8 * b));
    }
    pos_ += sizeof(U);
    return std::bit_cast<T>(bits);
  }

  std::span<const std::uint8_t> raw(std::size_t count) {
    need(count);
    std::span<const std::uint8_t> out(bytes_.data() + pos_, count);
    pos_ += count;
    return out;
  }

  // Validates that exactly `count` items of `item_size` bytes remain (or at
  // least that many, when more fields follow).
  void expect_payload(std::uint64_t count, std::uint64_t item_size, bool exact) {
    if (item_size != 0 && count > std::numeric_limits<std::uint64_t>::max() / item_size) {
      throw SizeMismatchError(path_ + ": declared payload size overflows");
    }
    const std::uint64_t want = count * item_size;
    if (want > remaining()) {
      throw TruncatedError(path_ + ": payload truncated, header declares " +
                           std::to_string(want) + " bytes, " +
                           std::to_string(remaining()) + " present");
    }
    if (exact && want < remaining()) {
      throw SizeMismatchError(path_ + ": header declares " + std::to_string(want) +
                              " payload bytes but " + std::to_string(remaining()) +
                              " are present");
    }
  }

  void expect_end() {
    if (remaining() != 0) {
      throw SizeMismatchError(path_ + ": " + std::to_string(remaining()) +
                              " unexpected trailing bytes");
    }
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  const std::string& path() const { return path_; }

 private:
  void need(std::size_t count) {
    if (count > remaining()) {
      throw TruncatedError(path_ + ": unexpected end of file");
    }
  }

  std::string path_;
  std::vector<std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::size_t checked_size(std::uint64_t v, const ByteReader& reader) {
  if (v > std::numeric_limits<std::uint32_t>::max() * std::uint64_t{16}) {
    throw SizeMismatchError(reader.path() + ": implausible dimension " +
                            std::to_string(v));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

DataMatrix read_matrix(const std::filesystem::path& path) {
  ByteReader in(path);
  in.expect_magic("CBEM");
  in.expect_version();
  const auto n = checked_size(in.get<std::uint64_t>(), in);
  const auto d = checked_size(in.get<std::uint64_t>(), in);
  if (d != 0 && n > std::numeric_limits<std::uint64_t>::max() / d) {
    throw SizeMismatchError(in.path() + ": n*d overflows");
  }
  in.expect_payload(static_cast<std::uint64_t>(n) * d, sizeof(float), true);
  std::vector<float> values(n * d);
  for (auto& v : values) {
    v = in.get<float>();
    if (!std::isfinite(v)) {
      throw FormatError(in.path() + ": non-finite matrix entry");
    }
  }
  return DataMatrix(n, d, std::move(values));
}

void write_matrix(const std::filesystem::path& path, const DataMatrix& m) {
  ByteWriter out;
  out.magic("CBEM");
  out.put<std::uint32_t>(kFormatVersion);
  out.put<std::uint64_t>(m.rows());
  out.put<std::uint64_t>(m.cols());
  for (float v : m.values()) out.put<float>(v);
  out.save(path);
}

BinaryCodes read_codes(const std::filesystem::path& path) {
  ByteReader in(path);
  in.expect_magic("CBEC");
  in.expect_version();
  const auto n = checked_size(in.get<std::uint64_t>(), in);
  const auto k = checked_size(in.get<std::uint64_t>(), in);
  if (k == 0) throw FormatError(in.path() + ": code length k is zero");
  const std::uint64_t stride = bytes_for_bits(k);
  if (n > std::numeric_limits<std::uint64_t>::max() / stride) {
    throw SizeMismatchError(in.path() + ": n*ceil(k/8) overflows");
  }
  in.expect_payload(static_cast<std::uint64_t>(n) * stride, 1, true);
  const auto payload = in.raw(n * stride);
  try {
    return BinaryCodes(n, k, {payload.begin(), payload.end()});
  } catch (const PaddingError& e) {
    throw PaddingError(in.path() + ": " + e.what());
  }
}

void write_codes(const std::filesystem::path& path, const BinaryCodes& codes) {
  ByteWriter out;
  out.magic("CBEC");
  out.put<std::uint32_t>(kFormatVersion);
  out.put<std::uint64_t>(codes.size());
  out.put<std::uint64_t>(codes.bits());
  out.raw(codes.bytes());
  out.save(path);
}

std::size_t ParamsFile::dim() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CirculantParams>) return p.dim();
        else if constexpr (std::is_same_v<T, BilinearParams>) return p.dim();
        else return p.d;
      },
      params);
}

std::size_t ParamsFile::bits() const {
  return std::visit(
      [](const auto& p) -> std::size_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, BilinearParams>) return p.bits();
        else return p.k;
      },
      params);
}

namespace {

bool method_matches(Method method, const EncoderParams& params) {
  switch (method) {
    case Method::kCbeRand:
    case Method::kCbeOpt:
      return std::holds_alternative<CirculantParams>(params);
    case Method::kLsh: return std::holds_alternative<LshParams>(params);
    case Method::kBilinear: return std::holds_alternative<BilinearParams>(params);
    case Method::kFjlt: return std::holds_alternative<FjltParams>(params);
  }
  return false;
}

}  // namespace

void write_params(const std::filesystem::path& path, const ParamsFile& file) {
  if (!method_matches(file.method, file.params)) {
    throw InvalidArgument("write_params: method tag does not match parameters");
  }
  ByteWriter out;
  out.magic("CBEP");
  out.put<std::uint32_t>(kFormatVersion);
  out.put<std::uint32_t>(static_cast<std::uint32_t>(file.method));
  out.put<std::uint64_t>(file.dim());
  out.put<std::uint64_t>(file.bits());
  out.put<std::uint64_t>(file.seed);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, CirculantParams>) {
          out.put<std::uint64_t>(p.generator_count());
          auto put_generator = [&](const std::vector<double>& r,
                                   const std::vector<std::int8_t>& signs) {
            for (double v : r) out.put<double>(v);
            for (auto s : signs) out.put<std::int8_t>(s);
          };
          put_generator(p.r, p.signs);
          for (const auto& g : p.extra_generators) put_generator(g.r, g.signs);
        } else if constexpr (std::is_same_v<T, LshParams>) {
          for (float v : p.a) out.put<float>(v);
        } else if constexpr (std::is_same_v<T, BilinearParams>) {
          out.put<std::uint64_t>(p.d1);
          out.put<std::uint64_t>(p.d2);
          out.put<std::uint64_t>(p.k1);
          out.put<std::uint64_t>(p.k2);
          for (double v : p.r1) out.put<double>(v);
          for (double v : p.r2) out.put<double>(v);
        } else {
          for (auto s : p.signs) out.put<std::int8_t>(s);
          out.put<std::uint64_t>(p.entries.size());
          for (const auto& e : p.entries) {
            out.put<std::uint32_t>(e.row);
            out.put<std::uint32_t>(e.col);
            out.put<double>(e.value);
          }
        }
      },
      file.params);
  out.save(path);
}

ParamsFile read_params(const std::filesystem::path& path) {
  ByteReader in(path);
  in.expect_magic("CBEP");
  in.expect_version();
  const auto tag = in.get<std::uint32_t>();
  if (tag < static_cast<std::uint32_t>(Method::kCbeRand) ||
      tag > static_cast<std::uint32_t>(Method::kFjlt)) {
    throw FormatError(in.path() + ": unknown method tag " + std::to_string(tag));
  }
  ParamsFile file;
  file.method = static_cast<Method>(tag);
  const auto d = checked_size(in.get<std::uint64_t>(), in);
  const auto k = checked_size(in.get<std::uint64_t>(), in);
  file.seed = in.get<std::uint64_t>();

  switch (file.method) {
    case Method::kCbeRand:
    case Method::kCbeOpt: {
      const auto generators = checked_size(in.get<std::uint64_t>(), in);
      if (generators == 0) throw FormatError(in.path() + ": no generators");
      in.expect_payload(static_cast<std::uint64_t>(generators) * d, 9, true);
      CirculantParams p;
      p.k = k;
      for (std::size_t g = 0; g < generators; ++g) {
        CirculantGenerator gen;
        gen.r.resize(d);
        gen.signs.resize(d);
        for (auto& v : gen.r) v = in.get<double>();
        for (auto& s : gen.signs) s = in.get<std::int8_t>();
        if (g == 0) {
          p.r = std::move(gen.r);
          p.signs = std::move(gen.signs);
        } else {
          p.extra_generators.push_back(std::move(gen));
        }
      }
      file.params = std::move(p);
      break;
    }
    case Method::kLsh: {
      in.expect_payload(static_cast<std::uint64_t>(k) * d, sizeof(float), true);
      LshParams p{d, k, std::vector<float>(k * d)};
      for (auto& v : p.a) v = in.get<float>();
      file.params = std::move(p);
      break;
    }
    case Method::kBilinear: {
      BilinearParams p;
      p.d1 = checked_size(in.get<std::uint64_t>(), in);
      p.d2 = checked_size(in.get<std::uint64_t>(), in);
      p.k1 = checked_size(in.get<std::uint64_t>(), in);
      p.k2 = checked_size(in.get<std::uint64_t>(), in);
      if (p.d1 * p.d2 != d || p.k1 * p.k2 != k) {
        throw FormatError(in.path() + ": bilinear factors inconsistent with d, k");
      }
      in.expect_payload(static_cast<std::uint64_t>(p.d1) * p.k1 +
                            static_cast<std::uint64_t>(p.d2) * p.k2,
                        sizeof(double), true);
      p.r1.resize(p.d1 * p.k1);
      p.r2.resize(p.d2 * p.k2);
      for (auto& v : p.r1) v = in.get<double>();
      for (auto& v : p.r2) v = in.get<double>();
      file.params = std::move(p);
      break;
    }
    case Method::kFjlt: {
      FjltParams p;
      p.d = d;
      p.k = k;
      in.expect_payload(d, 1, false);
      p.signs.resize(d);
      for (auto& s : p.signs) s = in.get<std::int8_t>();
      const auto nnz = in.get<std::uint64_t>();
      in.expect_payload(nnz, 16, true);
      p.entries.resize(nnz);
      for (auto& e : p.entries) {
        e.row = in.get<std::uint32_t>();
        e.col = in.get<std::uint32_t>();
        e.value = in.get<double>();
      }
      file.params = std::move(p);
      break;
    }
  }
  in.expect_end();
  try {
    std::visit([](const auto& p) { p.validate(); }, file.params);
  } catch (const InvalidArgument& e) {
    throw FormatError(in.path() + ": " + e.what());
  }
  return file;
}

PairConstraints parse_constraints(std::istream& in, const std::string& source) {
  PairConstraints out;
  std::vector<std::pair<std::size_t, std::size_t>>* section = nullptr;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string text = line.substr(first, last - first + 1);
    if (text == "[similar]") {
      section = &out.similar;
      continue;
    }
    if (text == "[dissimilar]") {
      section = &out.dissimilar;
      continue;
    }
    const std::string where = source + ":" + std::to_string(line_no);
    if (!section) {
      throw FormatError(where + ": pair before any [similar]/[dissimilar] header");
    }
    std::istringstream fields(text);
    long long i = -1;
    long long j = -1;
    std::string extra;
    if (!(fields >> i >> j) || (fields >> extra) || i < 0 || j < 0) {
      throw FormatError(where + ": expected two non-negative indices, got '" +
                        text + "'");
    }
    section->emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  return out;
}

PairConstraints read_constraints(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return parse_constraints(in, path.string());
}

}  // namespace cbe
