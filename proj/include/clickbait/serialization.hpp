#pragma once

// CBM1 model file, all integers and floats little-endian:
//
//   "CBM1"                          4 bytes
//   format_version                  u32
//   hidden_width, feature_dim       u32, u32
//   W1 (row-major), b1, w2, b2      f32 arrays
//   hash_seed                       u64
//   threshold                       f64
//   vocab_size                      u32
//   per token, in id order          u32 byte length + UTF-8 bytes

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "clickbait/errors.hpp"
#include "clickbait/model.hpp"

namespace clickbait {

inline constexpr std::string_view kModelMagic = "CBM1";

namespace detail {

class ByteWriter {
 public:
  void u32(std::uint32_t v) { put_le(v); }
  void u64(std::uint64_t v) { put_le(v); }
  void f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { put_le(std::bit_cast<std::uint64_t>(v)); }
  void raw(std::string_view s) { bytes_.insert(bytes_.end(), s.begin(), s.end()); }

  const std::vector<char>& bytes() const noexcept { return bytes_; }

 private:
  template <typename U>
  void put_le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }

  std::vector<char> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const char> bytes) : bytes_(bytes) {}

  std::uint32_t u32(const char* what) { return get_le<std::uint32_t>(what); }
  std::uint64_t u64(const char* what) { return get_le<std::uint64_t>(what); }
  float f32(const char* what) { return std::bit_cast<float>(get_le<std::uint32_t>(what)); }
  double f64(const char* what) { return std::bit_cast<double>(get_le<std::uint64_t>(what)); }

  std::string_view raw(std::size_t n, const char* what) {
    need(n, what);
    std::string_view out(bytes_.data() + pos_, n);
    pos_ += n;
    return out;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (remaining() < n) throw LoadError(LoadErrorKind::truncated, std::string("file ends inside ") + what);
  }

  template <typename U>
  U get_le(const char* what) {
    need(sizeof(U), what);
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
      v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }

  std::span<const char> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<char> serialize_model(const ModelArtifact& model) {
  model.validate();
  detail::ByteWriter w;
  w.raw(kModelMagic);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(kHiddenWidth));
  w.u32(model.head.feature_dim);
  for (float v : model.head.w1) w.f32(v);
  for (float v : model.head.b1) w.f32(v);
  for (float v : model.head.w2) w.f32(v);
  w.f32(model.head.b2);
  w.u64(model.hash_seed);
  w.f64(model.threshold);
  w.u32(static_cast<std::uint32_t>(model.vocab.size()));
  for (const auto& token : model.vocab.tokens()) {
    w.u32(static_cast<std::uint32_t>(token.size()));
    w.raw(token);
  }
  return w.bytes();
}

inline ModelArtifact deserialize_model(std::span<const char> bytes) {
  if (bytes.size() < kModelMagic.size()) throw LoadError(LoadErrorKind::truncated, "file ends inside magic");
  if (std::string_view(bytes.data(), kModelMagic.size()) != kModelMagic)
    throw LoadError(LoadErrorKind::bad_magic, "not a CBM1 model file");

  detail::ByteReader r(bytes.subspan(kModelMagic.size()));
  ModelArtifact m;
  m.format_version = r.u32("format version");
  if (m.format_version != kFormatVersion) {
    throw LoadError(LoadErrorKind::version_mismatch, "format version " + std::to_string(m.format_version) +
                                                         ", expected " + std::to_string(kFormatVersion));
  }
  const std::uint32_t hidden = r.u32("dimensions");
  const std::uint32_t dim = r.u32("dimensions");
  if (hidden != kHiddenWidth)
    throw LoadError(LoadErrorKind::malformed, "hidden width " + std::to_string(hidden) + ", expected 100");
  if (dim == 0) throw LoadError(LoadErrorKind::malformed, "feature dimension is zero");

  const std::size_t w1_count = kHiddenWidth * static_cast<std::size_t>(dim);
  if (r.remaining() / 4 < w1_count) throw LoadError(LoadErrorKind::truncated, "file ends inside W1");
  m.head.feature_dim = dim;
  m.head.w1.resize(w1_count);
  for (auto& v : m.head.w1) v = r.f32("W1");
  for (auto& v : m.head.b1) v = r.f32("b1");
  for (auto& v : m.head.w2) v = r.f32("w2");
  m.head.b2 = r.f32("b2");
  m.hash_seed = r.u64("hash seed");
  m.threshold = r.f64("threshold");

  const std::uint32_t vocab_size = r.u32("vocabulary size");
  std::vector<std::string> tokens;
  tokens.reserve(std::min<std::size_t>(vocab_size, r.remaining() / 4));
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    const std::uint32_t len = r.u32("vocabulary");
    tokens.emplace_back(r.raw(len, "vocabulary"));
  }
  if (r.remaining() != 0) throw LoadError(LoadErrorKind::malformed, "trailing bytes after vocabulary");

  try {
    m.vocab = Vocabulary::from_tokens(tokens);
    m.validate();
  } catch (const InvalidInput& e) {
    throw LoadError(LoadErrorKind::malformed, e.what());
  }
  return m;
}

inline void save_model(const ModelArtifact& model, std::ostream& out) {
  const auto bytes = serialize_model(model);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed to write model");
}

inline ModelArtifact load_model(std::istream& in) {
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw LoadError(LoadErrorKind::io, "read failure");
  return deserialize_model(bytes);
}

// Written to a sibling temporary file and renamed into place.
inline void save_model_file(const ModelArtifact& model, const std::filesystem::path& path) {
  const auto bytes = serialize_model(model);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("failed to write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline ModelArtifact load_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(LoadErrorKind::io, "cannot open " + path.string());
  return load_model(in);
}

}  // namespace clickbait
