#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include "clickbait/errors.hpp"
#include "clickbait/tokenizer.hpp"

namespace clickbait {

inline constexpr std::uint32_t kDefaultFeatureDim = 1u << 15;
inline constexpr std::uint64_t kDefaultHashSeed = 0x636c69636b626169ull;  // "clickbai"

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ull;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ull;

// FNV-1a 64 with the seed folded into the offset basis by XOR.
constexpr std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0) {
  std::uint64_t h = kFnvOffsetBasis ^ seed;
  for (char c : bytes) {
    h ^= static_cast<std::uint8_t>(c);
    h *= kFnvPrime;
  }
  return h;
}

// Dense vector of dimension `dim`, stored as sorted (index, value) pairs.
class FeatureVector {
 public:
  using Entry = std::pair<std::uint32_t, double>;

  FeatureVector() = default;
  explicit FeatureVector(std::uint32_t dim) : dim_(dim) {}

  // Entries need not be sorted or unique; duplicates are summed, zeros dropped.
  FeatureVector(std::uint32_t dim, std::vector<Entry> entries) : dim_(dim) {
    std::map<std::uint32_t, double> acc;
    for (auto [i, v] : entries) {
      if (i >= dim) throw InvalidInput("feature index out of range");
      acc[i] += v;
    }
    for (auto [i, v] : acc)
      if (v != 0.0) entries_.emplace_back(i, v);
  }

  static FeatureVector from_dense(const std::vector<double>& values) {
    FeatureVector fv(static_cast<std::uint32_t>(values.size()));
    for (std::uint32_t i = 0; i < values.size(); ++i)
      if (values[i] != 0.0) fv.entries_.emplace_back(i, values[i]);
    return fv;
  }

  std::uint32_t dim() const noexcept { return dim_; }
  const std::vector<Entry>& nonzeros() const noexcept { return entries_; }

  double operator[](std::uint32_t i) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), i,
                               [](const Entry& e, std::uint32_t k) { return e.first < k; });
    return (it != entries_.end() && it->first == i) ? it->second : 0.0;
  }

  std::vector<double> to_dense() const {
    std::vector<double> out(dim_, 0.0);
    for (auto [i, v] : entries_) out[i] = v;
    return out;
  }

  double norm() const {
    double s = 0.0;
    for (auto [i, v] : entries_) s += v * v;
    return std::sqrt(s);
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::uint32_t dim_ = 0;
  std::vector<Entry> entries_;
};

struct EncoderParams {
  std::uint64_t hash_seed = kDefaultHashSeed;
  std::uint32_t feature_dim = kDefaultFeatureDim;
};

inline std::uint32_t feature_index(std::string_view token, const EncoderParams& params) {
  return static_cast<std::uint32_t>(fnv1a64(token, params.hash_seed) % params.feature_dim);
}

// Hashed bag of subwords, L2-normalized. Special tokens contribute nothing.
inline FeatureVector embed(const TokenSequence& tokens, const EncoderParams& params) {
  if (params.feature_dim == 0) throw InvalidInput("feature_dim must be positive");
  std::vector<FeatureVector::Entry> counts;
  for (std::size_t k = 0; k < tokens.ids.size(); ++k) {
    if (is_special(tokens.ids[k])) continue;
    counts.emplace_back(feature_index(tokens.surface[k], params), 1.0);
  }
  FeatureVector fv(params.feature_dim, std::move(counts));
  const double n = fv.norm();
  if (n == 0.0) return fv;
  std::vector<FeatureVector::Entry> scaled = fv.nonzeros();
  for (auto& e : scaled) e.second /= n;
  return FeatureVector(params.feature_dim, std::move(scaled));
}

}  // namespace clickbait
