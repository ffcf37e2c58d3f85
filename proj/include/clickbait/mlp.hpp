#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "clickbait/encoder.hpp"
#include "clickbait/errors.hpp"

namespace clickbait {

inline constexpr std::size_t kHiddenWidth = 100;

// One hidden relu layer of width 100 feeding a single sigmoid unit.
// W1 is stored row-major: row h holds the input weights of hidden unit h.
template <typename Real>
struct MlpHead {
  std::uint32_t feature_dim = 0;
  std::vector<Real> w1;
  std::array<Real, kHiddenWidth> b1{};
  std::array<Real, kHiddenWidth> w2{};
  Real b2 = 0;

  static MlpHead zeros(std::uint32_t dim) {
    MlpHead m;
    m.feature_dim = dim;
    m.w1.assign(kHiddenWidth * static_cast<std::size_t>(dim), Real{0});
    return m;
  }

  Real& w1_at(std::size_t h, std::uint32_t j) { return w1[h * feature_dim + j]; }
  Real w1_at(std::size_t h, std::uint32_t j) const { return w1[h * feature_dim + j]; }

  template <typename Other>
  MlpHead<Other> cast() const {
    MlpHead<Other> m;
    m.feature_dim = feature_dim;
    m.w1.assign(w1.begin(), w1.end());
    for (std::size_t h = 0; h < kHiddenWidth; ++h) {
      m.b1[h] = static_cast<Other>(b1[h]);
      m.w2[h] = static_cast<Other>(w2[h]);
    }
    m.b2 = static_cast<Other>(b2);
    return m;
  }

  bool all_finite() const {
    auto finite = [](Real v) { return std::isfinite(static_cast<double>(v)); };
    for (Real v : w1)
      if (!finite(v)) return false;
    for (std::size_t h = 0; h < kHiddenWidth; ++h)
      if (!finite(b1[h]) || !finite(w2[h])) return false;
    return finite(b2);
  }

  friend bool operator==(const MlpHead&, const MlpHead&) = default;
};

// Clamped into the open interval so downstream logs stay finite.
inline double sigmoid(double z) {
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  const double hi = std::nextafter(1.0, 0.0);
  double s;
  if (z >= 0) {
    s = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    s = e / (1.0 + e);
  }
  return std::min(std::max(s, lo), hi);
}

struct Activations {
  std::array<double, kHiddenWidth> pre{};     // W1 x + b1
  std::array<double, kHiddenWidth> hidden{};  // relu(pre)
  double logit = 0;
  double score = 0;
};

template <typename Real>
Activations forward_pass(const MlpHead<Real>& head, const FeatureVector& x) {
  if (x.dim() != head.feature_dim) {
    throw InvalidInput("feature dimension " + std::to_string(x.dim()) + " does not match model dimension " +
                       std::to_string(head.feature_dim));
  }
  Activations a;
  for (std::size_t h = 0; h < kHiddenWidth; ++h) a.pre[h] = static_cast<double>(head.b1[h]);
  for (auto [j, v] : x.nonzeros()) {
    for (std::size_t h = 0; h < kHiddenWidth; ++h) a.pre[h] += static_cast<double>(head.w1_at(h, j)) * v;
  }
  a.logit = static_cast<double>(head.b2);
  for (std::size_t h = 0; h < kHiddenWidth; ++h) {
    a.hidden[h] = a.pre[h] > 0 ? a.pre[h] : 0.0;
    a.logit += static_cast<double>(head.w2[h]) * a.hidden[h];
  }
  a.score = sigmoid(a.logit);
  return a;
}

template <typename Real>
double forward(const MlpHead<Real>& head, const FeatureVector& x) {
  return forward_pass(head, x).score;
}

inline double binary_cross_entropy(double score, int label) {
  return label == 1 ? -std::log(score) : -std::log1p(-score);
}

// Gradient of the binary cross-entropy loss. W1's gradient is an outer
// product with x, so only the columns where x is non-zero are materialized.
struct Gradients {
  std::uint32_t feature_dim = 0;
  std::vector<std::pair<std::uint32_t, std::array<double, kHiddenWidth>>> w1_columns;
  std::array<double, kHiddenWidth> b1{};
  std::array<double, kHiddenWidth> w2{};
  double b2 = 0;
  double loss = 0;

  double w1(std::size_t h, std::uint32_t j) const {
    for (const auto& [col, g] : w1_columns)
      if (col == j) return g[h];
    return 0.0;
  }
};

template <typename Real>
Gradients gradients(const MlpHead<Real>& head, const FeatureVector& x, int label) {
  if (label != 0 && label != 1) throw InvalidInput("label must be 0 or 1");
  const Activations a = forward_pass(head, x);
  Gradients g;
  g.feature_dim = head.feature_dim;
  g.loss = binary_cross_entropy(a.score, label);

  const double dz = a.score - static_cast<double>(label);
  g.b2 = dz;
  for (std::size_t h = 0; h < kHiddenWidth; ++h) {
    g.w2[h] = dz * a.hidden[h];
    // relu'(0) is taken as 0
    g.b1[h] = a.pre[h] > 0 ? dz * static_cast<double>(head.w2[h]) : 0.0;
  }
  g.w1_columns.reserve(x.nonzeros().size());
  for (auto [j, v] : x.nonzeros()) {
    std::array<double, kHiddenWidth> col{};
    for (std::size_t h = 0; h < kHiddenWidth; ++h) col[h] = g.b1[h] * v;
    g.w1_columns.emplace_back(j, col);
  }
  return g;
}

}  // namespace clickbait
