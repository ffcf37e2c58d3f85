#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "clickbait/dataset.hpp"
#include "clickbait/errors.hpp"
#include "clickbait/model.hpp"

namespace clickbait {

struct TrainOptions {
  int epochs = 40;
  double learning_rate = 0.5;
  std::size_t batch_size = 8;
  std::uint64_t seed = 42;
};

// Settings that shape the artifact but are not learned.
struct ModelSettings {
  EncoderParams encoder{};
  double threshold = kDefaultThreshold;
};

// mt19937_64 output is fixed by the standard; the distributions are not,
// so draws are mapped by hand to keep runs reproducible across toolchains.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  // Uniform in [0, n), n > 0.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do v = engine_();
    while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(i)]);
  }

 private:
  std::mt19937_64 engine_;
};

struct EncodedExample {
  FeatureVector x;
  int label = 0;
};

inline std::vector<EncodedExample> encode_dataset(const Dataset& data, const Vocabulary& vocab,
                                                  const ModelSettings& settings) {
  std::vector<EncodedExample> out;
  out.reserve(data.size());
  for (const auto& row : data) {
    if (row.label != 0 && row.label != 1) throw InvalidTrainingSet("label must be 0 or 1");
    out.push_back({embed(tokenize(normalize(row.text), vocab), settings.encoder), row.label});
  }
  return out;
}

inline void check_training_set(const Dataset& data) {
  if (data.empty()) throw InvalidTrainingSet("training set is empty");
  bool pos = false, neg = false;
  for (const auto& row : data) (row.label == 1 ? pos : neg) = true;
  if (!pos || !neg) throw InvalidTrainingSet("training set must contain both classes");
}

inline double mean_loss(const MlpHead<float>& head, const std::vector<EncodedExample>& examples) {
  double total = 0;
  for (const auto& e : examples) total += binary_cross_entropy(forward(head, e.x), e.label);
  return examples.empty() ? 0.0 : total / static_cast<double>(examples.size());
}

inline double mean_loss(const ModelArtifact& model, const Dataset& data) {
  ModelSettings settings;
  settings.encoder = model.encoder();
  return mean_loss(model.head, encode_dataset(data, model.vocab, settings));
}

// Mini-batch gradient descent on mean binary cross-entropy. W1 and w2 start
// uniform in [-0.05, 0.05], biases at zero. Deterministic for a fixed data
// order and seed.
inline ModelArtifact train(const Dataset& data, const Vocabulary& vocab, const TrainOptions& hp,
                           const ModelSettings& settings = {}) {
  check_training_set(data);
  if (hp.epochs < 1) throw InvalidInput("epochs must be at least 1");
  if (hp.batch_size < 1) throw InvalidInput("batch_size must be at least 1");
  if (!(hp.learning_rate > 0) || !std::isfinite(hp.learning_rate)) throw InvalidInput("learning_rate must be positive");

  ModelArtifact model = zero_model(vocab, settings.encoder.feature_dim, settings.encoder.hash_seed);
  model.threshold = settings.threshold;
  model.validate();

  SeededRng rng(hp.seed);
  for (auto& w : model.head.w1) w = static_cast<float>(rng.uniform(-0.05, 0.05));
  for (auto& w : model.head.w2) w = static_cast<float>(rng.uniform(-0.05, 0.05));

  const auto examples = encode_dataset(data, vocab, settings);
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  auto& head = model.head;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += hp.batch_size) {
      const std::size_t end = std::min(order.size(), start + hp.batch_size);
      std::map<std::uint32_t, std::array<double, kHiddenWidth>> w1_sum;
      std::array<double, kHiddenWidth> b1_sum{}, w2_sum{};
      double b2_sum = 0;
      for (std::size_t k = start; k < end; ++k) {
        const auto& ex = examples[order[k]];
        const Gradients g = gradients(head, ex.x, ex.label);
        for (const auto& [col, gc] : g.w1_columns) {
          auto& acc = w1_sum[col];
          for (std::size_t h = 0; h < kHiddenWidth; ++h) acc[h] += gc[h];
        }
        for (std::size_t h = 0; h < kHiddenWidth; ++h) {
          b1_sum[h] += g.b1[h];
          w2_sum[h] += g.w2[h];
        }
        b2_sum += g.b2;
      }
      const double step = hp.learning_rate / static_cast<double>(end - start);
      auto apply = [step](float& w, double grad) { w = static_cast<float>(static_cast<double>(w) - step * grad); };
      for (const auto& [col, acc] : w1_sum)
        for (std::size_t h = 0; h < kHiddenWidth; ++h) apply(head.w1_at(h, col), acc[h]);
      for (std::size_t h = 0; h < kHiddenWidth; ++h) {
        apply(head.b1[h], b1_sum[h]);
        apply(head.w2[h], w2_sum[h]);
      }
      apply(head.b2, b2_sum);
    }
  }
  return model;
}

}  // namespace clickbait
