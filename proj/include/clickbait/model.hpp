#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>

#include "clickbait/encoder.hpp"
#include "clickbait/errors.hpp"
#include "clickbait/mlp.hpp"
#include "clickbait/text.hpp"
#include "clickbait/tokenizer.hpp"
#include "clickbait/vocabulary.hpp"

namespace clickbait {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr double kDefaultThreshold = 0.5;

enum class Label { non_clickbait = 0, clickbait = 1 };

inline std::string_view to_string(Label label) {
  return label == Label::clickbait ? "clickbait" : "non_clickbait";
}

inline Label opposite(Label label) {
  return label == Label::clickbait ? Label::non_clickbait : Label::clickbait;
}

inline int as_int(Label label) { return label == Label::clickbait ? 1 : 0; }

struct Prediction {
  double score = 0;
  Label label = Label::non_clickbait;
};

// The deployable classifier: tokenizer vocabulary, hashing encoder settings
// and the trained head. Immutable once loaded; safe to share across threads.
struct ModelArtifact {
  MlpHead<float> head;
  Vocabulary vocab;
  std::uint64_t hash_seed = kDefaultHashSeed;
  double threshold = kDefaultThreshold;
  std::uint32_t format_version = kFormatVersion;

  std::uint32_t feature_dim() const noexcept { return head.feature_dim; }
  EncoderParams encoder() const { return {hash_seed, head.feature_dim}; }

  // Throws InvalidInput when an invariant does not hold.
  void validate() const {
    if (head.feature_dim == 0) throw InvalidInput("feature_dim must be positive");
    if (head.w1.size() != kHiddenWidth * static_cast<std::size_t>(head.feature_dim))
      throw InvalidInput("W1 has wrong shape");
    if (!head.all_finite()) throw InvalidInput("model weights must be finite");
    if (!(threshold > 0.0 && threshold < 1.0)) throw InvalidInput("threshold must lie strictly between 0 and 1");
  }

  friend bool operator==(const ModelArtifact&, const ModelArtifact&) = default;
};

inline ModelArtifact zero_model(Vocabulary vocab, std::uint32_t feature_dim = kDefaultFeatureDim,
                                std::uint64_t hash_seed = kDefaultHashSeed) {
  ModelArtifact m;
  m.head = MlpHead<float>::zeros(feature_dim);
  m.vocab = std::move(vocab);
  m.hash_seed = hash_seed;
  return m;
}

inline FeatureVector featurize(const ModelArtifact& model, std::string_view text) {
  return embed(tokenize(normalize(text), model.vocab), model.encoder());
}

inline Prediction classify(const ModelArtifact& model, std::string_view text) {
  Prediction p;
  p.score = forward(model.head, featurize(model, text));
  p.label = p.score >= model.threshold ? Label::clickbait : Label::non_clickbait;
  return p;
}

}  // namespace clickbait
