#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "clickbait/text.hpp"
#include "clickbait/vocabulary.hpp"

namespace clickbait {

inline constexpr std::size_t kDefaultMaxSeqLen = 128;

struct TokenSequence {
  std::vector<TokenId> ids;
  std::vector<std::string> surface;

  std::size_t size() const noexcept { return ids.size(); }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

namespace detail {

// Greedy longest-prefix split of one word. Candidate ends are code point
// boundaries no further than the longest vocabulary entry allows.
inline bool split_word(std::string_view word, const Vocabulary& vocab, std::vector<TokenId>& out) {
  const auto bounds = codepoint_boundaries(word);
  const std::size_t prefix_len = Vocabulary::kContinuationPrefix.size();
  const std::size_t before = out.size();

  std::size_t start_idx = 0;
  const std::size_t last = bounds.size() - 1;
  std::string candidate;
  while (start_idx < last) {
    const std::size_t start = bounds[start_idx];
    const std::size_t budget = vocab.max_token_bytes() - (start_idx > 0 ? std::min(prefix_len, vocab.max_token_bytes()) : 0);
    bool matched = false;
    for (std::size_t end_idx = last; end_idx > start_idx; --end_idx) {
      const std::size_t len = bounds[end_idx] - start;
      if (len > budget) continue;
      candidate.clear();
      if (start_idx > 0) candidate.append(Vocabulary::kContinuationPrefix);
      candidate.append(word.substr(start, len));
      if (auto id = vocab.find(candidate); id && !is_special(*id)) {
        out.push_back(*id);
        start_idx = end_idx;
        matched = true;
        break;
      }
    }
    if (!matched) {
      out.resize(before);
      return false;
    }
  }
  return true;
}

}  // namespace detail

// Expects normalized text. Overflow content tokens past max_seq_len are
// dropped; the closing [SEP] is always kept.
inline TokenSequence tokenize(std::string_view text, const Vocabulary& vocab,
                              std::size_t max_seq_len = kDefaultMaxSeqLen) {
  if (max_seq_len < 2) throw InvalidInput("max_seq_len must be at least 2");
  const std::size_t content_limit = max_seq_len - 2;

  std::vector<TokenId> content;
  for (std::string_view word : split_whitespace(text)) {
    if (!detail::split_word(word, vocab, content)) content.push_back(special::kUnk);
    if (content.size() >= content_limit) break;
  }
  if (content.size() > content_limit) content.resize(content_limit);

  TokenSequence seq;
  seq.ids.reserve(content.size() + 2);
  seq.ids.push_back(special::kCls);
  seq.ids.insert(seq.ids.end(), content.begin(), content.end());
  seq.ids.push_back(special::kSep);
  seq.surface.reserve(seq.ids.size());
  for (TokenId id : seq.ids) seq.surface.push_back(vocab.token(id));
  return seq;
}

}  // namespace clickbait
