#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "clickbait/errors.hpp"

namespace clickbait {

using TokenId = std::uint32_t;

namespace special {
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kCls = 2;
inline constexpr TokenId kSep = 3;
inline constexpr std::array<std::string_view, 4> kNames = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
inline constexpr std::size_t kCount = kNames.size();
}  // namespace special

inline bool is_special(TokenId id) { return id < special::kCount; }

// Dense token table. Ids 0..3 are always [PAD], [UNK], [CLS], [SEP].
class Vocabulary {
 public:
  static constexpr std::string_view kContinuationPrefix = "##";

  Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

  // `content` lists the non-special tokens in id order starting at id 4.
  explicit Vocabulary(std::vector<std::string> content) {
    tokens_.reserve(special::kCount + content.size());
    for (auto name : special::kNames) add(std::string(name));
    for (auto& t : content) add(std::move(t));
  }

  // Full token list in id order; the first four must be the special tokens.
  static Vocabulary from_tokens(const std::vector<std::string>& tokens) {
    if (tokens.size() < special::kCount) {
      throw InvalidInput("vocabulary must start with [PAD], [UNK], [CLS], [SEP]");
    }
    for (std::size_t i = 0; i < special::kCount; ++i) {
      if (tokens[i] != special::kNames[i]) {
        throw InvalidInput("vocabulary entry " + std::to_string(i) + " must be " +
                           std::string(special::kNames[i]) + ", found '" + tokens[i] + "'");
      }
    }
    return Vocabulary(std::vector<std::string>(tokens.begin() + special::kCount, tokens.end()));
  }

  // One token per line, line number = id. A trailing '\r' is stripped.
  static Vocabulary read(std::istream& in) {
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      tokens.push_back(line);
    }
    return from_tokens(tokens);
  }

  static Vocabulary read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open vocabulary file: " + path);
    return read(in);
  }

  void write(std::ostream& out) const {
    for (const auto& t : tokens_) out << t << '\n';
  }

  std::size_t size() const noexcept { return tokens_.size(); }

  const std::string& token(TokenId id) const { return tokens_.at(id); }

  std::optional<TokenId> find(const std::string& token) const {
    auto it = ids_.find(token);
    if (it == ids_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& token) const { return ids_.count(token) != 0; }

  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  // Byte length of the longest entry; bounds the tokenizer's candidate window.
  std::size_t max_token_bytes() const noexcept { return max_bytes_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  void add(std::string token) {
    if (token.empty()) throw InvalidInput("vocabulary entry " + std::to_string(tokens_.size()) + " is empty");
    if (token.size() > 0xFFFF'FFFFu) throw InvalidInput("vocabulary entry too long");
    const auto id = static_cast<TokenId>(tokens_.size());
    if (!ids_.emplace(token, id).second) throw InvalidInput("duplicate vocabulary entry '" + token + "'");
    if (token.size() > max_bytes_) max_bytes_ = token.size();
    tokens_.push_back(std::move(token));
  }

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
  std::size_t max_bytes_ = 0;
};

}  // namespace clickbait
