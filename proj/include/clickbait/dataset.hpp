#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "clickbait/errors.hpp"

namespace clickbait {

// One training row; label 1 = clickbait.
struct LabeledText {
  std::string text;
  int label = 0;

  friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

using Dataset = std::vector<LabeledText>;

enum class DataFormat { csv, jsonl };

namespace detail {

// Reads one RFC 4180 record. Returns nullopt at end of input.
inline std::optional<std::vector<std::string>> read_csv_record(std::istream& in, std::size_t& line) {
  if (in.peek() == std::char_traits<char>::eof()) return std::nullopt;
  std::vector<std::string> fields(1);
  bool quoted = false;
  bool field_was_quoted = false;
  const std::size_t start_line = line + 1;
  char c;
  while (in.get(c)) {
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          fields.back().push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        fields.back().push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!fields.back().empty() || field_was_quoted)
        throw InvalidTrainingSet("line " + std::to_string(start_line) + ": stray quote in CSV field");
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
      field_was_quoted = false;
    } else if (c == '\n') {
      ++line;
      if (!fields.back().empty() && fields.back().back() == '\r' && !field_was_quoted) fields.back().pop_back();
      return fields;
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) throw InvalidTrainingSet("line " + std::to_string(start_line) + ": unterminated quoted field");
  ++line;
  if (!fields.back().empty() && fields.back().back() == '\r' && !field_was_quoted) fields.back().pop_back();
  return fields;
}

inline int parse_label(std::string_view raw, std::size_t line) {
  if (raw == "0") return 0;
  if (raw == "1") return 1;
  throw InvalidTrainingSet("line " + std::to_string(line) + ": label must be 0 or 1, got '" + std::string(raw) + "'");
}

inline bool needs_quotes(std::string_view s) {
  return s.find_first_of(",\"\r\n") != std::string_view::npos || (!s.empty() && (s.front() == ' ' || s.back() == ' '));
}

}  // namespace detail

// CSV with a header naming `text` and `label` columns (any order).
inline Dataset read_csv(std::istream& in) {
  std::size_t line = 0;
  auto header = detail::read_csv_record(in, line);
  if (!header) throw InvalidTrainingSet("CSV input is empty");
  if (!header->empty() && header->front().starts_with("\xEF\xBB\xBF")) header->front().erase(0, 3);
  std::optional<std::size_t> text_col, label_col;
  for (std::size_t i = 0; i < header->size(); ++i) {
    if ((*header)[i] == "text") text_col = i;
    if ((*header)[i] == "label") label_col = i;
  }
  if (!text_col || !label_col) throw InvalidTrainingSet("CSV header must contain 'text' and 'label'");

  Dataset out;
  while (auto rec = detail::read_csv_record(in, line)) {
    if (rec->size() == 1 && rec->front().empty()) continue;  // blank line
    if (rec->size() != header->size())
      throw InvalidTrainingSet("line " + std::to_string(line) + ": expected " + std::to_string(header->size()) +
                               " fields, got " + std::to_string(rec->size()));
    out.push_back({(*rec)[*text_col], detail::parse_label((*rec)[*label_col], line)});
  }
  return out;
}

// One JSON object per line with a string `text` and a 0/1 `label`.
inline Dataset read_jsonl(std::istream& in) {
  Dataset out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (raw.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto j = nlohmann::json::parse(raw, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw InvalidTrainingSet("line " + std::to_string(line) + ": not a JSON object");
    auto text = j.find("text");
    auto label = j.find("label");
    if (text == j.end() || !text->is_string()) throw InvalidTrainingSet("line " + std::to_string(line) + ": missing string 'text'");
    if (label == j.end() || !label->is_number_integer())
      throw InvalidTrainingSet("line " + std::to_string(line) + ": missing integer 'label'");
    const auto v = label->get<long long>();
    if (v != 0 && v != 1) throw InvalidTrainingSet("line " + std::to_string(line) + ": label must be 0 or 1");
    out.push_back({text->get<std::string>(), static_cast<int>(v)});
  }
  return out;
}

inline DataFormat format_for_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".ndjson") ? DataFormat::jsonl : DataFormat::csv;
}

inline Dataset read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidTrainingSet("cannot open dataset: " + path.string());
  return format_for_path(path) == DataFormat::jsonl ? read_jsonl(in) : read_csv(in);
}

inline void write_csv_header(std::ostream& out) { out << "text,label\n"; }

inline void write_csv_row(std::ostream& out, const LabeledText& row) {
  if (detail::needs_quotes(row.text)) {
    out << '"';
    for (char c : row.text) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  } else {
    out << row.text;
  }
  out << ',' << row.label << '\n';
}

inline void write_jsonl_row(std::ostream& out, const LabeledText& row) {
  nlohmann::ordered_json j = {{"text", row.text}, {"label", row.label}};
  out << j.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace) << '\n';
}

}  // namespace clickbait
