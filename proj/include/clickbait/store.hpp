#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <sqlite3.h>

#include "clickbait/dataset.hpp"
#include "clickbait/errors.hpp"
#include "clickbait/model.hpp"
#include "clickbait/uuid.hpp"

namespace clickbait {

struct PredictionRecord {
  std::string uuid;
  std::string text;
  double score = 0;
  Label label = Label::non_clickbait;
  std::string ip;
  std::int64_t created_at_ms = 0;  // UTC milliseconds since the Unix epoch

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

struct FeedbackRecord {
  std::string prediction_uuid;
  bool correct = false;
  std::int64_t created_at_ms = 0;

  friend bool operator==(const FeedbackRecord&, const FeedbackRecord&) = default;
};

inline std::int64_t utc_now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

// Retraining row for a prediction that received feedback: the model's label
// when the verdict was "correct", the other label otherwise.
inline LabeledText derive_training_row(const PredictionRecord& p, const FeedbackRecord& f) {
  return {p.text, as_int(f.correct ? p.label : opposite(p.label))};
}

// Storage interface for prediction and feedback records.
class RecordStore {
 public:
  virtual ~RecordStore() = default;

  // Throws ConflictError on a duplicate uuid, InvalidInput on a bad record.
  virtual void insert_request(const PredictionRecord& rec) = 0;
  // Throws NotFoundError for an unknown prediction, ConflictError for a second verdict.
  virtual void insert_feedback(const FeedbackRecord& fb) = 0;
  virtual std::optional<PredictionRecord> get_request(const std::string& uuid) = 0;
  virtual std::optional<FeedbackRecord> get_feedback(const std::string& uuid) = 0;
  // Derived rows for every prediction with feedback, ordered by the
  // prediction's created_at and then uuid.
  virtual std::vector<LabeledText> feedback_rows() = 0;
  virtual void flush() {}

  std::size_t export_training_data(std::ostream& out, DataFormat format) {
    const auto rows = feedback_rows();
    if (format == DataFormat::csv) write_csv_header(out);
    for (const auto& row : rows) {
      if (format == DataFormat::csv) write_csv_row(out, row);
      else write_jsonl_row(out, row);
    }
    out.flush();
    if (!out) throw StorageError("failed to write export");
    return rows.size();
  }

 protected:
  static void check_record(const PredictionRecord& rec) {
    if (!is_uuid(rec.uuid)) throw InvalidInput("prediction uuid is not a UUID: '" + rec.uuid + "'");
    if (!(rec.score >= 0.0 && rec.score <= 1.0)) throw InvalidInput("prediction score must lie in [0, 1]");
  }
};

namespace detail {

struct SqliteCloser {
  void operator()(sqlite3* db) const { sqlite3_close_v2(db); }
};
struct StmtFinalizer {
  void operator()(sqlite3_stmt* s) const { sqlite3_finalize(s); }
};
using StmtPtr = std::unique_ptr<sqlite3_stmt, StmtFinalizer>;

}  // namespace detail

// File-backed store on SQLite. Every write is committed (and synced) before
// the call returns. All access goes through one connection under a mutex.
class SqliteStore final : public RecordStore {
 public:
  enum class OpenMode { create_if_missing, existing_only };

  explicit SqliteStore(const std::filesystem::path& path, OpenMode mode = OpenMode::create_if_missing) {
    int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_FULLMUTEX;
    if (mode == OpenMode::create_if_missing) flags |= SQLITE_OPEN_CREATE;
    sqlite3* raw = nullptr;
    const int rc = sqlite3_open_v2(path.string().c_str(), &raw, flags, nullptr);
    db_.reset(raw);
    if (rc != SQLITE_OK) {
      throw StorageError("cannot open store " + path.string() + ": " +
                         (raw ? sqlite3_errmsg(raw) : sqlite3_errstr(rc)));
    }
    sqlite3_busy_timeout(db_.get(), 5000);
    exec("PRAGMA foreign_keys = ON");
    exec("PRAGMA journal_mode = WAL");
    exec("PRAGMA synchronous = FULL");
    exec(R"sql(
      CREATE TABLE IF NOT EXISTS predictions (
        uuid       TEXT PRIMARY KEY,
        text       TEXT NOT NULL,
        score      REAL NOT NULL CHECK (score >= 0 AND score <= 1),
        label      TEXT NOT NULL CHECK (label IN ('clickbait', 'non_clickbait')),
        ip         TEXT NOT NULL,
        created_at INTEGER NOT NULL
      ))sql");
    exec(R"sql(
      CREATE TABLE IF NOT EXISTS feedback (
        prediction_uuid TEXT PRIMARY KEY REFERENCES predictions(uuid),
        correct         INTEGER NOT NULL CHECK (correct IN (0, 1)),
        created_at      INTEGER NOT NULL
      ))sql");
  }

  void insert_request(const PredictionRecord& rec) override {
    check_record(rec);
    std::lock_guard lock(mu_);
    auto st = prepare("INSERT INTO predictions (uuid, text, score, label, ip, created_at) VALUES (?, ?, ?, ?, ?, ?)");
    bind_text(st, 1, rec.uuid);
    bind_text(st, 2, rec.text);
    sqlite3_bind_double(st.get(), 3, rec.score);
    bind_text(st, 4, to_string(rec.label));
    bind_text(st, 5, rec.ip);
    sqlite3_bind_int64(st.get(), 6, rec.created_at_ms);
    const int rc = sqlite3_step(st.get());
    if (rc == SQLITE_CONSTRAINT) {
      const int ext = sqlite3_extended_errcode(db_.get());
      if (ext == SQLITE_CONSTRAINT_PRIMARYKEY || ext == SQLITE_CONSTRAINT_UNIQUE)
        throw ConflictError("prediction " + rec.uuid + " already stored");
    }
    if (rc != SQLITE_DONE) fail("insert prediction");
  }

  void insert_feedback(const FeedbackRecord& fb) override {
    std::lock_guard lock(mu_);
    if (!exists_locked(fb.prediction_uuid)) throw NotFoundError("no prediction with id " + fb.prediction_uuid);
    auto st = prepare("INSERT INTO feedback (prediction_uuid, correct, created_at) VALUES (?, ?, ?)");
    bind_text(st, 1, fb.prediction_uuid);
    sqlite3_bind_int(st.get(), 2, fb.correct ? 1 : 0);
    sqlite3_bind_int64(st.get(), 3, fb.created_at_ms);
    const int rc = sqlite3_step(st.get());
    if (rc == SQLITE_CONSTRAINT) {
      const int ext = sqlite3_extended_errcode(db_.get());
      if (ext == SQLITE_CONSTRAINT_PRIMARYKEY || ext == SQLITE_CONSTRAINT_UNIQUE)
        throw ConflictError("feedback for " + fb.prediction_uuid + " already recorded");
      if (ext == SQLITE_CONSTRAINT_FOREIGNKEY) throw NotFoundError("no prediction with id " + fb.prediction_uuid);
    }
    if (rc != SQLITE_DONE) fail("insert feedback");
  }

  std::optional<PredictionRecord> get_request(const std::string& uuid) override {
    std::lock_guard lock(mu_);
    auto st = prepare("SELECT uuid, text, score, label, ip, created_at FROM predictions WHERE uuid = ?");
    bind_text(st, 1, uuid);
    const int rc = sqlite3_step(st.get());
    if (rc == SQLITE_DONE) return std::nullopt;
    if (rc != SQLITE_ROW) fail("read prediction");
    return read_prediction(st.get(), 0);
  }

  std::optional<FeedbackRecord> get_feedback(const std::string& uuid) override {
    std::lock_guard lock(mu_);
    auto st = prepare("SELECT prediction_uuid, correct, created_at FROM feedback WHERE prediction_uuid = ?");
    bind_text(st, 1, uuid);
    const int rc = sqlite3_step(st.get());
    if (rc == SQLITE_DONE) return std::nullopt;
    if (rc != SQLITE_ROW) fail("read feedback");
    return FeedbackRecord{column_text(st.get(), 0), sqlite3_column_int(st.get(), 1) != 0,
                          sqlite3_column_int64(st.get(), 2)};
  }

  std::vector<LabeledText> feedback_rows() override {
    std::lock_guard lock(mu_);
    auto st = prepare(R"sql(
      SELECT p.uuid, p.text, p.score, p.label, p.ip, p.created_at, f.correct, f.created_at
      FROM predictions p JOIN feedback f ON f.prediction_uuid = p.uuid
      ORDER BY p.created_at, p.uuid)sql");
    std::vector<LabeledText> rows;
    int rc;
    while ((rc = sqlite3_step(st.get())) == SQLITE_ROW) {
      const PredictionRecord p = read_prediction(st.get(), 0);
      const FeedbackRecord f{p.uuid, sqlite3_column_int(st.get(), 6) != 0, sqlite3_column_int64(st.get(), 7)};
      rows.push_back(derive_training_row(p, f));
    }
    if (rc != SQLITE_DONE) fail("export feedback");
    return rows;
  }

  void flush() override {
    std::lock_guard lock(mu_);
    sqlite3_wal_checkpoint_v2(db_.get(), nullptr, SQLITE_CHECKPOINT_FULL, nullptr, nullptr);
  }

 private:
  void exec(const char* sql) {
    char* msg = nullptr;
    if (sqlite3_exec(db_.get(), sql, nullptr, nullptr, &msg) != SQLITE_OK) {
      std::string err = msg ? msg : "unknown error";
      sqlite3_free(msg);
      throw StorageError("store setup failed: " + err);
    }
  }

  detail::StmtPtr prepare(const char* sql) {
    sqlite3_stmt* st = nullptr;
    if (sqlite3_prepare_v2(db_.get(), sql, -1, &st, nullptr) != SQLITE_OK) fail("prepare statement");
    return detail::StmtPtr(st);
  }

  static void bind_text(detail::StmtPtr& st, int idx, std::string_view s) {
    sqlite3_bind_text(st.get(), idx, s.data(), static_cast<int>(s.size()), SQLITE_TRANSIENT);
  }

  static std::string column_text(sqlite3_stmt* st, int col) {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(st, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(st, col))) : std::string();
  }

  static PredictionRecord read_prediction(sqlite3_stmt* st, int first) {
    PredictionRecord r;
    r.uuid = column_text(st, first);
    r.text = column_text(st, first + 1);
    r.score = sqlite3_column_double(st, first + 2);
    r.label = column_text(st, first + 3) == "clickbait" ? Label::clickbait : Label::non_clickbait;
    r.ip = column_text(st, first + 4);
    r.created_at_ms = sqlite3_column_int64(st, first + 5);
    return r;
  }

  bool exists_locked(const std::string& uuid) {
    auto st = prepare("SELECT 1 FROM predictions WHERE uuid = ?");
    bind_text(st, 1, uuid);
    const int rc = sqlite3_step(st.get());
    if (rc == SQLITE_ROW) return true;
    if (rc != SQLITE_DONE) fail("lookup prediction");
    return false;
  }

  [[noreturn]] void fail(const char* what) {
    throw StorageError(std::string(what) + ": " + sqlite3_errmsg(db_.get()));
  }

  std::mutex mu_;
  std::unique_ptr<sqlite3, detail::SqliteCloser> db_;
};

}  // namespace clickbait
