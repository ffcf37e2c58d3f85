#include <gtest/gtest.h>

#include <memory>
#include <string>

#include "json.hpp"

#include "clickbait/api.hpp"
#include "test_support.hpp"

using namespace clickbait;
using clickbait::testing::small_vocab;
using clickbait::testing::TempDir;
using nlohmann::json;

namespace {

class FailingStore : public RecordStore {
 public:
  void insert_request(const PredictionRecord&) override { throw StorageError("disk full"); }
  void insert_feedback(const FeedbackRecord&) override { throw StorageError("disk full"); }
  std::optional<PredictionRecord> get_request(const std::string&) override { return std::nullopt; }
  std::optional<FeedbackRecord> get_feedback(const std::string&) override { return std::nullopt; }
  std::vector<LabeledText> feedback_rows() override { return {}; }
};

struct Fixture {
  TempDir dir;
  std::shared_ptr<SqliteStore> store = std::make_shared<SqliteStore>(dir.file("api.db"));
  Millis now{0};
  std::unique_ptr<ApiService> api;

  explicit Fixture(ServiceConfig cfg = {}, bool with_model = true) {
    Clock clock{[this] { return now; }, [this] { return 1'700'000'000'000 + now.count(); }};
    api = std::make_unique<ApiService>(cfg, store, clock);
    if (with_model) api->set_model(std::make_shared<ModelArtifact>(zero_model(small_vocab(), 64)));
  }

  HttpResponse post(const std::string& path, const std::string& body, const std::string& ip = "10.0.0.1") {
    return api->handle({"POST", path, body, ip, {}});
  }
};

json body_of(const HttpResponse& r) { return json::parse(r.body); }

}  // namespace

TEST(Predict, HappyPath) {
  Fixture f;
  const HttpResponse r = f.post("/predict", R"({"text":"Wah! Kamu kaget"})");
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(r.header("Content-Type"), "application/json");
  const json b = body_of(r);
  EXPECT_TRUE(is_uuid_v4(b["id"].get<std::string>()));
  EXPECT_EQ(b["prediction"].get<double>(), 0.5);
  EXPECT_EQ(b["label"], "clickbait");

  const auto rec = f.store->get_request(b["id"].get<std::string>());
  ASSERT_TRUE(rec.has_value());
  EXPECT_EQ(rec->text, "Wah! Kamu kaget");
  EXPECT_EQ(rec->ip, "10.0.0.1");
  EXPECT_EQ(rec->created_at_ms, 1'700'000'000'000);
}

TEST(Predict, BadBodies) {
  Fixture f;
  EXPECT_EQ(f.post("/predict", "{}").status, 400);
  EXPECT_EQ(f.post("/predict", "{not json").status, 400);
  EXPECT_EQ(f.post("/predict", "").status, 400);
  EXPECT_EQ(f.post("/predict", "[1]").status, 400);
  EXPECT_EQ(f.post("/predict", R"({"text":5})").status, 400);
  EXPECT_EQ(body_of(f.post("/predict", "{oops")).at("error"), "invalid_json");
}

TEST(Predict, TextLengthLimits) {
  Fixture f;
  EXPECT_EQ(f.post("/predict", R"({"text":"   \t "})").status, 422);
  const std::string long_text(501, 'a');
  const HttpResponse r = f.post("/predict", json{{"text", long_text}}.dump());
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(body_of(r)["error"], "text_too_long");
  // 500 two-byte code points are still within the limit
  std::string accented;
  for (int i = 0; i < 500; ++i) accented += "\xC3\xA9";
  EXPECT_EQ(f.post("/predict", json{{"text", accented}}.dump()).status, 200);
}

TEST(Predict, RejectedRequestsDoNotConsumeQuota) {
  Fixture f;
  f.post("/predict", "{}");
  f.post("/predict", json{{"text", std::string(900, 'a')}}.dump());
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 200);
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 200);
}

TEST(Predict, ThirdRequestInWindowIs429) {
  Fixture f;
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 200);
  f.now = Millis(10'000);
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 200);
  f.now = Millis(30'000);
  const HttpResponse r = f.post("/predict", R"({"text":"a"})");
  EXPECT_EQ(r.status, 429);
  EXPECT_EQ(r.header("Retry-After"), "30");
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})", "10.0.0.2").status, 200);
  f.now = Millis(61'000);
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 200);
}

TEST(Predict, PreflightIsExempt) {
  ServiceConfig cfg;
  cfg.allowed_origins = {"https://app.example"};
  Fixture f(cfg);
  for (int i = 0; i < 10; ++i) {
    const HttpResponse r =
        f.api->handle({"OPTIONS", "/predict", "", "10.0.0.1", {{"Origin", "https://app.example"}}});
    EXPECT_EQ(r.status, 204);
  }
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 200);
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 200);
}

TEST(Predict, NoModelIs503) {
  Fixture f({}, false);
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})").status, 503);
}

TEST(Predict, StorageFailureIs500) {
  auto api = ApiService({}, std::make_shared<FailingStore>());
  api.set_model(std::make_shared<ModelArtifact>(zero_model(small_vocab(), 8)));
  const HttpResponse r = api.handle({"POST", "/predict", R"({"text":"a"})", "10.0.0.1", {}});
  EXPECT_EQ(r.status, 500);
  EXPECT_EQ(body_of(r)["error"], "storage_error");
}

TEST(Predict, TrustProxyUsesForwardedFor) {
  ServiceConfig cfg;
  cfg.trust_proxy = true;
  Fixture f(cfg);
  auto req = [&](const std::string& fwd) {
    return f.api->handle({"POST", "/predict", R"({"text":"a"})", "10.0.0.1", {{"X-Forwarded-For", fwd}}});
  };
  EXPECT_EQ(req("1.1.1.1, 10.0.0.1").status, 200);
  EXPECT_EQ(req("1.1.1.1").status, 200);
  EXPECT_EQ(req("1.1.1.1").status, 429);
  EXPECT_EQ(req("2.2.2.2").status, 200);

  Fixture untrusted;
  auto req2 = [&](const std::string& fwd) {
    return untrusted.api->handle({"POST", "/predict", R"({"text":"a"})", "10.0.0.1", {{"X-Forwarded-For", fwd}}});
  };
  EXPECT_EQ(req2("1.1.1.1").status, 200);
  EXPECT_EQ(req2("2.2.2.2").status, 200);
  EXPECT_EQ(req2("3.3.3.3").status, 429);
}

TEST(Predict, UnknownClientAddressIs400) {
  Fixture f;
  EXPECT_EQ(f.post("/predict", R"({"text":"a"})", "").status, 400);
}

TEST(Cors, AllowedOriginIsEchoed) {
  ServiceConfig cfg;
  cfg.allowed_origins = {"https://app.example"};
  Fixture f(cfg);
  HttpRequest pre{"OPTIONS", "/predict", "", "10.0.0.1", {{"Origin", "https://app.example"}}};
  const HttpResponse r = f.api->handle(pre);
  EXPECT_EQ(r.header("Access-Control-Allow-Origin"), "https://app.example");
  EXPECT_EQ(r.header("Access-Control-Allow-Methods"), "POST, OPTIONS");
  EXPECT_EQ(r.header("Access-Control-Allow-Headers"), "Content-Type");

  HttpRequest post{"POST", "/predict", R"({"text":"a"})", "10.0.0.1", {{"origin", "https://app.example"}}};
  EXPECT_EQ(f.api->handle(post).header("Access-Control-Allow-Origin"), "https://app.example");

  pre.headers = {{"Origin", "https://evil.example"}};
  const HttpResponse denied = f.api->handle(pre);
  EXPECT_EQ(denied.status, 204);
  EXPECT_FALSE(denied.has_header("Access-Control-Allow-Origin"));
  EXPECT_FALSE(denied.has_header("Access-Control-Allow-Methods"));
}

TEST(Cors, UnconfiguredServiceSendsNoCorsHeaders) {
  Fixture f;
  const HttpResponse r =
      f.api->handle({"OPTIONS", "/predict", "", "10.0.0.1", {{"Origin", "https://app.example"}}});
  EXPECT_FALSE(r.has_header("Access-Control-Allow-Origin"));
}

TEST(Cors, WildcardEchoesAnyOrigin) {
  ServiceConfig cfg;
  cfg.allowed_origins = {"*"};
  Fixture f(cfg);
  const HttpResponse r = f.api->handle({"GET", "/health", "", "10.0.0.1", {{"Origin", "http://x.test"}}});
  EXPECT_EQ(r.header("Access-Control-Allow-Origin"), "http://x.test");
}

TEST(Health, ReportsModelState) {
  Fixture with;
  EXPECT_EQ(body_of(with.api->handle({"GET", "/health", "", "", {}})), (json{{"status", "ok"}, {"model_loaded", true}}));
  Fixture without({}, false);
  const HttpResponse r = without.api->handle({"GET", "/health", "", "", {}});
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(body_of(r)["model_loaded"], false);
}

TEST(Routing, UnknownPathAndWrongMethod) {
  Fixture f;
  EXPECT_EQ(f.api->handle({"GET", "/nope", "", "10.0.0.1", {}}).status, 404);
  const HttpResponse r = f.api->handle({"GET", "/predict", "", "10.0.0.1", {}});
  EXPECT_EQ(r.status, 405);
  EXPECT_EQ(r.header("Allow"), "POST, OPTIONS");
  EXPECT_EQ(f.api->handle({"POST", "/health", "", "10.0.0.1", {}}).status, 405);
}

TEST(Feedback, RecordedOnceForKnownPrediction) {
  Fixture f;
  const std::string id = body_of(f.post("/predict", R"({"text":"a"})"))["id"];
  const HttpResponse ok = f.post("/feedback", json{{"id", id}, {"correct", false}}.dump());
  ASSERT_EQ(ok.status, 200);
  EXPECT_EQ(body_of(ok), (json{{"id", id}, {"status", "recorded"}}));
  EXPECT_EQ(f.post("/feedback", json{{"id", id}, {"correct", true}}.dump()).status, 409);
  EXPECT_EQ(f.store->get_feedback(id)->correct, false);
}

TEST(Feedback, Errors) {
  Fixture f;
  EXPECT_EQ(f.post("/feedback", R"({"id":"00000000-0000-4000-8000-000000000000","correct":true})").status, 404);
  EXPECT_EQ(f.post("/feedback", R"({"id":"nope","correct":true})").status, 400);
  EXPECT_EQ(f.post("/feedback", R"({"id":"00000000-0000-4000-8000-000000000000","correct":"yes"})").status, 400);
  EXPECT_EQ(f.post("/feedback", R"({"correct":true})").status, 400);
  EXPECT_EQ(f.post("/feedback", "garbage").status, 400);

  auto failing = ApiService({}, std::make_shared<FailingStore>());
  const HttpResponse r = failing.handle(
      {"POST", "/feedback", R"({"id":"00000000-0000-4000-8000-000000000000","correct":true})", "10.0.0.1", {}});
  EXPECT_EQ(r.status, 500);
}

TEST(Feedback, NotRateLimited) {
  Fixture f;
  for (int i = 0; i < 10; ++i)
    EXPECT_EQ(f.post("/feedback", R"({"id":"00000000-0000-4000-8000-000000000000","correct":true})").status, 404);
}
