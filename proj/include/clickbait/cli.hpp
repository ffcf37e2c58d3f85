#pragma once

#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "clickbait/api.hpp"
#include "clickbait/dataset.hpp"
#include "clickbait/metrics.hpp"
#include "clickbait/serialization.hpp"
#include "clickbait/server.hpp"
#include "clickbait/store.hpp"
#include "clickbait/trainer.hpp"

#ifndef CLICKBAIT_DATA_DIR
#define CLICKBAIT_DATA_DIR "data"
#endif

namespace clickbait::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kRuntime = 2 };

inline constexpr const char* kDefaultVocabPath = CLICKBAIT_DATA_DIR "/vocab.txt";

struct Config {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string model_path = "model.cbm";
  std::string store_path = "clickbait.db";
  std::vector<std::string> allowed_origins;
  std::uint32_t rate_capacity = 2;
  std::uint32_t rate_window_seconds = 60;
  std::size_t max_text_len = 500;
  bool trust_proxy = false;

  ServiceConfig service() const {
    ServiceConfig s;
    s.allowed_origins = allowed_origins;
    s.rate_capacity = rate_capacity;
    s.rate_window = std::chrono::seconds(rate_window_seconds);
    s.max_text_len = max_text_len;
    s.trust_proxy = trust_proxy;
    return s;
  }
};

// Precedence for every field: flag, then CBD_* environment variable, then default.
inline void bind_server_options(CLI::App& cmd, Config& cfg) {
  cmd.add_option("--host", cfg.host, "Listen address")->envname("CBD_HOST")->capture_default_str();
  cmd.add_option("--port", cfg.port, "Listen port")
      ->envname("CBD_PORT")
      ->check(CLI::Range(1, 65535))
      ->capture_default_str();
  cmd.add_option("--model", cfg.model_path, "CBM1 model file")->envname("CBD_MODEL_PATH")->capture_default_str();
  cmd.add_option("--store", cfg.store_path, "Prediction/feedback store file")
      ->envname("CBD_STORE_PATH")
      ->capture_default_str();
  cmd.add_option("--allowed-origin", cfg.allowed_origins, "CORS origin allowed to call the API (repeatable, '*' for any)")
      ->envname("CBD_ALLOWED_ORIGINS")
      ->delimiter(',');
  cmd.add_option("--rate-capacity", cfg.rate_capacity, "Requests allowed per client per window")
      ->envname("CBD_RATE_CAPACITY")
      ->check(CLI::Range(1u, 1000000u))
      ->capture_default_str();
  cmd.add_option("--rate-window", cfg.rate_window_seconds, "Rate-limit window in seconds")
      ->envname("CBD_RATE_WINDOW_SECONDS")
      ->check(CLI::Range(1u, 86400u))
      ->capture_default_str();
  cmd.add_option("--max-text-len", cfg.max_text_len, "Maximum headline length in characters")
      ->envname("CBD_MAX_TEXT_LEN")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_flag("--trust-proxy,!--no-trust-proxy", cfg.trust_proxy,
               "Key clients by the first X-Forwarded-For entry")
      ->envname("CBD_TRUST_PROXY");
}

// CLI11 silently skips environment values that fail validation; treat them
// as errors instead of falling back to the default.
inline void reject_ignored_env(const CLI::App& cmd) {
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_envname();
    if (name.empty() || opt->count() > 0) continue;
    const char* value = std::getenv(name.c_str());
    if (value && *value) throw CLI::ValidationError(name, "invalid value '" + std::string(value) + "'");
  }
}

// Parses `serve` options only; exposed for configuration tests.
inline Config parse_server_config(std::vector<std::string> args) {
  CLI::App app{"config"};
  Config cfg;
  bind_server_options(app, cfg);
  std::reverse(args.begin(), args.end());
  app.parse(args);
  reject_ignored_env(app);
  return cfg;
}

namespace detail {

inline int run_serve(const Config& cfg, std::ostream& out, std::ostream& err) {
  std::shared_ptr<const ModelArtifact> model;
  std::shared_ptr<RecordStore> store;
  try {
    model = std::make_shared<const ModelArtifact>(load_model_file(cfg.model_path));
    store = std::make_shared<SqliteStore>(cfg.store_path);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }

  ApiService service(cfg.service(), store);
  service.set_model(model);
  HttpServer server(service);

  // Block termination signals in every thread; a dedicated thread waits for them.
  sigset_t signals, previous;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  if (!server.bind(cfg.host, cfg.port)) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    err << "error: cannot listen on " << cfg.host << ':' << cfg.port << '\n';
    return kRuntime;
  }

  std::atomic<bool> shutting_down{false};
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    shutting_down = true;
    server.stop();
  });

  out << "listening on " << cfg.host << ':' << server.port() << std::endl;
  const bool ok = server.listen();
  if (!shutting_down) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);

  store->flush();
  if (!ok && !shutting_down) {
    err << "error: server stopped unexpectedly\n";
    return kRuntime;
  }
  out << "shutdown complete" << std::endl;
  return kSuccess;
}

inline int run_predict(const std::string& model_path, const std::string& text, std::ostream& out, std::ostream& err) {
  if (normalize(text).empty()) {
    err << "error: text is empty\n";
    return kUsage;
  }
  try {
    const ModelArtifact model = load_model_file(model_path);
    const Prediction p = classify(model, text);
    out << nlohmann::json{{"prediction", p.score}, {"label", std::string(to_string(p.label))}}.dump() << '\n';
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

struct TrainArgs {
  std::string data_path;
  std::string out_path = "model.cbm";
  std::string vocab_path = kDefaultVocabPath;
  TrainOptions hp;
  ModelSettings settings;
};

inline void bind_train_options(CLI::App& cmd, TrainArgs& a) {
  cmd.add_option("--data", a.data_path, "Training data (.csv with text,label or .jsonl)")->required();
  cmd.add_option("--vocab", a.vocab_path, "Vocabulary file, one token per line")->capture_default_str();
  cmd.add_option("--epochs", a.hp.epochs, "Training epochs")->check(CLI::Range(1, 100000))->capture_default_str();
  cmd.add_option("--lr", a.hp.learning_rate, "Learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  cmd.add_option("--batch", a.hp.batch_size, "Mini-batch size")->check(CLI::Range(1, 1 << 20))->capture_default_str();
  cmd.add_option("--seed", a.hp.seed, "Random seed")->capture_default_str();
  cmd.add_option("--feature-dim", a.settings.encoder.feature_dim, "Hashed feature dimension")
      ->check(CLI::Range(1u, 1u << 24))
      ->capture_default_str();
  cmd.add_option("--hash-seed", a.settings.encoder.hash_seed, "Feature hashing seed")->capture_default_str();
  cmd.add_option("--threshold", a.settings.threshold, "Decision threshold in (0,1)")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
}

inline int run_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  if (!(a.settings.threshold > 0.0 && a.settings.threshold < 1.0)) {
    err << "error: threshold must lie strictly between 0 and 1\n";
    return kUsage;
  }
  try {
    const Dataset data = read_dataset_file(a.data_path);
    const Vocabulary vocab = Vocabulary::read_file(a.vocab_path);
    const ModelArtifact model = train(data, vocab, a.hp, a.settings);
    save_model_file(model, a.out_path);
    const double loss = mean_loss(model, data);
    out << nlohmann::json{{"model", a.out_path}, {"examples", data.size()}, {"final_loss", loss}}.dump() << '\n';
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

inline int run_eval(const TrainArgs& a, std::size_t k, const std::string& roc_dir, std::ostream& out,
                    std::ostream& err) {
  try {
    const Dataset data = read_dataset_file(a.data_path);
    if (k < 2 || k > data.size()) {
      err << "error: k must be between 2 and the number of examples (" << data.size() << ")\n";
      return kUsage;
    }
    const Vocabulary vocab = Vocabulary::read_file(a.vocab_path);
    const EvaluationReport report = evaluate(data, k, a.hp.seed, vocab, a.hp, a.settings);
    if (!roc_dir.empty()) {
      std::filesystem::create_directories(roc_dir);
      for (std::size_t f = 0; f < report.folds.size(); ++f) {
        const auto path = std::filesystem::path(roc_dir) / ("roc_fold" + std::to_string(f + 1) + ".csv");
        std::ofstream csv(path);
        if (!csv) throw std::runtime_error("cannot write " + path.string());
        emit_roc_csv(report.folds[f], csv);
      }
    }
    out << to_json(report).dump() << '\n';
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

inline int run_export(const std::string& store_path, const std::string& out_path, const std::string& format_name,
                      std::ostream& out, std::ostream& err) {
  DataFormat format = format_for_path(out_path);
  if (format_name == "csv") format = DataFormat::csv;
  else if (format_name == "jsonl") format = DataFormat::jsonl;
  try {
    if (!std::filesystem::exists(store_path)) throw StorageError("store not found: " + store_path);
    SqliteStore store(store_path, SqliteStore::OpenMode::existing_only);
    std::ofstream file(out_path, std::ios::binary | std::ios::trunc);
    if (!file) throw StorageError("cannot open " + out_path + " for writing");
    const std::size_t rows = store.export_training_data(file, format);
    out << nlohmann::json{{"rows", rows}, {"out", out_path}}.dump() << '\n';
    return kSuccess;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntime;
  }
}

}  // namespace detail

// Entry point for the `clickbait` tool. Exit codes: 0 ok, 1 usage, 2 runtime.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Clickbait headline detection: serve, predict, train, eval, export"};
  app.name("clickbait");
  app.require_subcommand(1);

  Config cfg;
  auto* serve = app.add_subcommand("serve", "Run the HTTP prediction API");
  bind_server_options(*serve, cfg);

  std::string predict_model = cfg.model_path;
  std::string predict_text;
  auto* predict = app.add_subcommand("predict", "Classify one headline and print JSON");
  predict->add_option("--model", predict_model, "CBM1 model file")->envname("CBD_MODEL_PATH")->capture_default_str();
  predict->add_option("text", predict_text, "Headline text")->required();

  detail::TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model and write a CBM1 file");
  detail::bind_train_options(*train_cmd, train_args);
  train_cmd->add_option("--out", train_args.out_path, "Output model path")->capture_default_str();

  detail::TrainArgs eval_args;
  std::size_t k = 5;
  std::string roc_dir = "roc";
  auto* eval = app.add_subcommand("eval", "k-fold cross-validated ROC-AUC evaluation");
  detail::bind_train_options(*eval, eval_args);
  eval->add_option("--k", k, "Number of folds")->capture_default_str();
  eval->add_option("--roc-dir", roc_dir, "Directory for per-fold ROC CSVs (empty to skip)")->capture_default_str();

  std::string export_store = cfg.store_path;
  std::string export_out;
  std::string export_format;
  auto* exp = app.add_subcommand("export", "Export feedback-labelled predictions for retraining");
  exp->add_option("--store", export_store, "Store file")->envname("CBD_STORE_PATH")->capture_default_str();
  exp->add_option("--out", export_out, "Output file")->required();
  exp->add_option("--format", export_format, "csv or jsonl (default: from the output extension)")
      ->check(CLI::IsMember({"csv", "jsonl"}));

  try {
    app.parse(argc, argv);
    for (const CLI::App* sub : app.get_subcommands()) reject_ignored_env(*sub);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  if (*serve) return detail::run_serve(cfg, out, err);
  if (*predict) return detail::run_predict(predict_model, predict_text, out, err);
  if (*train_cmd) return detail::run_train(train_args, out, err);
  if (*eval) {
    if (k < 2) {
      err << "error: k must be at least 2\n";
      return kUsage;
    }
    return detail::run_eval(eval_args, k, roc_dir, out, err);
  }
  return detail::run_export(export_store, export_out, export_format, out, err);
}

}  // namespace clickbait::cli
