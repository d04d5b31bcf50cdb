// cci — command-line driver for the Conceptual Cultural Index pipeline:
// score sentences against a culture set, evaluate separability (ROC/AUC,
// median gap), stratify benchmark accuracy by CCI bin, generate evaluation
// corpora, and inspect the response cache.
//
// Exit codes: 0 success, 2 configuration error, 3 partial item failure,
// 4 total failure.

#include <unistd.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cci/cci.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;
constexpr int kExitTotal = 4;

struct StringFree {
  void operator()(char* p) const { cci_string_free(p); }
};
using CStr = std::unique_ptr<char, StringFree>;

std::string take(char* p) {
  CStr owned(p);
  return p ? std::string(p) : std::string();
}

template <typename T, void (*Free)(T*)>
struct HandleFree {
  void operator()(T* p) const { Free(p); }
};
using CultureSetPtr =
    std::unique_ptr<cci_culture_set, HandleFree<cci_culture_set, cci_culture_set_free>>;
using TemplatesPtr =
    std::unique_ptr<cci_templates, HandleFree<cci_templates, cci_templates_free>>;
using BackendPtr = std::unique_ptr<cci_backend, HandleFree<cci_backend, cci_backend_free>>;
using CachePtr = std::unique_ptr<cci_cache, HandleFree<cci_cache, cci_cache_close>>;
using ResultPtr = std::unique_ptr<cci_result, HandleFree<cci_result, cci_result_free>>;
using BaselinePtr =
    std::unique_ptr<cci_baseline_result,
                    HandleFree<cci_baseline_result, cci_baseline_result_free>>;
using ReportPtr = std::unique_ptr<cci_report, HandleFree<cci_report, cci_report_free>>;

std::string last_error() { return cci_last_error_message(); }

// A fatal problem with flags, config file, or environment.
struct ConfigFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// A fatal data/runtime problem once configuration was accepted.
struct RunFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json read_json_file(const fs::path& path, const char* what) {
  std::ifstream in(path);
  if (!in.is_open())
    throw ConfigFailure(std::string(what) + " not readable: " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded())
    throw ConfigFailure(std::string(what) + " is not valid JSON: " + path.string());
  return j;
}

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream stream(csv);
  while (std::getline(stream, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    out.push_back(item.substr(begin, end - begin + 1));
  }
  return out;
}

fs::path executable_dir() {
  char buf[4096];
  const ssize_t n = ::readlink("/proc/self/exe", buf, sizeof buf - 1);
  if (n <= 0) return {};
  buf[n] = '\0';
  return fs::path(buf).parent_path();
}

// ---- experiment configuration ------------------------------------------

// All settings resolved with precedence: flags > config file > defaults.
struct Experiment {
  std::string mode = "custom";
  std::string target;
  std::vector<std::string> cultures;
  std::string method = "cci";
  bool neighbor_instruction = false;
  int n_runs = 3;
  int workers = 4;
  bool use_cache = true;
  std::string cache_dir = "cache";
  std::string templates_dir;
  std::string out;
  std::string input_format = "sentences";
  json field_map;          // object or null
  json moral_label_map;    // object or null
  json backend = json::object();
  std::string g20_path;
};

// Flags shared by the scoring-style subcommands; only options the user
// actually passed are overlaid onto the config file.
struct Flags {
  std::string config_path;
  std::string mode, target, cultures_csv, method, backend, model, endpoint,
      fixture, out, cache_dir, templates_dir, api_key_env, input_format, g20_path;
  int runs = 3;
  int workers = 4;
  bool neighbor = false;
  bool no_cache = false;

  CLI::App* cmd = nullptr;

  void attach(CLI::App* app, bool scoring_options) {
    cmd = app;
    app->add_option("--config", config_path, "experiment config file (JSON)");
    app->add_option("--out", out, "output path (default: stdout)");
    if (!scoring_options) return;
    app->add_option("--mode", mode, "culture-set mode: global or custom");
    app->add_option("--target", target, "target culture t");
    app->add_option("--cultures", cultures_csv,
                    "comma-separated comparison cultures (custom mode)");
    app->add_option("--method", method, "scoring method: cci or baseline");
    app->add_flag("--neighbor-instruction,!--no-neighbor-instruction", neighbor,
                  "add the neighbor-culture rule to the baseline prompt");
    app->add_option("--runs", runs, "independent elicitation runs per sentence");
    app->add_option("--backend", backend, "backend kind: http-chat or scripted");
    app->add_option("--model", model, "backend model id");
    app->add_option("--endpoint", endpoint, "chat-completion endpoint URL");
    app->add_option("--fixture", fixture, "scripted-backend fixture (JSONL)");
    app->add_option("--workers", workers, "concurrent scoring workers");
    app->add_option("--cache-dir", cache_dir, "experiment cache directory");
    app->add_flag("--no-cache", no_cache, "disable the response cache");
    app->add_option("--templates", templates_dir, "prompt template directory");
    app->add_option("--api-key-env", api_key_env,
                    "environment variable holding the API key");
    app->add_option("--input-format", input_format,
                    "input records: sentences, mcq or moral");
    app->add_option("--g20-list", g20_path, "global-mode culture list file");
  }

  bool given(const char* name) const { return cmd && cmd->count(name) > 0; }
};

json flag_overlay(const Flags& f) {
  json overlay = json::object();
  if (f.given("--mode")) overlay["mode"] = f.mode;
  if (f.given("--target")) overlay["target"] = f.target;
  if (f.given("--cultures")) overlay["cultures"] = split_csv(f.cultures_csv);
  if (f.given("--method")) overlay["method"] = f.method;
  if (f.given("--neighbor-instruction") || f.given("--no-neighbor-instruction"))
    overlay["neighbor_instruction"] = f.neighbor;
  if (f.given("--runs")) overlay["n_runs"] = f.runs;
  if (f.given("--workers")) overlay["workers"] = f.workers;
  if (f.given("--out")) overlay["out"] = f.out;
  if (f.given("--cache-dir")) overlay["cache_dir"] = f.cache_dir;
  if (f.given("--no-cache")) overlay["use_cache"] = false;
  if (f.given("--templates")) overlay["templates_dir"] = f.templates_dir;
  if (f.given("--input-format")) overlay["input_format"] = f.input_format;
  if (f.given("--g20-list")) overlay["g20_path"] = f.g20_path;

  json backend = json::object();
  if (f.given("--backend")) backend["backend"] = f.backend;
  if (f.given("--model")) backend["model_id"] = f.model;
  if (f.given("--endpoint")) backend["endpoint"] = f.endpoint;
  if (f.given("--fixture")) backend["fixture"] = f.fixture;
  if (f.given("--api-key-env")) backend["api_key_env"] = f.api_key_env;
  if (!backend.empty()) overlay["backend"] = std::move(backend);
  return overlay;
}

std::vector<std::string> load_g20_list(const Experiment& exp) {
  std::vector<fs::path> candidates;
  if (!exp.g20_path.empty()) candidates.emplace_back(exp.g20_path);
  if (const char* env = std::getenv("CCI_G20_PATH"); env && *env)
    candidates.emplace_back(env);
  candidates.emplace_back("data/g20_countries.json");
  if (const fs::path exe = executable_dir(); !exe.empty()) {
    candidates.push_back(exe / "../data/g20_countries.json");
    candidates.push_back(exe / "../../data/g20_countries.json");
    candidates.push_back(exe / "../../../data/g20_countries.json");
  }
  for (const auto& path : candidates) {
    std::error_code ec;
    if (!fs::exists(path, ec)) continue;
    json j = read_json_file(path, "global culture list");
    if (!j.contains("cultures") || !j["cultures"].is_array())
      throw ConfigFailure("global culture list has no \"cultures\" array: " + path.string());
    std::vector<std::string> cultures;
    for (const auto& c : j["cultures"]) cultures.push_back(c.get<std::string>());
    return cultures;
  }
  std::string tried;
  for (const auto& p : candidates) tried += "\n  " + p.string();
  throw ConfigFailure("global-mode culture list not found; tried:" + tried +
                      "\nSet --g20-list or CCI_G20_PATH.");
}

Experiment resolve_experiment(const Flags& flags) {
  json merged = {
      {"mode", "custom"},          {"method", "cci"},
      {"neighbor_instruction", false}, {"n_runs", 3},
      {"workers", 4},              {"use_cache", true},
      {"cache_dir", "cache"},      {"input_format", "sentences"},
      {"backend", json::object()},
  };
  if (!flags.config_path.empty())
    merged.merge_patch(read_json_file(flags.config_path, "config file"));
  merged.merge_patch(flag_overlay(flags));

  Experiment exp;
  try {
    exp.mode = merged.value("mode", "custom");
    exp.target = merged.value("target", "");
    if (merged.contains("cultures"))
      exp.cultures = merged["cultures"].get<std::vector<std::string>>();
    exp.method = merged.value("method", "cci");
    exp.neighbor_instruction = merged.value("neighbor_instruction", false);
    exp.n_runs = merged.value("n_runs", 3);
    exp.workers = merged.value("workers", 4);
    exp.use_cache = merged.value("use_cache", true);
    exp.cache_dir = merged.value("cache_dir", "cache");
    exp.templates_dir = merged.value("templates_dir", "");
    exp.out = merged.value("out", "");
    exp.input_format = merged.value("input_format", "sentences");
    exp.g20_path = merged.value("g20_path", "");
    if (merged.contains("field_map")) exp.field_map = merged["field_map"];
    if (merged.contains("moral_label_map"))
      exp.moral_label_map = merged["moral_label_map"];
    exp.backend = merged.value("backend", json::object());
  } catch (const json::exception& e) {
    throw ConfigFailure(std::string("bad config value: ") + e.what());
  }

  if (exp.mode != "global" && exp.mode != "custom")
    throw ConfigFailure("mode must be \"global\" or \"custom\", got \"" + exp.mode + "\"");
  if (exp.method != "cci" && exp.method != "baseline")
    throw ConfigFailure("method must be \"cci\" or \"baseline\", got \"" + exp.method + "\"");
  if (exp.input_format != "sentences" && exp.input_format != "mcq" &&
      exp.input_format != "moral")
    throw ConfigFailure("input_format must be sentences, mcq or moral");
  if (exp.n_runs < 1) throw ConfigFailure("runs must be >= 1");
  if (exp.workers < 1) throw ConfigFailure("workers must be >= 1");

  if (exp.mode == "global") {
    if (!exp.cultures.empty())
      throw ConfigFailure("global mode uses the built-in culture list; "
                          "drop --cultures or switch to custom mode");
    exp.cultures = load_g20_list(exp);
  }

  // Infer the backend kind from the flags that only make sense for one kind.
  if (!exp.backend.contains("backend")) {
    const bool has_endpoint =
        exp.backend.contains("endpoint") && !exp.backend["endpoint"].get<std::string>().empty();
    exp.backend["backend"] = has_endpoint ? "http-chat" : "scripted";
  }
  return exp;
}

// ---- library handle construction ------------------------------------------

CultureSetPtr make_culture_set(const Experiment& exp) {
  if (exp.target.empty()) throw ConfigFailure("a target culture is required (--target)");
  if (exp.cultures.empty())
    throw ConfigFailure("custom mode requires a culture list (--cultures) containing the target");
  std::vector<const char*> names;
  names.reserve(exp.cultures.size());
  for (const auto& c : exp.cultures) names.push_back(c.c_str());
  cci_culture_set* set = nullptr;
  if (cci_culture_set_create(names.data(), names.size(), exp.target.c_str(), &set) != CCI_OK)
    throw ConfigFailure("invalid culture set: " + last_error());
  return CultureSetPtr(set);
}

TemplatesPtr make_templates(const Experiment& exp) {
  cci_templates* t = nullptr;
  const cci_status status =
      exp.templates_dir.empty() ? cci_templates_default(&t)
                                : cci_templates_load(exp.templates_dir.c_str(), &t);
  if (status != CCI_OK) throw ConfigFailure("templates: " + last_error());
  return TemplatesPtr(t);
}

BackendPtr make_backend(const Experiment& exp) {
  cci_backend* b = nullptr;
  if (cci_backend_create(exp.backend.dump().c_str(), &b) != CCI_OK)
    throw ConfigFailure("backend: " + last_error());
  return BackendPtr(b);
}

CachePtr make_cache(const Experiment& exp) {
  if (!exp.use_cache) return nullptr;
  cci_cache* c = nullptr;
  if (cci_cache_open(exp.cache_dir.c_str(), 0, &c) != CCI_OK)
    throw ConfigFailure("cache: " + last_error());
  return CachePtr(c);
}

// ---- output helpers ---------------------------------------------------------

class OutputSink {
 public:
  explicit OutputSink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_.is_open())
        throw ConfigFailure("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void write_text_file(const std::string& path, const std::string& content,
                     const char* what) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) throw ConfigFailure(std::string("cannot open ") + what + ": " + path);
  out << content;
}

// ---- score -------------------------------------------------------------------

struct WorkItem {
  std::string id;
  std::string text;    // the scoring input x
  std::string label;   // empty when the input carries no label
};

std::vector<WorkItem> load_work_items(const Experiment& exp, const std::string& input) {
  std::vector<WorkItem> items;
  char* json_out = nullptr;
  char* warnings_out = nullptr;

  if (exp.input_format == "sentences") {
    if (cci_load_labeled_sentences(input.c_str(), &json_out, &warnings_out) != CCI_OK)
      throw RunFailure("input: " + last_error());
    const json records = json::parse(take(json_out));
    for (const auto& w : json::parse(take(warnings_out)))
      std::cerr << "warning: " << w.get<std::string>() << "\n";
    for (const auto& r : records)
      items.push_back({r["id"], r["text"], r["label"]});
    return items;
  }

  const std::string field_map = exp.field_map.is_object() ? exp.field_map.dump() : "";
  const char* field_map_arg = field_map.empty() ? nullptr : field_map.c_str();

  if (exp.input_format == "mcq") {
    if (cci_load_mcq_items(input.c_str(), field_map_arg, &json_out, &warnings_out) != CCI_OK)
      throw RunFailure("input: " + last_error());
    const json records = json::parse(take(json_out));
    for (const auto& w : json::parse(take(warnings_out)))
      std::cerr << "warning: " << w.get<std::string>() << "\n";
    for (const auto& r : records) {
      char* x = nullptr;
      if (cci_mcq_input(r.dump().c_str(), &x) != CCI_OK)
        throw RunFailure("mcq item " + r["id"].get<std::string>() + ": " + last_error());
      items.push_back({r["id"], take(x), ""});
    }
    return items;
  }

  // moral
  if (cci_load_moral_items(input.c_str(), field_map_arg, &json_out, &warnings_out) != CCI_OK)
    throw RunFailure("input: " + last_error());
  const json records = json::parse(take(json_out));
  for (const auto& w : json::parse(take(warnings_out)))
    std::cerr << "warning: " << w.get<std::string>() << "\n";
  const std::string label_map =
      exp.moral_label_map.is_object() ? exp.moral_label_map.dump() : "";
  for (const auto& r : records) {
    char* x = nullptr;
    if (cci_moral_input(r.dump().c_str(), label_map.empty() ? nullptr : label_map.c_str(),
                        &x) != CCI_OK)
      throw RunFailure("moral item " + r["id"].get<std::string>() + ": " + last_error());
    items.push_back({r["id"], take(x), ""});
  }
  return items;
}

int cmd_score(const Flags& flags, const std::string& input_path) {
  const Experiment exp = resolve_experiment(flags);
  const TemplatesPtr templates = make_templates(exp);
  const BackendPtr backend = make_backend(exp);
  const CachePtr cache = make_cache(exp);
  CultureSetPtr cultures;
  if (exp.method == "cci") cultures = make_culture_set(exp);
  if (exp.method == "baseline" && exp.target.empty())
    throw ConfigFailure("a target culture is required (--target)");

  std::vector<WorkItem> items = load_work_items(exp, input_path);

  std::vector<json> records(items.size());
  std::vector<std::vector<std::string>> warnings(items.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::uint64_t> cache_hits{0};
  std::atomic<std::size_t> failures{0};

  auto score_one = [&](std::size_t i) {
    const WorkItem& item = items[i];
    json rec{{"id", item.id}};
    if (!item.label.empty()) rec["label"] = item.label;

    cci_status status = CCI_OK;
    if (exp.method == "cci") {
      cci_result* raw = nullptr;
      status = cci_score_sentence(backend.get(), templates.get(), cache.get(),
                                  item.text.c_str(), cultures.get(), exp.n_runs, &raw);
      ResultPtr result(raw);
      if (status == CCI_OK) {
        json breakdown = json::object();
        for (std::size_t c = 0; c < cci_result_n_cultures(result.get()); ++c)
          breakdown[cci_result_culture_name(result.get(), c)] =
              cci_result_culture_value(result.get(), c);
        rec["cci"] = cci_result_cci(result.get());
        if (cci_result_has_log(result.get()))
          rec["cci_log"] = cci_result_cci_log(result.get());
        rec["breakdown"] = std::move(breakdown);
        rec["n_runs"] = cci_result_n_runs(result.get());
        cache_hits += cci_result_cache_hits(result.get());
        for (std::size_t w = 0; w < cci_result_warning_count(result.get()); ++w)
          warnings[i].emplace_back(cci_result_warning(result.get(), w));
      }
    } else {
      cci_baseline_result* raw = nullptr;
      status = cci_score_baseline(backend.get(), templates.get(), cache.get(),
                                  item.text.c_str(), exp.target.c_str(),
                                  exp.neighbor_instruction ? 1 : 0, &raw);
      BaselinePtr result(raw);
      if (status == CCI_OK) {
        rec["baseline_score"] = cci_baseline_result_score(result.get());
        rec["target"] = cci_baseline_result_target(result.get());
        cache_hits += cci_baseline_result_cache_hits(result.get());
        for (std::size_t w = 0; w < cci_baseline_result_warning_count(result.get()); ++w)
          warnings[i].emplace_back(cci_baseline_result_warning(result.get(), w));
      }
    }

    if (status != CCI_OK) {
      rec["error"] = json{{"code", cci_status_name(status)}, {"message", last_error()}};
      failures += 1;
    }
    records[i] = std::move(rec);
  };

  const std::size_t n_workers =
      std::min<std::size_t>(static_cast<std::size_t>(exp.workers), std::max<std::size_t>(items.size(), 1));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1))
        score_one(i);
    });
  for (auto& t : pool) t.join();

  OutputSink sink(exp.out);
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (const auto& w : warnings[i])
      std::cerr << "warning: item " << items[i].id << ": " << w << "\n";
    sink.stream() << records[i].dump() << "\n";
  }
  sink.stream().flush();

  const std::size_t failed = failures.load();
  std::cerr << "summary: items=" << items.size() << " ok=" << items.size() - failed
            << " errors=" << failed
            << " backend_calls=" << cci_backend_call_count(backend.get())
            << " cache_hits=" << cache_hits.load() << "\n";

  if (items.empty() || failed == 0) return kExitOk;
  return failed == items.size() ? kExitTotal : kExitPartial;
}

// ---- evaluate -----------------------------------------------------------------

struct ScoredRecord {
  std::string id;
  double score = 0.0;
  std::string label;  // may be empty
};

std::vector<ScoredRecord> read_scores_file(const std::string& path,
                                           std::size_t* skipped_errors) {
  std::ifstream in(path);
  if (!in.is_open()) throw RunFailure("cannot open scores file: " + path);
  std::vector<ScoredRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw RunFailure(path + ":" + std::to_string(line_no) + ": not a JSON record");
    if (j.contains("_meta")) continue;
    if (j.contains("error")) {
      if (skipped_errors) ++*skipped_errors;
      continue;
    }
    ScoredRecord rec;
    rec.id = j.value("id", "line" + std::to_string(line_no));
    if (j.contains("cci"))
      rec.score = j["cci"].get<double>();
    else if (j.contains("baseline_score"))
      rec.score = j["baseline_score"].get<double>();
    else if (j.contains("score"))
      rec.score = j["score"].get<double>();
    else
      throw RunFailure(path + ":" + std::to_string(line_no) +
                       ": record has no cci/baseline_score/score field");
    rec.label = j.value("label", "");
    out.push_back(std::move(rec));
  }
  return out;
}

int cmd_evaluate(const std::string& scores_path, const std::string& labels_path,
                 const std::string& out_path, const std::string& roc_csv_path) {
  std::size_t skipped = 0;
  std::vector<ScoredRecord> records = read_scores_file(scores_path, &skipped);
  if (skipped)
    std::cerr << "warning: skipped " << skipped << " error record(s) in " << scores_path
              << "\n";

  if (!labels_path.empty()) {
    char* json_out = nullptr;
    if (cci_load_labeled_sentences(labels_path.c_str(), &json_out, nullptr) != CCI_OK)
      throw RunFailure("labels: " + last_error());
    std::map<std::string, std::string> by_id;
    for (const auto& r : json::parse(take(json_out)))
      by_id[r["id"].get<std::string>()] = r["label"].get<std::string>();
    for (auto& rec : records) {
      if (!rec.label.empty()) continue;
      auto it = by_id.find(rec.id);
      if (it != by_id.end()) rec.label = it->second;
    }
  }

  std::vector<double> positives, negatives;
  for (const auto& rec : records) {
    if (rec.label == "culture-specific")
      positives.push_back(rec.score);
    else if (rec.label == "general")
      negatives.push_back(rec.score);
    else if (rec.label.empty())
      throw RunFailure("item " + rec.id + " has no label; pass --labels");
    else
      throw RunFailure("item " + rec.id + " has unknown label \"" + rec.label + "\"");
  }

  cci_report* raw = nullptr;
  if (cci_evaluate_separability(positives.data(), positives.size(), negatives.data(),
                                negatives.size(), &raw) != CCI_OK)
    throw RunFailure("evaluate: " + last_error());
  ReportPtr report(raw);

  std::cout << take(cci_report_text(report.get()));
  if (!out_path.empty())
    write_text_file(out_path, take(cci_report_json(report.get())) + "\n", "report file");
  if (!roc_csv_path.empty())
    write_text_file(roc_csv_path, take(cci_report_roc_csv(report.get())), "ROC CSV file");
  return kExitOk;
}

// ---- stratify --------------------------------------------------------------------

int cmd_stratify(const std::string& scores_path, const std::string& predictions_path,
                 const std::string& out_path, double bin_width, double catchall) {
  std::size_t skipped = 0;
  std::vector<ScoredRecord> records = read_scores_file(scores_path, &skipped);
  if (skipped)
    std::cerr << "warning: skipped " << skipped << " error record(s) in " << scores_path
              << "\n";

  std::ifstream in(predictions_path);
  if (!in.is_open()) throw RunFailure("cannot open predictions file: " + predictions_path);
  json predictions = json::object();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("correct"))
      throw RunFailure(predictions_path + ":" + std::to_string(line_no) +
                       ": expected {\"id\": ..., \"correct\": {model: bool}}");
    predictions[j["id"].get<std::string>()] = j["correct"];
  }

  json items = json::array();
  for (const auto& rec : records) {
    if (!predictions.contains(rec.id))
      throw RunFailure("JoinMismatch: scored item " + rec.id + " has no predictions");
    items.push_back({{"item_id", rec.id}, {"score", rec.score}});
  }
  if (predictions.size() != records.size()) {
    for (const auto& [id, flags] : predictions.items()) {
      const bool known = std::any_of(records.begin(), records.end(),
                                     [&](const ScoredRecord& r) { return r.id == id; });
      if (!known)
        throw RunFailure("JoinMismatch: prediction item " + id + " has no score");
    }
  }

  cci_report* raw = nullptr;
  if (cci_stratify(items.dump().c_str(), predictions.dump().c_str(), bin_width, catchall,
                   &raw) != CCI_OK)
    throw RunFailure("stratify: " + last_error());
  ReportPtr report(raw);

  std::cout << take(cci_report_text(report.get()));
  if (!out_path.empty())
    write_text_file(out_path, take(cci_report_json(report.get())) + "\n", "report file");
  return kExitOk;
}

// ---- generate ---------------------------------------------------------------------

int cmd_generate(const Flags& flags, const std::string& kind, int count) {
  const Experiment exp = resolve_experiment(flags);
  if (kind != "general" && kind != "cultural")
    throw ConfigFailure("--kind must be general or cultural");
  const TemplatesPtr templates = make_templates(exp);
  const BackendPtr backend = make_backend(exp);

  char* json_out = nullptr;
  if (cci_generate_corpus(backend.get(), templates.get(),
                          kind == "cultural" ? CCI_GENERATE_CULTURAL : CCI_GENERATE_GENERAL,
                          count, &json_out) != CCI_OK)
    throw RunFailure("generate: " + last_error());
  const json corpus = json::parse(take(json_out));

  for (const auto& w : corpus["warnings"])
    std::cerr << "warning: " << w.get<std::string>() << "\n";

  OutputSink sink(exp.out);
  sink.stream() << json{{"_meta", corpus["provenance"]}}.dump() << "\n";
  for (const auto& s : corpus["sentences"]) sink.stream() << s.dump() << "\n";
  sink.stream().flush();

  std::cerr << "summary: generated=" << corpus["sentences"].size()
            << " requested=" << count << "\n";
  return kExitOk;
}

// ---- cache inspect -------------------------------------------------------------------

int cmd_cache_inspect(const std::string& dir, bool as_json) {
  cci_cache* raw = nullptr;
  if (cci_cache_open(dir.c_str(), 1, &raw) != CCI_OK)
    throw ConfigFailure("cache: " + last_error());
  CachePtr cache(raw);
  const json stats = json::parse(take(cci_cache_stats_json(cache.get())));
  if (as_json) {
    std::cout << stats.dump() << "\n";
    return kExitOk;
  }
  std::cout << "cache directory:   " << dir << "\n"
            << "records:           " << stats["records"] << "\n"
            << "corrupted records: " << stats["corrupted_records"] << "\n";
  const auto& damaged = stats["damaged_lines"];
  std::cout << "damaged lines:     " << damaged.size();
  if (!damaged.empty()) {
    std::cout << " (";
    for (std::size_t i = 0; i < damaged.size(); ++i)
      std::cout << (i ? ", " : "") << damaged[i];
    std::cout << ")";
  }
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conceptual Cultural Index pipeline"};
  app.set_version_flag("--version", std::string(cci_version()));
  app.require_subcommand(1);

  // score
  auto* score = app.add_subcommand("score", "score sentences with CCI or the baseline");
  Flags score_flags;
  score_flags.attach(score, true);
  std::string score_input;
  score->add_option("input", score_input, "labeled-sentence / benchmark JSONL file")
      ->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "ROC/AUC and median-gap separability");
  std::string eval_scores, eval_labels, eval_out, eval_roc;
  evaluate->add_option("scores", eval_scores, "scores JSONL from `cci score`")->required();
  evaluate->add_option("--labels", eval_labels, "labeled-sentence file joined on id");
  evaluate->add_option("--out", eval_out, "write the JSON report here");
  evaluate->add_option("--roc-csv", eval_roc, "write ROC points as CSV");

  // stratify
  auto* stratify = app.add_subcommand("stratify", "bin scores and stratify accuracy");
  std::string strat_scores, strat_preds, strat_out;
  double strat_width = 0.1, strat_catchall = 0.1;
  stratify->add_option("scores", strat_scores, "scores JSONL from `cci score`")->required();
  stratify->add_option("--predictions", strat_preds,
                       "JSONL of {\"id\": ..., \"correct\": {model: bool}}")
      ->required();
  stratify->add_option("--out", strat_out, "write the JSON report here");
  stratify->add_option("--bin-width", strat_width, "bin width (default 0.1)");
  stratify->add_option("--catchall", strat_catchall,
                       "upper edge of the catch-all first bin (default 0.1)");

  // generate
  auto* generate = app.add_subcommand("generate", "generate an evaluation corpus");
  Flags gen_flags;
  gen_flags.attach(generate, true);
  std::string gen_kind;
  int gen_count = 300;
  generate->add_option("--kind", gen_kind, "corpus kind: general or cultural")->required();
  generate->add_option("--count", gen_count, "requested sentence count");

  // cache inspect
  auto* cache_cmd = app.add_subcommand("cache", "cache utilities");
  cache_cmd->require_subcommand(1);
  auto* inspect = cache_cmd->add_subcommand("inspect", "report cache health and stats");
  std::string inspect_dir;
  bool inspect_json = false;
  inspect->add_option("dir", inspect_dir, "cache directory")->required();
  inspect->add_flag("--json", inspect_json, "emit stats as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the parser's message
    return kExitConfig;
  }

  try {
    if (score->parsed()) return cmd_score(score_flags, score_input);
    if (evaluate->parsed()) return cmd_evaluate(eval_scores, eval_labels, eval_out, eval_roc);
    if (stratify->parsed())
      return cmd_stratify(strat_scores, strat_preds, strat_out, strat_width, strat_catchall);
    if (generate->parsed()) return cmd_generate(gen_flags, gen_kind, gen_count);
    if (inspect->parsed()) return cmd_cache_inspect(inspect_dir, inspect_json);
  } catch (const ConfigFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const RunFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTotal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTotal;
  }
  return kExitConfig;
}
