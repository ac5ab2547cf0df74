#include "softboost/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "softboost/config.hpp"
#include "softboost/csv_io.hpp"
#include "softboost/persist.hpp"
#include "softboost/postprocess.hpp"

namespace softboost {

namespace fs = std::filesystem;
using nlohmann::json;

std::string git_blob_hash(const std::string& content) {
  const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
  EVP_DigestUpdate(ctx, header.data(), header.size());
  EVP_DigestUpdate(ctx, content.data(), content.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

namespace {

std::string file_hash(const fs::path& p) { return git_blob_hash(read_text_file(p.string())); }

// Records inputs, outputs and metrics of one command and writes them next to
// the artifacts. File names are stored without directories so manifests
// from different output directories compare equal.
class Run {
 public:
  Run(std::string command, const RunConfig& config, fs::path out_dir)
      : command_(std::move(command)), config_(config), out_(std::move(out_dir)) {
    fs::create_directories(out_);
  }

  fs::path path(const std::string& name) const { return out_ / name; }
  const RunConfig& config() const { return config_; }

  void input(const fs::path& p) { inputs_[p.filename().string()] = file_hash(p); }
  void output(const fs::path& p) { outputs_[p.filename().string()] = file_hash(p); }
  void metric(const std::string& key, json value) { metrics_[key] = std::move(value); }
  json& metrics() { return metrics_; }

  std::string write_manifest() {
    json seeds{{"seed", config_.seed},
               {"scenario", config_.scenario.seed},
               {"split", config_.split.seed},
               {"transfer", config_.transfer.learner.forest.seed},
               {"train", config_.train.base.seed},
               {"stacker", config_.stack.stacker.seed}};
    json learners = json::object();
    for (const auto& s : config_.stack_learners) learners[s.name] = s.boost.seed;
    seeds["stack_learners"] = learners;
    json doc{{"command", command_},
             {"config", json::parse(run_config_json(config_))},
             {"seeds", seeds},
             {"inputs", inputs_},
             {"outputs", outputs_},
             {"metrics", metrics_}};
    const std::string hash = git_blob_hash(doc.dump());
    doc["manifest_hash"] = hash;
    write_text_file(path(command_ + ".manifest.json").string(), doc.dump(2) + "\n");
    return hash;
  }

 private:
  std::string command_;
  RunConfig config_;
  fs::path out_;
  std::map<std::string, std::string> inputs_, outputs_;
  json metrics_ = json::object();
};

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_table(Run& run, const fs::path& p, const FrameTable& t) {
  write_frame_table(p.string(), t);
  run.output(p);
}

FrameTable read_table(Run& run, const fs::path& p) {
  run.input(p);
  return read_frame_table(p.string());
}

void write_preds(Run& run, const fs::path& p, const std::vector<RowKey>& keys, const Matrix& probs,
                 std::vector<std::string> producer = {}) {
  write_predictions(p.string(), PredictionTable{keys, probs, std::move(producer)});
  run.output(p);
}

// ---- stages ---------------------------------------------------------------

void stage_gen(Run& run) {
  const auto& cfg = run.config();
  Scenario sc = generate_scenario(cfg.scenario);
  write_raw_streams(run.path("train_raw.csv").string(), sc.train_streams);
  run.output(run.path("train_raw.csv"));
  write_raw_streams(run.path("test_raw.csv").string(), sc.test_streams);
  run.output(run.path("test_raw.csv"));
  write_table(run, run.path("train_labels.csv"), sc.train);
  write_table(run, run.path("test_labels.csv"), sc.test);
  int left = 0;
  for (const auto& t : sc.train_truth) left += t.left_handed;
  for (const auto& t : sc.test_truth) left += t.left_handed;
  run.metric("train_rows", sc.train.size());
  run.metric("test_rows", sc.test.size());
  run.metric("left_handed_participants", left);
}

FrameTable split_table(const FrameTable& t, const SplitPlan& plan) { return split_into_subsequences(t, plan).table; }

// Handedness uses the majority sign over the participants of both tables.
FrameTable engineer(const RunConfig& cfg, FrameTable t, int majority, std::uint64_t split_seed, json& flips) {
  if (cfg.features.handedness) {
    HandednessResult h = correct_handedness(t, cfg.features.x_prefix, cfg.features.y_prefix, majority);
    for (const auto& [pid, flipped] : h.flipped) {
      if (flipped) flips.push_back(pid);
    }
    t = std::move(h.table);
  }
  SplitPlan plan = cfg.split;
  plan.seed = split_seed;
  t = split_table(t, plan);
  if (!cfg.features.orders.empty() && !cfg.features.lag_lead_columns.empty()) {
    t = add_lag_lead(t, cfg.features.lag_lead_columns, cfg.features.orders);
  }
  if (!cfg.features.difference_columns.empty()) t = add_differences(t, cfg.features.difference_columns);
  return t;
}

void stage_features(Run& run, const fs::path& train_raw, const fs::path& test_raw, const fs::path& train_labels,
                    const fs::path& test_labels) {
  const auto& cfg = run.config();
  const auto rates = channel_sample_rates(cfg.scenario);
  json flips = json::array();
  run.input(train_raw);
  run.input(test_raw);
  FrameTable train = build_frame_table(read_raw_streams(train_raw.string(), rates), read_table(run, train_labels));
  FrameTable test = build_frame_table(read_raw_streams(test_raw.string(), rates), read_table(run, test_labels));
  int majority = 1;
  if (cfg.features.handedness) {
    auto signs = handedness_signs(train, cfg.features.y_prefix);
    signs.merge(handedness_signs(test, cfg.features.y_prefix));
    majority = majority_sign(signs);
  }
  train = engineer(cfg, std::move(train), majority, cfg.split.seed, flips);
  test = engineer(cfg, std::move(test), majority, mix_seed({cfg.split.seed, 2}), flips);
  write_table(run, run.path("train_features.csv"), train);
  write_table(run, run.path("test_features.csv"), test);
  run.metric("flipped_participants", flips);
  run.metric("feature_columns", train.columns.size());
  run.metric("train_rows", train.size());
  run.metric("test_rows", test.size());
}

void stage_split(Run& run, const fs::path& in, const fs::path& out) {
  FrameTable t = read_table(run, in);
  SplitResult r = split_into_subsequences(t, run.config().split);
  write_table(run, out, r.table);
  run.metric("subsequences", r.windows.size());
  run.metric("rows", r.table.size());
}

FoldPlan folds_for(const RunConfig& cfg, const FrameTable& train) {
  return participant_folds(participants_of(train), cfg.holdout);
}

void stage_transfer(Run& run, const fs::path& train_path, const fs::path& test_path) {
  const auto& cfg = run.config();
  FrameTable train = read_table(run, train_path);
  FrameTable test = read_table(run, test_path);
  if (!train.room) throw ValidationError("training table has no room column");
  int max_room = -1;
  for (int r : *train.room) max_room = std::max(max_room, r);
  const auto n_rooms = static_cast<std::size_t>(max_room + 1);
  const FoldPlan folds = folds_for(cfg, train);
  TransferResult tr = stack_transfer(train, test, folds, cfg.transfer.learner, n_rooms, cfg.transfer.prefix);

  std::vector<std::size_t> idx;
  for (const auto& name : tr.new_columns) idx.push_back(tr.train.column_index(name));
  Matrix probs = tr.train.features.select_cols(idx);
  std::vector<std::string> producer;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < tr.train.size(); ++i) {
    producer.push_back("block" + std::to_string(tr.provenance.producer[i]));
    auto row = probs.row(i);
    const auto best = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    if (best == (*train.room)[i]) ++correct;
  }
  write_table(run, run.path("train_transfer.csv"), tr.train);
  write_table(run, run.path("test_transfer.csv"), tr.test);
  write_preds(run, run.path("room_oof.csv"), tr.train.keys, probs, producer);
  run.metric("room_oof_accuracy", static_cast<double>(correct) / static_cast<double>(tr.train.size()));
  run.metric("provenance_violations", audit_provenance(tr.train.keys, tr.provenance));
}

struct Partition {
  std::vector<std::size_t> fit, hold;
};

Partition partition(const FrameTable& t, const FoldPlan& folds) {
  Partition p;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const int pid = t.keys[i].participant_id;
    if (std::find(folds.holdout.begin(), folds.holdout.end(), pid) != folds.holdout.end()) {
      p.hold.push_back(i);
    } else {
      p.fit.push_back(i);
    }
  }
  if (p.hold.empty()) throw ValidationError("the holdout participants have no rows");
  return p;
}

std::vector<RowKey> keys_at(const FrameTable& t, const std::vector<std::size_t>& rows) {
  std::vector<RowKey> k;
  for (std::size_t r : rows) k.push_back(t.keys[r]);
  return k;
}

void stage_train(Run& run, const fs::path& train_path, const std::optional<fs::path>& test_path) {
  const auto& cfg = run.config();
  FrameTable train = read_table(run, train_path);
  const SoftLabelMatrix y = train.soft_labels();
  const ClassWeights w = resolve_class_weights(cfg, y);
  const Partition part = partition(train, folds_for(cfg, train));
  const Matrix x_fit = train.features.select_rows(part.fit);
  const Matrix x_hold = train.features.select_rows(part.hold);
  const SoftLabelMatrix y_fit = y.select_rows(part.fit), y_hold = y.select_rows(part.hold);

  GridSearchOutcome gs = grid_search(cfg.train.grid, cfg.train.base, x_fit, y_fit, w, x_hold, y_hold);
  write_text_file(run.path("grid.csv").string(), grid_table_csv(gs.table));
  run.output(run.path("grid.csv"));
  save_model(run.path("gbdt_model.json").string(), gs.best_model);
  run.output(run.path("gbdt_model.json"));

  std::vector<Tree> trees;
  for (const Tree* t : gs.best_model.all_trees()) trees.push_back(*t);
  write_text_file(run.path("importance.md").string(),
                  format_importance_table(feature_importance(trees, train.columns)));
  run.output(run.path("importance.md"));

  ScoreMatrix hold = gbdt_predict(gs.best_model, x_hold);
  write_preds(run, run.path("gbdt_holdout_predictions.csv"), keys_at(train, part.hold), hold.values());
  run.metric("holdout_brier", brier_score(hold, y_hold, w));
  run.metric("best_round", gs.best_model.best_round);
  run.metric("grid_rows", gs.table.size());
  if (test_path) {
    FrameTable test = read_table(run, *test_path);
    if (test.columns != train.columns) throw ValidationError("test columns differ from the training columns");
    write_preds(run, run.path("gbdt_test_predictions.csv"), test.keys,
                gbdt_predict(gs.best_model, test.features).values());
  }
}

void stage_stack(Run& run, const fs::path& train_path, const std::optional<fs::path>& test_path) {
  const auto& cfg = run.config();
  FrameTable train = read_table(run, train_path);
  const ClassWeights w = resolve_class_weights(cfg, train.soft_labels());
  StackFit fit = fit_stack(cfg.stack_learners, folds_for(cfg, train), train, w, cfg.stack);
  save_model(run.path("stack_model.json").string(), fit.model);
  run.output(run.path("stack_model.json"));

  const auto& rep = fit.report;
  const std::size_t c = train.n_classes;
  std::vector<RowKey> keys;
  std::vector<std::string> producer;
  Matrix long_oof(rep.oof_rows.size() * rep.level1_names.size(), c);
  std::size_t out_row = 0;
  for (std::size_t l = 0; l < rep.level1_names.size(); ++l) {
    for (std::size_t i = 0; i < rep.oof_rows.size(); ++i, ++out_row) {
      keys.push_back(train.keys[rep.oof_rows[i]]);
      producer.push_back(rep.level1_names[l]);
      for (std::size_t k = 0; k < c; ++k) long_oof(out_row, k) = rep.oof(i, l * c + k);
    }
  }
  write_preds(run, run.path("level1_oof.csv"), keys, long_oof, producer);

  std::string report = "learner,holdout_brier\n";
  json level1 = json::object();
  for (std::size_t l = 0; l < rep.level1_names.size(); ++l) {
    report += rep.level1_names[l] + "," + fmt6(rep.level1_holdout_brier[l]) + "\n";
    level1[rep.level1_names[l]] = rep.level1_holdout_brier[l];
  }
  report += "stack," + fmt6(rep.stacked_holdout_brier) + "\n";
  write_text_file(run.path("stack_report.csv").string(), report);
  run.output(run.path("stack_report.csv"));
  write_text_file(run.path("stack_grid.csv").string(), grid_table_csv(rep.grid));
  run.output(run.path("stack_grid.csv"));
  write_preds(run, run.path("stack_holdout_predictions.csv"), keys_at(train, rep.holdout_rows),
              rep.holdout_predictions);
  run.metric("level1_holdout_brier", level1);
  run.metric("stack_holdout_brier", rep.stacked_holdout_brier);
  run.metric("dropped", rep.dropped);
  if (test_path) {
    FrameTable test = read_table(run, *test_path);
    write_preds(run, run.path("stack_test_predictions.csv"), test.keys,
                stack_predict(fit.model, test.features).values());
  }
}

// Soft labels of the given keys, looked up in a labelled table.
SoftLabelMatrix labels_for(const std::vector<RowKey>& keys, const FrameTable& table) {
  std::map<RowKey, std::size_t> at;
  for (std::size_t i = 0; i < table.size(); ++i) at[table.keys[i]] = i;
  std::vector<std::size_t> rows;
  for (const auto& k : keys) {
    auto it = at.find(k);
    if (it == at.end()) {
      throw ValidationError("no label for row (" + std::to_string(k.participant_id) + "," +
                            std::to_string(k.subsequence_id) + "," + std::to_string(k.second_index) + ")");
    }
    rows.push_back(it->second);
  }
  return table.soft_labels().select_rows(rows);
}

PredictionTable read_preds(Run& run, const fs::path& p) {
  run.input(p);
  return read_predictions(p.string());
}

void stage_smooth(Run& run, const fs::path& valid_path, const fs::path& labels_path, const fs::path& apply_path,
                  const fs::path& out_path) {
  const auto& cfg = run.config();
  SmoothKernel kernel;
  if (cfg.smooth.kernel) {
    kernel = SmoothKernel(*cfg.smooth.kernel);
  } else if (cfg.smooth.enabled) {
    PredictionTable valid = read_preds(run, valid_path);
    FrameTable labels = read_table(run, labels_path);
    SoftLabelMatrix y = labels_for(valid.keys, labels);
    SmoothFit fit = optimize_smooth_weights(ScoreMatrix::probability(valid.probabilities), y,
                                            resolve_class_weights(cfg, labels.soft_labels()),
                                            SequenceStructure(valid.keys));
    kernel = fit.kernel;
    run.metric("valid_brier_identity", fit.identity_brier);
    run.metric("valid_brier_smoothed", fit.best_brier);
    run.metric("sweeps", fit.sweeps);
  }
  run.metric("kernel", kernel.weights());
  write_text_file(run.path("kernel.json").string(), json(kernel.weights()).dump() + "\n");
  run.output(run.path("kernel.json"));
  PredictionTable apply = read_preds(run, apply_path);
  ScoreMatrix smoothed =
      smooth(ScoreMatrix::probability(apply.probabilities), SequenceStructure(apply.keys), kernel);
  write_preds(run, out_path, apply.keys, smoothed.values());
}

double stage_eval(Run& run, const fs::path& preds_path, const fs::path& labels_path) {
  PredictionTable preds = read_preds(run, preds_path);
  FrameTable labels = read_table(run, labels_path);
  SoftLabelMatrix y = labels_for(preds.keys, labels);
  const double b = brier_score(ScoreMatrix::probability(preds.probabilities), y,
                               resolve_class_weights(run.config(), labels.soft_labels()));
  run.metric("weighted_brier", b);
  run.metric("rows", preds.keys.size());
  return b;
}

// ---- command line -----------------------------------------------------------

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  std::string out_dir = ".";
  std::string train, test, input, output, predictions, labels, apply;
  std::string train_raw, test_raw, train_labels, test_labels;
};

RunConfig effective_config(const Options& o) {
  RunConfig cfg = o.config.empty() ? default_run_config() : load_run_config(o.config);
  if (o.seed) cfg.seed = *o.seed;
  derive_seeds(cfg);
  return cfg;
}

fs::path or_default(const std::string& given, const fs::path& fallback) {
  return given.empty() ? fallback : fs::path(given);
}

int dispatch(const std::string& command, const Options& o) {
  if (o.threads > 0) set_num_threads(o.threads);
  const RunConfig cfg = effective_config(o);
  const fs::path out = o.out_dir;
  Run run(command, cfg, out);
  const fs::path default_train = out / (cfg.transfer.enabled ? "train_transfer.csv" : "train_features.csv");
  const fs::path default_test = out / (cfg.transfer.enabled ? "test_transfer.csv" : "test_features.csv");
  auto optional_test = [&]() -> std::optional<fs::path> {
    if (!o.test.empty()) return fs::path(o.test);
    if (fs::exists(default_test)) return default_test;
    return std::nullopt;
  };

  if (command == "gen") {
    stage_gen(run);
  } else if (command == "features") {
    stage_features(run, or_default(o.train_raw, out / "train_raw.csv"), or_default(o.test_raw, out / "test_raw.csv"),
                   or_default(o.train_labels, out / "train_labels.csv"),
                   or_default(o.test_labels, out / "test_labels.csv"));
  } else if (command == "split") {
    if (o.input.empty()) throw ValidationError("split needs --in");
    stage_split(run, o.input, or_default(o.output, out / "split.csv"));
  } else if (command == "transfer") {
    stage_transfer(run, or_default(o.train, out / "train_features.csv"),
                   or_default(o.test, out / "test_features.csv"));
  } else if (command == "train") {
    stage_train(run, or_default(o.train, default_train), optional_test());
  } else if (command == "stack") {
    stage_stack(run, or_default(o.train, default_train), optional_test());
  } else if (command == "smooth") {
    stage_smooth(run, or_default(o.predictions, out / "stack_holdout_predictions.csv"),
                 or_default(o.labels, default_train), or_default(o.apply, out / "stack_test_predictions.csv"),
                 or_default(o.output, out / "smoothed_predictions.csv"));
  } else if (command == "eval") {
    if (o.predictions.empty() || o.labels.empty()) throw ValidationError("eval needs --predictions and --labels");
    std::cout << fmt6(stage_eval(run, o.predictions, o.labels)) << '\n';
  } else if (command == "pipeline") {
    json stages = json::object();
    auto sub = [&](const std::string& name, auto&& body) {
      Run r(name, cfg, out);
      body(r);
      stages[name] = r.write_manifest();
      run.metrics()[name] = r.metrics();
    };
    sub("gen", [&](Run& r) { stage_gen(r); });
    sub("features", [&](Run& r) {
      stage_features(r, out / "train_raw.csv", out / "test_raw.csv", out / "train_labels.csv",
                     out / "test_labels.csv");
    });
    if (cfg.transfer.enabled) {
      sub("transfer", [&](Run& r) { stage_transfer(r, out / "train_features.csv", out / "test_features.csv"); });
    }
    sub("train", [&](Run& r) { stage_train(r, default_train, default_test); });
    sub("stack", [&](Run& r) { stage_stack(r, default_train, default_test); });
    fs::path final_preds = out / "stack_test_predictions.csv";
    if (cfg.smooth.enabled) {
      sub("smooth", [&](Run& r) {
        stage_smooth(r, out / "stack_holdout_predictions.csv", default_train, out / "stack_test_predictions.csv",
                     out / "smoothed_predictions.csv");
      });
      final_preds = out / "smoothed_predictions.csv";
    }
    double gbdt_test = 0.0, final_test = 0.0;
    sub("eval", [&](Run& r) {
      gbdt_test = stage_eval(r, out / "gbdt_test_predictions.csv", default_test);
      r.metric("gbdt_test_brier", gbdt_test);
      final_test = stage_eval(r, final_preds, default_test);
      r.metric("final_test_brier", final_test);
    });
    run.metric("stage_manifests", stages);
    std::cout << "gbdt test brier   " << fmt6(gbdt_test) << '\n';
    std::cout << "final test brier  " << fmt6(final_test) << '\n';
  } else {
    throw ValidationError("unknown command '" + command + "'");
  }
  const std::string hash = run.write_manifest();
  if (command != "eval") std::cout << command << " manifest " << hash << '\n';
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Soft-label gradient boosting, stacking and smoothing for per-second activity recognition"};
  app.require_subcommand(1);
  Options o;
  const std::string defaults = "Stage defaults are those printed by `softboost config`.";
  app.footer(defaults);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON run configuration (missing keys keep their defaults)");
    sub->add_option("--seed", o.seed, "Top-level seed, overrides the configuration");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out-dir", o.out_dir, "Directory for artifacts and manifests")->capture_default_str();
  };
  auto* gen = app.add_subcommand("gen", "Generate a synthetic scenario (raw streams and label tables)");
  auto* features = app.add_subcommand("features", "Aggregate per second, correct handedness, resplit, add lags/leads");
  features->add_option("--train-raw", o.train_raw, "Raw stream CSV of the training participants");
  features->add_option("--test-raw", o.test_raw, "Raw stream CSV of the test participants");
  features->add_option("--train-labels", o.train_labels, "Frame-table CSV with training keys and labels");
  features->add_option("--test-labels", o.test_labels, "Frame-table CSV with test keys and labels");
  auto* split = app.add_subcommand("split", "Cut whole sequences of a frame table into subsequences");
  split->add_option("--in", o.input, "Frame-table CSV of whole sequences")->required();
  split->add_option("--out", o.output, "Output frame-table CSV");
  auto* transfer = app.add_subcommand("transfer", "Replace the train-only room column by out-of-fold probabilities");
  auto* train = app.add_subcommand("train", "Grid-search a boosted model with holdout early stopping");
  auto* stack = app.add_subcommand("stack", "Fit level-1 learners out of fold and a boosted stacker");
  for (auto* s : {transfer, train, stack}) {
    s->add_option("--train", o.train, "Training frame-table CSV");
    s->add_option("--test", o.test, "Test frame-table CSV");
  }
  auto* smooth_cmd = app.add_subcommand("smooth", "Optimize and apply the +-2 s smoothing kernel");
  smooth_cmd->add_option("--predictions", o.predictions, "Validation predictions used to fit the kernel");
  smooth_cmd->add_option("--labels", o.labels, "Frame table holding the validation labels");
  smooth_cmd->add_option("--apply", o.apply, "Predictions to smooth");
  smooth_cmd->add_option("--out", o.output, "Smoothed predictions CSV");
  auto* eval = app.add_subcommand("eval", "Print the weighted Brier score of a prediction CSV");
  eval->add_option("--predictions", o.predictions, "Prediction CSV")->required();
  eval->add_option("--labels", o.labels, "Frame-table CSV with soft labels")->required();
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage on a synthetic scenario");
  auto* config = app.add_subcommand("config", "Print the effective configuration");
  for (auto* s : {gen, features, split, transfer, train, stack, smooth_cmd, eval, pipeline, config}) common(s);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    if (!reversed.empty()) reversed.pop_back();  // program name
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (config->parsed()) {
      std::cout << run_config_json(effective_config(o));
      return 0;
    }
    return dispatch(app.get_subcommands().front()->get_name(), o);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(int argc, char** argv) { return run_cli(std::vector<std::string>(argv, argv + argc)); }

}  // namespace softboost
