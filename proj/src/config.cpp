#include "softboost/config.hpp"

#include "json_codec.hpp"
#include "softboost/persist.hpp"
#include "softboost/postprocess.hpp"

namespace softboost {

using codec::check_keys;
using codec::json;
using codec::read;

RunConfig default_run_config() {
  RunConfig c;
  c.split.permute = true;

  c.features.lag_lead_columns = {"acc_x_mean", "acc_y_mean", "acc_z_mean", "cam_x_mean", "cam_y_mean"};
  c.features.orders = {1, 2, 3, 5};
  c.features.difference_columns = {"acc_x_mean", "acc_y_mean", "acc_z_mean"};

  c.transfer.learner.name = "room_forest";
  c.transfer.learner.kind = Level1Kind::forest;
  c.transfer.learner.forest.n_trees = 20;
  c.transfer.learner.forest.tree.max_depth = 8;
  c.transfer.learner.forest.tree.min_child_weight = 5.0;
  c.transfer.learner.forest.tree.colsample = 0.5;

  c.train.base.n_rounds_max = 60;
  c.train.base.learning_rate = 0.3;
  c.train.base.early_stopping_rounds = 10;
  c.train.base.tree.max_depth = 3;
  c.train.base.tree.colsample = 0.3;
  c.train.grid.max_depth = {3, 4};

  Level1Spec gb;
  gb.name = "gbdt_brier";
  gb.kind = Level1Kind::gbdt;
  gb.boost = c.train.base;
  gb.boost.n_rounds_max = 40;
  gb.boost.early_stopping_rounds = 5;
  Level1Spec forest;
  forest.name = "forest";
  forest.kind = Level1Kind::forest;
  forest.forest.n_trees = 10;
  forest.forest.tree.max_depth = 8;
  forest.forest.tree.min_child_weight = 3.0;
  forest.forest.tree.colsample = 0.3;
  Level1Spec extra = forest;
  extra.name = "extra_trees";
  extra.kind = Level1Kind::extra_trees;
  Level1Spec nb;
  nb.name = "naive_bayes";
  nb.kind = Level1Kind::naive_bayes;
  nb.exclude_prefixes = {"lag_", "lead_", "diff_"};
  c.stack_learners = {gb, forest, extra, nb};

  c.stack.stacker.n_rounds_max = 60;
  c.stack.stacker.learning_rate = 0.3;
  c.stack.stacker.early_stopping_rounds = 5;
  c.stack.stacker.tree.max_depth = 2;
  c.stack.stacker.tree.colsample = 1.0;
  c.stack.grid.max_depth = {2};
  return c;
}

namespace {

json encode_scenario(const ScenarioConfig& s) {
  return {{"n_train_participants", s.n_train_participants},
          {"n_test_participants", s.n_test_participants},
          {"sequence_seconds", s.sequence_seconds},
          {"n_activities", s.n_activities},
          {"n_rooms", s.n_rooms},
          {"n_annotators", s.n_annotators},
          {"annotator_jitter_seconds", s.annotator_jitter_seconds},
          {"self_transition_prob", s.self_transition_prob},
          {"left_handed_prob", s.left_handed_prob},
          {"room_change_prob", s.room_change_prob},
          {"noise_scale", s.noise_scale},
          {"second_noise_scale", s.second_noise_scale},
          {"activity_spread", s.activity_spread}};
}

void decode_scenario(const json& j, ScenarioConfig& s) {
  check_keys(j,
             {"n_train_participants", "n_test_participants", "sequence_seconds", "n_activities", "n_rooms",
              "n_annotators", "annotator_jitter_seconds", "self_transition_prob", "left_handed_prob",
              "room_change_prob", "noise_scale", "second_noise_scale", "activity_spread"},
             "scenario");
  read(j, "n_train_participants", s.n_train_participants);
  read(j, "n_test_participants", s.n_test_participants);
  read(j, "sequence_seconds", s.sequence_seconds);
  read(j, "n_activities", s.n_activities);
  read(j, "n_rooms", s.n_rooms);
  read(j, "n_annotators", s.n_annotators);
  read(j, "annotator_jitter_seconds", s.annotator_jitter_seconds);
  read(j, "self_transition_prob", s.self_transition_prob);
  read(j, "left_handed_prob", s.left_handed_prob);
  read(j, "room_change_prob", s.room_change_prob);
  read(j, "noise_scale", s.noise_scale);
  read(j, "second_noise_scale", s.second_noise_scale);
  read(j, "activity_spread", s.activity_spread);
}

}  // namespace

std::string run_config_json(const RunConfig& c) {
  json learners = json::array();
  for (const auto& s : c.stack_learners) learners.push_back(codec::encode(s));
  json smooth{{"enabled", c.smooth.enabled}};
  if (c.smooth.kernel) smooth["kernel"] = *c.smooth.kernel;
  json doc{
      {"seed", c.seed},
      {"scenario", encode_scenario(c.scenario)},
      {"split",
       {{"duration_min", c.split.duration_min},
        {"duration_max", c.split.duration_max},
        {"gap_min", c.split.gap_min},
        {"gap_max", c.split.gap_max},
        {"permute", c.split.permute}}},
      {"features",
       {{"handedness", c.features.handedness},
        {"x_prefix", c.features.x_prefix},
        {"y_prefix", c.features.y_prefix},
        {"lag_lead_columns", c.features.lag_lead_columns},
        {"orders", c.features.orders},
        {"difference_columns", c.features.difference_columns}}},
      {"holdout", c.holdout},
      {"class_weights", c.class_weights},
      {"class_weight_values", c.class_weight_values},
      {"transfer",
       {{"enabled", c.transfer.enabled}, {"learner", codec::encode(c.transfer.learner)}, {"prefix", c.transfer.prefix}}},
      {"train", {{"base", codec::encode(c.train.base)}, {"grid", codec::encode(c.train.grid)}}},
      {"stack",
       {{"learners", learners},
        {"stacker", codec::encode(c.stack.stacker)},
        {"grid", codec::encode(c.stack.grid)},
        {"include_base_features", c.stack.include_base_features}}},
      {"smooth", smooth}};
  return doc.dump(2) + "\n";
}

RunConfig parse_run_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig c = default_run_config();
  check_keys(j,
             {"seed", "scenario", "split", "features", "holdout", "class_weights", "class_weight_values",
              "transfer", "train", "stack", "smooth"},
             "config");
  read(j, "seed", c.seed);
  if (j.contains("scenario")) decode_scenario(j["scenario"], c.scenario);
  if (j.contains("split")) {
    const auto& s = j["split"];
    check_keys(s, {"duration_min", "duration_max", "gap_min", "gap_max", "permute"}, "split");
    read(s, "duration_min", c.split.duration_min);
    read(s, "duration_max", c.split.duration_max);
    read(s, "gap_min", c.split.gap_min);
    read(s, "gap_max", c.split.gap_max);
    read(s, "permute", c.split.permute);
  }
  if (j.contains("features")) {
    const auto& f = j["features"];
    check_keys(f, {"handedness", "x_prefix", "y_prefix", "lag_lead_columns", "orders", "difference_columns"},
               "features");
    read(f, "handedness", c.features.handedness);
    read(f, "x_prefix", c.features.x_prefix);
    read(f, "y_prefix", c.features.y_prefix);
    read(f, "lag_lead_columns", c.features.lag_lead_columns);
    read(f, "orders", c.features.orders);
    read(f, "difference_columns", c.features.difference_columns);
  }
  read(j, "holdout", c.holdout);
  read(j, "class_weights", c.class_weights);
  read(j, "class_weight_values", c.class_weight_values);
  if (c.class_weights != "frequency" && c.class_weights != "uniform") {
    throw ValidationError("class_weights must be \"frequency\" or \"uniform\"");
  }
  if (j.contains("transfer")) {
    const auto& t = j["transfer"];
    check_keys(t, {"enabled", "learner", "prefix"}, "transfer");
    read(t, "enabled", c.transfer.enabled);
    if (t.contains("learner")) c.transfer.learner = codec::decode_level1_spec(t["learner"], c.transfer.learner);
    read(t, "prefix", c.transfer.prefix);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    check_keys(t, {"base", "grid"}, "train");
    if (t.contains("base")) c.train.base = codec::decode_boost_config(t["base"], c.train.base);
    if (t.contains("grid")) c.train.grid = codec::decode_grid(t["grid"]);
  }
  if (j.contains("stack")) {
    const auto& s = j["stack"];
    check_keys(s, {"learners", "stacker", "grid", "include_base_features"}, "stack");
    if (s.contains("learners")) {
      c.stack_learners.clear();
      for (const auto& l : s["learners"]) c.stack_learners.push_back(codec::decode_level1_spec(l));
    }
    if (s.contains("stacker")) c.stack.stacker = codec::decode_boost_config(s["stacker"], c.stack.stacker);
    if (s.contains("grid")) c.stack.grid = codec::decode_grid(s["grid"]);
    read(s, "include_base_features", c.stack.include_base_features);
  }
  if (j.contains("smooth")) {
    const auto& s = j["smooth"];
    check_keys(s, {"enabled", "kernel"}, "smooth");
    read(s, "enabled", c.smooth.enabled);
    if (s.contains("kernel") && !s["kernel"].is_null()) {
      c.smooth.kernel = s["kernel"].get<std::array<double, 5>>();
      SmoothKernel check(*c.smooth.kernel);
    }
  }
  c.scenario.validate();
  c.split.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) { return parse_run_config(read_text_file(path)); }

namespace {

std::uint64_t name_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

void seed_spec(Level1Spec& spec, std::uint64_t seed) {
  spec.boost.seed = seed;
  spec.boost.tree.seed = seed;
  spec.forest.seed = seed;
  spec.forest.tree.seed = seed;
}

}  // namespace

void derive_seeds(RunConfig& c) {
  c.scenario.seed = c.seed;
  c.split.seed = mix_seed({c.seed, 1});
  seed_spec(c.transfer.learner, mix_seed({c.seed, 3}));
  c.train.base.seed = mix_seed({c.seed, 4});
  c.train.base.tree.seed = c.train.base.seed;
  for (auto& s : c.stack_learners) seed_spec(s, mix_seed({c.seed, 5, name_hash(s.name)}));
  c.stack.stacker.seed = mix_seed({c.seed, 6});
  c.stack.stacker.tree.seed = c.stack.stacker.seed;
}

ClassWeights resolve_class_weights(const RunConfig& c, const SoftLabelMatrix& labels) {
  if (!c.class_weight_values.empty()) {
    if (c.class_weight_values.size() != labels.cols()) {
      throw ValidationError("class_weight_values has " + std::to_string(c.class_weight_values.size()) +
                            " entries for " + std::to_string(labels.cols()) + " classes");
    }
    return ClassWeights(c.class_weight_values);
  }
  if (c.class_weights == "uniform") return ClassWeights::uniform(labels.cols());
  return class_weights_from_frequency(labels);
}

}  // namespace softboost
