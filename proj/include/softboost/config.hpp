#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "softboost/ensembles.hpp"
#include "softboost/pipeline.hpp"
#include "softboost/synthgen.hpp"

namespace softboost {

struct FeatureConfig {
  bool handedness = true;
  std::string x_prefix = "acc_x";
  std::string y_prefix = "acc_y";
  std::vector<std::string> lag_lead_columns;
  std::vector<int> orders;
  std::vector<std::string> difference_columns;
};

struct TransferConfig {
  bool enabled = true;
  Level1Spec learner;
  std::string prefix = "room_p";
};

struct TrainConfig {
  BoostConfig base;
  BoostGrid grid;
};

struct SmoothConfig {
  bool enabled = true;
  std::optional<std::array<double, 5>> kernel;  // fixed kernel; optimized when absent
};

/// Every stage's parameters. Stochastic stages take their seeds from `seed`
/// (see derive_seeds); seeds written inside sub-configs are overwritten.
struct RunConfig {
  std::uint64_t seed = 42;
  ScenarioConfig scenario;
  SplitPlan split;
  FeatureConfig features;
  std::vector<int> holdout{6, 10};
  std::string class_weights = "frequency";  // "frequency" or "uniform"
  std::vector<double> class_weight_values;  // explicit weights, override the mode
  TransferConfig transfer;
  TrainConfig train;
  std::vector<Level1Spec> stack_learners;
  StackConfig stack;
  SmoothConfig smooth;
};

/// The built-in configuration used when no file is given.
RunConfig default_run_config();

/// Reads a JSON config; missing keys keep their defaults, unknown keys are errors.
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config(const std::string& text);
std::string run_config_json(const RunConfig& config);

/// Writes stage seeds derived from config.seed into every sub-config.
void derive_seeds(RunConfig& config);

/// Class weights for a label matrix according to the config.
ClassWeights resolve_class_weights(const RunConfig& config, const SoftLabelMatrix& labels);

}  // namespace softboost
