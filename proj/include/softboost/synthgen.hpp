#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "softboost/pipeline.hpp"

namespace softboost {

/// The 20 activity names in their canonical order.
const std::vector<std::string>& activity_name_list();

struct ScenarioConfig {
  int n_train_participants = 10;
  int n_test_participants = 10;
  int sequence_seconds = 1800;
  int n_activities = 20;
  int n_rooms = 4;
  int n_annotators = 5;
  int annotator_jitter_seconds = 1;
  double self_transition_prob = 0.9;
  double left_handed_prob = 0.5;
  double room_change_prob = 0.25;  // per "walk" second
  double noise_scale = 1.0;        // per-sample accelerometer noise
  double second_noise_scale = 0.5; // per-second shared accelerometer noise
  double activity_spread = 0.8;    // spread of per-activity mean accelerations
  std::uint64_t seed = 42;

  void validate() const;
};

struct ParticipantTruth {
  int participant_id = 0;
  bool left_handed = false;
  std::vector<int> activity;  // ground truth per second
  std::vector<int> room;      // ground truth per second
};

struct Scenario {
  FrameTable train;  // keys + room + soft labels; no feature columns
  FrameTable test;   // keys + soft labels; no room column
  std::vector<RawStream> train_streams;
  std::vector<RawStream> test_streams;
  std::vector<ParticipantTruth> train_truth;
  std::vector<ParticipantTruth> test_truth;
  std::vector<std::string> activity_names;
  std::vector<std::string> room_names;
};

/// Deterministic per (config, seed). Participants 1..n_train form the train
/// set, the following n_test ids the test set. Each sequence is one
/// subsequence (id 0) with second_index counting seconds from the start.
Scenario generate_scenario(const ScenarioConfig& config);

/// Sample rate of every channel the generator writes.
std::map<std::string, double> channel_sample_rates(const ScenarioConfig& config);

}  // namespace softboost
