#include "softboost/synthgen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace softboost {

const std::vector<std::string>& activity_name_list() {
  static const std::vector<std::string> names{
      "ascend stairs", "descend stairs", "jump",           "walk with load", "walk",
      "bending",       "kneeling",       "lying",          "sitting",        "squatting",
      "standing",      "stand-to-bend",  "kneel-to-stand", "lie-to-sit",     "sit-to-lie",
      "sit-to-stand",  "stand-to-kneel", "stand-to-sit",   "bend-to-stand",  "turn"};
  return names;
}

void ScenarioConfig::validate() const {
  if (n_train_participants < 1 || n_test_participants < 1 || sequence_seconds < 1 ||
      n_activities < 1 || n_rooms < 1 || n_annotators < 1 || annotator_jitter_seconds < 0) {
    throw ValidationError("scenario: counts must be >= 1");
  }
  for (double p : {self_transition_prob, left_handed_prob, room_change_prob}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("scenario: probabilities must be in [0,1]");
  }
  if (!(noise_scale >= 0.0 && second_noise_scale >= 0.0 && activity_spread >= 0.0)) {
    throw ValidationError("scenario: noise scales must be >= 0");
  }
}

namespace {

constexpr int kAccelHz = 20;
constexpr int kCameraHz = 25;
constexpr int kPirHz = 5;
constexpr double kPirFlip = 0.1;

std::string room_name(int r) {
  static const std::vector<std::string> names{"living_room", "kitchen", "hallway", "bedroom"};
  return r < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(r)]
                                            : "room_" + std::to_string(r);
}

// Sensor resolution of the written samples.
double quantize(double v) { return std::round(v * 1e4) / 1e4; }

int camera_rooms(const ScenarioConfig& cfg) { return cfg.n_rooms == 1 ? 1 : std::min(3, cfg.n_rooms - 1); }

// Per-scenario constants shared by every participant.
struct World {
  int walk = 0;
  std::vector<std::vector<int>> allowed;  // room -> activities
  std::vector<std::array<double, 3>> accel_mean;
  std::vector<double> posture_height;
  std::vector<double> room_center;
};

World make_world(const ScenarioConfig& cfg) {
  World w;
  const int n_act = cfg.n_activities;
  w.walk = n_act > 4 ? 4 : 0;
  std::vector<int> universal{w.walk};
  if (n_act > 10) universal.push_back(10);  // standing
  if (n_act > 19) universal.push_back(19);  // turn
  std::mt19937_64 rng(mix_seed({cfg.seed, 0x3031u}));
  std::bernoulli_distribution half(0.5);
  std::uniform_int_distribution<int> any_room(0, cfg.n_rooms - 1);
  w.allowed.resize(static_cast<std::size_t>(cfg.n_rooms));
  for (int a = 0; a < n_act; ++a) {
    bool is_universal = std::find(universal.begin(), universal.end(), a) != universal.end();
    bool placed = false;
    for (int r = 0; r < cfg.n_rooms; ++r) {
      if (is_universal || half(rng)) {
        w.allowed[static_cast<std::size_t>(r)].push_back(a);
        placed = true;
      }
    }
    if (!placed) w.allowed[static_cast<std::size_t>(any_room(rng))].push_back(a);
    for (auto& v : w.allowed) std::sort(v.begin(), v.end());
  }
  std::normal_distribution<double> spread(0.0, cfg.activity_spread);
  std::uniform_real_distribution<double> height(0.3, 1.8);
  for (int a = 0; a < n_act; ++a) {
    w.accel_mean.push_back({spread(rng), 0.3 + std::abs(spread(rng)), spread(rng)});
    w.posture_height.push_back(height(rng));
  }
  for (int r = 0; r < cfg.n_rooms; ++r) w.room_center.push_back(2.0 * r);
  return w;
}

struct Generated {
  ParticipantTruth truth;
  Matrix labels;
  std::vector<RawStream> streams;
};

Generated generate_participant(const ScenarioConfig& cfg, const World& world, int pid) {
  std::mt19937_64 rng(mix_seed({cfg.seed, static_cast<std::uint64_t>(pid)}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int len = cfg.sequence_seconds;
  const auto ulen = static_cast<std::size_t>(len);

  Generated g;
  auto& truth = g.truth;
  truth.participant_id = pid;
  truth.left_handed = unit(rng) < cfg.left_handed_prob;

  // Ground-truth activity and room paths.
  int room = 0;
  const auto& start_allowed = world.allowed[0];
  int act = std::find(start_allowed.begin(), start_allowed.end(), 10) != start_allowed.end()
                ? 10
                : world.walk;
  for (int s = 0; s < len; ++s) {
    if (s > 0) {
      if (act == world.walk && cfg.n_rooms > 1 && unit(rng) < cfg.room_change_prob) {
        int next = static_cast<int>(unit(rng) * (cfg.n_rooms - 1));
        room = next >= room ? next + 1 : next;
      }
      if (unit(rng) >= cfg.self_transition_prob) {
        const auto& options = world.allowed[static_cast<std::size_t>(room)];
        std::vector<int> reachable;
        for (int a : options) {
          if (a != act) reachable.push_back(a);
        }
        if (!reachable.empty()) {
          act = reachable[static_cast<std::size_t>(unit(rng) * static_cast<double>(reachable.size()))];
        }
      }
    }
    truth.activity.push_back(act);
    truth.room.push_back(room);
  }

  // Annotators: ground truth with every boundary shifted by up to +-jitter.
  std::vector<int> boundaries;  // first second of each new segment
  for (int s = 1; s < len; ++s) {
    if (truth.activity[static_cast<std::size_t>(s)] != truth.activity[static_cast<std::size_t>(s - 1)]) {
      boundaries.push_back(s);
    }
  }
  std::vector<int> segment_activity{truth.activity.front()};
  for (int b : boundaries) segment_activity.push_back(truth.activity[static_cast<std::size_t>(b)]);
  g.labels = Matrix(ulen, static_cast<std::size_t>(cfg.n_activities), 0.0);
  std::uniform_int_distribution<int> jitter(-cfg.annotator_jitter_seconds, cfg.annotator_jitter_seconds);
  const double share = 1.0 / cfg.n_annotators;
  for (int a = 0; a < cfg.n_annotators; ++a) {
    std::vector<int> shifted(boundaries.size());
    int prev = 0;
    for (std::size_t i = 0; i < boundaries.size(); ++i) {
      int b = std::clamp(boundaries[i] + jitter(rng), 1, len - 1);
      shifted[i] = std::max(b, prev);
      prev = shifted[i];
    }
    std::size_t seg = 0;
    for (int s = 0; s < len; ++s) {
      while (seg < shifted.size() && shifted[seg] <= s) ++seg;
      g.labels(static_cast<std::size_t>(s), static_cast<std::size_t>(segment_activity[seg])) += share;
    }
  }
  // Exact multiples of 1/A that sum to 1.
  for (std::size_t s = 0; s < ulen; ++s) {
    for (auto& v : g.labels.row(s)) v = std::round(v * cfg.n_annotators) / cfg.n_annotators;
  }

  // Sensor streams.
  const double hand = truth.left_handed ? -1.0 : 1.0;
  const char* axes[3] = {"acc_x", "acc_y", "acc_z"};
  std::array<RawStream, 3> accel;
  for (int k = 0; k < 3; ++k) accel[static_cast<std::size_t>(k)] = {pid, axes[k], kAccelHz, {}};
  RawStream cam_x{pid, "cam_x", kCameraHz, {}}, cam_y{pid, "cam_y", kCameraHz, {}};
  std::vector<RawStream> pir;
  for (int r = 0; r < cfg.n_rooms; ++r) pir.push_back({pid, "pir_" + room_name(r), kPirHz, {}});

  for (int s = 0; s < len; ++s) {
    const auto us = static_cast<std::size_t>(s);
    const int a = truth.activity[us];
    const int r = truth.room[us];
    const auto& mean = world.accel_mean[static_cast<std::size_t>(a)];
    std::array<double, 3> shared{};
    for (auto& v : shared) v = cfg.second_noise_scale * gauss(rng);
    for (int j = 0; j < kAccelHz; ++j) {
      const std::int64_t t = 1000LL * s + 1000LL * j / kAccelHz;
      for (std::size_t k = 0; k < 3; ++k) {
        double v = mean[k] + shared[k] + cfg.noise_scale * gauss(rng);
        if (k < 2) v *= hand;
        accel[k].samples.push_back({t, quantize(v)});
      }
    }
    if (r < camera_rooms(cfg)) {
      const double cx = world.room_center[static_cast<std::size_t>(r)] + 0.3 * gauss(rng);
      const double cy = world.posture_height[static_cast<std::size_t>(a)] + 0.15 * gauss(rng);
      for (int j = 0; j < kCameraHz; ++j) {
        const std::int64_t t = 1000LL * s + 1000LL * j / kCameraHz;
        cam_x.samples.push_back({t, quantize(cx + 0.05 * gauss(rng))});
        cam_y.samples.push_back({t, quantize(cy + 0.05 * gauss(rng))});
      }
    }
    for (int j = 0; j < kPirHz; ++j) {
      const std::int64_t t = 1000LL * s + 1000LL * j / kPirHz;
      for (int q = 0; q < cfg.n_rooms; ++q) {
        bool on = (q == r) != (unit(rng) < kPirFlip);
        pir[static_cast<std::size_t>(q)].samples.push_back({t, on ? 1.0 : 0.0});
      }
    }
  }
  for (auto& st : accel) g.streams.push_back(std::move(st));
  g.streams.push_back(std::move(cam_x));
  g.streams.push_back(std::move(cam_y));
  for (auto& st : pir) g.streams.push_back(std::move(st));
  return g;
}

void append(FrameTable& table, const Generated& g, bool with_room) {
  const std::size_t n = g.truth.activity.size();
  for (std::size_t s = 0; s < n; ++s) {
    table.keys.push_back({g.truth.participant_id, 0, static_cast<int>(s)});
    if (with_room) table.room->push_back(g.truth.room[s]);
  }
  auto& y = *table.labels;
  Matrix merged(y.rows() + n, table.n_classes);
  std::copy(y.data().begin(), y.data().end(), merged.data().begin());
  std::copy(g.labels.data().begin(), g.labels.data().end(),
            merged.data().begin() + static_cast<std::ptrdiff_t>(y.data().size()));
  y = std::move(merged);
}

}  // namespace

std::map<std::string, double> channel_sample_rates(const ScenarioConfig& cfg) {
  std::map<std::string, double> rates{{"acc_x", kAccelHz}, {"acc_y", kAccelHz}, {"acc_z", kAccelHz},
                                      {"cam_x", kCameraHz}, {"cam_y", kCameraHz}};
  for (int r = 0; r < cfg.n_rooms; ++r) rates["pir_" + room_name(r)] = kPirHz;
  return rates;
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  const World world = make_world(cfg);
  Scenario sc;
  const auto& all_names = activity_name_list();
  for (int a = 0; a < cfg.n_activities; ++a) {
    sc.activity_names.push_back(a < 20 ? all_names[static_cast<std::size_t>(a)]
                                       : "activity_" + std::to_string(a));
  }
  for (int r = 0; r < cfg.n_rooms; ++r) sc.room_names.push_back(room_name(r));

  const int total = cfg.n_train_participants + cfg.n_test_participants;
  std::vector<Generated> parts(static_cast<std::size_t>(total));
  parallel_for(parts.size(), [&](std::size_t i) {
    parts[i] = generate_participant(cfg, world, static_cast<int>(i) + 1);
  });

  for (FrameTable* t : {&sc.train, &sc.test}) {
    t->n_classes = static_cast<std::size_t>(cfg.n_activities);
    t->features = Matrix(0, 0);
    t->labels = Matrix(0, t->n_classes);
  }
  sc.train.room.emplace();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const bool is_train = static_cast<int>(i) < cfg.n_train_participants;
    append(is_train ? sc.train : sc.test, parts[i], is_train);
    auto& streams = is_train ? sc.train_streams : sc.test_streams;
    for (auto& st : parts[i].streams) streams.push_back(std::move(st));
    (is_train ? sc.train_truth : sc.test_truth).push_back(std::move(parts[i].truth));
  }
  sc.train.features = Matrix(sc.train.size(), 0);
  sc.test.features = Matrix(sc.test.size(), 0);
  return sc;
}

}  // namespace softboost
