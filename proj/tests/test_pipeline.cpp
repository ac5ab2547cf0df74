#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "softboost/pipeline.hpp"
#include "support.hpp"

using namespace softboost;
using testing_support::Gen;

namespace {

FrameTable sequences(const std::vector<std::pair<int, int>>& lengths, std::size_t f = 1) {
  FrameTable t;
  for (std::size_t j = 0; j < f; ++j) t.columns.push_back("f" + std::to_string(j));
  for (auto [pid, len] : lengths) {
    for (int s = 0; s < len; ++s) t.keys.push_back({pid, 0, s});
  }
  t.features = Matrix(t.size(), f);
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (std::size_t j = 0; j < f; ++j) t.features(r, j) = 1000.0 * t.keys[r].participant_id + t.keys[r].second_index + 0.1 * j;
  }
  return t;
}

}  // namespace

TEST_CASE("per-second aggregates match a direct computation") {
  Gen g(1);
  for (int trial = 0; trial < 20; ++trial) {
    RawStream s;
    s.channel = "acc_x";
    std::int64_t t = 0;
    while (t < 5000) {
      s.samples.push_back({t, g.normal()});
      t += g.integer(1, 400);
    }
    auto agg = aggregate_second(s);
    REQUIRE(agg.rows() == static_cast<std::size_t>(s.samples.back().t_ms / 1000 + 1));
    for (std::size_t sec = 0; sec < agg.rows(); ++sec) {
      std::vector<double> v;
      for (const auto& x : s.samples) {
        if (x.t_ms / 1000 == static_cast<std::int64_t>(sec)) v.push_back(x.value);
      }
      if (v.empty()) {
        for (std::size_t k = 0; k < 5; ++k) CHECK(is_missing(agg(sec, k)));
        continue;
      }
      std::sort(v.begin(), v.end());
      double mean = 0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double var = 0;
      for (double x : v) var += (x - mean) * (x - mean);
      const double med = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
      CHECK(agg(sec, 0) == doctest::Approx(mean).epsilon(1e-12));
      CHECK(agg(sec, 1) == med);
      CHECK(agg(sec, 2) == v.front());
      CHECK(agg(sec, 3) == v.back());
      CHECK(agg(sec, 4) == doctest::Approx(std::sqrt(var / static_cast<double>(v.size()))).epsilon(1e-12));
    }
  }
}

TEST_CASE("aggregation pads to the requested length and rejects bad streams") {
  RawStream s;
  s.channel = "pir";
  s.samples = {{500, 1.0}, {1500, 3.0}};
  auto agg = aggregate_second(s, 4);
  CHECK(agg.rows() == 4);
  CHECK(agg(1, 0) == 3.0);
  CHECK(is_missing(agg(3, 0)));
  s.samples = {{1500, 1.0}, {500, 3.0}};
  CHECK_THROWS_AS(aggregate_second(s), ValidationError);
  s.samples = {};
  s.sample_rate = 0;
  CHECK_THROWS_AS(aggregate_second(s), ValidationError);
}

TEST_CASE("frame table joins channels in sorted order") {
  FrameTable labels;
  labels.n_classes = 2;
  labels.keys = {{1, 0, 0}, {1, 0, 1}, {2, 0, 0}};
  labels.features = Matrix(3, 0);
  labels.labels = Matrix::from_rows({{1, 0}, {0, 1}, {0.5, 0.5}});
  RawStream a{1, "zeta", 20.0, {{100, 1.0}, {1100, 2.0}}};
  RawStream b{1, "alpha", 20.0, {{100, 5.0}}};
  auto t = build_frame_table({a, b}, labels);
  CHECK(t.columns.size() == 10);
  CHECK(t.columns[0] == "alpha_mean");
  CHECK(t.columns[5] == "zeta_mean");
  CHECK(t.features(0, 0) == 5.0);
  CHECK(is_missing(t.features(1, 0)));
  CHECK(t.features(1, 5) == 2.0);
  CHECK(is_missing(t.features(2, 5)));
  CHECK(validate_table(t).empty());
}

TEST_CASE("handedness correction negates minority-sign participants") {
  FrameTable t;
  t.columns = {"acc_x_mean", "acc_x_median", "acc_x_min", "acc_x_max", "acc_x_std",
               "acc_y_mean", "acc_y_median", "acc_y_min", "acc_y_max", "acc_y_std"};
  for (int pid : {1, 2, 3}) {
    for (int s = 0; s < 3; ++s) t.keys.push_back({pid, 0, s});
  }
  t.features = Matrix(9, 10);
  for (std::size_t r = 0; r < 9; ++r) {
    const double sign = t.keys[r].participant_id == 3 ? -1.0 : 1.0;
    t.features(r, 0) = 0.5;
    t.features(r, 1) = 0.4;
    t.features(r, 2) = -1.0;
    t.features(r, 3) = 2.0;
    t.features(r, 4) = 0.3;
    t.features(r, 5) = sign * 1.0;
    t.features(r, 6) = sign * 1.0;
    t.features(r, 7) = sign > 0 ? 0.5 : -1.5;
    t.features(r, 8) = sign > 0 ? 1.5 : -0.5;
    t.features(r, 9) = 0.2;
  }
  auto signs = handedness_signs(t);
  CHECK(signs.at(3) == -1);
  CHECK(majority_sign(signs) == 1);
  auto res = correct_handedness(t);
  CHECK_FALSE(res.flipped.at(1));
  CHECK(res.flipped.at(3));
  const auto& f = res.table.features;
  CHECK(f(6, 0) == -0.5);
  CHECK(f(6, 2) == -2.0);
  CHECK(f(6, 3) == 1.0);
  CHECK(f(6, 4) == 0.3);
  CHECK(f(6, 5) == 1.0);
  CHECK(f(6, 7) == 0.5);
  CHECK(f(6, 8) == 1.5);
  CHECK(f(0, 0) == 0.5);
  auto forced = correct_handedness(t, "acc_x", "acc_y", -1);
  CHECK(forced.flipped.at(1));
  CHECK_FALSE(forced.flipped.at(3));
  CHECK(majority_sign({{1, 1}, {2, -1}}) == 1);
}

TEST_CASE("split windows respect the plan and never overlap") {
  Gen g(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::pair<int, int>> lens;
    for (int p = 1; p <= 3; ++p) lens.push_back({p, g.integer(5, 400)});
    auto seq = sequences(lens);
    SplitPlan plan;
    plan.seed = static_cast<std::uint64_t>(trial);
    plan.permute = trial % 2 == 1;
    auto res = split_into_subsequences(seq, plan);
    CHECK(validate_table(res.table).empty());
    std::set<int> ids;
    for (const auto& w : res.windows) {
      CHECK(ids.insert(w.subsequence_id).second);
      const int len = lens[static_cast<std::size_t>(w.participant_id - 1)].second;
      if (len >= plan.duration_min) {
        CHECK(w.length >= 10);
        CHECK(w.length <= 30);
      } else {
        CHECK(w.length == static_cast<std::size_t>(len));
      }
    }
    for (int gap : res.gaps) {
      CHECK(gap >= 10);
      CHECK(gap <= 30);
    }
    for (std::size_t r = 0; r < res.table.size(); ++r) {
      const auto& src = seq.keys[res.source_rows[r]];
      CHECK(src.participant_id == res.table.keys[r].participant_id);
      CHECK(res.table.features(r, 0) == seq.features(res.source_rows[r], 0));
    }
    std::set<std::size_t> used(res.source_rows.begin(), res.source_rows.end());
    CHECK(used.size() == res.source_rows.size());
  }
}

TEST_CASE("split of a participant spanning several subsequences is rejected") {
  auto seq = sequences({{1, 40}});
  seq.keys[20].subsequence_id = 1;
  CHECK_THROWS_AS(split_into_subsequences(seq, SplitPlan{}), ValidationError);
  SplitPlan bad;
  bad.duration_min = 0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("lag and lead never cross a subsequence boundary") {
  Gen g(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto seq = sequences({{1, 300}, {2, 200}}, 2);
    SplitPlan plan;
    plan.seed = static_cast<std::uint64_t>(trial);
    plan.permute = true;
    auto split = split_into_subsequences(seq, plan).table;
    const std::vector<int> orders{1, 2, 5};
    auto t = add_lag_lead(split, {"f0", "f1"}, orders);
    auto idx = subsequence_index(t);
    for (const auto& [key, rows] : idx) {
      const long len = static_cast<long>(rows.size());
      for (long pos = 0; pos < len; ++pos) {
        const std::size_t r = rows[static_cast<std::size_t>(pos)];
        for (int f = 0; f < 2; ++f) {
          for (int k : orders) {
            const std::string base = "f" + std::to_string(f);
            double lag = t.features(r, t.column_index("lag_" + std::to_string(k) + "_" + base));
            double lead = t.features(r, t.column_index("lead_" + std::to_string(k) + "_" + base));
            if (pos - k >= 0) {
              CHECK(lag == t.features(rows[static_cast<std::size_t>(pos - k)], t.column_index(base)));
            } else {
              CHECK(is_missing(lag));
            }
            if (pos + k < len) {
              CHECK(lead == t.features(rows[static_cast<std::size_t>(pos + k)], t.column_index(base)));
            } else {
              CHECK(is_missing(lead));
            }
          }
        }
      }
    }
  }
}

TEST_CASE("lag/lead column order and differences") {
  auto seq = sequences({{1, 5}});
  auto t = add_lag_lead(seq, {"f0"}, {2, 1});
  CHECK(t.columns == std::vector<std::string>{"f0", "lag_1_f0", "lead_1_f0", "lag_2_f0", "lead_2_f0"});
  auto d = add_differences(seq, {"f0"});
  CHECK(is_missing(d.features(0, 1)));
  CHECK(d.features(3, 1) == 1.0);
  CHECK_THROWS_AS(add_lag_lead(seq, {"f0"}, {0}), ValidationError);
  CHECK_THROWS_AS(add_lag_lead(seq, {"nope"}, {1}), ValidationError);
}

TEST_CASE("raw stream csv round trip") {
  testing_support::TempDir dir;
  RawStream a{1, "acc_x", 20.0, {{0, 0.5}, {50, -1.25}}};
  RawStream b{2, "pir_kitchen", 1.0, {{0, 1.0}}};
  write_raw_streams(dir.file("raw.csv"), {a, b});
  auto back = read_raw_streams(dir.file("raw.csv"), {{"acc_x", 20.0}, {"pir_kitchen", 1.0}});
  REQUIRE(back.size() == 2);
  std::sort(back.begin(), back.end(), [](const RawStream& x, const RawStream& y) { return x.participant_id < y.participant_id; });
  CHECK(back[0].channel == "acc_x");
  CHECK(back[0].samples.size() == 2);
  CHECK(back[0].samples[1].value == -1.25);
  CHECK(back[1].sample_rate == 1.0);
}
