#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "softboost/data.hpp"

namespace softboost {

struct Sample {
  std::int64_t t_ms;
  double value;
};

/// One sensor channel of one participant. Time is measured from the start of
/// the participant's sequence.
struct RawStream {
  int participant_id = 0;
  std::string channel;
  double sample_rate = 20.0;  // Hz
  std::vector<Sample> samples;

  void validate() const;
};

inline const std::vector<std::string>& second_stat_names() {
  static const std::vector<std::string> names{"mean", "median", "min", "max", "std"};
  return names;
}

/// Per-second (mean, median, min, max, population std) of a stream. Row s
/// covers t in [1000 s, 1000 (s+1)) ms; rows run from second 0 through the
/// second of the last sample, or `n_seconds` rows when given. Seconds
/// without samples are all missing.
Matrix aggregate_second(const RawStream& stream, std::optional<std::size_t> n_seconds = {});

// Raw-stream CSV: participant_id,channel,t_ms,value
void write_raw_streams(const std::string& path, const std::vector<RawStream>& streams);
std::vector<RawStream> read_raw_streams(const std::string& path,
                                        const std::map<std::string, double>& rates = {});

/// Joins per-second aggregates of every channel onto a label table whose
/// rows are whole sequences (second_index = seconds since start). Columns are
/// named <channel>_<stat>, channels in sorted order.
FrameTable build_frame_table(const std::vector<RawStream>& streams, const FrameTable& labels);

struct HandednessResult {
  FrameTable table;
  std::map<int, bool> flipped;  // participant -> negated
};

/// Sign (+1, -1, or 0 for a zero median) of each participant's median
/// per-second mean y-acceleration.
std::map<int, int> handedness_signs(const FrameTable& table, const std::string& y_prefix = "acc_y");

/// The more common nonzero sign, +1 on ties.
int majority_sign(const std::map<int, int>& signs);

/// Flags participants whose median per-second mean y-acceleration has the
/// minority sign and negates their x/y accelerometer aggregates (min and max
/// swap under negation). Columns are found as <x_prefix>_<stat> and
/// <y_prefix>_<stat>. `majority` replaces the sign computed from this table,
/// so tables holding different participants can share one convention.
HandednessResult correct_handedness(const FrameTable& table, const std::string& x_prefix = "acc_x",
                                    const std::string& y_prefix = "acc_y",
                                    std::optional<int> majority = std::nullopt);

struct SplitPlan {
  int duration_min = 10;
  int duration_max = 30;
  int gap_min = 10;
  int gap_max = 30;
  std::uint64_t seed = 0;
  bool permute = false;

  void validate() const;
};

struct Window {
  int participant_id;
  int subsequence_id;
  std::size_t start;   // offset within the participant's sequence
  std::size_t length;
};

struct SplitResult {
  FrameTable table;
  std::vector<std::size_t> source_rows;  // input row of every output row
  std::vector<Window> windows;
  std::vector<int> gaps;  // sampled gap lengths, in walk order
};

/// Cuts each participant's sequence into windows: duration ~ U{min..max},
/// then gap ~ U{min..max}, repeated. A trailing window shorter than the
/// minimum is dropped; a sequence shorter than the minimum is kept whole with
/// a warning. Sampling uses one generator per participant (seed + id).
SplitResult split_into_subsequences(const FrameTable& sequences, const SplitPlan& plan);

/// lag_k_<f>[s] = f[s-k], lead_k_<f>[s] = f[s+k] within the subsequence,
/// missing outside it. For each base column, orders ascending, lag then lead.
FrameTable add_lag_lead(const FrameTable& table, const std::vector<std::string>& base_columns,
                        const std::vector<int>& orders);

/// diff_<f>[s] = f[s] - f[s-1] within the subsequence.
FrameTable add_differences(const FrameTable& table, const std::vector<std::string>& base_columns);

/// Row indices of each (participant, subsequence) block ordered by second.
std::map<std::pair<int, int>, std::vector<std::size_t>> subsequence_index(const FrameTable& table);

}  // namespace softboost
