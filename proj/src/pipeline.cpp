#include "softboost/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "softboost/csv_io.hpp"

namespace softboost {

void RawStream::validate() const {
  if (!(sample_rate > 0.0)) throw ValidationError("stream " + channel + ": sample rate must be > 0");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].t_ms < samples[i - 1].t_ms) {
      throw ValidationError("stream " + channel + " of participant " +
                            std::to_string(participant_id) + ": timestamps decrease at sample " +
                            std::to_string(i));
    }
  }
}

Matrix aggregate_second(const RawStream& stream, std::optional<std::size_t> n_seconds) {
  stream.validate();
  std::size_t rows = 0;
  if (n_seconds) {
    rows = *n_seconds;
  } else if (!stream.samples.empty()) {
    if (stream.samples.back().t_ms < 0) throw ValidationError("negative timestamp");
    rows = static_cast<std::size_t>(stream.samples.back().t_ms / 1000) + 1;
  }
  Matrix out(rows, 5, kMissing);
  std::vector<double> values;
  std::size_t i = 0;
  const auto& s = stream.samples;
  while (i < s.size()) {
    if (s[i].t_ms < 0) throw ValidationError("negative timestamp");
    const std::int64_t sec = s[i].t_ms / 1000;
    values.clear();
    while (i < s.size() && s[i].t_ms / 1000 == sec) values.push_back(s[i++].value);
    if (static_cast<std::size_t>(sec) >= rows) continue;
    const double n = static_cast<double>(values.size());
    double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    double median = values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
    auto row = out.row(static_cast<std::size_t>(sec));
    row[0] = mean;
    row[1] = median;
    row[2] = values.front();
    row[3] = values.back();
    row[4] = std::sqrt(var / n);
  }
  return out;
}

void write_raw_streams(const std::string& path, const std::vector<RawStream>& streams) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << "participant_id,channel,t_ms,value\n";
  for (const auto& st : streams) {
    for (const auto& smp : st.samples) {
      out << st.participant_id << ',' << st.channel << ',' << smp.t_ms << ','
          << format_double(smp.value) << '\n';
    }
  }
}

std::vector<RawStream> read_raw_streams(const std::string& path,
                                        const std::map<std::string, double>& rates) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": missing header");
  auto header = split_csv_line(line);
  if (header != std::vector<std::string>{"participant_id", "channel", "t_ms", "value"}) {
    throw ValidationError(path + ": header must be participant_id,channel,t_ms,value");
  }
  std::map<std::pair<int, std::string>, std::size_t> where;
  std::vector<RawStream> streams;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 4) throw ValidationError(path + ": line " + std::to_string(line_no));
    int pid = parse_int(cells[0], line_no);
    auto key = std::make_pair(pid, cells[1]);
    auto it = where.find(key);
    if (it == where.end()) {
      it = where.emplace(key, streams.size()).first;
      RawStream st;
      st.participant_id = pid;
      st.channel = cells[1];
      if (auto r = rates.find(cells[1]); r != rates.end()) st.sample_rate = r->second;
      streams.push_back(std::move(st));
    }
    std::int64_t t = 0;
    auto [ptr, ec] = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), t);
    if (ec != std::errc()) throw ValidationError(path + ": bad t_ms at line " + std::to_string(line_no));
    streams[it->second].samples.push_back({t, parse_double(cells[3], line_no)});
  }
  for (const auto& st : streams) st.validate();
  return streams;
}

FrameTable build_frame_table(const std::vector<RawStream>& streams, const FrameTable& labels) {
  std::set<std::string> channels;
  for (const auto& s : streams) channels.insert(s.channel);
  std::map<std::pair<int, std::string>, const RawStream*> by_key;
  for (const auto& s : streams) {
    if (!by_key.emplace(std::make_pair(s.participant_id, s.channel), &s).second) {
      throw ValidationError("duplicate stream for participant " +
                            std::to_string(s.participant_id) + " channel " + s.channel);
    }
  }
  // Rows of each participant, addressed by second.
  std::map<int, std::vector<std::size_t>> rows_of;
  for (std::size_t r = 0; r < labels.size(); ++r) rows_of[labels.keys[r].participant_id].push_back(r);

  FrameTable out = labels;
  std::vector<std::string> names;
  for (const auto& ch : channels) {
    for (const auto& stat : second_stat_names()) names.push_back(ch + "_" + stat);
  }
  Matrix values(labels.size(), names.size(), kMissing);
  std::size_t ch_index = 0;
  for (const auto& ch : channels) {
    for (const auto& [pid, rows] : rows_of) {
      auto it = by_key.find({pid, ch});
      if (it == by_key.end()) continue;
      int max_second = 0;
      for (std::size_t r : rows) max_second = std::max(max_second, labels.keys[r].second_index);
      Matrix agg = aggregate_second(*it->second, static_cast<std::size_t>(max_second) + 1);
      for (std::size_t r : rows) {
        auto sec = static_cast<std::size_t>(labels.keys[r].second_index);
        for (std::size_t k = 0; k < 5; ++k) values(r, ch_index * 5 + k) = agg(sec, k);
      }
    }
    ++ch_index;
  }
  out.append_columns(names, values);
  return out;
}

std::map<int, int> handedness_signs(const FrameTable& table, const std::string& y_prefix) {
  const std::size_t y_mean = table.column_index(y_prefix + "_mean");
  std::map<int, std::vector<double>> y_by_participant;
  for (std::size_t r = 0; r < table.size(); ++r) {
    double v = table.features(r, y_mean);
    auto& vec = y_by_participant[table.keys[r].participant_id];
    if (!is_missing(v)) vec.push_back(v);
  }
  std::map<int, int> sign;
  for (auto& [pid, v] : y_by_participant) {
    int s = 0;
    if (!v.empty()) {
      std::sort(v.begin(), v.end());
      const std::size_t mid = v.size() / 2;
      double median = v.size() % 2 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
      s = median > 0.0 ? 1 : (median < 0.0 ? -1 : 0);
    }
    sign[pid] = s;
  }
  return sign;
}

int majority_sign(const std::map<int, int>& signs) {
  int positive = 0, negative = 0;
  for (const auto& [pid, s] : signs) {
    positive += s > 0;
    negative += s < 0;
  }
  return negative > positive ? -1 : 1;
}

HandednessResult correct_handedness(const FrameTable& table, const std::string& x_prefix,
                                    const std::string& y_prefix, std::optional<int> majority_override) {
  const std::map<int, int> sign = handedness_signs(table, y_prefix);
  for (const auto& [pid, s] : sign) {
    if (s == 0) warn("participant " + std::to_string(pid) + ": zero median y-acceleration, not flipped");
  }
  const int majority = majority_override ? (*majority_override < 0 ? -1 : 1) : majority_sign(sign);

  HandednessResult out{table, {}};
  for (const auto& [pid, s] : sign) out.flipped[pid] = s != 0 && s != majority;

  auto idx = [&](const std::string& prefix, const char* stat) {
    return table.find_column(prefix + "_" + stat);
  };
  for (const auto& prefix : {x_prefix, y_prefix}) {
    auto mean = idx(prefix, "mean"), median = idx(prefix, "median"), lo = idx(prefix, "min"),
         hi = idx(prefix, "max");
    for (std::size_t r = 0; r < table.size(); ++r) {
      if (!out.flipped[table.keys[r].participant_id]) continue;
      auto row = out.table.features.row(r);
      if (mean) row[*mean] = -row[*mean];
      if (median) row[*median] = -row[*median];
      if (lo && hi) {
        double a = row[*lo], b = row[*hi];
        row[*lo] = -b;
        row[*hi] = -a;
      } else if (lo) {
        row[*lo] = -row[*lo];
      } else if (hi) {
        row[*hi] = -row[*hi];
      }
    }
  }
  return out;
}

void SplitPlan::validate() const {
  if (!(0 < duration_min && duration_min <= duration_max)) {
    throw ValidationError("split plan: need 0 < duration_min <= duration_max");
  }
  if (!(0 < gap_min && gap_min <= gap_max)) {
    throw ValidationError("split plan: need 0 < gap_min <= gap_max");
  }
}

SplitResult split_into_subsequences(const FrameTable& seq, const SplitPlan& plan) {
  plan.validate();
  std::map<int, std::vector<std::size_t>> rows_of;
  std::map<int, int> sub_of;
  for (std::size_t r = 0; r < seq.size(); ++r) {
    const auto& k = seq.keys[r];
    auto [it, inserted] = sub_of.emplace(k.participant_id, k.subsequence_id);
    if (!inserted && it->second != k.subsequence_id) {
      throw ValidationError("participant " + std::to_string(k.participant_id) +
                            " spans several subsequences; expected one contiguous sequence");
    }
    rows_of[k.participant_id].push_back(r);
  }

  SplitResult out;
  std::vector<RowKey> keys;
  int next_id = 0;
  for (auto& [pid, rows] : rows_of) {
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return seq.keys[a].second_index < seq.keys[b].second_index;
    });
    std::mt19937_64 rng(plan.seed + static_cast<std::uint64_t>(pid));
    std::uniform_int_distribution<int> duration(plan.duration_min, plan.duration_max);
    std::uniform_int_distribution<int> gap(plan.gap_min, plan.gap_max);
    const std::size_t len = rows.size();
    auto emit = [&](std::size_t start, std::size_t length) {
      out.windows.push_back({pid, next_id, start, length});
      for (std::size_t i = 0; i < length; ++i) {
        out.source_rows.push_back(rows[start + i]);
        keys.push_back({pid, next_id, static_cast<int>(i)});
      }
      ++next_id;
    };
    if (len < static_cast<std::size_t>(plan.duration_min)) {
      warn("participant " + std::to_string(pid) + ": sequence of " + std::to_string(len) +
           " s is shorter than the minimum duration; kept whole");
      if (len > 0) emit(0, len);
      continue;
    }
    std::size_t pos = 0;
    while (pos < len) {
      std::size_t d = static_cast<std::size_t>(duration(rng));
      std::size_t take = std::min(d, len - pos);
      if (take < static_cast<std::size_t>(plan.duration_min)) break;
      emit(pos, take);
      int g = gap(rng);
      out.gaps.push_back(g);
      pos += take + static_cast<std::size_t>(g);
    }
  }

  if (plan.permute && next_id > 0) {
    std::vector<int> perm(static_cast<std::size_t>(next_id));
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(mix_seed({plan.seed, 0x9e7u}));
    std::shuffle(perm.begin(), perm.end(), rng);
    for (auto& k : keys) k.subsequence_id = perm[static_cast<std::size_t>(k.subsequence_id)];
    for (auto& w : out.windows) w.subsequence_id = perm[static_cast<std::size_t>(w.subsequence_id)];
  }
  out.table = seq.select_rows(out.source_rows);
  out.table.keys = std::move(keys);
  return out;
}

std::map<std::pair<int, int>, std::vector<std::size_t>> subsequence_index(const FrameTable& t) {
  std::map<std::pair<int, int>, std::vector<std::size_t>> index;
  for (std::size_t r = 0; r < t.size(); ++r) {
    index[{t.keys[r].participant_id, t.keys[r].subsequence_id}].push_back(r);
  }
  for (auto& [key, rows] : index) {
    std::sort(rows.begin(), rows.end(), [&](std::size_t a, std::size_t b) {
      return t.keys[a].second_index < t.keys[b].second_index;
    });
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (t.keys[rows[i]].second_index != static_cast<int>(i)) {
        throw ValidationError("subsequence (" + std::to_string(key.first) + "," +
                              std::to_string(key.second) + ") is not consecutive from 0");
      }
    }
  }
  return index;
}

FrameTable add_lag_lead(const FrameTable& table, const std::vector<std::string>& base_columns,
                        const std::vector<int>& orders_in) {
  std::vector<int> orders = orders_in;
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  std::vector<std::size_t> base;
  for (const auto& name : base_columns) base.push_back(table.column_index(name));
  for (int k : orders) {
    if (k < 1) throw ValidationError("lag/lead orders must be >= 1");
  }
  auto index = subsequence_index(table);
  std::vector<std::string> names;
  for (const auto& f : base_columns) {
    for (int k : orders) {
      names.push_back("lag_" + std::to_string(k) + "_" + f);
      names.push_back("lead_" + std::to_string(k) + "_" + f);
    }
  }
  Matrix values(table.size(), names.size(), kMissing);
  for (const auto& [key, rows] : index) {
    const auto len = static_cast<std::ptrdiff_t>(rows.size());
    for (std::ptrdiff_t s = 0; s < len; ++s) {
      const std::size_t r = rows[static_cast<std::size_t>(s)];
      std::size_t col = 0;
      for (std::size_t f : base) {
        for (int k : orders) {
          if (s - k >= 0) values(r, col) = table.features(rows[static_cast<std::size_t>(s - k)], f);
          if (s + k < len) values(r, col + 1) = table.features(rows[static_cast<std::size_t>(s + k)], f);
          col += 2;
        }
      }
    }
  }
  FrameTable out = table;
  out.append_columns(names, values);
  return out;
}

FrameTable add_differences(const FrameTable& table, const std::vector<std::string>& base_columns) {
  std::vector<std::size_t> base;
  std::vector<std::string> names;
  for (const auto& name : base_columns) {
    base.push_back(table.column_index(name));
    names.push_back("diff_" + name);
  }
  auto index = subsequence_index(table);
  Matrix values(table.size(), names.size(), kMissing);
  for (const auto& [key, rows] : index) {
    for (std::size_t s = 1; s < rows.size(); ++s) {
      for (std::size_t j = 0; j < base.size(); ++j) {
        values(rows[s], j) = table.features(rows[s], base[j]) - table.features(rows[s - 1], base[j]);
      }
    }
  }
  FrameTable out = table;
  out.append_columns(names, values);
  return out;
}

}  // namespace softboost
