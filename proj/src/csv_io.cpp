#include "softboost/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <regex>

namespace softboost {

std::string class_column(char prefix, std::size_t c) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c_%02zu", prefix, c);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  std::size_t end = line.size();
  if (end > 0 && line[end - 1] == '\r') --end;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string::npos || comma >= end) {
      cells.push_back(line.substr(start, end - start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

double parse_double(const std::string& cell, std::size_t line_no) {
  if (cell.empty()) return kMissing;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse number '" + cell +
                          "'");
  }
  return v;
}

int parse_int(const std::string& cell, std::size_t line_no) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw ValidationError("line " + std::to_string(line_no) + ": cannot parse integer '" + cell +
                          "'");
  }
  return v;
}

std::string format_double(double v) {
  if (is_missing(v)) return {};
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

void write_key(std::ostream& out, const RowKey& k) {
  out << k.participant_id << ',' << k.subsequence_id << ',' << k.second_index;
}

void check_key_header(const std::vector<std::string>& header) {
  if (header.size() < 3 || header[0] != "participant_id" || header[1] != "subsequence_id" ||
      header[2] != "second_index") {
    throw ValidationError(
        "header must start with participant_id,subsequence_id,second_index");
  }
}

bool is_class_column(const std::string& name, char prefix) {
  static const std::regex y_re("^y_[0-9]{2,}$");
  static const std::regex p_re("^p_[0-9]{2,}$");
  return std::regex_match(name, prefix == 'y' ? y_re : p_re);
}

}  // namespace

void write_frame_table(std::ostream& out, const FrameTable& t) {
  out << "participant_id,subsequence_id,second_index";
  for (const auto& c : t.columns) out << ',' << c;
  if (t.room) out << ",room";
  if (t.labels) {
    for (std::size_t c = 0; c < t.n_classes; ++c) out << ',' << class_column('y', c);
  }
  out << '\n';
  for (std::size_t r = 0; r < t.size(); ++r) {
    write_key(out, t.keys[r]);
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << ',' << format_double(t.features(r, j));
    if (t.room) {
      out << ',';
      if ((*t.room)[r] != kNoRoom) out << (*t.room)[r];
    }
    if (t.labels) {
      for (std::size_t c = 0; c < t.n_classes; ++c) out << ',' << format_double((*t.labels)(r, c));
    }
    out << '\n';
  }
}

void write_frame_table(const std::string& path, const FrameTable& table) {
  auto out = open_out(path);
  write_frame_table(out, table);
}

FrameTable read_frame_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("frame table: missing header");
  auto header = split_csv_line(line);
  check_key_header(header);

  FrameTable t;
  std::vector<std::size_t> feature_cells;
  std::optional<std::size_t> room_cell;
  std::vector<std::size_t> label_cells;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i] == "room") {
      room_cell = i;
    } else if (is_class_column(header[i], 'y')) {
      label_cells.push_back(i);
    } else {
      if (!label_cells.empty()) throw ValidationError("frame table: feature after label columns");
      feature_cells.push_back(i);
      t.columns.push_back(header[i]);
    }
  }
  for (std::size_t c = 0; c < label_cells.size(); ++c) {
    if (header[label_cells[c]] != class_column('y', c)) {
      throw ValidationError("frame table: label columns must be y_00.. in order");
    }
  }
  t.n_classes = label_cells.size();
  if (room_cell) t.room.emplace();

  std::vector<double> features;
  std::vector<double> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
    }
    t.keys.push_back({parse_int(cells[0], line_no), parse_int(cells[1], line_no),
                      parse_int(cells[2], line_no)});
    for (std::size_t i : feature_cells) features.push_back(parse_double(cells[i], line_no));
    if (room_cell) {
      const auto& cell = cells[*room_cell];
      t.room->push_back(cell.empty() ? kNoRoom : parse_int(cell, line_no));
    }
    for (std::size_t i : label_cells) labels.push_back(parse_double(cells[i], line_no));
  }
  t.features = Matrix(t.keys.size(), t.columns.size(), std::move(features));
  if (!label_cells.empty()) t.labels = Matrix(t.keys.size(), label_cells.size(), std::move(labels));
  auto violations = validate_table(t);
  if (!violations.empty()) {
    const auto& v = violations.front();
    throw ValidationError("line " + std::to_string(v.row + 2) + ": " + v.rule + ": " + v.message);
  }
  return t;
}

FrameTable read_frame_table(const std::string& path) {
  auto in = open_in(path);
  return read_frame_table(in);
}

void write_predictions(std::ostream& out, const PredictionTable& t) {
  const bool with_producer = !t.producer.empty();
  out << "participant_id,subsequence_id,second_index";
  if (with_producer) out << ",producer";
  for (std::size_t c = 0; c < t.probabilities.cols(); ++c) out << ',' << class_column('p', c);
  out << '\n';
  char buf[32];
  for (std::size_t r = 0; r < t.keys.size(); ++r) {
    write_key(out, t.keys[r]);
    if (with_producer) out << ',' << t.producer[r];
    for (std::size_t c = 0; c < t.probabilities.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.6f", t.probabilities(r, c));
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_predictions(const std::string& path, const PredictionTable& table) {
  auto out = open_out(path);
  write_predictions(out, table);
}

PredictionTable read_predictions(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("predictions: missing header");
  auto header = split_csv_line(line);
  check_key_header(header);
  std::size_t first_p = 3;
  bool with_producer = header.size() > 3 && header[3] == "producer";
  if (with_producer) first_p = 4;
  for (std::size_t i = first_p; i < header.size(); ++i) {
    if (header[i] != class_column('p', i - first_p)) {
      throw ValidationError("predictions: unexpected column '" + header[i] + "'");
    }
  }
  const std::size_t n_classes = header.size() - first_p;
  PredictionTable t;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw ValidationError("line " + std::to_string(line_no) + ": wrong cell count");
    }
    t.keys.push_back({parse_int(cells[0], line_no), parse_int(cells[1], line_no),
                      parse_int(cells[2], line_no)});
    if (with_producer) t.producer.push_back(cells[3]);
    // Six printed decimals leave rows off by up to ~C*5e-7; renormalize.
    double sum = 0.0;
    std::size_t start = values.size();
    for (std::size_t i = first_p; i < header.size(); ++i) {
      double v = parse_double(cells[i], line_no);
      if (!(v >= 0.0 && v <= 1.0)) {
        throw ValidationError("line " + std::to_string(line_no) + ": probability outside [0,1]");
      }
      values.push_back(v);
      sum += v;
    }
    if (!(sum > 0.0)) throw ValidationError("line " + std::to_string(line_no) + ": zero row");
    for (std::size_t i = start; i < values.size(); ++i) values[i] /= sum;
  }
  t.probabilities = Matrix(t.keys.size(), n_classes, std::move(values));
  return t;
}

PredictionTable read_predictions(const std::string& path) {
  auto in = open_in(path);
  return read_predictions(in);
}

}  // namespace softboost
