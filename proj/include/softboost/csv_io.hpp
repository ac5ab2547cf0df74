#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "softboost/data.hpp"

namespace softboost {

// Frame-table CSV:
//   participant_id,subsequence_id,second_index,<features...>[,room],y_00..y_NN
// An empty cell is a missing value. Feature and label values are written in
// shortest round-trip form.
void write_frame_table(std::ostream& out, const FrameTable& table);
void write_frame_table(const std::string& path, const FrameTable& table);
FrameTable read_frame_table(std::istream& in);
FrameTable read_frame_table(const std::string& path);

/// Probabilities keyed by row, optionally tagged with the producing model.
struct PredictionTable {
  std::vector<RowKey> keys;
  Matrix probabilities;
  std::vector<std::string> producer;  // empty, or one entry per row
};

// Prediction CSV:
//   participant_id,subsequence_id,second_index[,producer],p_00..p_NN
// Probabilities are printed with 6 decimals.
void write_predictions(std::ostream& out, const PredictionTable& table);
void write_predictions(const std::string& path, const PredictionTable& table);
PredictionTable read_predictions(std::istream& in);
PredictionTable read_predictions(const std::string& path);

/// Two-digit class suffix used by the label and prediction headers.
std::string class_column(char prefix, std::size_t c);

// Low-level helpers shared by the other CSV readers.
std::vector<std::string> split_csv_line(const std::string& line);
double parse_double(const std::string& cell, std::size_t line_no);
int parse_int(const std::string& cell, std::size_t line_no);
std::string format_double(double v);

}  // namespace softboost
