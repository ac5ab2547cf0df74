#pragma once

#include <string>

#include "softboost/boosting.hpp"
#include "softboost/ensembles.hpp"
#include "softboost/learners.hpp"

namespace softboost {

inline constexpr int kModelFormatVersion = 1;

// Models are stored as versioned JSON documents tagged with their type:
//   {"format": "softboost-model", "version": 1, "type": "gbdt", "model": {...}}
// Doubles are written in shortest round-trip form, so a reloaded model
// predicts bit-identically.

std::string serialize_model(const BoostedEnsemble& model);
std::string serialize_model(const Forest& model);
std::string serialize_model(const GaussianNB& model);
std::string serialize_model(const StackedModel& model);

/// Type tag of a serialized model ("gbdt", "forest", "gaussian_nb", "stack").
std::string model_type(const std::string& text);

BoostedEnsemble deserialize_gbdt(const std::string& text);
Forest deserialize_forest(const std::string& text);
GaussianNB deserialize_gaussian_nb(const std::string& text);
StackedModel deserialize_stack(const std::string& text);

void save_model(const std::string& path, const BoostedEnsemble& model);
void save_model(const std::string& path, const Forest& model);
void save_model(const std::string& path, const GaussianNB& model);
void save_model(const std::string& path, const StackedModel& model);

BoostedEnsemble load_gbdt(const std::string& path);
Forest load_forest(const std::string& path);
GaussianNB load_gaussian_nb(const std::string& path);
StackedModel load_stack(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace softboost
