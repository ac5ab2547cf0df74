#include "softboost/persist.hpp"

#include <fstream>
#include <sstream>

#include "json_codec.hpp"

namespace softboost {
namespace codec {

json encode(const TreeConfig& c) {
  return {{"max_depth", c.max_depth},
          {"min_child_weight", encode_double(c.min_child_weight)},
          {"lambda", encode_double(c.lambda)},
          {"gamma", encode_double(c.gamma)},
          {"colsample", encode_double(c.colsample)},
          {"randomized_thresholds", c.randomized_thresholds},
          {"seed", c.seed}};
}

TreeConfig decode_tree_config(const json& j, TreeConfig c) {
  check_keys(j, {"max_depth", "min_child_weight", "lambda", "gamma", "colsample", "randomized_thresholds", "seed"},
             "tree");
  read(j, "max_depth", c.max_depth);
  read(j, "min_child_weight", c.min_child_weight);
  read(j, "lambda", c.lambda);
  read(j, "gamma", c.gamma);
  read(j, "colsample", c.colsample);
  read(j, "randomized_thresholds", c.randomized_thresholds);
  read(j, "seed", c.seed);
  return c;
}

json encode(const BoostConfig& c) {
  return {{"n_rounds_max", c.n_rounds_max},
          {"learning_rate", encode_double(c.learning_rate)},
          {"subsample", encode_double(c.subsample)},
          {"tree", encode(c.tree)},
          {"objective", to_string(c.objective)},
          {"early_stopping_rounds", c.early_stopping_rounds},
          {"hess_min", encode_double(c.hess_min)},
          {"seed", c.seed}};
}

BoostConfig decode_boost_config(const json& j, BoostConfig c) {
  check_keys(j, {"n_rounds_max", "learning_rate", "subsample", "tree", "objective", "early_stopping_rounds",
                 "hess_min", "seed"},
             "boost");
  read(j, "n_rounds_max", c.n_rounds_max);
  read(j, "learning_rate", c.learning_rate);
  read(j, "subsample", c.subsample);
  if (j.contains("tree")) c.tree = decode_tree_config(j.at("tree"), c.tree);
  if (j.contains("objective")) c.objective = objective_from_string(j.at("objective").get<std::string>());
  read(j, "early_stopping_rounds", c.early_stopping_rounds);
  read(j, "hess_min", c.hess_min);
  read(j, "seed", c.seed);
  return c;
}

json encode(const ForestConfig& c) {
  return {{"n_trees", c.n_trees}, {"bootstrap", c.bootstrap}, {"tree", encode(c.tree)}, {"seed", c.seed}};
}

ForestConfig decode_forest_config(const json& j, ForestConfig c) {
  check_keys(j, {"n_trees", "bootstrap", "tree", "seed"}, "forest");
  read(j, "n_trees", c.n_trees);
  read(j, "bootstrap", c.bootstrap);
  if (j.contains("tree")) c.tree = decode_tree_config(j.at("tree"), c.tree);
  read(j, "seed", c.seed);
  return c;
}

json encode(const BoostGrid& g) {
  return {{"max_depth", g.max_depth},
          {"min_child_weight", g.min_child_weight},
          {"colsample", g.colsample},
          {"subsample", g.subsample},
          {"learning_rate", g.learning_rate}};
}

BoostGrid decode_grid(const json& j) {
  check_keys(j, {"max_depth", "min_child_weight", "colsample", "subsample", "learning_rate"}, "grid");
  BoostGrid g;
  read(j, "max_depth", g.max_depth);
  read(j, "min_child_weight", g.min_child_weight);
  read(j, "colsample", g.colsample);
  read(j, "subsample", g.subsample);
  read(j, "learning_rate", g.learning_rate);
  return g;
}

json encode(const Level1Spec& s) {
  return {{"name", s.name},
          {"kind", to_string(s.kind)},
          {"boost", encode(s.boost)},
          {"forest", encode(s.forest)},
          {"exclude_prefixes", s.exclude_prefixes}};
}

Level1Spec decode_level1_spec(const json& j, const Level1Spec& base) {
  check_keys(j, {"name", "kind", "boost", "forest", "exclude_prefixes"}, "learner");
  Level1Spec s = base;
  read(j, "name", s.name);
  if (j.contains("kind")) s.kind = level1_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("boost")) s.boost = decode_boost_config(j.at("boost"), s.boost);
  if (j.contains("forest")) s.forest = decode_forest_config(j.at("forest"), s.forest);
  read(j, "exclude_prefixes", s.exclude_prefixes);
  return s;
}

}  // namespace codec

namespace {

using codec::decode_double;
using codec::encode_double;
using nlohmann::json;

json encode_doubles(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(encode_double(x));
  return a;
}

std::vector<double> decode_doubles(const json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(decode_double(x));
  return v;
}

json encode_matrix(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", encode_doubles(m.data())}};
}

Matrix decode_matrix(const json& j) {
  return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                decode_doubles(j.at("data")));
}

json encode_tree(const Tree& t) {
  json nodes = json::array();
  for (const auto& n : t.nodes()) {
    nodes.push_back({{"feature", n.feature},
                     {"threshold", encode_double(n.threshold)},
                     {"default_left", n.default_left},
                     {"left", n.left},
                     {"right", n.right},
                     {"gain", encode_double(n.gain)},
                     {"weight", encode_double(n.weight)},
                     {"grad_sum", encode_double(n.grad_sum)},
                     {"value", encode_doubles(n.value)}});
  }
  return {{"kind", t.kind() == TreeKind::regression ? "regression" : "probability"},
          {"n_features", t.n_features()},
          {"nodes", nodes}};
}

Tree decode_tree(const json& j) {
  const auto kind_name = j.at("kind").get<std::string>();
  if (kind_name != "regression" && kind_name != "probability") {
    throw ValidationError("unknown tree kind '" + kind_name + "'");
  }
  std::vector<TreeNode> nodes;
  for (const auto& n : j.at("nodes")) {
    TreeNode t;
    t.feature = n.at("feature").get<int>();
    t.threshold = decode_double(n.at("threshold"));
    t.default_left = n.at("default_left").get<bool>();
    t.left = n.at("left").get<int>();
    t.right = n.at("right").get<int>();
    t.gain = decode_double(n.at("gain"));
    t.weight = decode_double(n.at("weight"));
    t.grad_sum = decode_double(n.at("grad_sum"));
    t.value = decode_doubles(n.at("value"));
    nodes.push_back(std::move(t));
  }
  return Tree(kind_name == "regression" ? TreeKind::regression : TreeKind::probability,
              j.at("n_features").get<std::size_t>(), std::move(nodes));
}

json encode_gbdt(const BoostedEnsemble& m) {
  json rounds = json::array();
  for (const auto& r : m.rounds) {
    json trees = json::array();
    for (const auto& t : r) trees.push_back(encode_tree(t));
    rounds.push_back(trees);
  }
  return {{"config", codec::encode(m.config)},
          {"n_features", m.n_features},
          {"n_classes", m.n_classes},
          {"best_round", m.best_round},
          {"base_score", encode_doubles(m.base_score)},
          {"valid_history", encode_doubles(m.valid_history)},
          {"train_history", encode_doubles(m.train_history)},
          {"rounds", rounds}};
}

BoostedEnsemble decode_gbdt(const json& j) {
  BoostedEnsemble m;
  m.config = codec::decode_boost_config(j.at("config"));
  m.n_features = j.at("n_features").get<std::size_t>();
  m.n_classes = j.at("n_classes").get<std::size_t>();
  m.best_round = j.at("best_round").get<std::size_t>();
  m.base_score = decode_doubles(j.at("base_score"));
  m.valid_history = decode_doubles(j.at("valid_history"));
  m.train_history = decode_doubles(j.at("train_history"));
  for (const auto& r : j.at("rounds")) {
    std::vector<Tree> trees;
    for (const auto& t : r) trees.push_back(decode_tree(t));
    if (trees.size() != m.n_classes) throw ValidationError("round has the wrong number of trees");
    m.rounds.push_back(std::move(trees));
  }
  if (m.base_score.size() != m.n_classes || m.best_round > m.rounds.size()) {
    throw ValidationError("inconsistent boosted model");
  }
  return m;
}

json encode_forest(const Forest& f) {
  json trees = json::array();
  for (const auto& t : f.trees) trees.push_back(encode_tree(t));
  return {{"config", codec::encode(f.config)},
          {"n_features", f.n_features},
          {"n_classes", f.n_classes},
          {"trees", trees}};
}

Forest decode_forest(const json& j) {
  Forest f;
  f.config = codec::decode_forest_config(j.at("config"));
  f.n_features = j.at("n_features").get<std::size_t>();
  f.n_classes = j.at("n_classes").get<std::size_t>();
  for (const auto& t : j.at("trees")) f.trees.push_back(decode_tree(t));
  return f;
}

json encode_nb(const GaussianNB& m) {
  return {{"priors", encode_doubles(m.priors)},
          {"means", encode_matrix(m.means)},
          {"variances", encode_matrix(m.variances)}};
}

GaussianNB decode_nb(const json& j) {
  GaussianNB m;
  m.priors = decode_doubles(j.at("priors"));
  m.means = decode_matrix(j.at("means"));
  m.variances = decode_matrix(j.at("variances"));
  if (m.means.rows() != m.priors.size() || m.variances.rows() != m.priors.size() ||
      m.means.cols() != m.variances.cols()) {
    throw ValidationError("inconsistent naive Bayes model");
  }
  return m;
}

json encode_level1(const Level1Model& m) {
  json body;
  if (const auto* g = std::get_if<BoostedEnsemble>(&m.model)) {
    body = encode_gbdt(*g);
  } else if (const auto* f = std::get_if<Forest>(&m.model)) {
    body = encode_forest(*f);
  } else {
    body = encode_nb(std::get<GaussianNB>(m.model));
  }
  return {{"spec", codec::encode(m.spec)},
          {"feature_index", m.feature_index},
          {"impute_means", encode_doubles(m.impute_means)},
          {"model", body}};
}

Level1Model decode_level1(const json& j) {
  Level1Model m;
  m.spec = codec::decode_level1_spec(j.at("spec"));
  m.feature_index = j.at("feature_index").get<std::vector<std::size_t>>();
  m.impute_means = decode_doubles(j.at("impute_means"));
  switch (m.spec.kind) {
    case Level1Kind::gbdt: m.model = decode_gbdt(j.at("model")); break;
    case Level1Kind::forest:
    case Level1Kind::extra_trees: m.model = decode_forest(j.at("model")); break;
    case Level1Kind::naive_bayes: m.model = decode_nb(j.at("model")); break;
  }
  return m;
}

json encode_stack(const StackedModel& m) {
  json level1 = json::array();
  for (const auto& l : m.level1) level1.push_back(encode_level1(l));
  return {{"columns", m.columns},
          {"include_base_features", m.include_base_features},
          {"n_classes", m.n_classes},
          {"level1", level1},
          {"stacker", encode_gbdt(m.stacker)}};
}

StackedModel decode_stack(const json& j) {
  StackedModel m;
  m.columns = j.at("columns").get<std::vector<std::string>>();
  m.include_base_features = j.at("include_base_features").get<bool>();
  m.n_classes = j.at("n_classes").get<std::size_t>();
  for (const auto& l : j.at("level1")) m.level1.push_back(decode_level1(l));
  m.stacker = decode_gbdt(j.at("stacker"));
  return m;
}

std::string wrap(const char* type, json body) {
  json doc{{"format", "softboost-model"}, {"version", kModelFormatVersion}, {"type", type},
           {"model", std::move(body)}};
  return doc.dump() + "\n";
}

json parse_document(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error&) {
    throw ValidationError("model file is truncated or not valid JSON");
  }
  if (!doc.is_object() || doc.value("format", "") != "softboost-model") {
    throw ValidationError("not a softboost model file");
  }
  const int version = doc.value("version", -1);
  if (version != kModelFormatVersion) {
    throw ValidationError("model format version " + std::to_string(version) +
                          " is not supported (this build reads version " +
                          std::to_string(kModelFormatVersion) + ")");
  }
  return doc;
}

template <class F>
auto unwrap(const std::string& text, const std::string& expected, F decode) {
  json doc = parse_document(text);
  const auto type = doc.value("type", "");
  if (type != expected) {
    throw ValidationError("expected a " + expected + " model, found type '" + type + "'");
  }
  try {
    return decode(doc.at("model"));
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed model: ") + e.what());
  }
}

}  // namespace

std::string serialize_model(const BoostedEnsemble& m) { return wrap("gbdt", encode_gbdt(m)); }
std::string serialize_model(const Forest& m) { return wrap("forest", encode_forest(m)); }
std::string serialize_model(const GaussianNB& m) { return wrap("gaussian_nb", encode_nb(m)); }
std::string serialize_model(const StackedModel& m) { return wrap("stack", encode_stack(m)); }

std::string model_type(const std::string& text) { return parse_document(text).value("type", ""); }

BoostedEnsemble deserialize_gbdt(const std::string& text) { return unwrap(text, "gbdt", decode_gbdt); }
Forest deserialize_forest(const std::string& text) { return unwrap(text, "forest", decode_forest); }
GaussianNB deserialize_gaussian_nb(const std::string& text) { return unwrap(text, "gaussian_nb", decode_nb); }
StackedModel deserialize_stack(const std::string& text) { return unwrap(text, "stack", decode_stack); }

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ValidationError("write to '" + path + "' failed");
}

void save_model(const std::string& path, const BoostedEnsemble& m) { write_text_file(path, serialize_model(m)); }
void save_model(const std::string& path, const Forest& m) { write_text_file(path, serialize_model(m)); }
void save_model(const std::string& path, const GaussianNB& m) { write_text_file(path, serialize_model(m)); }
void save_model(const std::string& path, const StackedModel& m) { write_text_file(path, serialize_model(m)); }

BoostedEnsemble load_gbdt(const std::string& path) { return deserialize_gbdt(read_text_file(path)); }
Forest load_forest(const std::string& path) { return deserialize_forest(read_text_file(path)); }
GaussianNB load_gaussian_nb(const std::string& path) { return deserialize_gaussian_nb(read_text_file(path)); }
StackedModel load_stack(const std::string& path) { return deserialize_stack(read_text_file(path)); }

}  // namespace softboost
