#include "actrec/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "actrec/error.hpp"

namespace actrec {

using json = nlohmann::ordered_json;

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || !std::isfinite(v))
    throw Error(ErrorCode::MalformedInput, "setting '" + key + "' expects a number, got '" + value + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!value.empty() && value[0] != '-') v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (value.empty() || used != value.size())
    throw Error(ErrorCode::MalformedInput, "setting '" + key + "' expects a non-negative integer, got '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw Error(ErrorCode::MalformedInput, "setting '" + key + "' expects true or false, got '" + value + "'");
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json mat_json(const Eigen::MatrixXd& m) {
  json a = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r).transpose()));
  return a;
}

Eigen::VectorXd json_vec(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidModel, "expected a numeric array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  return v;
}

Eigen::MatrixXd json_mat(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::InvalidModel, "expected a matrix");
  if (j.empty()) return {};
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (j[r].size() != cols) throw Error(ErrorCode::InvalidModel, "ragged matrix");
    m.row(static_cast<Eigen::Index>(r)) = json_vec(j[r]).transpose();
  }
  return m;
}

json standardizer_json(const Standardizer& s) { return {{"mean", vec_json(s.mean)}, {"scale", vec_json(s.scale)}}; }

Standardizer json_standardizer(const json& j) {
  Standardizer s;
  s.mean = json_vec(j.at("mean"));
  s.scale = json_vec(j.at("scale"));
  if (s.mean.size() != s.scale.size()) throw Error(ErrorCode::InvalidModel, "standardizer shape mismatch");
  return s;
}

json config_json(const RunConfig& c) {
  json j;
  j["location"] = c.location ? json(std::string(to_string(*c.location))) : json(nullptr);
  j["simple_hog"] = c.blocks.simple_hog;
  j["skeletal_hog"] = c.blocks.skeletal_hog;
  j["T"] = c.inference.max_substructure;
  j["boundary"] = c.inference.boundary == BoundaryPrior::Uniform ? "uniform" : "carried_over";
  j["act_self"] = c.manual.self;
  j["act_to_neutral"] = c.manual.to_neutral;
  j["act_to_others"] = c.manual.to_others;
  j["neutral_stay"] = c.manual.neutral_stay;
  j["neutral_to_activities"] = c.manual.neutral_to_activities;
  j["clusters_per_activity"] = c.clusters_per_activity;
  j["min_scale"] = c.min_scale;
  j["seed"] = c.seed;
  j["train_stride"] = c.train_stride;
  j["svm_lambda"] = c.svm.lambda;
  j["svm_epochs"] = c.svm.epochs;
  j["svm_eta0"] = c.svm.eta0;
  j["fx"] = c.intrinsics.fx;
  j["fy"] = c.intrinsics.fy;
  j["cx"] = c.intrinsics.cx;
  j["cy"] = c.intrinsics.cy;
  j["width"] = c.intrinsics.width;
  j["height"] = c.intrinsics.height;
  return j;
}

RunConfig json_config(const json& j) {
  RunConfig c;
  for (const auto& [key, value] : j.items()) {
    if (value.is_null()) continue;
    std::string text;
    if (value.is_string()) text = value.get<std::string>();
    else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
    else if (value.is_number_unsigned()) text = std::to_string(value.get<std::uint64_t>());
    else if (value.is_number_integer()) text = std::to_string(value.get<std::int64_t>());
    else {
      std::ostringstream s;
      s.precision(17);
      s << value.get<double>();
      text = s.str();
    }
    apply_setting(c, key, text);
  }
  return c;
}

std::vector<Eigen::VectorXd> sequence_rows(const LabeledSequence& seq, const RunConfig& config) {
  std::vector<Eigen::VectorXd> rows;
  const auto features = featurize(seq, config.blocks, config.intrinsics);
  rows.reserve(features.size());
  for (const auto& f : features) rows.push_back(f.flatten());
  return rows;
}

Eigen::MatrixXd stack(const std::vector<Eigen::VectorXd>& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  return m;
}

Location resolve_location(const Dataset& data, const RunConfig& config) {
  if (config.location) return *config.location;
  std::set<Location> seen;
  for (const auto& s : data)
    if (!s.is_random()) seen.insert(s.location);
  if (seen.size() != 1)
    throw Error(ErrorCode::MalformedInput, "training data spans " + std::to_string(seen.size()) +
                                               " locations; choose one with location=");
  return *seen.begin();
}

std::size_t argmax_low(const Eigen::VectorXd& v) {
  Eigen::Index arg = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i)
    if (v(i) > v(arg)) arg = i;
  return static_cast<std::size_t>(arg);
}

}  // namespace

void apply_setting(RunConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "location") {
    if (value.empty() || value == "auto") c.location.reset();
    else c.location = parse_location(value);
  } else if (key == "simple_hog") {
    c.blocks.simple_hog = parse_bool(key, value);
  } else if (key == "skeletal_hog") {
    c.blocks.skeletal_hog = parse_bool(key, value);
  } else if (key == "skeletal") {
    if (!parse_bool(key, value)) throw Error(ErrorCode::MalformedInput, "the skeletal feature block cannot be disabled");
  } else if (key == "T") {
    c.inference.max_substructure = parse_unsigned(key, value);
  } else if (key == "boundary") {
    if (value == "uniform") c.inference.boundary = BoundaryPrior::Uniform;
    else if (value == "carried_over") c.inference.boundary = BoundaryPrior::CarriedOver;
    else throw Error(ErrorCode::MalformedInput, "boundary must be uniform or carried_over");
  } else if (key == "act_self") {
    c.manual.self = parse_double(key, value);
  } else if (key == "act_to_neutral") {
    c.manual.to_neutral = parse_double(key, value);
  } else if (key == "act_to_others") {
    c.manual.to_others = parse_double(key, value);
  } else if (key == "neutral_stay") {
    c.manual.neutral_stay = parse_double(key, value);
  } else if (key == "neutral_to_activities") {
    c.manual.neutral_to_activities = parse_double(key, value);
  } else if (key == "clusters_per_activity") {
    c.clusters_per_activity = parse_unsigned(key, value);
  } else if (key == "min_scale") {
    c.min_scale = parse_double(key, value);
  } else if (key == "seed") {
    c.seed = parse_unsigned(key, value);
  } else if (key == "train_stride") {
    c.train_stride = parse_unsigned(key, value);
  } else if (key == "svm_lambda") {
    c.svm.lambda = parse_double(key, value);
  } else if (key == "svm_epochs") {
    c.svm.epochs = parse_unsigned(key, value);
  } else if (key == "svm_eta0") {
    c.svm.eta0 = parse_double(key, value);
  } else if (key == "fx") {
    c.intrinsics.fx = parse_double(key, value);
  } else if (key == "fy") {
    c.intrinsics.fy = parse_double(key, value);
  } else if (key == "cx") {
    c.intrinsics.cx = parse_double(key, value);
  } else if (key == "cy") {
    c.intrinsics.cy = parse_double(key, value);
  } else if (key == "width") {
    c.intrinsics.width = static_cast<int>(parse_unsigned(key, value));
  } else if (key == "height") {
    c.intrinsics.height = static_cast<int>(parse_unsigned(key, value));
  } else {
    throw Error(ErrorCode::MalformedInput, "unknown setting '" + key + "'");
  }
}

RunConfig parse_run_config(std::istream& in, RunConfig base) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::MalformedInput, "config line " + std::to_string(number) + " has no '='");
    apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
  }
  validate(base);
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open config " + path.string());
  return parse_run_config(in, std::move(base));
}

void validate(const RunConfig& c) {
  if (c.inference.max_substructure < 2) throw Error(ErrorCode::MalformedInput, "T must be at least 2");
  if (c.train_stride < 1) throw Error(ErrorCode::MalformedInput, "train_stride must be at least 1");
  if (c.clusters_per_activity < 1) throw Error(ErrorCode::MalformedInput, "clusters_per_activity must be positive");
  if (c.svm.epochs < 1) throw Error(ErrorCode::MalformedInput, "svm_epochs must be positive");
  if (!(c.min_scale > 0.0) || !(c.svm.lambda > 0.0) || !(c.svm.eta0 > 0.0))
    throw Error(ErrorCode::MalformedInput, "min_scale, svm_lambda and svm_eta0 must be positive");
  const auto& m = c.manual;
  for (double v : {m.self, m.to_neutral, m.to_others, m.neutral_stay, m.neutral_to_activities})
    if (!(v > 0.0)) throw Error(ErrorCode::MalformedInput, "manual transition values must be positive");
  if (!(c.intrinsics.fx > 0.0) || !(c.intrinsics.fy > 0.0) || c.intrinsics.width <= 0 || c.intrinsics.height <= 0)
    throw Error(ErrorCode::MalformedInput, "camera intrinsics must be positive");
}

std::vector<std::string> ActivityModel::labels() const {
  auto l = activities;
  l.emplace_back(kNeutralActivity);
  return l;
}

ActivityModel train_model(const Dataset& train, const RunConfig& config, TrainingSummary* summary) {
  validate(config);
  ActivityModel model;
  model.config = config;
  model.location = resolve_location(train, config);
  model.config.location = model.location;

  std::set<std::string> all_names;
  std::set<std::string> local_names;
  for (const auto& s : train) {
    if (s.is_random()) continue;
    all_names.insert(s.activity);
    if (s.location == model.location) local_names.insert(s.activity);
  }
  if (local_names.empty())
    throw Error(ErrorCode::MissingActivityData,
                "no labeled training sequences for location " + std::string(to_string(model.location)));
  model.activities.assign(local_names.begin(), local_names.end());

  std::map<std::string, std::vector<Eigen::VectorXd>> rows_by_activity;
  std::vector<std::pair<std::size_t, std::vector<Eigen::VectorXd>>> local_sequences;
  for (const auto& s : train) {
    if (s.is_random()) continue;
    auto rows = sequence_rows(s, config);
    auto& bucket = rows_by_activity[s.activity];
    for (std::size_t i = 0; i < rows.size(); i += config.train_stride) bucket.push_back(rows[i]);
    if (s.location == model.location) {
      const auto idx = static_cast<std::size_t>(
          std::find(model.activities.begin(), model.activities.end(), s.activity) - model.activities.begin());
      local_sequences.emplace_back(idx, std::move(rows));
    }
  }

  std::vector<ActivitySamples> samples;
  for (const auto& name : all_names) samples.push_back({name, stack(rows_by_activity[name])});
  BankOptions bank_options;
  bank_options.clusters_per_activity = config.clusters_per_activity;
  bank_options.min_scale = config.min_scale;
  bank_options.seed = config.seed;
  std::vector<BankSourceSummary> bank_summary;
  model.bank = build_bank(samples, model.activities, model.location, bank_options, &bank_summary);

  std::vector<SoftLabeledSequence> soft;
  for (const auto& [idx, rows] : local_sequences) {
    if (rows.empty()) continue;
    soft.push_back({idx, soft_labels(model.bank, model.bank.standardizer.apply(stack(rows)))});
  }
  const Eigen::VectorXd sub_prior = model.bank.log_prior().array().exp().matrix();
  model.tables = estimate_transitions(soft, model.activities.size(), sub_prior, config.manual);
  model.one_level_transitions = without_neutral(model.tables.act_trans);

  std::vector<Eigen::VectorXd> svm_rows;
  std::vector<std::size_t> svm_labels;
  for (std::size_t a = 0; a < model.activities.size(); ++a) {
    for (const auto& r : rows_by_activity[model.activities[a]]) {
      svm_rows.push_back(r);
      svm_labels.push_back(a);
    }
  }
  SvmOptions svm = config.svm;
  svm.seed = config.seed;
  if (model.activities.size() >= 2) {
    model.naive = train_naive(stack(svm_rows), svm_labels, model.activities, svm);
  } else {
    // A single activity leaves nothing to separate: constant classifier.
    model.naive.labels = model.activities;
    model.naive.standardizer = Standardizer::fit(stack(svm_rows), config.min_scale);
    model.naive.weights = Eigen::MatrixXd::Zero(1, static_cast<Eigen::Index>(model.bank.dimension()));
    model.naive.bias = Eigen::VectorXd::Zero(1);
    model.naive.calibration.assign(1, PlattParameters{0.0, 0.0});
  }

  if (summary) {
    summary->frames_per_activity.clear();
    for (const auto& [name, rows] : rows_by_activity) summary->frames_per_activity[name] = rows.size();
    summary->bank = std::move(bank_summary);
  }
  return model;
}

std::string model_to_json(const ActivityModel& m) {
  json j;
  j["format"] = "actrec-model";
  j["format_version"] = m.format_version;
  j["config"] = config_json(m.config);
  j["location"] = std::string(to_string(m.location));
  j["activities"] = m.activities;

  json bank;
  bank["standardizer"] = standardizer_json(m.bank.standardizer);
  bank["clusters"] = json::array();
  for (const auto& c : m.bank.clusters) {
    bank["clusters"].push_back({{"origin", c.origin},
                                {"negative", c.negative},
                                {"weight", c.weight},
                                {"mean", vec_json(c.mean)},
                                {"variance", vec_json(c.variance)}});
  }
  j["bank"] = std::move(bank);

  json tables;
  tables["sub_trans"] = json::array();
  for (const auto& t : m.tables.sub_trans) tables["sub_trans"].push_back(mat_json(t));
  tables["act_trans"] = mat_json(m.tables.act_trans);
  tables["sub_prior"] = vec_json(m.tables.sub_prior);
  tables["act_prior"] = vec_json(m.tables.act_prior);
  j["tables"] = std::move(tables);

  json naive;
  naive["labels"] = m.naive.labels;
  naive["standardizer"] = standardizer_json(m.naive.standardizer);
  naive["weights"] = mat_json(m.naive.weights);
  naive["bias"] = vec_json(m.naive.bias);
  naive["calibration"] = json::array();
  for (const auto& p : m.naive.calibration) naive["calibration"].push_back({{"a", p.a}, {"b", p.b}});
  j["naive"] = std::move(naive);
  j["one_level_transitions"] = mat_json(m.one_level_transitions);
  return j.dump(1) + "\n";
}

ActivityModel model_from_json(const std::string& text) {
  ActivityModel m;
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "actrec-model")
      throw Error(ErrorCode::InvalidModel, "not an actrec model document");
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kModelFormatVersion)
      throw Error(ErrorCode::InvalidModel, "unsupported model format version " + std::to_string(m.format_version));
    m.config = json_config(j.at("config"));
    m.location = parse_location(j.at("location").get<std::string>());
    m.activities = j.at("activities").get<std::vector<std::string>>();

    const auto& bank = j.at("bank");
    m.bank.location = m.location;
    m.bank.standardizer = json_standardizer(bank.at("standardizer"));
    for (const auto& c : bank.at("clusters")) {
      GaussianCluster g;
      g.origin = c.at("origin").get<std::string>();
      g.negative = c.at("negative").get<bool>();
      g.weight = c.at("weight").get<double>();
      g.mean = json_vec(c.at("mean"));
      g.variance = json_vec(c.at("variance"));
      m.bank.clusters.push_back(std::move(g));
    }

    const auto& tables = j.at("tables");
    for (const auto& t : tables.at("sub_trans")) m.tables.sub_trans.push_back(json_mat(t));
    m.tables.act_trans = json_mat(tables.at("act_trans"));
    m.tables.sub_prior = json_vec(tables.at("sub_prior"));
    m.tables.act_prior = json_vec(tables.at("act_prior"));

    const auto& naive = j.at("naive");
    m.naive.labels = naive.at("labels").get<std::vector<std::string>>();
    m.naive.standardizer = json_standardizer(naive.at("standardizer"));
    m.naive.weights = json_mat(naive.at("weights"));
    m.naive.bias = json_vec(naive.at("bias"));
    for (const auto& p : naive.at("calibration"))
      m.naive.calibration.push_back({p.at("a").get<double>(), p.at("b").get<double>()});
    m.one_level_transitions = json_mat(j.at("one_level_transitions"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidModel) throw;
    throw Error(ErrorCode::InvalidModel, e.what());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidModel, std::string("malformed model file: ") + e.what());
  }

  const auto n = m.activities.size();
  const auto dim = static_cast<Eigen::Index>(m.config.blocks.dimension());
  const auto states = m.bank.size();
  bool ok = n >= 1 && m.bank.standardizer.mean.size() == dim && states >= 1 &&
            m.tables.sub_trans.size() == n + 1 && static_cast<std::size_t>(m.tables.sub_prior.size()) == states &&
            m.naive.labels.size() == n && m.naive.weights.rows() == static_cast<Eigen::Index>(n) &&
            m.naive.weights.cols() == dim && m.naive.bias.size() == static_cast<Eigen::Index>(n) &&
            m.naive.calibration.size() == n && m.naive.standardizer.mean.size() == dim &&
            m.one_level_transitions.rows() == static_cast<Eigen::Index>(n) &&
            m.one_level_transitions.cols() == static_cast<Eigen::Index>(n);
  for (const auto& c : m.bank.clusters) ok = ok && c.mean.size() == dim && c.variance.size() == dim;
  if (!ok) throw Error(ErrorCode::InvalidModel, "model sections disagree on dimensions");
  HierarchicalInference check(m.tables, m.config.inference);
  return m;
}

void save_model(const std::filesystem::path& path, const ActivityModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::MissingFile, "cannot write model " + path.string());
  out << model_to_json(model);
}

ActivityModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, "cannot open model " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return model_from_json(s.str());
}

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Hierarchical: return "hierarchical";
    case ModelKind::Naive: return "naive";
    case ModelKind::OneLevel: return "one_level";
  }
  return "hierarchical";
}

ModelKind parse_model_kind(std::string_view text) {
  for (auto k : {ModelKind::Hierarchical, ModelKind::Naive, ModelKind::OneLevel})
    if (to_string(k) == text) return k;
  throw Error(ErrorCode::MalformedInput, "unknown model '" + std::string(text) + "'");
}

Detector::Detector(const ActivityModel& model, ModelKind kind)
    : model_(model),
      kind_(kind),
      featurizer_(model.config.blocks, model.config.intrinsics),
      inference_(model.tables, model.config.inference) {
  if (kind_ == ModelKind::Hierarchical) {
    labels_ = model.labels();
    state_ = inference_.initial_state();
  } else {
    labels_ = model.activities;
    alpha_ = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(labels_.size()),
                                       1.0 / static_cast<double>(labels_.size()));
  }
}

Eigen::VectorXd Detector::bank_log_posterior(const ActivityModel& model, const Eigen::VectorXd& features) {
  return model.bank.log_posterior(model.bank.standardizer.apply(features));
}

FramePrediction Detector::push(const SkeletonFrame& frame, const ImageFrame* image) {
  const Eigen::VectorXd x = featurizer_.push(frame, image).flatten();
  FramePrediction out;
  out.frame_index = frame.frame_index;
  switch (kind_) {
    case ModelKind::Hierarchical: {
      const StepResult r = inference_.step(state_, bank_log_posterior(model_, x));
      out.activity = labels_[r.activity];
      out.posterior = r.posterior;
      out.segment_start = r.segment_start;
      break;
    }
    case ModelKind::Naive: {
      out.posterior = model_.naive.posterior(x);
      out.activity = labels_[model_.naive.predict(x)];
      break;
    }
    case ModelKind::OneLevel: {
      alpha_ = one_level_step(alpha_, model_.naive.posterior(x), model_.one_level_transitions);
      out.posterior = alpha_;
      out.activity = labels_[argmax_low(alpha_)];
      break;
    }
  }
  return out;
}

std::vector<FramePrediction> detect_stream(const LabeledSequence& seq, const ActivityModel& model, ModelKind kind) {
  Detector detector(model, kind);
  std::vector<FramePrediction> out;
  out.reserve(seq.frames.size());
  for (std::size_t i = 0; i < seq.frames.size(); ++i)
    out.push_back(detector.push(seq.frames[i], seq.has_images() ? &seq.images[i] : nullptr));
  return out;
}

std::string_view to_string(Setting setting) {
  return setting == Setting::NewPerson ? "new_person" : "have_seen";
}

Setting parse_setting(std::string_view text) {
  if (text == "new_person") return Setting::NewPerson;
  if (text == "have_seen") return Setting::HaveSeen;
  throw Error(ErrorCode::MalformedInput, "setting must be new_person or have_seen");
}

EvaluationResult run_evaluation(const Dataset& data, Setting setting, const RunConfig& config,
                                const std::vector<ModelKind>& kinds) {
  EvaluationResult result;
  result.setting = setting;
  result.folds = subjects_of(data);
  if (result.folds.empty()) throw Error(ErrorCode::MalformedInput, "dataset is empty");

  std::map<Location, std::vector<std::string>> activities_by_location;
  {
    std::map<Location, std::set<std::string>> names;
    for (const auto& s : data)
      if (!s.is_random()) names[s.location].insert(s.activity);
    for (auto& [loc, set] : names) activities_by_location[loc].assign(set.begin(), set.end());
  }
  for (auto k : kinds) {
    KindResult kr;
    kr.kind = k;
    for (const auto& [loc, acts] : activities_by_location) kr.confusion.emplace(loc, ConfusionMatrix(acts));
    result.kinds.push_back(std::move(kr));
  }

  for (const auto& subject : result.folds) {
    const Split split = setting == Setting::NewPerson ? split_new_person(data, subject) : split_have_seen(data, subject);
    for (const auto& [loc, acts] : activities_by_location) {
      bool any_test = false;
      for (const auto& s : split.test) any_test = any_test || s.location == loc;
      if (!any_test) continue;
      RunConfig cfg = config;
      cfg.location = loc;
      const ActivityModel model = train_model(split.train, cfg);
      for (auto& kr : result.kinds) {
        auto& cm = kr.confusion.at(loc);
        for (const auto& s : split.test) {
          if (s.location != loc) continue;
          const auto preds = detect_stream(s, model, kr.kind);
          for (const auto& p : preds) {
            // A model trained without some activity can still meet it at test time.
            const bool known = s.is_random() || std::find(acts.begin(), acts.end(), s.activity) != acts.end();
            if (!known) continue;
            cm.add(s.activity, p.activity);
            kr.truth.push_back(s.activity);
            kr.predicted.push_back(p.activity);
          }
        }
      }
    }
  }

  for (auto& kr : result.kinds) {
    std::vector<LocationReport> locs;
    for (const auto& [loc, cm] : kr.confusion) locs.push_back(location_report(loc, cm));
    kr.report = aggregate_report(std::string(to_string(setting)), std::move(locs));
    kr.frame_accuracy = frame_accuracy(kr.truth, kr.predicted);
  }
  return result;
}

}  // namespace actrec
