#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "actrec/error.hpp"
#include "actrec/model.hpp"
#include "actrec/synth.hpp"

namespace fs = std::filesystem;
using namespace actrec;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitModel = 3;

struct ConfigArgs {
  std::string file;
  std::vector<std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("-c,--config", file, "Key-value config file (key = value per line)");
    cmd->add_option("-s,--set", overrides, "Override a config key, e.g. --set T=60 (repeatable)");
  }

  RunConfig build() const {
    RunConfig c = file.empty() ? RunConfig{} : load_run_config(file);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw Error(ErrorCode::MalformedInput, "--set expects key=value, got '" + kv + "'");
      apply_setting(c, kv.substr(0, eq), kv.substr(eq + 1));
    }
    validate(c);
    return c;
  }
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

int run_synth(const fs::path& out, const SyntheticDatasetOptions& options) {
  save_dataset(out, generate_benchmark_dataset(options));
  std::cout << "wrote " << options.subjects * 5 << " sequences to " << out.string() << '\n';
  return 0;
}

int run_train(const fs::path& data_dir, const fs::path& out, const RunConfig& config, const std::string& format) {
  if (!fs::exists(data_dir / "manifest.csv"))
    throw Error(ErrorCode::MissingFile, "no manifest.csv in " + data_dir.string());
  const Dataset data = load_dataset(data_dir);
  TrainingSummary summary;
  const ActivityModel model = train_model(data, config, &summary);
  save_model(out, model);
  if (format == "json") {
    nlohmann::ordered_json j;
    j["model"] = out.string();
    j["location"] = std::string(to_string(model.location));
    j["sub_activities"] = model.bank.size();
    j["sources"] = nlohmann::ordered_json::array();
    for (const auto& s : summary.bank)
      j["sources"].push_back({{"activity", s.activity},
                              {"frames", s.samples},
                              {"components", s.components},
                              {"negative", s.negative},
                              {"final_log_likelihood", s.final_log_likelihood}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "activity,frames,components,negative,final_log_likelihood\n";
    for (const auto& s : summary.bank)
      std::cout << s.activity << ',' << s.samples << ',' << s.components << ',' << (s.negative ? "true" : "false")
                << ',' << fmt(s.final_log_likelihood) << '\n';
  }
  return 0;
}

void print_prediction(const FramePrediction& p, const std::vector<std::string>& labels, const std::string& format) {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["frame"] = p.frame_index;
    j["activity"] = p.activity;
    nlohmann::ordered_json post;
    for (std::size_t i = 0; i < labels.size(); ++i) post[labels[i]] = p.posterior(static_cast<Eigen::Index>(i));
    j["posterior"] = std::move(post);
    std::cout << j.dump() << '\n';
  } else {
    std::cout << p.frame_index << ',' << p.activity;
    for (Eigen::Index i = 0; i < p.posterior.size(); ++i) std::cout << ',' << fmt(p.posterior(i));
    std::cout << '\n';
  }
  std::cout.flush();
}

int run_detect(const fs::path& model_path, const std::string& input, const std::string& kind_name,
               const std::string& format, bool header) {
  const ActivityModel model = load_model(model_path);
  Detector detector(model, parse_model_kind(kind_name));
  if (header && format == "csv") {
    std::cout << "frame,activity";
    for (const auto& l : detector.labels()) std::cout << ",p_" << l;
    std::cout << '\n';
  }
  if (input.empty() || input == "-") {
    if (model.config.blocks.needs_images())
      throw Error(ErrorCode::MalformedInput, "this model uses image features; pass a sequence file instead of stdin");
    OrientationFiller filler;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(std::cin, line)) {
      ++line_no;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line.compare(first, 3, "END") == 0) break;
      SkeletonFrame frame;
      try {
        frame = parse_frame(line);
      } catch (const Error& e) {
        throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
      }
      filler.apply(frame);
      print_prediction(detector.push(frame), detector.labels(), format);
    }
    return 0;
  }
  const auto frames = read_skeleton_file(input);
  const auto images = model.config.blocks.needs_images() ? load_sequence_images(input, frames)
                                                         : std::vector<ImageFrame>{};
  for (std::size_t i = 0; i < frames.size(); ++i)
    print_prediction(detector.push(frames[i], images.empty() ? nullptr : &images[i]), detector.labels(), format);
  return 0;
}

int run_eval(const fs::path& data_dir, const fs::path& out_dir, const std::string& setting_name,
             const std::vector<std::string>& kind_names, const RunConfig& config, const std::string& format) {
  if (!fs::exists(data_dir / "manifest.csv"))
    throw Error(ErrorCode::MissingFile, "no manifest.csv in " + data_dir.string());
  const Setting setting = parse_setting(setting_name);
  std::vector<ModelKind> kinds;
  for (const auto& k : kind_names) kinds.push_back(parse_model_kind(k));
  const Dataset data = load_dataset(data_dir);
  const EvaluationResult result = run_evaluation(data, setting, config, kinds);
  fs::create_directories(out_dir);
  for (const auto& kr : result.kinds) {
    const std::string kind(to_string(kr.kind));
    for (const auto& [loc, cm] : kr.confusion) {
      std::ofstream(out_dir / ("confusion_" + kind + "_" + std::string(to_string(loc)) + ".csv")) << cm.to_csv();
    }
    std::ofstream(out_dir / ("metrics_" + kind + ".json")) << report_to_json(kr.report);
    std::ofstream(out_dir / ("metrics_" + kind + ".csv")) << report_to_csv(kr.report);
  }
  if (format == "json") {
    nlohmann::ordered_json j;
    j["setting"] = std::string(to_string(setting));
    j["folds"] = result.folds;
    j["models"] = nlohmann::ordered_json::array();
    for (const auto& kr : result.kinds)
      j["models"].push_back({{"model", std::string(to_string(kr.kind))},
                             {"precision", kr.report.precision},
                             {"recall", kr.report.recall},
                             {"frame_accuracy", kr.frame_accuracy}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "model,precision,recall,frame_accuracy\n";
    for (const auto& kr : result.kinds)
      std::cout << to_string(kr.kind) << ',' << fmt(kr.report.precision) << ',' << fmt(kr.report.recall) << ','
                << fmt(kr.frame_accuracy) << '\n';
  }
  return 0;
}

int run_features_dump(const fs::path& input, const RunConfig& config, const std::string& format) {
  LabeledSequence seq;
  seq.frames = read_skeleton_file(input);
  if (config.blocks.needs_images()) {
    seq.images = load_sequence_images(input, seq.frames);
    if (seq.images.empty())
      throw Error(ErrorCode::MissingFile, "HOG features need the image folder next to " + input.string());
  }
  const auto features = featurize(seq, config.blocks, config.intrinsics);
  for (std::size_t i = 0; i < features.size(); ++i) {
    const auto& f = features[i];
    if (format == "json") {
      nlohmann::ordered_json j;
      j["frame"] = seq.frames[i].frame_index;
      j["body_pose"] = f.body_pose;
      j["hand"] = f.hand;
      j["motion"] = f.motion;
      if (f.hog_simple) j["simple_hog"] = *f.hog_simple;
      if (f.hog_skeletal) j["skeletal_hog"] = *f.hog_skeletal;
      std::cout << j.dump() << '\n';
    } else {
      const Eigen::VectorXd v = f.flatten();
      std::cout << seq.frames[i].frame_index;
      for (Eigen::Index k = 0; k < v.size(); ++k) std::cout << ',' << fmt(v(k));
      std::cout << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online hierarchical activity detection from skeleton streams"};
  app.require_subcommand(1);
  std::string format = "csv";
  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  };

  auto* synth = app.add_subcommand("synth", "Write the scripted synthetic benchmark dataset");
  std::string synth_out;
  SyntheticDatasetOptions synth_opts;
  synth->add_option("-o,--out", synth_out, "Output directory")->required();
  synth->add_option("--subjects", synth_opts.subjects, "Number of subjects")->check(CLI::PositiveNumber);
  synth->add_option("--seconds", synth_opts.seconds_per_sequence, "Seconds per sequence")->check(CLI::PositiveNumber);
  synth->add_option("--jitter", synth_opts.jitter_mm, "Joint jitter in mm")->check(CLI::NonNegativeNumber);
  synth->add_option("--seed", synth_opts.seed, "Seed");
  synth->add_flag("--images", synth_opts.with_images, "Also render RGB and depth images");

  auto* train = app.add_subcommand("train", "Train a model from a dataset directory");
  std::string train_data, train_out;
  ConfigArgs train_cfg;
  train->add_option("-d,--data", train_data, "Dataset directory containing manifest.csv")->required();
  train->add_option("-o,--out", train_out, "Model file to write")->required();
  train_cfg.attach(train);
  add_format(train);

  auto* detect = app.add_subcommand("detect", "Label every frame of a sequence (or of standard input)");
  std::string detect_model, detect_input, detect_kind = "hierarchical";
  bool detect_header = false;
  detect->add_option("model_file", detect_model, "Trained model file")->required();
  detect->add_option("input", detect_input, "Skeleton sequence file; omit or '-' to stream standard input");
  detect->add_option("-m,--model", detect_kind, "hierarchical, naive or one_level")
      ->check(CLI::IsMember({"hierarchical", "naive", "one_level"}));
  detect->add_flag("--header", detect_header, "Print a CSV header line first");
  add_format(detect);

  auto* eval = app.add_subcommand("eval", "Cross-validate on a dataset directory");
  std::string eval_data, eval_out = "eval_out", eval_setting = "new_person";
  std::vector<std::string> eval_models{"hierarchical", "naive", "one_level"};
  ConfigArgs eval_cfg;
  eval->add_option("-d,--data", eval_data, "Dataset directory containing manifest.csv")->required();
  eval->add_option("-o,--out", eval_out, "Report directory");
  eval->add_option("--setting", eval_setting, "new_person or have_seen")
      ->check(CLI::IsMember({"new_person", "have_seen"}));
  eval->add_option("--models", eval_models, "Models to evaluate")->delimiter(',');
  eval_cfg.attach(eval);
  add_format(eval);

  auto* features = app.add_subcommand("features", "Inspect features");
  features->require_subcommand(1);
  auto* dump = features->add_subcommand("dump", "Print per-frame feature vectors of a sequence");
  std::string dump_input;
  ConfigArgs dump_cfg;
  dump->add_option("input", dump_input, "Skeleton sequence file")->required();
  dump_cfg.attach(dump);
  add_format(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth) return run_synth(synth_out, synth_opts);
    if (*train) return run_train(train_data, train_out, train_cfg.build(), format);
    if (*detect) return run_detect(detect_model, detect_input, detect_kind, format, detect_header);
    if (*eval) return run_eval(eval_data, eval_out, eval_setting, eval_models, eval_cfg.build(), format);
    if (*dump) return run_features_dump(dump_input, dump_cfg.build(), format);
  } catch (const Error& e) {
    std::cerr << "actrec: " << to_string(e.code()) << ": " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitUsage : kExitModel;
  } catch (const std::exception& e) {
    std::cerr << "actrec: " << e.what() << '\n';
    return kExitModel;
  }
  return kExitUsage;
}
