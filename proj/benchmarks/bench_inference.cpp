#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "actrec/memm.hpp"
#include "actrec/model.hpp"
#include "actrec/synth.hpp"

using namespace actrec;

namespace {

TransitionTables random_tables(std::size_t activities, std::size_t states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  const auto m = static_cast<Eigen::Index>(states);
  TransitionTables t;
  for (std::size_t z = 0; z <= activities; ++z) {
    Eigen::MatrixXd a(m, m);
    for (Eigen::Index k = 0; k < a.size(); ++k) a(k) = u(rng);
    for (Eigen::Index r = 0; r < m; ++r) a.row(r) /= a.row(r).sum();
    t.sub_trans.push_back(a);
  }
  t.act_trans = manual_activity_transitions(activities);
  t.sub_prior = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  t.act_prior = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(activities + 1), 1.0 / static_cast<double>(activities + 1));
  return t;
}

std::vector<Eigen::VectorXd> random_log_posteriors(std::size_t frames, std::size_t states, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(1e-3, 1.0);
  std::vector<Eigen::VectorXd> out;
  for (std::size_t t = 0; t < frames; ++t) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(states));
    for (auto& v : p) v = u(rng);
    out.push_back((p / p.sum()).array().log().matrix());
  }
  return out;
}

// Steady-state cost of one online step, window full. Args: T, activities, sub-activities.
void BM_StructureStep(benchmark::State& state) {
  const auto cap = static_cast<std::size_t>(state.range(0));
  const auto n = static_cast<std::size_t>(state.range(1));
  const auto m = static_cast<std::size_t>(state.range(2));
  const HierarchicalInference inf(random_tables(n, m, 1), {cap, BoundaryPrior::Uniform});
  const auto stream = random_log_posteriors(cap + 64, m, 2);
  DetectorState s = inf.initial_state();
  for (std::size_t t = 0; t < cap; ++t) structure_step(s, stream[t], inf);
  std::size_t t = cap;
  for (auto _ : state) {
    benchmark::DoNotOptimize(structure_step(s, stream[t], inf));
    if (++t == stream.size()) t = cap;
  }
}
BENCHMARK(BM_StructureStep)
    ->Args({30, 4, 20})
    ->Args({60, 4, 20})
    ->Args({90, 4, 20})
    ->Args({90, 12, 28})
    ->Unit(benchmark::kMillisecond);

// Full per-frame detection latency (features, bank posterior, inference) on a trained model.
void BM_DetectFrame(benchmark::State& state) {
  SyntheticDatasetOptions opt;
  opt.subjects = 1;
  opt.seconds_per_sequence = 6.0;
  Dataset data = generate_benchmark_dataset(opt);
  Dataset train;
  for (const auto& s : data)
    if (!s.is_random()) train.push_back(s);
  RunConfig config;
  config.train_stride = 2;
  const ActivityModel model = train_model(train, config);
  const LabeledSequence& seq = data.front();
  Detector detector(model, ModelKind::Hierarchical);
  for (const auto& f : seq.frames) detector.push(f);
  std::size_t t = 0;
  std::int64_t index = seq.frames.back().frame_index;
  for (auto _ : state) {
    SkeletonFrame f = seq.frames[t];
    f.frame_index = ++index;
    benchmark::DoNotOptimize(detector.push(f));
    t = (t + 1) % seq.frames.size();
  }
}
BENCHMARK(BM_DetectFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
