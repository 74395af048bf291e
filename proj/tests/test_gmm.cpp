#include <doctest.h>

#include <random>

#include "actrec/error.hpp"
#include "actrec/gmm.hpp"

using namespace actrec;

namespace {

Eigen::MatrixXd blob(std::mt19937_64& rng, const Eigen::VectorXd& center, double sigma, int n) {
  std::normal_distribution<double> g(0.0, sigma);
  Eigen::MatrixXd x(n, center.size());
  for (int i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < center.size(); ++d) x(i, d) = center(d) + g(rng);
  return x;
}

Eigen::MatrixXd vstack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() + b.rows(), a.cols());
  out << a, b;
  return out;
}

}  // namespace

TEST_CASE("two separated blobs are recovered") {
  std::mt19937_64 rng(59);
  const Eigen::VectorXd c1 = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd c2 = Eigen::VectorXd::Constant(3, 100.0 / std::sqrt(3.0));
  const Eigen::MatrixXd x = vstack(blob(rng, c1, 1.0, 300), blob(rng, c2, 1.0, 300));
  const GmmFit fit = fit_gmm(x, 2, 1);
  REQUIRE(fit.clusters.size() == 2);
  const auto& a = (fit.clusters[0].mean - c1).norm() < (fit.clusters[1].mean - c1).norm() ? fit.clusters[0] : fit.clusters[1];
  const auto& b = &a == &fit.clusters[0] ? fit.clusters[1] : fit.clusters[0];
  CHECK((a.mean - c1).cwiseAbs().maxCoeff() < 0.5);
  CHECK((b.mean - c2).cwiseAbs().maxCoeff() < 0.5);
  CHECK(a.weight + b.weight == doctest::Approx(1.0));
}

TEST_CASE("one component is the sample mean and variance") {
  std::mt19937_64 rng(61);
  const Eigen::MatrixXd x = blob(rng, Eigen::Vector2d(3, -2), 2.0, 200);
  const GmmFit fit = fit_gmm(x, 1, 9);
  const Eigen::VectorXd mean = x.colwise().mean().transpose();
  const Eigen::VectorXd var = (x.rowwise() - mean.transpose()).array().square().colwise().mean().transpose();
  CHECK((fit.clusters[0].mean - mean).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((fit.clusters[0].variance - var).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fits are deterministic and monotone") {
  std::mt19937_64 rng(67);
  const Eigen::MatrixXd x = vstack(blob(rng, Eigen::Vector3d(0, 0, 0), 1.0, 80), blob(rng, Eigen::Vector3d(2, 1, 0), 1.5, 80));
  GmmOptions opt;
  opt.check_monotone = true;
  const GmmFit a = fit_gmm(x, 4, 5, opt);
  const GmmFit b = fit_gmm(x, 4, 5, opt);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(a.clusters[c].mean == b.clusters[c].mean);
    CHECK(a.clusters[c].variance == b.clusters[c].variance);
  }
  for (std::size_t i = 1; i < a.log_likelihood.size(); ++i)
    CHECK(a.log_likelihood[i] >= a.log_likelihood[i - 1] - 1e-7);
}

TEST_CASE("too few samples") {
  try {
    fit_gmm(Eigen::MatrixXd::Zero(5, 2), 3, 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewSamples);
  }
}

TEST_CASE("variance floor holds on constant data") {
  const GmmFit fit = fit_gmm(Eigen::MatrixXd::Constant(20, 2, 4.0), 1, 1);
  CHECK(fit.clusters[0].variance.minCoeff() >= 1e-6);
}

TEST_CASE("bank cluster counts follow the location assignment") {
  std::mt19937_64 rng(71);
  std::vector<ActivitySamples> training;
  std::vector<std::string> kitchen;
  for (int a = 0; a < 12; ++a) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c(a % 4) = 10.0 * (1 + a / 4);
    training.push_back({"activity" + std::to_string(a), blob(rng, c, 1.0, 40)});
    if (a < 4) kitchen.push_back(training.back().activity);
  }
  const SubActivityBank bank = build_bank(training, kitchen, Location::Kitchen);
  CHECK(bank.size() == 4 * 5 + 8);
  double total = 0.0;
  std::size_t negatives = 0;
  for (const auto& c : bank.clusters) {
    total += c.weight;
    negatives += c.negative ? 1 : 0;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(negatives == 8);
  const std::vector<std::string> bathroom(kitchen.begin(), kitchen.begin() + 3);
  CHECK(build_bank(training, bathroom, Location::Bathroom).size() == 24);

  for (int i = 0; i < 50; ++i) {
    const Eigen::VectorXd x = bank.standardizer.apply(training[static_cast<std::size_t>(i % 12)].samples.row(i % 40).transpose().eval());
    const Eigen::VectorXd p = bank.posterior(x);
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bank.log_posterior(x).minCoeff() >= kLogPosteriorFloor);
  }
}

TEST_CASE("missing in-location activity") {
  std::vector<ActivitySamples> training{{"a", Eigen::MatrixXd::Random(20, 2)}};
  try {
    build_bank(training, {"a", "b"}, Location::Office);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingActivityData);
  }
}

TEST_CASE("posterior at a separated mean is near certain; identical clusters are uniform") {
  SubActivityBank bank;
  bank.standardizer.mean = Eigen::VectorXd::Zero(2);
  bank.standardizer.scale = Eigen::VectorXd::Ones(2);
  for (int c = 0; c < 3; ++c) {
    GaussianCluster g;
    g.mean = Eigen::Vector2d(50.0 * c, 0);
    g.variance = Eigen::Vector2d(1, 1);
    g.weight = 1.0 / 3;
    bank.clusters.push_back(g);
  }
  CHECK(bank.posterior(Eigen::Vector2d(50, 0))(1) > 0.999);
  const Eigen::VectorXd lp = bank.log_posterior(Eigen::Vector2d(1e4, 0));
  CHECK(lp.minCoeff() >= kLogPosteriorFloor);
  CHECK(lp.allFinite());
  for (auto& g : bank.clusters) g.mean = Eigen::Vector2d(1, 1);
  const Eigen::VectorXd u = bank.posterior(Eigen::Vector2d(3, -2));
  CHECK((u.array() - 1.0 / 3).abs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(bank.posterior(Eigen::Vector3d(0, 0, 0)), Error);
}

TEST_CASE("soft labels of a static sequence are constant rows") {
  std::mt19937_64 rng(73);
  std::vector<ActivitySamples> training{{"a", blob(rng, Eigen::Vector2d(0, 0), 1, 40)},
                                        {"b", blob(rng, Eigen::Vector2d(5, 5), 1, 40)}};
  const SubActivityBank bank = build_bank(training, {"a", "b"}, Location::Office);
  Eigen::MatrixXd rows(6, 2);
  rows.rowwise() = Eigen::RowVector2d(1.0, 2.0);
  const Eigen::MatrixXd s = soft_labels(bank, bank.standardizer.apply(rows));
  CHECK(s.rows() == 6);
  for (Eigen::Index r = 0; r < 6; ++r) {
    CHECK(s.row(r).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.row(r) == s.row(0));
  }
}
