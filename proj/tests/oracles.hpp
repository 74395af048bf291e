#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "actrec/features.hpp"
#include "actrec/memm.hpp"

namespace oracle {

/// Max over every sub-activity sequence, enumerated one by one, of
/// P(z|z_prev) * [sum_y' P(y1|y',z) P(y')] * P(y1|x1)/P(y1) * prod P(yt|yt-1,z) P(yt|xt)/P(yt),
/// in probability space. `boundary` is P(y') (empty = uniform).
double enumerate_substructure(const actrec::TransitionTables& tables, std::size_t z, std::size_t z_prev,
                              const std::vector<Eigen::VectorXd>& posteriors,
                              const Eigen::VectorXd& boundary = {});

/// The same quantity as enumerate_substructure with uniform boundary, by
/// max-product in probability space.
double viterbi_substructure(const actrec::TransitionTables& tables, std::size_t z, std::size_t z_prev,
                            const std::vector<Eigen::VectorXd>& posteriors);

/// log P(z | O; G_t) for t = posteriors.size() by plain recursion over every
/// split point with no memoisation, so all segmentations are visited.
/// Window scores come from viterbi_substructure.
Eigen::VectorXd segmentation_posterior(const actrec::TransitionTables& tables,
                                       const std::vector<Eigen::VectorXd>& posteriors, std::size_t max_len);

/// Random row-stochastic tables with every entry >= 1e-3.
actrec::TransitionTables random_tables(std::size_t activities_incl_neutral, std::size_t states, std::mt19937_64& rng);

/// Random posterior vectors (probability space, entries >= 1e-3, sum 1).
std::vector<Eigen::VectorXd> random_posteriors(std::size_t frames, std::size_t states, std::mt19937_64& rng);

/// Expected features of the mirrored stream, built from the original ones:
/// left/right joints and hands swap, quaternions map to (w, x, -y, -z) and
/// torso- or head-frame positions get their x negated.
actrec::FeatureVector mirror_features(const actrec::FeatureVector& f);

std::vector<Eigen::VectorXd> logs(const std::vector<Eigen::VectorXd>& p);

}  // namespace oracle
