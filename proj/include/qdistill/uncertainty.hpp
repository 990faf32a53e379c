// Copyright (c) 2026 qdistill developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qdistill/rng.hpp"
#include "qdistill/tomography.hpp"

namespace qdistill {

/// Monte Carlo summary of one scalar estimator.
struct McReport {
  double mean = 0.0;
  double std = 0.0;
  int n_trials = 0;  // trials aggregated (after skips)
  std::uint64_t seed = 0;
  int skipped = 0;
};

/// A scalar pipeline: count table in, figure of merit out (typically
/// QST followed by a metric).
using ScalarEstimator = std::function<double(const CountTable&)>;

/// Redraw rule for one observed count; the default is parametric
/// Poisson bootstrap around the observation.
using CountResampler = std::function<std::int64_t(std::int64_t, Rng&)>;

inline std::int64_t poisson_resampler(std::int64_t n, Rng& rng) {
  return rng.next_poisson(static_cast<double>(n));
}

namespace detail {

inline McReport summarize(const std::vector<double>& values,
                          std::uint64_t seed, int skipped, int requested) {
  if (skipped * 10 > requested) {
    std::ostringstream ss;
    ss << "mc_resample: " << skipped << "/" << requested
       << " trials failed (more than 10%)";
    throw std::runtime_error(ss.str());
  }
  McReport r;
  r.seed = seed;
  r.skipped = skipped;
  r.n_trials = static_cast<int>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  r.mean = sum / static_cast<double>(values.size());
  double ss2 = 0.0;
  for (double v : values) ss2 += (v - r.mean) * (v - r.mean);
  r.std = values.size() > 1
              ? std::sqrt(ss2 / static_cast<double>(values.size() - 1))
              : 0.0;
  return r;
}

/// Redraws every count of the table; the random stream is keyed by
/// (seed, trial, setting index in canonical order), so results do not
/// depend on evaluation order and trials can run concurrently.
inline CountTable resample_table(const CountTable& counts, std::uint64_t seed,
                                 std::uint64_t trial,
                                 const CountResampler& resampler) {
  CountTable redrawn;
  redrawn.acquisition_scale = counts.acquisition_scale;
  std::uint64_t idx = 0;
  for (const auto& [s, n] : counts.entries) {
    Rng rng(seed, stream::kResample, trial, idx++);
    redrawn.entries[s] = resampler(n, rng);
  }
  return redrawn;
}

}  // namespace detail

/// Poisson parametric bootstrap of one estimator: redraw every count
/// around its observed value, rerun the pipeline, report sample mean and
/// sample standard deviation. Deterministic given the seed. Trials where
/// the estimator throws are skipped and counted; more than 10% skips
/// rejects the whole computation.
inline McReport mc_resample(const CountTable& counts,
                            const ScalarEstimator& estimator, int n_trials,
                            std::uint64_t seed,
                            const CountResampler& resampler = poisson_resampler) {
  if (n_trials < 2)
    throw std::invalid_argument("mc_resample: n_trials must be >= 2");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(n_trials));
  int skipped = 0;
  for (int t = 0; t < n_trials; ++t) {
    const CountTable redrawn = detail::resample_table(
        counts, seed, static_cast<std::uint64_t>(t), resampler);
    try {
      values.push_back(estimator(redrawn));
    } catch (const std::exception&) {
      ++skipped;
    }
  }
  return detail::summarize(values, seed, skipped, n_trials);
}

/// Same bootstrap evaluated for several estimators that share the
/// per-trial redraws. Because the redraw stream depends only on
/// (seed, trial, setting), each report is identical to what a standalone
/// mc_resample with the same seed would produce.
inline std::map<std::string, McReport> mc_resample_multi(
    const CountTable& counts,
    const std::map<std::string, ScalarEstimator>& estimators, int n_trials,
    std::uint64_t seed,
    const CountResampler& resampler = poisson_resampler) {
  if (n_trials < 2)
    throw std::invalid_argument("mc_resample: n_trials must be >= 2");
  std::map<std::string, std::vector<double>> values;
  std::map<std::string, int> skipped;
  for (const auto& [name, est] : estimators) {
    values[name] = {};
    skipped[name] = 0;
  }
  for (int t = 0; t < n_trials; ++t) {
    const CountTable redrawn = detail::resample_table(
        counts, seed, static_cast<std::uint64_t>(t), resampler);
    for (const auto& [name, est] : estimators) {
      try {
        values[name].push_back(est(redrawn));
      } catch (const std::exception&) {
        ++skipped[name];
      }
    }
  }
  std::map<std::string, McReport> out;
  for (const auto& [name, vals] : values)
    out[name] = detail::summarize(vals, seed, skipped[name], n_trials);
  return out;
}

}  // namespace qdistill
