// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cmf/dyadic.hpp"
#include "cmf/models.hpp"
#include "cmf/rng.hpp"

namespace cmf {

// Configuration of a dyadic-time comonotone iterate Q_t^(n),m.
struct CouplingConfig {
    SemigroupModel model;
    std::vector<ExtendedReal> starts;  // 1 <= n <= 64
    DyadicTime time;
    int level = 0;  // m >= time.m0
    std::int64_t n_samples = 1;
    std::uint64_t seed = 0;

    void validate() const;
    std::int64_t steps() const;  // k * 2^(level - m0)
};

// N independent n-vectors drawn from a coupling kernel, with seed provenance.
struct SampleBatch {
    std::vector<ExtendedReal> starts;
    std::int64_t n_samples = 0;
    int n_coords = 0;
    std::vector<ExtendedReal> values;  // row-major, n_samples x n_coords
    std::uint64_t seed = 0;

    std::string kind;        // comonotone-iterate | one-step | independent | parallel
    std::string model_desc;
    double time_value = 0.0;
    int level = 0;

    std::span<const ExtendedReal> row(std::int64_t r) const {
        return {values.data() + r * n_coords, std::size_t(n_coords)};
    }
    std::vector<ExtendedReal> column(int i) const;
};

// One comonotone step: every coordinate is pushed through its own quantile
// function at the same uniform u.  The output is order-compatible with the
// starts, exactly: bisection-based models share one bracket across
// coordinates and a monotone clamp removes any sub-ulp CDF noise.
std::vector<ExtendedReal> comonotone_step(const SemigroupModel& model,
                                          std::span<const ExtendedReal> starts, double t,
                                          double u);

// One replicate of the iterate: k * 2^(level - m0) comonotone steps of size
// 2^-level, one fresh uniform per step keyed by the step's dyadic position.
std::vector<ExtendedReal> iterate_sample(const CouplingConfig& config,
                                         ReplicateStream& stream);

// N replicates of iterate_sample; replicate r uses the substream derived from
// (seed, r), so output is bit-identical across thread counts and runs.
// sample_batch runs replicates in parallel (OpenMP); sample_batch_serial is
// the reference loop kept for testing and benchmarking.
SampleBatch sample_batch(const CouplingConfig& config);
SampleBatch sample_batch_serial(const CouplingConfig& config);

// Single comonotone step at full time t (the kernel Q_t itself).
SampleBatch onestep_batch(const SemigroupModel& model,
                          std::span<const ExtendedReal> starts, double t,
                          std::int64_t n_samples, std::uint64_t seed);

// Product coupling: each coordinate is sampled with its own independent
// uniform through the time-t quantile; marginals match the comonotone
// batches in law, the joint does not.
SampleBatch independent_batch(const SemigroupModel& model,
                              std::span<const ExtendedReal> starts, double t,
                              std::int64_t n_samples, std::uint64_t seed);

// Parallel coupling for Brownian models: row_i = start_i + Z with one shared
// increment Z per replicate, so coordinate differences are constant.  The
// SemigroupModel overload throws UnsupportedModelError for anything else.
SampleBatch parallel_batch(const BrownianParams& params,
                           std::span<const ExtendedReal> starts, double t,
                           std::int64_t n_samples, std::uint64_t seed);
SampleBatch parallel_batch(const SemigroupModel& model,
                           std::span<const ExtendedReal> starts, double t,
                           std::int64_t n_samples, std::uint64_t seed);

}  // namespace cmf
