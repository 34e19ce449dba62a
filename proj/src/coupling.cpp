// SPDX-License-Identifier: MIT
#include "cmf/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmf/errors.hpp"
#include "cmf/special.hpp"

namespace cmf {

void CouplingConfig::validate() const {
    cmf::validate(model);
    if (starts.empty()) throw ConfigError("CouplingConfig: starts must be non-empty");
    if (starts.size() > 64) throw ConfigError("CouplingConfig: n is capped at 64");
    if (time.k < 1) throw ConfigError("CouplingConfig: invalid dyadic time");
    if (level < time.m0)
        throw ConfigError("CouplingConfig: level must be >= m0 of the dyadic time");
    if (level > 40) throw ConfigError("CouplingConfig: level is capped at 40");
    if (n_samples < 1) throw ConfigError("CouplingConfig: n_samples must be >= 1");
    const int refine = level - time.m0;
    if (refine >= 62 || time.k > (std::int64_t(1) << 20) ||
        (time.k << refine) > (std::int64_t(1) << 20))
        throw ConfigError("CouplingConfig: more than 2^20 composed steps per replicate");
}

std::int64_t CouplingConfig::steps() const {
    return time.k << (level - time.m0);
}

std::vector<ExtendedReal> SampleBatch::column(int i) const {
    std::vector<ExtendedReal> col(static_cast<std::size_t>(n_samples));
    for (std::int64_t r = 0; r < n_samples; ++r) col[std::size_t(r)] = row(r)[i];
    return col;
}

namespace {

std::vector<std::size_t> sorted_order(std::span<const ExtendedReal> starts) {
    std::vector<std::size_t> idx(starts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&starts](std::size_t a, std::size_t b) { return starts[a] < starts[b]; });
    return idx;
}

// Enforce order compatibility along the sorted order of the starts: equal
// starts share one value, increasing starts get non-decreasing values.  The
// quantile construction already yields this up to sub-ulp CDF noise; the
// clamp makes the invariant exact rather than statistical.
void enforce_order(std::span<const ExtendedReal> starts, std::vector<ExtendedReal>& out) {
    const auto idx = sorted_order(starts);
    for (std::size_t p = 1; p < idx.size(); ++p) {
        const std::size_t prev = idx[p - 1], cur = idx[p];
        if (starts[cur] == starts[prev])
            out[cur] = out[prev];
        else if (out[cur] < out[prev])
            out[cur] = out[prev];
    }
}

SampleBatch make_batch(const SemigroupModel& model, std::span<const ExtendedReal> starts,
                       std::int64_t n_samples, std::uint64_t seed, std::string kind,
                       double time_value, int level) {
    SampleBatch batch;
    batch.starts.assign(starts.begin(), starts.end());
    batch.n_samples = n_samples;
    batch.n_coords = int(starts.size());
    batch.values.resize(std::size_t(n_samples) * starts.size());
    batch.seed = seed;
    batch.kind = std::move(kind);
    batch.model_desc = describe(model);
    batch.time_value = time_value;
    batch.level = level;
    return batch;
}

}  // namespace

std::vector<ExtendedReal> comonotone_step(const SemigroupModel& model,
                                          std::span<const ExtendedReal> starts, double t,
                                          double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("comonotone_step: u must lie in (0,1)");

    std::vector<TransitionLaw> laws;
    laws.reserve(starts.size());
    for (const ExtendedReal& x : starts) laws.push_back(freeze(model, x, t));

    // One bracket for all coordinates: bisections then run over identical
    // initial intervals, which keeps the outputs ordered exactly.  The bracket
    // of the largest start covers every smaller one by stochastic monotonicity.
    double shared_hi = 0.0;
    ExtendedReal max_finite;
    bool have_finite = false;
    for (const ExtendedReal& x : starts)
        if (x.is_finite() && (!have_finite || max_finite < x)) {
            max_finite = x;
            have_finite = true;
        }
    if (have_finite) {
        std::size_t arg = 0;
        for (std::size_t i = 0; i < starts.size(); ++i)
            if (starts[i] == max_finite) arg = i;
        if (laws[arg].uses_bisection()) shared_hi = laws[arg].expand_bracket(u);
    }

    std::vector<ExtendedReal> out(starts.size());
    for (std::size_t i = 0; i < starts.size(); ++i) out[i] = laws[i].quantile(u, shared_hi);
    enforce_order(starts, out);
    return out;
}

std::vector<ExtendedReal> iterate_sample(const CouplingConfig& config,
                                         ReplicateStream& stream) {
    config.validate();
    const std::int64_t n_steps = config.steps();
    const double dt = std::ldexp(1.0, -config.level);
    std::vector<ExtendedReal> state(config.starts.begin(), config.starts.end());
    for (std::int64_t j = 0; j < n_steps; ++j) {
        const double u = stream.uniform(step_position_key(std::uint64_t(j), config.level));
        state = comonotone_step(config.model, state, dt, u);
    }
    return state;
}

SampleBatch sample_batch(const CouplingConfig& config) {
    config.validate();
    SampleBatch batch =
        make_batch(config.model, config.starts, config.n_samples, config.seed,
                   "comonotone-iterate", config.time.value(), config.level);
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t r = 0; r < config.n_samples; ++r) {
        ReplicateStream stream(config.seed, std::uint64_t(r));
        const auto row = iterate_sample(config, stream);
        std::copy(row.begin(), row.end(),
                  batch.values.begin() + r * batch.n_coords);
    }
    return batch;
}

SampleBatch sample_batch_serial(const CouplingConfig& config) {
    config.validate();
    SampleBatch batch =
        make_batch(config.model, config.starts, config.n_samples, config.seed,
                   "comonotone-iterate", config.time.value(), config.level);
    for (std::int64_t r = 0; r < config.n_samples; ++r) {
        ReplicateStream stream(config.seed, std::uint64_t(r));
        const auto row = iterate_sample(config, stream);
        std::copy(row.begin(), row.end(),
                  batch.values.begin() + r * batch.n_coords);
    }
    return batch;
}

SampleBatch onestep_batch(const SemigroupModel& model,
                          std::span<const ExtendedReal> starts, double t,
                          std::int64_t n_samples, std::uint64_t seed) {
    if (!(t > 0.0)) throw DomainError("onestep_batch: t must be positive");
    if (starts.empty() || starts.size() > 64)
        throw ConfigError("onestep_batch: need 1 <= n <= 64 starts");
    SampleBatch batch = make_batch(model, starts, n_samples, seed, "one-step", t, 0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < n_samples; ++r) {
        ReplicateStream stream(seed, std::uint64_t(r));
        const double u = stream.uniform(step_position_key(0, 0));
        const auto row = comonotone_step(model, starts, t, u);
        std::copy(row.begin(), row.end(), batch.values.begin() + r * batch.n_coords);
    }
    return batch;
}

SampleBatch independent_batch(const SemigroupModel& model,
                              std::span<const ExtendedReal> starts, double t,
                              std::int64_t n_samples, std::uint64_t seed) {
    if (!(t > 0.0)) throw DomainError("independent_batch: t must be positive");
    if (starts.empty() || starts.size() > 64)
        throw ConfigError("independent_batch: need 1 <= n <= 64 starts");
    // Starts are fixed, so the n laws can be frozen once and shared.
    std::vector<TransitionLaw> laws;
    laws.reserve(starts.size());
    for (const ExtendedReal& x : starts) laws.push_back(freeze(model, x, t));

    SampleBatch batch = make_batch(model, starts, n_samples, seed, "independent", t, 0);
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t r = 0; r < n_samples; ++r) {
        ReplicateStream stream(seed, std::uint64_t(r));
        for (int i = 0; i < batch.n_coords; ++i) {
            const double u = stream.uniform(coordinate_key(i));
            batch.values[std::size_t(r) * batch.n_coords + i] =
                laws[std::size_t(i)].quantile(u);
        }
    }
    return batch;
}

SampleBatch parallel_batch(const SemigroupModel& model,
                           std::span<const ExtendedReal> starts, double t,
                           std::int64_t n_samples, std::uint64_t seed) {
    const auto* params = std::get_if<BrownianParams>(&model);
    if (params == nullptr)
        throw UnsupportedModelError("parallel_batch: only Brownian models are supported");
    return parallel_batch(*params, starts, t, n_samples, seed);
}

SampleBatch parallel_batch(const BrownianParams& params,
                           std::span<const ExtendedReal> starts, double t,
                           std::int64_t n_samples, std::uint64_t seed) {
    params.validate();
    if (!(t > 0.0)) throw DomainError("parallel_batch: t must be positive");
    if (starts.empty() || starts.size() > 64)
        throw ConfigError("parallel_batch: need 1 <= n <= 64 starts");
    SampleBatch batch = make_batch(SemigroupModel(params), starts, n_samples, seed,
                                   "parallel", t, 0);
    const double sd = params.vol * std::sqrt(t);
    for (std::int64_t r = 0; r < n_samples; ++r) {
        ReplicateStream stream(seed, std::uint64_t(r));
        double z = params.drift * t + sd * inverse_normal_cdf(stream.uniform(0));
        // Snap the shared increment to a 2^-32 grid: start + z is then exact
        // for grid-representable starts, which keeps the coordinate
        // differences of a row exactly equal to the start differences.
        z = std::round(std::ldexp(z, 32)) * 0x1.0p-32;
        for (int i = 0; i < batch.n_coords; ++i) {
            const ExtendedReal x = batch.starts[std::size_t(i)];
            batch.values[std::size_t(r) * batch.n_coords + i] =
                x.is_finite() ? ExtendedReal(x.value() + z) : x;
        }
    }
    return batch;
}

}  // namespace cmf
