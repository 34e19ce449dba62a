// SPDX-License-Identifier: MIT
#include "cmf/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cmf/errors.hpp"

namespace cmf {

EmpiricalMeasure::EmpiricalMeasure(std::vector<ExtendedReal> values)
    : values_(std::move(values)) {
    if (values_.empty()) throw ShapeError("EmpiricalMeasure: no samples");
    std::sort(values_.begin(), values_.end());
}

double empirical_w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    if (a.size() != b.size()) throw ShapeError("empirical_w1: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::abs(phi(a.values()[i]) - phi(b.values()[i]));
    return acc / double(a.size());
}

KsReport ks_dkw(const EmpiricalMeasure& a, const std::function<double(double)>& cdf,
                double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("ks_dkw: alpha must lie in (0,1)");
    if (a.size() < 2) throw ShapeError("ks_dkw: need at least 2 samples");
    const double n = double(a.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const ExtendedReal x = a.values()[i];
        const double f = x.is_finite() ? cdf(x.value()) : (x.value() > 0 ? 1.0 : 0.0);
        stat = std::max(stat, std::max(double(i + 1) / n - f, f - double(i) / n));
    }
    KsReport rep;
    rep.statistic = stat;
    rep.bound = std::sqrt(std::log(2.0 / alpha) / (2.0 * n));
    rep.pass = stat <= rep.bound;
    return rep;
}

double order_fraction(const SampleBatch& batch) {
    const int n = batch.n_coords;
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&batch](int a, int b) {
        return batch.starts[std::size_t(a)] < batch.starts[std::size_t(b)];
    });
    std::int64_t good = 0;
    for (std::int64_t r = 0; r < batch.n_samples; ++r) {
        const auto row = batch.row(r);
        bool ok = true;
        for (int p = 1; p < n && ok; ++p) {
            const int prev = idx[p - 1], cur = idx[p];
            if (batch.starts[std::size_t(prev)] == batch.starts[std::size_t(cur)])
                ok = row[prev] == row[cur];
            else
                ok = row[prev] <= row[cur];
        }
        if (ok) ++good;
    }
    return double(good) / double(batch.n_samples);
}

EquicontinuityReport equicontinuity_check(const SemigroupModel& model,
                                          std::span<const ExtendedReal> x,
                                          std::span<const ExtendedReal> y,
                                          DyadicTime time, int level,
                                          std::int64_t n_samples, std::uint64_t seed) {
    if (x.size() != y.size()) throw ShapeError("equicontinuity_check: size mismatch");
    const std::size_t n = x.size();

    CouplingConfig config;
    config.model = model;
    config.starts.assign(x.begin(), x.end());
    config.starts.insert(config.starts.end(), y.begin(), y.end());
    config.time = time;
    config.level = level;
    config.n_samples = n_samples;
    config.seed = seed;
    const SampleBatch joint = sample_batch(config);

    double sum = 0.0, sum2 = 0.0;
    for (std::int64_t r = 0; r < joint.n_samples; ++r) {
        const auto row = joint.row(r);
        double d = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            d += std::abs(phi(row[n + i]) - phi(row[i]));
        sum += d;
        sum2 += d * d;
    }
    const double nn = double(n_samples);
    EquicontinuityReport rep;
    rep.estimate = sum / nn;
    const double var = std::max(0.0, (sum2 - sum * sum / nn) / (nn - 1.0));
    rep.std_error = std::sqrt(var / nn);

    const double t = time.value();
    for (std::size_t i = 0; i < n; ++i)
        rep.bound += std::abs(expected_phi(model, y[i], t) - expected_phi(model, x[i], t));
    rep.pass = rep.estimate <= rep.bound + 3.0 * rep.std_error;
    return rep;
}

namespace {

double phi_shift(ExtendedReal x, double s) {
    if (!x.is_finite()) return x.value() > 0 ? 1.0 : -1.0;
    return std::tanh(x.value() - s);
}

double logistic(ExtendedReal x) {
    if (!x.is_finite()) return x.value() > 0 ? 1.0 : 0.0;
    return 1.0 / (1.0 + std::exp(-x.value()));
}

double phi_half(ExtendedReal x) {
    if (!x.is_finite()) return x.value() > 0 ? 1.0 : -1.0;
    return std::tanh(0.5 * x.value());
}

const SupermodularFn kFns[] = {
    {"phi_product", [](ExtendedReal x, ExtendedReal y) { return phi(x) * phi(y); }},
    {"phi_min", [](ExtendedReal x, ExtendedReal y) { return std::min(phi(x), phi(y)); }},
    {"neg_phi_absdiff",
     [](ExtendedReal x, ExtendedReal y) { return -std::abs(phi(x) - phi(y)); }},
    // Truncation of -|phi(x) - phi(y)|: zero inside the band, concave outside.
    {"neg_phi_absdiff_band",
     [](ExtendedReal x, ExtendedReal y) {
         return -std::max(std::abs(phi(x) - phi(y)) - 0.5, 0.0);
     }},
    {"shifted_phi_product",
     [](ExtendedReal x, ExtendedReal y) { return phi_shift(x, 1.0) * phi_shift(y, 1.0); }},
    {"logistic_product",
     [](ExtendedReal x, ExtendedReal y) { return logistic(x) * logistic(y); }},
    {"half_scale_product",
     [](ExtendedReal x, ExtendedReal y) { return phi_half(x) * phi_half(y); }},
    {"neg_phi_sqdiff",
     [](ExtendedReal x, ExtendedReal y) {
         const double d = phi(x) - phi(y);
         return -d * d;
     }},
    // Convex hinge of the phi-sum.
    {"hinge_phi_sum",
     [](ExtendedReal x, ExtendedReal y) { return std::max(phi(x) + phi(y), 0.0); }},
    {"clipped_phi_product",
     [](ExtendedReal x, ExtendedReal y) {
         return std::min(phi(x), 0.8) * std::min(phi(y), 0.8);
     }},
};

// Mean of f over all coordinate pairs i < j of a row (f(row_0, row_1) at n=2).
double pairwise_mean(std::span<const ExtendedReal> row, const SupermodularFn& f) {
    const std::size_t n = row.size();
    if (n < 2) throw ShapeError("pairwise statistic needs n >= 2 coordinates");
    double acc = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            acc += f.fn(row[i], row[j]);
            ++pairs;
        }
    return acc / double(pairs);
}

std::vector<double> average_ranks(std::span<const ExtendedReal> xs) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&xs](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[idx[j + 1]] == xs[idx[i]]) ++j;
        const double r = 0.5 * (double(i) + double(j)) + 1.0;  // ties share the mean rank
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double pearson(std::span<const double> a, std::span<const double> b) {
    const double n = double(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if (saa == 0.0 || sbb == 0.0) return 1.0;  // constant column: degenerate, treat as comonotone
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::span<const SupermodularFn> supermodular_test_functions() { return kFns; }

DominanceResult dominance_mc(const SampleBatch& a, const SampleBatch& b,
                             std::span<const SupermodularFn> fns) {
    if (a.n_coords != b.n_coords || a.n_samples != b.n_samples)
        throw ConfigError("dominance_mc: batch shapes differ");
    if (a.starts != b.starts)
        throw ConfigError("dominance_mc: batches have different starts");
    if (a.time_value != b.time_value)
        throw ConfigError("dominance_mc: batches have different times");

    DominanceResult result;
    result.pass = true;
    const double n = double(a.n_samples);
    for (const SupermodularFn& f : fns) {
        double sa = 0.0, sb = 0.0, sd2 = 0.0, sd = 0.0;
        for (std::int64_t r = 0; r < a.n_samples; ++r) {
            const double va = pairwise_mean(a.row(r), f);
            const double vb = pairwise_mean(b.row(r), f);
            sa += va;
            sb += vb;
            sd += vb - va;
            sd2 += (vb - va) * (vb - va);
        }
        FnComparison cmp;
        cmp.name = f.name;
        cmp.mean_a = sa / n;
        cmp.mean_b = sb / n;
        const double var = std::max(0.0, (sd2 - sd * sd / n) / (n - 1.0));
        cmp.std_error = std::sqrt(var / n);
        cmp.pass = cmp.mean_a <= cmp.mean_b + 3.0 * cmp.std_error;
        result.pass = result.pass && cmp.pass;
        result.per_fn.push_back(std::move(cmp));
    }
    return result;
}

double spearman(std::span<const ExtendedReal> xs, std::span<const ExtendedReal> ys) {
    if (xs.size() != ys.size()) throw ShapeError("spearman: size mismatch");
    if (xs.size() < 2) throw ShapeError("spearman: need at least 2 samples");
    const auto ra = average_ranks(xs);
    const auto rb = average_ranks(ys);
    return pearson(ra, rb);
}

std::vector<ConvergenceRow> convergence_diag(const SemigroupModel& model,
                                             std::span<const ExtendedReal> starts,
                                             DyadicTime time, int m_lo, int m_hi,
                                             std::int64_t n_samples, std::uint64_t seed,
                                             double alpha) {
    if (m_lo < time.m0 || m_hi < m_lo)
        throw ConfigError("convergence_diag: level range must lie within [m0, ...]");
    if (m_hi > 12) throw ConfigError("convergence_diag: level is capped at 12");

    const double t = time.value();
    std::vector<ConvergenceRow> rows;
    for (int m = m_lo; m <= m_hi; ++m) {
        CouplingConfig config;
        config.model = model;
        config.starts.assign(starts.begin(), starts.end());
        config.time = time;
        config.level = m;
        config.n_samples = n_samples;
        config.seed = seed;
        const SampleBatch batch = sample_batch(config);

        ConvergenceRow row;
        row.level = m;

        const SupermodularFn& phi_prod = kFns[0];
        double acc = 0.0;
        for (std::int64_t r = 0; r < batch.n_samples; ++r)
            acc += pairwise_mean(batch.row(r), phi_prod);
        row.phi_product = acc / double(batch.n_samples);

        double rc = 0.0;
        int pairs = 0;
        std::vector<std::vector<ExtendedReal>> cols(std::size_t(batch.n_coords));
        for (int i = 0; i < batch.n_coords; ++i) cols[std::size_t(i)] = batch.column(i);
        for (int i = 0; i < batch.n_coords; ++i)
            for (int j = i + 1; j < batch.n_coords; ++j) {
                rc += spearman(cols[std::size_t(i)], cols[std::size_t(j)]);
                ++pairs;
            }
        row.rank_corr = pairs > 0 ? rc / double(pairs) : 1.0;

        for (int i = 0; i < batch.n_coords; ++i) {
            const ExtendedReal x = batch.starts[std::size_t(i)];
            row.marginal_ks.push_back(
                ks_dkw(EmpiricalMeasure(cols[std::size_t(i)]),
                       [&model, x, t](double y) { return transition_cdf(model, x, t, y); },
                       alpha));
        }

        if (!rows.empty()) {
            row.delta_phi_product = std::abs(row.phi_product - rows.back().phi_product);
            row.delta_rank_corr = std::abs(row.rank_corr - rows.back().rank_corr);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace cmf
