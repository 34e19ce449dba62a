// SPDX-License-Identifier: MIT
#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmf/coupling.hpp"
#include "cmf/extended_real.hpp"

namespace cmf {

// Empirical measure on the compactified line: sorted sample values.
class EmpiricalMeasure {
public:
    explicit EmpiricalMeasure(std::vector<ExtendedReal> values);

    std::span<const ExtendedReal> values() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    std::vector<ExtendedReal> values_;
};

// W1 between two equal-size empirical measures in the phi-metric: the mean
// of |phi(a_(i)) - phi(b_(i))| over sorted order statistics.  Bounded by 2.
double empirical_w1(const EmpiricalMeasure& a, const EmpiricalMeasure& b);

struct KsReport {
    double statistic = 0.0;  // sup-norm ECDF deviation
    double bound = 0.0;      // DKW bound sqrt(ln(2/alpha) / (2N))
    bool pass = false;
};

// Goodness of fit of the empirical measure against an analytic CDF at DKW
// confidence level 1 - alpha.
KsReport ks_dkw(const EmpiricalMeasure& a, const std::function<double(double)>& cdf,
                double alpha);

// Fraction of batch rows that are order-compatible with the batch starts.
double order_fraction(const SampleBatch& batch);

struct EquicontinuityReport {
    double estimate = 0.0;   // Monte Carlo mean of sum_i |phi(Y_i) - phi(X_i)|
    double std_error = 0.0;
    double bound = 0.0;      // sum_i |E phi(Y_i) - E phi(X_i)| at full time t
    bool pass = false;       // estimate <= bound + 3 SE
};

// Couples the starts x and y through one 2n-dimensional iterate and compares
// the realized mean phi-displacement with the analytic bound.
EquicontinuityReport equicontinuity_check(const SemigroupModel& model,
                                          std::span<const ExtendedReal> x,
                                          std::span<const ExtendedReal> y,
                                          DyadicTime time, int level,
                                          std::int64_t n_samples, std::uint64_t seed);

// Bounded supermodular test function of a coordinate pair; all bundled
// functions compose through phi so boundary symbols are handled.
struct SupermodularFn {
    std::string name;
    double (*fn)(ExtendedReal, ExtendedReal);
};

// The bundled library of 10 test functions.
std::span<const SupermodularFn> supermodular_test_functions();

struct FnComparison {
    std::string name;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double std_error = 0.0;  // paired standard error of the difference
    bool pass = false;       // mean_a <= mean_b + 3 SE
};

struct DominanceResult {
    std::vector<FnComparison> per_fn;
    bool pass = false;
};

// Tests E_A[f] <= E_B[f] + 3 SE for every supplied test function, where f is
// averaged over all coordinate pairs i < j of a row.
DominanceResult dominance_mc(const SampleBatch& a, const SampleBatch& b,
                             std::span<const SupermodularFn> fns);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const ExtendedReal> xs, std::span<const ExtendedReal> ys);

struct ConvergenceRow {
    int level = 0;
    double phi_product = 0.0;  // mean over pairs i<j of E[phi(X_i) phi(X_j)]
    double rank_corr = 0.0;    // mean pairwise Spearman
    std::optional<double> delta_phi_product;  // |change| from the previous level
    std::optional<double> delta_rank_corr;
    std::vector<KsReport> marginal_ks;  // per coordinate, against P_t(x_i, .)
};

// Batch statistics per iterate level m in [m_lo, m_hi].  Batches share the
// seed, and the dyadic position keying of the step uniforms couples
// consecutive levels, so successive deltas measure level differences rather
// than independent Monte Carlo noise.
std::vector<ConvergenceRow> convergence_diag(const SemigroupModel& model,
                                             std::span<const ExtendedReal> starts,
                                             DyadicTime time, int m_lo, int m_hi,
                                             std::int64_t n_samples, std::uint64_t seed,
                                             double alpha);

}  // namespace cmf
