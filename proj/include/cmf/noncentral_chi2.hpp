// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

namespace cmf {

// Noncentral chi-square distribution frozen for repeated CDF evaluation.
//
// The CDF is the Poisson(ncp/2)-weighted mixture of central chi-square CDFs
// with df + 2j degrees of freedom.  Weights are expanded outward from the
// Poisson mode and truncated once their cumulative mass reaches 1 - 1e-12,
// so evaluation is stable for any noncentrality.  Consecutive central CDFs
// are obtained by the one-term recurrence P(a+1,g) = P(a,g) - g^a e^-g / Gamma(a+1),
// which costs one incomplete gamma per call instead of one per term.
class NoncentralChi2 {
public:
    NoncentralChi2(double df, double ncp);

    double cdf(double x) const;

    double df() const { return df_; }
    double ncp() const { return ncp_; }
    double mean() const { return df_ + ncp_; }

private:
    double df_;
    double ncp_;
    long j_lo_ = 0;                 // first retained Poisson index
    std::vector<double> weights_;   // Poisson(ncp/2) mass for j = j_lo_, j_lo_+1, ...
};

}  // namespace cmf
