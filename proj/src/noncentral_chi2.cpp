// SPDX-License-Identifier: MIT
#include "cmf/noncentral_chi2.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "cmf/errors.hpp"
#include "cmf/special.hpp"

namespace cmf {

namespace {
constexpr double kWeightTail = 1e-12;
}

NoncentralChi2::NoncentralChi2(double df, double ncp) : df_(df), ncp_(ncp) {
    if (!(df > 0.0)) throw ParameterError("NoncentralChi2: df must be positive");
    if (!(ncp >= 0.0)) throw ParameterError("NoncentralChi2: ncp must be non-negative");

    const double lambda = 0.5 * ncp;
    if (lambda == 0.0) {
        j_lo_ = 0;
        weights_ = {1.0};
        return;
    }

    // Expand Poisson(lambda) weights outward from the mode until the retained
    // mass reaches 1 - kWeightTail; the anchor weight comes from logs so large
    // noncentralities do not underflow.
    const long mode = static_cast<long>(std::floor(lambda));
    const double log_w_mode = -lambda + mode * std::log(lambda) - std::lgamma(double(mode) + 1.0);
    std::deque<double> w{std::exp(log_w_mode)};
    long lo = mode, hi = mode;
    double cum = w.front();
    double w_down = w.front(), w_up = w.front();
    while (cum < 1.0 - kWeightTail) {
        bool grew = false;
        if (lo > 0) {
            w_down *= double(lo) / lambda;
            w.push_front(w_down);
            --lo;
            cum += w_down;
            grew = true;
        }
        w_up *= lambda / double(hi + 1);
        ++hi;
        w.push_back(w_up);
        cum += w_up;
        if (!grew && w_up == 0.0) break;  // exhausted double range
    }
    j_lo_ = lo;
    weights_.assign(w.begin(), w.end());
}

double NoncentralChi2::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    const double g = 0.5 * x;
    const double a0 = 0.5 * df_ + double(j_lo_);

    // Central chi-square terms C_j = P(a0 + j, g) via downward-in-mass
    // recurrence; T is the jump between consecutive terms.
    double p = regularized_gamma_p(a0, g);
    double t = std::exp(a0 * std::log(g) - g - std::lgamma(a0 + 1.0));
    double acc = 0.0;
    for (std::size_t j = 0; j < weights_.size(); ++j) {
        acc += weights_[j] * p;
        p -= t;
        if (p < 0.0) p = 0.0;
        t *= g / (a0 + double(j) + 1.0);
    }
    return std::clamp(acc, 0.0, 1.0);
}

}  // namespace cmf
