// SPDX-License-Identifier: MIT
#pragma once

#include <vector>

namespace cmf {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a),
// a > 0, x >= 0.  Series for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);

// Standard normal CDF and its inverse (Acklam polynomial + Newton polish,
// accurate to a few ulp over (0, 1)).
double normal_cdf(double z);
double inverse_normal_cdf(double u);

struct QuadNode {
    double x;  // abscissa in [-1, 1]
    double w;
};

// Gauss-Legendre rule of order n on [-1, 1]; cached, thread-safe.
const std::vector<QuadNode>& gauss_legendre(int n);

}  // namespace cmf
