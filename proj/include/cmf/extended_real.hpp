// SPDX-License-Identifier: MIT
#pragma once

#include <cassert>
#include <cmath>
#include <compare>
#include <limits>
#include <ostream>
#include <span>

#include "cmf/errors.hpp"

namespace cmf {

// A point of the compactified real line [-inf, +inf].  Finite points carry
// their double value; the two boundary symbols are stored as IEEE infinities
// but are never fed into series code -- callers dispatch on is_finite() and
// apply the degenerate-delta rule instead.
class ExtendedReal {
public:
    ExtendedReal() = default;
    explicit ExtendedReal(double v) : v_(v) { assert(!std::isnan(v)); }

    static ExtendedReal neg_inf() {
        return ExtendedReal(-std::numeric_limits<double>::infinity());
    }
    static ExtendedReal pos_inf() {
        return ExtendedReal(std::numeric_limits<double>::infinity());
    }

    bool is_finite() const { return std::isfinite(v_); }
    double value() const { return v_; }

    friend auto operator<=>(ExtendedReal, ExtendedReal) = default;

private:
    double v_ = 0.0;
};

// phi = tanh extended with phi(+-inf) = +-1; strictly increasing on finite
// reals, range [-1, 1].
inline double phi(ExtendedReal x) {
    if (!x.is_finite()) return x.value() > 0 ? 1.0 : -1.0;
    return std::tanh(x.value());
}

inline double phi(double x) { return std::tanh(x); }

// d_n(x, y) = sum_i |phi(y_i) - phi(x_i)|, the product metric on the
// compactified line; bounded by 2n.
inline double phi_dist(std::span<const ExtendedReal> x, std::span<const ExtendedReal> y) {
    if (x.size() != y.size())
        throw ShapeError("phi_dist: vectors have different lengths");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d += std::abs(phi(y[i]) - phi(x[i]));
    return d;
}

inline std::ostream& operator<<(std::ostream& os, ExtendedReal x) {
    if (!x.is_finite()) return os << (x.value() > 0 ? "+inf" : "-inf");
    return os << x.value();
}

}  // namespace cmf
