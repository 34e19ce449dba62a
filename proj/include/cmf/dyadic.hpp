// SPDX-License-Identifier: MIT
#pragma once

#include <cmath>
#include <cstdint>

#include "cmf/errors.hpp"

namespace cmf {

// Positive dyadic time t = k * 2^-m0 with m0 minimal (k odd whenever m0 >= 1).
struct DyadicTime {
    std::int64_t k = 1;
    int m0 = 0;

    double value() const { return std::ldexp(double(k), -m0); }

    friend bool operator==(const DyadicTime&, const DyadicTime&) = default;
};

// Reduce numerator * 2^-log2_denominator to its minimal-m0 form.
inline DyadicTime dyadic_decompose(std::int64_t numerator, int log2_denominator) {
    if (numerator < 1)
        throw DomainError("dyadic_decompose: numerator must be >= 1");
    if (log2_denominator < 0 || log2_denominator > 62)
        throw DomainError("dyadic_decompose: log2 denominator must lie in [0, 62]");
    std::int64_t k = numerator;
    int m0 = log2_denominator;
    while (m0 > 0 && (k & 1) == 0) {
        k >>= 1;
        --m0;
    }
    return DyadicTime{k, m0};
}

}  // namespace cmf
