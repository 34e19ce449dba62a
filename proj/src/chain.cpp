// SPDX-License-Identifier: MIT
#include "cmf/chain.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cmf/errors.hpp"
#include "cmf/extended_real.hpp"

namespace cmf {

namespace {
constexpr double kRowSumTol = 1e-12;
constexpr double kCutSlack = 1e-12;

std::vector<double> default_labels(int size) {
    std::vector<double> l(size);
    std::iota(l.begin(), l.end(), 0.0);
    return l;
}
}  // namespace

QMatrix QMatrix::validated(int size, std::vector<double> entries,
                           std::vector<double> labels) {
    if (size < 2) throw ParameterError("QMatrix: size must be >= 2");
    if (entries.size() != std::size_t(size) * size)
        throw ShapeError("QMatrix: entry count does not match size");
    if (labels.empty()) labels = default_labels(size);
    if (labels.size() != std::size_t(size))
        throw ShapeError("QMatrix: label count does not match size");
    for (int i = 1; i < size; ++i)
        if (!(labels[i] > labels[i - 1]))
            throw ParameterError("QMatrix: labels must be strictly increasing");
    for (int i = 0; i < size; ++i) {
        double sum = 0.0;
        for (int j = 0; j < size; ++j) {
            double v = entries[std::size_t(i) * size + j];
            if (i != j && v < 0.0)
                throw ParameterError("QMatrix: off-diagonal entries must be non-negative");
            sum += v;
        }
        if (std::abs(sum) > kRowSumTol)
            throw ParameterError("QMatrix: row " + std::to_string(i) +
                                 " does not sum to zero");
    }
    return QMatrix{size, std::move(entries), std::move(labels)};
}

TransitionMatrix TransitionMatrix::identity(int size) {
    TransitionMatrix p{size, std::vector<double>(std::size_t(size) * size, 0.0)};
    for (int i = 0; i < size; ++i) p.entries[std::size_t(i) * size + i] = 1.0;
    return p;
}

TransitionMatrix multiply(const TransitionMatrix& a, const TransitionMatrix& b) {
    if (a.size != b.size) throw ShapeError("multiply: size mismatch");
    const int s = a.size;
    TransitionMatrix out{s, std::vector<double>(std::size_t(s) * s, 0.0)};
    for (int i = 0; i < s; ++i)
        for (int k = 0; k < s; ++k) {
            double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < s; ++j) out.entries[std::size_t(i) * s + j] += aik * b.at(k, j);
        }
    return out;
}

TransitionMatrix matrix_power(const TransitionMatrix& p, long k) {
    if (k < 0) throw DomainError("matrix_power: exponent must be >= 0");
    TransitionMatrix acc = TransitionMatrix::identity(p.size);
    TransitionMatrix base = p;
    while (k > 0) {
        if (k & 1) acc = multiply(acc, base);
        base = multiply(base, base);
        k >>= 1;
    }
    return acc;
}

std::vector<double> JointDist::row_marginal() const {
    std::vector<double> m(size, 0.0);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) m[i] += at(i, j);
    return m;
}

std::vector<double> JointDist::col_marginal() const {
    std::vector<double> m(size, 0.0);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j) m[j] += at(i, j);
    return m;
}

TransitionMatrix expm(const QMatrix& q, double t) {
    if (t < 0.0) throw DomainError("expm: t must be non-negative");
    const int s = q.size;
    // A = tQ scaled until ||A||_inf <= 1/2.
    std::vector<double> a(q.entries);
    for (double& v : a) v *= t;
    double norm = 0.0;
    for (int i = 0; i < s; ++i) {
        double row = 0.0;
        for (int j = 0; j < s; ++j) row += std::abs(a[std::size_t(i) * s + j]);
        norm = std::max(norm, row);
    }
    int squarings = 0;
    while (norm > 0.5) {
        norm *= 0.5;
        ++squarings;
    }
    const double scale = std::ldexp(1.0, -squarings);
    for (double& v : a) v *= scale;

    TransitionMatrix as{s, std::move(a)};
    TransitionMatrix acc = TransitionMatrix::identity(s);
    TransitionMatrix term = TransitionMatrix::identity(s);
    for (int i = 1; i <= 13; ++i) {
        term = multiply(term, as);
        for (double& v : term.entries) v /= double(i);  // term = (tQ/2^s)^i / i!
        for (std::size_t k = 0; k < acc.entries.size(); ++k) acc.entries[k] += term.entries[k];
    }
    for (int i = 0; i < squarings; ++i) acc = multiply(acc, acc);

    for (double& v : acc.entries) {
        if (v < 0.0) {
            if (v < -1e-12)
                throw NumericError("expm: negative entry " + std::to_string(v));
            v = 0.0;
        }
    }
    for (int i = 0; i < s; ++i) {
        double sum = 0.0;
        for (int j = 0; j < s; ++j) sum += acc.at(i, j);
        if (std::abs(sum - 1.0) > 1e-10)
            throw NumericError("expm: row sum deviates from 1 by " +
                               std::to_string(sum - 1.0));
    }
    return acc;
}

std::string CutViolation::describe() const {
    std::ostringstream os;
    os << "pair (" << lower_state << "," << lower_state + 1 << ") "
       << (upper_cut ? "upper" : "lower") << " cut k=" << threshold
       << ": " << lhs << (upper_cut ? " > " : " < ") << rhs;
    return os.str();
}

MonotoneReport kirstein_monotone(const QMatrix& q) {
    MonotoneReport report;
    const int s = q.size;
    for (int i = 0; i + 1 < s; ++i) {
        const int j = i + 1;
        for (int k = j + 1; k < s; ++k) {
            double lhs = 0.0, rhs = 0.0;
            for (int l = k; l < s; ++l) {
                lhs += q.at(i, l);
                rhs += q.at(j, l);
            }
            if (lhs > rhs + kCutSlack)
                report.violations.push_back({i, k, true, lhs, rhs});
        }
        for (int k = 0; k < i; ++k) {
            double lhs = 0.0, rhs = 0.0;
            for (int l = 0; l <= k; ++l) {
                lhs += q.at(i, l);
                rhs += q.at(j, l);
            }
            if (lhs < rhs - kCutSlack)
                report.violations.push_back({i, k, false, lhs, rhs});
        }
    }
    report.monotone = report.violations.empty();
    return report;
}

double bridge_prob(const TransitionMatrix& p, int x0, int mid, int x2) {
    const int s = p.size;
    if (x0 < 0 || x0 >= s || mid < 0 || mid >= s || x2 < 0 || x2 >= s)
        throw DomainError("bridge_prob: state out of range");
    double den = 0.0;
    for (int y = 0; y < s; ++y) den += p.at(x0, y) * p.at(y, x2);
    if (den <= 0.0)
        throw BridgeUndefinedError("bridge_prob: conditioning event has probability zero");
    return p.at(x0, mid) * p.at(mid, x2) / den;
}

QMatrix counterexample_generator() {
    return QMatrix::validated(3, {-2.5, 1.75, 0.75,   //
                                  1.5, -2.5, 1.0,     //
                                  0.5, 0.0, -0.5});
}

CounterexampleReport counterexample_report(double t) {
    return counterexample_report(counterexample_generator(), t);
}

CounterexampleReport counterexample_report(const QMatrix& q, double t) {
    CounterexampleReport rep;
    rep.t = t;
    rep.monotone = kirstein_monotone(q).monotone;
    const TransitionMatrix p = expm(q, t);
    const int s = p.size;
    rep.bridge_from_a.resize(s);
    rep.bridge_from_b.resize(s);
    for (int mid = 0; mid < s; ++mid) {
        rep.bridge_from_a[mid] = bridge_prob(p, 0, mid, 0);
        rep.bridge_from_b[mid] = bridge_prob(p, 1, mid, 1);
    }
    // "below a" is the bottom state alone.
    rep.p_lower_start_a = rep.bridge_from_a[0];
    rep.p_lower_start_b = rep.bridge_from_b[0];
    rep.violation_checked = rep.monotone;
    rep.violation = rep.monotone && rep.p_lower_start_a < rep.p_lower_start_b;
    return rep;
}

JointDist discrete_comonotone_step(const TransitionMatrix& p, int x, int y) {
    const int s = p.size;
    if (x < 0 || x >= s || y < 0 || y >= s)
        throw DomainError("discrete_comonotone_step: state out of range");
    std::vector<double> fx(s), fy(s);
    double cx = 0.0, cy = 0.0;
    for (int i = 0; i < s; ++i) {
        cx += p.at(x, i);
        cy += p.at(y, i);
        fx[i] = cx;
        fy[i] = cy;
    }
    JointDist j{s, std::vector<double>(std::size_t(s) * s, 0.0)};
    for (int i = 0; i < s; ++i) {
        const double fx_lo = i > 0 ? fx[i - 1] : 0.0;
        for (int k = 0; k < s; ++k) {
            const double fy_lo = k > 0 ? fy[k - 1] : 0.0;
            double v = std::min(fx[i], fy[k]) - std::max(fx_lo, fy_lo);
            if (v > 0.0) j.at(i, k) = v;
        }
    }
    return j;
}

JointDist independent_pair_step(const TransitionMatrix& p, int x, int y) {
    const int s = p.size;
    JointDist j{s, std::vector<double>(std::size_t(s) * s, 0.0)};
    for (int i = 0; i < s; ++i)
        for (int k = 0; k < s; ++k) j.at(i, k) = p.at(x, i) * p.at(y, k);
    return j;
}

JointDist doeblin_pair_step(const TransitionMatrix& p, int x, int y) {
    const int s = p.size;
    JointDist j{s, std::vector<double>(std::size_t(s) * s, 0.0)};
    if (x == y) {
        for (int i = 0; i < s; ++i) j.at(i, i) = p.at(x, i);
    } else {
        for (int i = 0; i < s; ++i)
            for (int k = 0; k < s; ++k) j.at(i, k) = p.at(x, i) * p.at(y, k);
    }
    return j;
}

JointDist iterate_pair_law(int size, const PairKernel& kernel, int x, int y, long k) {
    if (k < 1) throw DomainError("iterate_pair_law: k must be >= 1");
    const int s = size;
    // Precompute the kernel table once; s is small.
    std::vector<JointDist> table(std::size_t(s) * s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) table[std::size_t(i) * s + j] = kernel(i, j);

    JointDist law = table[std::size_t(x) * s + y];
    for (long step = 1; step < k; ++step) {
        JointDist next{s, std::vector<double>(std::size_t(s) * s, 0.0)};
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) {
                const double m = law.at(i, j);
                if (m == 0.0) continue;
                const JointDist& c = table[std::size_t(i) * s + j];
                for (std::size_t idx = 0; idx < next.mass.size(); ++idx)
                    next.mass[idx] += m * c.mass[idx];
            }
        law = std::move(next);
    }
    return law;
}

JointDist iterate_joint_exact(const TransitionMatrix& p_step, int x, int y, long k) {
    return iterate_pair_law(
        p_step.size,
        [&p_step](int i, int j) { return discrete_comonotone_step(p_step, i, j); }, x,
        y, k);
}

double exact_w1(std::span<const double> p, std::span<const double> q,
                std::span<const double> labels) {
    if (p.size() != q.size() || p.size() != labels.size())
        throw ShapeError("exact_w1: support size mismatch");
    double w = 0.0;
    double fp = 0.0, fq = 0.0;
    for (std::size_t i = 0; i + 1 < labels.size(); ++i) {
        fp += p[i];
        fq += q[i];
        w += std::abs(fp - fq) * (phi(labels[i + 1]) - phi(labels[i]));
    }
    return w;
}

double supermodular_expect(const JointDist& j, std::span<const double> labels,
                           const std::function<double(double, double)>& f) {
    if (labels.size() != std::size_t(j.size))
        throw ShapeError("supermodular_expect: label count mismatch");
    double acc = 0.0;
    for (int a = 0; a < j.size; ++a)
        for (int b = 0; b < j.size; ++b) {
            double m = j.at(a, b);
            if (m != 0.0) acc += m * f(labels[a], labels[b]);
        }
    return acc;
}

QMatrix parse_qmatrix(std::istream& in) {
    std::string line;
    int line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
        }
        return false;
    };

    if (!next_line()) throw QMatrixParseError(1, "empty file");
    int size = 0;
    {
        std::istringstream ls(line);
        if (!(ls >> size)) throw QMatrixParseError(line_no, "expected the state count");
        std::string rest;
        if (ls >> rest) throw QMatrixParseError(line_no, "trailing tokens after the state count");
        if (size < 2) throw QMatrixParseError(line_no, "state count must be >= 2");
    }

    std::vector<double> entries;
    entries.reserve(std::size_t(size) * size);
    for (int i = 0; i < size; ++i) {
        if (!next_line())
            throw QMatrixParseError(line_no + 1, "missing matrix row " + std::to_string(i + 1));
        std::istringstream ls(line);
        double row_sum = 0.0;
        for (int j = 0; j < size; ++j) {
            double v;
            if (!(ls >> v))
                throw QMatrixParseError(line_no, "expected " + std::to_string(size) +
                                                     " numeric entries");
            if (i != j && v < 0.0)
                throw QMatrixParseError(line_no, "negative off-diagonal entry");
            entries.push_back(v);
            row_sum += v;
        }
        std::string rest;
        if (ls >> rest) throw QMatrixParseError(line_no, "trailing tokens in matrix row");
        if (std::abs(row_sum) > 1e-9)
            throw QMatrixParseError(line_no, "row sum " + std::to_string(row_sum) +
                                                 " exceeds 1e-9 in magnitude");
        // Absorb the residual into the diagonal so rows sum to zero exactly.
        entries[std::size_t(i) * size + i] -= row_sum;
    }

    std::vector<double> labels;
    if (next_line()) {
        std::istringstream ls(line);
        double v;
        while (ls >> v) labels.push_back(v);
        if (labels.size() != std::size_t(size))
            throw QMatrixParseError(line_no, "label line must hold exactly " +
                                                 std::to_string(size) + " values");
        if (next_line()) throw QMatrixParseError(line_no, "unexpected extra line");
    }

    try {
        return QMatrix::validated(size, std::move(entries), std::move(labels));
    } catch (const std::exception& e) {
        throw QMatrixParseError(line_no, e.what());
    }
}

QMatrix read_qmatrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw QMatrixParseError(0, "cannot open '" + path + "'");
    return parse_qmatrix(in);
}

}  // namespace cmf
