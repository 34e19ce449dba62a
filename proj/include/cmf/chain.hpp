// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace cmf {

// Generator of a finite-state CTMC on a totally ordered chain.  States are
// embedded into the real line through strictly increasing labels
// (default 0, 1, ..., s-1).
struct QMatrix {
    int size = 0;
    std::vector<double> entries;  // row-major, s x s
    std::vector<double> labels;

    // Validates: s >= 2, off-diagonal >= 0, row sums zero within 1e-12,
    // labels strictly increasing.  Empty labels default to 0..s-1.
    static QMatrix validated(int size, std::vector<double> entries,
                             std::vector<double> labels = {});

    double at(int i, int j) const { return entries[std::size_t(i) * size + j]; }
};

struct TransitionMatrix {
    int size = 0;
    std::vector<double> entries;  // row-major, rows sum to 1

    double at(int i, int j) const { return entries[std::size_t(i) * size + j]; }
    std::span<const double> row(int i) const {
        return {entries.data() + std::size_t(i) * size, std::size_t(size)};
    }
    static TransitionMatrix identity(int size);
};

TransitionMatrix multiply(const TransitionMatrix& a, const TransitionMatrix& b);
TransitionMatrix matrix_power(const TransitionMatrix& p, long k);

// Joint distribution of a pair of chain states.
struct JointDist {
    int size = 0;
    std::vector<double> mass;  // row-major, sums to 1

    double at(int i, int j) const { return mass[std::size_t(i) * size + j]; }
    double& at(int i, int j) { return mass[std::size_t(i) * size + j]; }
    std::vector<double> row_marginal() const;
    std::vector<double> col_marginal() const;
};

// exp(tQ) by scaling and squaring with a 13-term Taylor core, scaled norm
// <= 1/2.  Entries in [-1e-12, 0) are clamped to zero.
TransitionMatrix expm(const QMatrix& q, double t);

// One violated ordered-cut inequality of the monotonicity criterion.
struct CutViolation {
    int lower_state = 0;   // i of the adjacent pair (i, i+1)
    int threshold = 0;     // cut index k
    bool upper_cut = true; // true: sum over {l >= k}; false: sum over {l <= k}
    double lhs = 0.0;
    double rhs = 0.0;
    std::string describe() const;
};

struct MonotoneReport {
    bool monotone = true;
    std::vector<CutViolation> violations;
};

// Ordered-cut criterion for stochastic monotonicity of the semigroup exp(tQ):
// for each adjacent pair i < j = i+1,
//   sum_{l >= k} Q(i,l) <= sum_{l >= k} Q(j,l)   for every k > j,
//   sum_{l <= k} Q(i,l) >= sum_{l <= k} Q(j,l)   for every k < i,
// accepted with slack -1e-12.  At s = 3 this is exactly the pair of
// inequalities L_ac <= L_bc and L_ba >= L_ca.
MonotoneReport kirstein_monotone(const QMatrix& q);

// P(X_1 = mid | X_0 = x0, X_2 = x2) for the chain with one-step matrix p.
double bridge_prob(const TransitionMatrix& p, int x0, int mid, int x2);

// The 3-state generator whose semigroup is monotone yet fails bridge
// dominance.
QMatrix counterexample_generator();

struct CounterexampleReport {
    double t = 1.0;
    bool monotone = false;
    double p_lower_start_a = 0.0;       // P(X_1 <= a | X_0 = a, X_2 = a)
    double p_lower_start_b = 0.0;       // P(Y_1 <= a | Y_0 = b, Y_2 = b)
    std::vector<double> bridge_from_a;  // full mid distribution given a -> a
    std::vector<double> bridge_from_b;  // full mid distribution given b -> b
    bool violation = false;             // monotone && p_lower_start_a < p_lower_start_b
    bool violation_checked = false;     // false when the generator is not monotone
};

CounterexampleReport counterexample_report(double t = 1.0);
CounterexampleReport counterexample_report(const QMatrix& q, double t);

// Exact comonotone coupling of the rows p(x, .) and p(y, .): the northwest
// staircase J(i,j) = max(0, min(Fx_i, Fy_j) - max(Fx_{i-1}, Fy_{j-1})).
// Marginals reproduce the two rows exactly.
JointDist discrete_comonotone_step(const TransitionMatrix& p, int x, int y);

// Independent product of the two rows.
JointDist independent_pair_step(const TransitionMatrix& p, int x, int y);

// Doeblin coupling step: rows evolve independently until they meet, moves
// together once on the diagonal.
JointDist doeblin_pair_step(const TransitionMatrix& p, int x, int y);

using PairKernel = std::function<JointDist(int, int)>;

// Exact k-fold pushforward of the pair law through a pair kernel.
JointDist iterate_pair_law(int size, const PairKernel& kernel, int x, int y, long k);

// k-fold comonotone composition; marginals equal rows of p_step^k.
JointDist iterate_joint_exact(const TransitionMatrix& p_step, int x, int y, long k);

// W1 between two distributions on the chain in the phi-metric:
// sum_i |F_p(i) - F_q(i)| * (phi(label_{i+1}) - phi(label_i)).
double exact_w1(std::span<const double> p, std::span<const double> q,
                std::span<const double> labels);

// sum_{i,j} J(i,j) f(label_i, label_j).
double supermodular_expect(const JointDist& j, std::span<const double> labels,
                           const std::function<double(double, double)>& f);

// Plain-text Q-matrix file: first line s, then s rows of s reals, optional
// final line of s labels.  Rejects with a line-numbered error when a row sum
// exceeds 1e-9 in magnitude; accepted residuals are absorbed into the
// diagonal so the QMatrix invariant holds.
QMatrix read_qmatrix_file(const std::string& path);
QMatrix parse_qmatrix(std::istream& in);

}  // namespace cmf
