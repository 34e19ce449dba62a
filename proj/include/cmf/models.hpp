// SPDX-License-Identifier: MIT
#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <variant>

#include "cmf/chain.hpp"
#include "cmf/extended_real.hpp"
#include "cmf/noncentral_chi2.hpp"

namespace cmf {

// Square-root diffusion dX = a(b - X)dt + sigma sqrt(X) dW on (0, inf).
// For t > 0 the transition law from x is Z / (2c) with Z noncentral
// chi-square, df = 4ab/sigma2, ncp = 2cx e^-at, c = 2a / ((1 - e^-at) sigma2).
struct CirParams {
    double a = 1.0;       // mean-reversion rate
    double b = 1.0;       // long-run mean
    double sigma2 = 1.0;  // squared volatility

    void validate() const;  // a, b, sigma2 > 0 and the Feller condition 2ab >= sigma2
    double c(double t) const;
    double degrees_of_freedom() const { return 4.0 * a * b / sigma2; }
    double noncentrality(double x, double t) const;
};

// Brownian motion with drift; transition law N(x + drift t, vol^2 t).
struct BrownianParams {
    double drift = 0.0;
    double vol = 1.0;

    void validate() const;  // vol > 0
};

// Identity kernel; every transition is a point mass at the start.
struct DeterministicModel {};

// Finite chain embedded in the real line through its labels; transitions are
// rows of exp(tQ).  Transition matrices are memoized per t behind a shared
// cache, so copies of the model share work and stay cheap.
class ChainModel {
public:
    explicit ChainModel(QMatrix q);

    const QMatrix& generator() const { return q_; }
    const std::vector<double>& labels() const { return q_.labels; }
    std::shared_ptr<const TransitionMatrix> transition(double t) const;
    int state_index(double x) const;  // nearest label within 1e-9, else ParameterError

private:
    struct Cache {
        std::mutex mu;
        std::map<double, std::shared_ptr<const TransitionMatrix>> by_time;
    };
    QMatrix q_;
    std::shared_ptr<Cache> cache_;
};

// A one-dimensional stochastically monotone Markov semigroup exposed through
// transition CDFs and quantile functions.
using SemigroupModel = std::variant<DeterministicModel, BrownianParams, CirParams, ChainModel>;

void validate(const SemigroupModel& model);
std::string describe(const SemigroupModel& model);

// Transition law P_t(x, .) frozen for a fixed (x, t): repeated CDF and
// quantile evaluations reuse the prepared mixture weights / matrix row.
class TransitionLaw {
public:
    double cdf(double y) const;

    // Quantile by closed form where available, bisection otherwise.  The
    // bisection bracket [0, hi] may be supplied (hi > 0) so that related
    // calls share one bracket; pass hi = 0 to let the law expand its own.
    ExtendedReal quantile(double u, double hi = 0.0) const;

    // True when quantile() resolves by bisection on the CDF.
    bool uses_bisection() const;

    // Smallest geometric expansion of the default bracket with cdf(hi) >= u.
    double expand_bracket(double u) const;

private:
    friend TransitionLaw freeze(const SemigroupModel&, ExtendedReal, double);

    struct Delta {
        ExtendedReal point;
    };
    struct Normal {
        double mean, sd;
    };
    struct ScaledNcx2 {
        NoncentralChi2 dist;
        double two_c;
        double bracket0;  // default bisection bracket
    };
    struct ChainRow {
        std::shared_ptr<const TransitionMatrix> p;
        const std::vector<double>* labels;
        int state;
    };
    using Impl = std::variant<Delta, Normal, ScaledNcx2, ChainRow>;

    explicit TransitionLaw(Impl impl) : impl_(std::move(impl)) {}
    Impl impl_;
};

// Freeze P_t(x, .).  Requires t > 0; t = 0 is the identity kernel and is
// handled by callers, never here.
TransitionLaw freeze(const SemigroupModel& model, ExtendedReal x, double t);

// u |-> P_t(x, (-inf, y]); non-increasing in x, returns the degenerate 0/1
// values when x is a boundary symbol.
double transition_cdf(const SemigroupModel& model, ExtendedReal x, double t, double y);

// Generalized inverse F^[-1]_{x,t}(u) = inf{y : P_t(x,(-inf,y]) >= u} for
// u in (0,1); maps boundary starts to themselves.
ExtendedReal quantile(const SemigroupModel& model, ExtendedReal x, double t, double u);

// E[phi(X_t) | X_0 = x]: exact for chain and identity kernels, 256-node
// Gauss-Legendre with a 512-node doubling guard otherwise.
double expected_phi(const SemigroupModel& model, ExtendedReal x, double t);

}  // namespace cmf
