// SPDX-License-Identifier: MIT
#include "cmf/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cmf/errors.hpp"
#include "cmf/special.hpp"

namespace cmf {

void CirParams::validate() const {
    if (!(a > 0.0) || !(b > 0.0) || !(sigma2 > 0.0))
        throw ParameterError("CirParams: a, b, sigma2 must be positive");
    if (2.0 * a * b < sigma2)
        throw ParameterError("CirParams: Feller condition 2ab >= sigma2 violated");
}

double CirParams::c(double t) const {
    return 2.0 * a / ((1.0 - std::exp(-a * t)) * sigma2);
}

double CirParams::noncentrality(double x, double t) const {
    return 2.0 * c(t) * x * std::exp(-a * t);
}

void BrownianParams::validate() const {
    if (!(vol > 0.0)) throw ParameterError("BrownianParams: vol must be positive");
}

ChainModel::ChainModel(QMatrix q) : q_(std::move(q)), cache_(std::make_shared<Cache>()) {
    // QMatrix::validated is the expected entry point; re-check cheaply.
    QMatrix::validated(q_.size, q_.entries, q_.labels);
}

std::shared_ptr<const TransitionMatrix> ChainModel::transition(double t) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->by_time.find(t);
    if (it != cache_->by_time.end()) return it->second;
    auto p = std::make_shared<const TransitionMatrix>(expm(q_, t));
    cache_->by_time.emplace(t, p);
    return p;
}

int ChainModel::state_index(double x) const {
    const auto& l = q_.labels;
    for (std::size_t i = 0; i < l.size(); ++i)
        if (std::abs(x - l[i]) <= 1e-9) return int(i);
    throw ParameterError("ChainModel: start " + std::to_string(x) +
                         " is not a chain label");
}

void validate(const SemigroupModel& model) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CirParams> || std::is_same_v<T, BrownianParams>)
                m.validate();
        },
        model);
}

std::string describe(const SemigroupModel& model) {
    std::ostringstream os;
    std::visit(
        [&os](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DeterministicModel>)
                os << "deterministic";
            else if constexpr (std::is_same_v<T, BrownianParams>)
                os << "brownian(drift=" << m.drift << ",vol=" << m.vol << ")";
            else if constexpr (std::is_same_v<T, CirParams>)
                os << "cir(a=" << m.a << ",b=" << m.b << ",sigma2=" << m.sigma2 << ")";
            else
                os << "chain(s=" << m.generator().size << ")";
        },
        model);
    return os.str();
}

namespace {

constexpr double kQuantileRelTol = 1e-10;

double bisect(const TransitionLaw& law, double u, double lo, double hi) {
    // Invariant: cdf(lo) < u <= cdf(hi).
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400 && hi - lo > kQuantileRelTol * (1.0 + std::abs(mid)); ++it) {
        if (law.cdf(mid) >= u)
            hi = mid;
        else
            lo = mid;
        mid = 0.5 * (lo + hi);
    }
    return mid;
}

}  // namespace

double TransitionLaw::cdf(double y) const {
    struct Visitor {
        double y;
        double operator()(const Delta& d) const {
            if (!d.point.is_finite()) return d.point.value() > 0 ? 0.0 : 1.0;
            return d.point.value() <= y ? 1.0 : 0.0;
        }
        double operator()(const Normal& n) const {
            return normal_cdf((y - n.mean) / n.sd);
        }
        double operator()(const ScaledNcx2& s) const {
            return y <= 0.0 ? 0.0 : s.dist.cdf(s.two_c * y);
        }
        double operator()(const ChainRow& c) const {
            double acc = 0.0;
            for (int i = 0; i < c.p->size; ++i)
                if ((*c.labels)[i] <= y) acc += c.p->at(c.state, i);
            return acc;
        }
    };
    return std::visit(Visitor{y}, impl_);
}

bool TransitionLaw::uses_bisection() const {
    return std::holds_alternative<ScaledNcx2>(impl_);
}

double TransitionLaw::expand_bracket(double u) const {
    const auto* s = std::get_if<ScaledNcx2>(&impl_);
    if (s == nullptr) return 0.0;
    double hi = s->bracket0;
    for (int it = 0; it < 300; ++it) {
        if (cdf(hi) >= u) return hi;
        hi *= 2.0;
    }
    throw NumericError("quantile: bracket expansion failed");
}

ExtendedReal TransitionLaw::quantile(double u, double hi) const {
    struct Visitor {
        double u, hi;
        const TransitionLaw* self;
        ExtendedReal operator()(const Delta& d) const { return d.point; }
        ExtendedReal operator()(const Normal& n) const {
            return ExtendedReal(n.mean + n.sd * inverse_normal_cdf(u));
        }
        ExtendedReal operator()(const ScaledNcx2&) const {
            double upper = hi > 0.0 ? hi : self->expand_bracket(u);
            return ExtendedReal(bisect(*self, u, 0.0, upper));
        }
        ExtendedReal operator()(const ChainRow& c) const {
            double acc = 0.0;
            for (int i = 0; i < c.p->size; ++i) {
                acc += c.p->at(c.state, i);
                if (acc >= u) return ExtendedReal((*c.labels)[i]);
            }
            return ExtendedReal(c.labels->back());
        }
    };
    return std::visit(Visitor{u, hi, this}, impl_);
}

TransitionLaw freeze(const SemigroupModel& model, ExtendedReal x, double t) {
    if (!(t > 0.0)) throw DomainError("freeze: t must be positive");
    validate(model);
    if (!x.is_finite()) return TransitionLaw(TransitionLaw::Delta{x});

    struct Visitor {
        double x, t;
        TransitionLaw::Impl operator()(const DeterministicModel&) const {
            return TransitionLaw::Delta{ExtendedReal(x)};
        }
        TransitionLaw::Impl operator()(const BrownianParams& p) const {
            return TransitionLaw::Normal{x + p.drift * t, p.vol * std::sqrt(t)};
        }
        TransitionLaw::Impl operator()(const CirParams& p) const {
            if (x < 0.0) throw DomainError("CIR start must be non-negative");
            const double c = p.c(t);
            const double bracket0 =
                p.b + std::abs(x) +
                20.0 * std::sqrt(p.sigma2 * t) * (1.0 + std::sqrt(std::max(x, 0.0)));
            return TransitionLaw::ScaledNcx2{
                NoncentralChi2(p.degrees_of_freedom(), p.noncentrality(x, t)), 2.0 * c,
                bracket0};
        }
        TransitionLaw::Impl operator()(const ChainModel& m) const {
            return TransitionLaw::ChainRow{m.transition(t), &m.labels(), m.state_index(x)};
        }
    };
    return TransitionLaw(std::visit(Visitor{x.value(), t}, model));
}

double transition_cdf(const SemigroupModel& model, ExtendedReal x, double t, double y) {
    return freeze(model, x, t).cdf(y);
}

ExtendedReal quantile(const SemigroupModel& model, ExtendedReal x, double t, double u) {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile: u must lie in (0,1)");
    if (!(t > 0.0)) throw DomainError("quantile: t must be positive");
    if (!x.is_finite()) return x;
    return freeze(model, x, t).quantile(u);
}

double expected_phi(const SemigroupModel& model, ExtendedReal x, double t) {
    if (!(t > 0.0)) throw DomainError("expected_phi: t must be positive");
    if (!x.is_finite()) return x.value() > 0 ? 1.0 : -1.0;

    if (std::holds_alternative<DeterministicModel>(model)) return phi(x);
    if (const auto* chain = std::get_if<ChainModel>(&model)) {
        auto p = chain->transition(t);
        const int s = chain->state_index(x.value());
        double acc = 0.0;
        for (int i = 0; i < p->size; ++i) acc += p->at(s, i) * phi(chain->labels()[i]);
        return acc;
    }

    const TransitionLaw law = freeze(model, x, t);
    auto integrate = [&law](int n) {
        double acc = 0.0;
        for (const auto& node : gauss_legendre(n)) {
            double u = 0.5 * (node.x + 1.0);
            u = std::clamp(u, 1e-9, 1.0 - 1e-9);
            acc += 0.5 * node.w * phi(law.quantile(u));
        }
        return acc;
    };
    // 256 nodes with a doubling guard; doubling continues while the check
    // fails, since near the state-space boundary the quantile derivative is
    // unbounded and the fixed pair of orders is not always enough.
    double prev = integrate(256);
    double achieved = 0.0;
    for (int n = 512; n <= 8192; n *= 2) {
        const double cur = integrate(n);
        achieved = std::abs(cur - prev);
        if (achieved <= 1e-7) return cur;
        prev = cur;
    }
    std::ostringstream os;
    os << "expected_phi: quadrature did not converge, achieved |delta| = " << achieved;
    throw NumericError(os.str());
}

}  // namespace cmf
