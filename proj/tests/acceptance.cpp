// SPDX-License-Identifier: MIT
//
// Acceptance suite: one pass/fail line per criterion.  Exit code is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cmf/chain.hpp"
#include "cmf/runner.hpp"
#include "cmf/stats.hpp"
#include "oracles.hpp"

using namespace cmf;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void require(Outcome& out, bool cond, const std::string& what) {
    if (!cond) {
        out.pass = false;
        if (!out.detail.empty()) out.detail += "; ";
        out.detail += what;
    }
}

const CirParams kCir{3.0, 2.0, 8.0};
const std::vector<ExtendedReal> kStarts{ExtendedReal(0.5), ExtendedReal(2.0)};

QMatrix birth_death5() {
    return QMatrix::validated(5, {-1.3, 1.3,  0.0,  0.0,  0.0,   //
                                  0.8,  -1.7, 0.9,  0.0,  0.0,   //
                                  0.0,  1.2,  -2.3, 1.1,  0.0,   //
                                  0.0,  0.0,  0.6,  -1.3, 0.7,   //
                                  0.0,  0.0,  0.0,  1.0,  -1.0});
}

// 1. Counterexample reproduction: monotone generator, bridge probabilities
//    0.362 / 0.374 within 5e-4, dominance violation flagged, under 1 s.
Outcome criterion1() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const CounterexampleReport rep = counterexample_report();
    const double elapsed = seconds_since(t0);
    require(out, rep.monotone, "Kirstein check not monotone");
    require(out, std::abs(rep.p_lower_start_a - 0.362) <= 0.0005,
            "P(a->a) = " + format_double(rep.p_lower_start_a));
    require(out, std::abs(rep.p_lower_start_b - 0.374) <= 0.0005,
            "P(b->b) = " + format_double(rep.p_lower_start_b));
    require(out, rep.violation, "violation not flagged");
    require(out, elapsed < 1.0, "runtime " + format_double(elapsed) + " s");
    if (out.pass)
        out.detail = "P(a->a)=" + format_double(rep.p_lower_start_a) +
                     ", P(b->b)=" + format_double(rep.p_lower_start_b) + ", " +
                     format_double(elapsed) + " s";
    return out;
}

// 2. Exact dominance chain on a 5-state monotone chain, t = 1/2,
//    m in {1,2,3,4}: E_indep <= E_iterate(m) <= E_one-step, slack -1e-10.
Outcome criterion2() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const QMatrix q = birth_death5();
    require(out, kirstein_monotone(q).monotone, "test chain not monotone");
    const std::vector<double>& labels = q.labels;
    const TransitionMatrix pt = expm(q, 0.5);
    const auto fns = supermodular_test_functions();
    int checked = 0;
    for (int m : {1, 2, 3, 4}) {
        const TransitionMatrix step = expm(q, std::ldexp(1.0, -m));
        const long k = 1L << (m - 1);
        for (int x = 0; x < 5 && out.pass; ++x)
            for (int y = 0; y < 5 && out.pass; ++y) {
                const JointDist iter = iterate_joint_exact(step, x, y, k);
                const JointDist onestep = discrete_comonotone_step(pt, x, y);
                const JointDist indep = independent_pair_step(pt, x, y);
                for (const auto& f : fns) {
                    auto g = [&f](double a, double b) {
                        return f.fn(ExtendedReal(a), ExtendedReal(b));
                    };
                    const double e_ind = supermodular_expect(indep, labels, g);
                    const double e_it = supermodular_expect(iter, labels, g);
                    const double e_one = supermodular_expect(onestep, labels, g);
                    require(out, e_ind <= e_it + 1e-10,
                            "indep > iterate at m=" + std::to_string(m) + " f=" + f.name);
                    require(out, e_it <= e_one + 1e-10,
                            "iterate > one-step at m=" + std::to_string(m) + " f=" + f.name);
                    ++checked;
                }
            }
    }
    const double elapsed = seconds_since(t0);
    require(out, elapsed < 5.0, "runtime " + format_double(elapsed) + " s");
    if (out.pass)
        out.detail = std::to_string(2 * checked) + " inequalities, " +
                     format_double(elapsed) + " s";
    return out;
}

// 3. W1 contraction under pre-composition on 100 randomized chain triples.
Outcome criterion3() {
    Outcome out;
    std::mt19937_64 rng(20250810);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double worst = -1.0;
    for (int rep = 0; rep < 100; ++rep) {
        const int s = 3 + int(rng() % 6);
        std::vector<double> labels(static_cast<std::size_t>(s));
        for (int i = 0; i < s; ++i) labels[std::size_t(i)] = i;
        auto rand_stochastic = [&]() {
            TransitionMatrix p{s, std::vector<double>(std::size_t(s) * s)};
            for (int i = 0; i < s; ++i) {
                double sum = 0.0;
                for (int j = 0; j < s; ++j) {
                    p.entries[std::size_t(i) * s + j] = unif(rng) + 1e-3;
                    sum += p.entries[std::size_t(i) * s + j];
                }
                for (int j = 0; j < s; ++j) p.entries[std::size_t(i) * s + j] /= sum;
            }
            return p;
        };
        const TransitionMatrix k = rand_stochastic();
        const TransitionMatrix l = rand_stochastic();
        const TransitionMatrix m = rand_stochastic();
        const TransitionMatrix kl = multiply(k, l);
        const TransitionMatrix km = multiply(k, m);
        double lhs = 0.0, rhs = 0.0;
        for (int x = 0; x < s; ++x) {
            lhs = std::max(lhs, exact_w1(kl.row(x), km.row(x), labels));
            rhs = std::max(rhs, exact_w1(l.row(x), m.row(x), labels));
        }
        worst = std::max(worst, lhs - rhs);
        require(out, lhs <= rhs + 1e-10,
                "triple " + std::to_string(rep) + ": " + format_double(lhs) + " > " +
                    format_double(rhs));
    }
    if (out.pass) out.detail = "worst slack " + format_double(worst);
    return out;
}

// 4. Square-root-diffusion simulation: order fraction exactly 1 at every m,
//    marginal KS within DKW at alpha = 0.01 for every m, and the phi-product
//    delta between m=5 and m=6 smaller than between m=1 and m=2.  Under 60 s.
Outcome criterion4() {
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    const DyadicTime time = dyadic_decompose(1, 1);
    std::vector<double> phi_product(7, 0.0);
    for (int m = 1; m <= 6; ++m) {
        CouplingConfig config;
        config.model = kCir;
        config.starts = kStarts;
        config.time = time;
        config.level = m;
        config.n_samples = 5000;
        config.seed = kDefaultSeed;
        const SampleBatch batch = sample_batch(config);

        const double frac = order_fraction(batch);
        require(out, frac == 1.0,
                "order fraction " + format_double(frac) + " at m=" + std::to_string(m));

        for (int i = 0; i < batch.n_coords; ++i) {
            const ExtendedReal x = batch.starts[std::size_t(i)];
            const auto ks = ks_dkw(
                EmpiricalMeasure(batch.column(i)),
                [x](double y) { return transition_cdf(kCir, x, 0.5, y); }, 0.01);
            require(out, ks.pass, "KS fail m=" + std::to_string(m) + " coord " +
                                      std::to_string(i + 1) + " stat " +
                                      format_double(ks.statistic));
        }

        double acc = 0.0;
        for (std::int64_t r = 0; r < batch.n_samples; ++r)
            acc += phi(batch.row(r)[0]) * phi(batch.row(r)[1]);
        phi_product[std::size_t(m)] = acc / double(batch.n_samples);
    }
    const double delta_12 = std::abs(phi_product[2] - phi_product[1]);
    const double delta_56 = std::abs(phi_product[6] - phi_product[5]);
    require(out, delta_56 < delta_12,
            "|delta(5->6)| = " + format_double(delta_56) +
                " not below |delta(1->2)| = " + format_double(delta_12));
    const double elapsed = seconds_since(t0);
    require(out, elapsed < 60.0, "runtime " + format_double(elapsed) + " s");
    if (out.pass)
        out.detail = "|delta(1->2)|=" + format_double(delta_12) +
                     ", |delta(5->6)|=" + format_double(delta_56) + ", " +
                     format_double(elapsed) + " s";
    return out;
}

// 5. Equicontinuity bound at x = (0.5, 2), y = (1, 3), m = 4, N = 5000.
Outcome criterion5() {
    Outcome out;
    const std::vector<ExtendedReal> y{ExtendedReal(1.0), ExtendedReal(3.0)};
    const auto rep = equicontinuity_check(kCir, kStarts, y, dyadic_decompose(1, 1), 4,
                                          5000, kDefaultSeed);
    require(out, rep.pass, "estimate " + format_double(rep.estimate) + " > bound " +
                               format_double(rep.bound) + " + 3*" +
                               format_double(rep.std_error));
    if (out.pass)
        out.detail = "estimate " + format_double(rep.estimate) + " <= " +
                     format_double(rep.bound) + " + 3*" + format_double(rep.std_error);
    return out;
}

// 6. Quantile round trip within 1e-8 on a 99-point u-grid.
Outcome criterion6() {
    Outcome out;
    double worst = 0.0;
    const SemigroupModel models[] = {SemigroupModel(kCir),
                                     SemigroupModel(BrownianParams{0.0, 1.0})};
    for (const auto& model : models) {
        for (double x : {0.5, 2.0}) {
            for (double t : {0.25, 0.5, 1.0}) {
                for (int i = 1; i <= 99; ++i) {
                    const double u = double(i) / 100.0;
                    const double q = quantile(model, ExtendedReal(x), t, u).value();
                    const double back = transition_cdf(model, ExtendedReal(x), t, q);
                    worst = std::max(worst, std::abs(back - u));
                }
            }
        }
    }
    require(out, worst <= 1e-8, "worst round-trip error " + format_double(worst));
    if (out.pass) out.detail = "worst error " + format_double(worst);
    return out;
}

// 7. Discrete comonotone step equals the u-grid enumeration oracle in total
//    variation on 50 random row pairs.
Outcome criterion7() {
    Outcome out;
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> unif(0.01, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int s = 4 + int(rng() % 3);
        TransitionMatrix p{s, std::vector<double>(std::size_t(s) * s)};
        for (int i = 0; i < s; ++i) {
            double sum = 0.0;
            for (int j = 0; j < s; ++j) {
                p.entries[std::size_t(i) * s + j] = unif(rng);
                sum += p.entries[std::size_t(i) * s + j];
            }
            for (int j = 0; j < s; ++j) p.entries[std::size_t(i) * s + j] /= sum;
        }
        const int x = int(rng() % s), y = int(rng() % s);
        const JointDist mine = discrete_comonotone_step(p, x, y);
        const std::vector<double> rx(p.row(x).begin(), p.row(x).end());
        const std::vector<double> ry(p.row(y).begin(), p.row(y).end());
        const JointDist grid = oracles::ugrid_coupling(rx, ry, 1000000);
        double tv = 0.0;
        for (std::size_t k = 0; k < mine.mass.size(); ++k)
            tv += std::abs(mine.mass[k] - grid.mass[k]);
        tv *= 0.5;
        worst = std::max(worst, tv);
        require(out, tv <= 1e-5,
                "TV " + format_double(tv) + " at pair " + std::to_string(rep));
    }
    if (out.pass) out.detail = "worst TV " + format_double(worst);
    return out;
}

// 8. Determinism: simulate twice with the same seed -> byte-identical CSVs,
//    including across parallelism settings.
Outcome criterion8() {
    Outcome out;
    auto slurp = [](const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };

    RunConfig config;
    config.n_samples = 2000;
    config.m_lo = 1;
    config.m_hi = 3;
    config.out = "acceptance_det_a";
    const auto a = run_simulate(config);
    config.out = "acceptance_det_b";
    const auto b = run_simulate(config);
    for (std::size_t i = 0; i < a.per_level.size(); ++i)
        require(out, slurp(a.per_level[i].path) == slurp(b.per_level[i].path),
                "re-run differs at m=" + std::to_string(a.per_level[i].level));

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    config.out = "acceptance_det_c";
    const auto c = run_simulate(config);
    omp_set_num_threads(saved);
    for (std::size_t i = 0; i < a.per_level.size(); ++i)
        require(out, slurp(a.per_level[i].path) == slurp(c.per_level[i].path),
                "thread count changes output at m=" + std::to_string(a.per_level[i].level));
    for (const auto& p : c.per_level) std::remove(p.path.c_str());
    if (out.pass) out.detail = "identical across runs and 1 vs default threads";
#else
    if (out.pass) out.detail = "identical across runs (OpenMP disabled)";
#endif
    for (const auto& p : a.per_level) std::remove(p.path.c_str());
    for (const auto& p : b.per_level) std::remove(p.path.c_str());
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        {1, "counterexample reproduction", criterion1},
        {2, "exact dominance chain", criterion2},
        {3, "W1 contraction on random triples", criterion3},
        {4, "square-root-diffusion simulation", criterion4},
        {5, "equicontinuity bound", criterion5},
        {6, "quantile round trip", criterion6},
        {7, "discrete comonotone oracle equivalence", criterion7},
        {8, "byte-identical deterministic output", criterion8},
    };

    int failures = 0;
    for (const Entry& entry : entries) {
        Outcome out;
        try {
            out = entry.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] criterion %d: %s%s%s\n", out.pass ? "PASS" : "FAIL", entry.id,
                    entry.name, out.detail.empty() ? "" : " -- ", out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
