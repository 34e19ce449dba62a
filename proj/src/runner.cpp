// SPDX-License-Identifier: MIT
#include "cmf/runner.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "cmf/errors.hpp"

namespace cmf {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string format_double_pointed(double v) {
    std::string s = format_double(v);
    if (s.find_first_of(".einE") == std::string::npos) s += ".0";
    return s;
}

DyadicTime RunConfig::time() const {
    try {
        return dyadic_decompose(t_num, t_log2den);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid dyadic time: ") + e.what());
    }
}

namespace {

std::string level_path(const std::string& out, int level) {
    std::string base = out;
    if (base.size() > 4 && base.ends_with(".csv")) base.resize(base.size() - 4);
    return base + "_m" + std::to_string(level) + ".csv";
}

void write_simulate_csv(const std::string& path, const SampleBatch& batch) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    const int n = batch.n_coords;
    if (n == 2) {
        os << "x,y,x_keep,y_minus_x\n";
        for (std::int64_t r = 0; r < batch.n_samples; ++r) {
            const auto row = batch.row(r);
            const double x = row[0].value(), y = row[1].value();
            os << format_double(x) << ',' << format_double(y) << ','
               << format_double(x) << ',' << format_double(y - x) << '\n';
        }
    } else {
        for (int i = 0; i < n; ++i) os << (i ? "," : "") << 'c' << (i + 1);
        os << '\n';
        for (std::int64_t r = 0; r < batch.n_samples; ++r) {
            const auto row = batch.row(r);
            for (int i = 0; i < n; ++i)
                os << (i ? "," : "") << format_double(row[i].value());
            os << '\n';
        }
    }
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

SimulateSummary run_simulate(const RunConfig& config) {
    const DyadicTime time = config.time();
    if (config.m_lo < time.m0)
        throw ConfigError("simulate: m must be >= m0 = " + std::to_string(time.m0));
    if (config.m_hi < config.m_lo) throw ConfigError("simulate: empty m range");

    SimulateSummary summary;
    summary.all_order_exact = true;
    summary.all_ks_pass = true;
    const double t = time.value();

    for (int m = config.m_lo; m <= config.m_hi; ++m) {
        CouplingConfig cc;
        cc.model = config.model;
        cc.starts = config.starts;
        cc.time = time;
        cc.level = m;
        cc.n_samples = config.n_samples;
        cc.seed = config.seed;
        const SampleBatch batch = sample_batch(cc);

        SimulatePerLevel per;
        per.level = m;
        per.path = level_path(config.out, m);
        write_simulate_csv(per.path, batch);
        per.order_fraction = order_fraction(batch);
        summary.all_order_exact = summary.all_order_exact && per.order_fraction == 1.0;
        if (batch.n_samples >= 2) {  // the DKW audit needs at least two samples
            for (int i = 0; i < batch.n_coords; ++i) {
                const ExtendedReal x = batch.starts[std::size_t(i)];
                const auto& model = config.model;
                per.marginal_ks.push_back(ks_dkw(
                    EmpiricalMeasure(batch.column(i)),
                    [&model, x, t](double y) { return transition_cdf(model, x, t, y); },
                    config.alpha));
                summary.all_ks_pass = summary.all_ks_pass && per.marginal_ks.back().pass;
            }
        }
        summary.per_level.push_back(std::move(per));
    }
    return summary;
}

void print_simulate_summary(const SimulateSummary& summary, std::ostream& os) {
    for (const auto& per : summary.per_level) {
        os << "m=" << per.level << " file=" << per.path
           << " order_fraction=" << format_double_pointed(per.order_fraction);
        for (std::size_t i = 0; i < per.marginal_ks.size(); ++i) {
            const auto& ks = per.marginal_ks[i];
            os << " ks" << (i + 1) << "=" << format_double(ks.statistic)
               << (ks.pass ? " (pass)" : " (FAIL)");
        }
        os << '\n';
    }
    if (!summary.per_level.empty() && !summary.per_level.front().marginal_ks.empty())
        os << "dkw_bound=" << format_double(summary.per_level.front().marginal_ks.front().bound)
           << '\n';
}

int run_counterexample(double t, const std::optional<std::string>& qmatrix_path,
                       std::ostream& os) {
    CounterexampleReport rep;
    if (qmatrix_path)
        rep = counterexample_report(read_qmatrix_file(*qmatrix_path), t);
    else
        rep = counterexample_report(t);

    char buf[256];
    std::snprintf(buf, sizeof(buf),
                  "monotone: %s; P(a->a)=%.3f; P(b->b)=%.3f; violation: %s\n",
                  rep.monotone ? "true" : "false", rep.p_lower_start_a,
                  rep.p_lower_start_b, rep.violation ? "true" : "false");
    os << buf;
    if (!rep.violation_checked) os << "violation check skipped: generator is not monotone\n";
    if (rep.violation) os << "VIOLATION CONFIRMED\n";
    return rep.violation ? 0 : 1;
}

int run_check_monotone(const std::string& path, std::ostream& os) {
    QMatrix q;
    try {
        q = read_qmatrix_file(path);
    } catch (const QMatrixParseError& e) {
        os << path << ": " << e.what() << '\n';
        return 2;
    }
    const MonotoneReport rep = kirstein_monotone(q);
    os << (rep.monotone ? "monotone" : "not monotone") << '\n';
    for (const auto& v : rep.violations) os << v.describe() << '\n';
    return rep.monotone ? 0 : 1;
}

std::vector<ConvergenceRow> run_converge(const RunConfig& config, std::ostream& os) {
    const auto rows = convergence_diag(config.model, config.starts, config.time(),
                                       config.m_lo, config.m_hi, config.n_samples,
                                       config.seed, config.alpha);
    std::string path = config.out;
    if (!path.ends_with(".csv")) path += ".csv";
    std::ofstream csv(path, std::ios::binary);
    if (!csv) throw std::runtime_error("cannot open '" + path + "' for writing");

    const int n = rows.empty() ? 0 : int(rows.front().marginal_ks.size());
    csv << "m,phi_product,spearman,delta_phi_product,delta_spearman";
    for (int i = 0; i < n; ++i) csv << ",ks_stat_" << (i + 1) << ",ks_pass_" << (i + 1);
    csv << '\n';
    for (const auto& row : rows) {
        csv << row.level << ',' << format_double(row.phi_product) << ','
            << format_double(row.rank_corr) << ',';
        if (row.delta_phi_product) csv << format_double(*row.delta_phi_product);
        csv << ',';
        if (row.delta_rank_corr) csv << format_double(*row.delta_rank_corr);
        for (const auto& ks : row.marginal_ks)
            csv << ',' << format_double(ks.statistic) << ',' << (ks.pass ? 1 : 0);
        csv << '\n';
    }
    if (!csv) throw std::runtime_error("write failed for '" + path + "'");

    os << "wrote " << path << '\n';
    for (const auto& row : rows) {
        os << "m=" << row.level << " phi_product=" << format_double(row.phi_product)
           << " spearman=" << format_double(row.rank_corr);
        if (row.delta_phi_product)
            os << " delta_phi=" << format_double(*row.delta_phi_product);
        os << '\n';
    }
    return rows;
}

int run_dominance(const RunConfig& config, std::ostream& os) {
    const DyadicTime time = config.time();
    const double t = time.value();
    const int m = config.m_lo;

    CouplingConfig cc;
    cc.model = config.model;
    cc.starts = config.starts;
    cc.time = time;
    cc.level = m;
    cc.n_samples = config.n_samples;
    cc.seed = config.seed;
    const SampleBatch iterate = sample_batch(cc);
    const SampleBatch indep =
        independent_batch(config.model, config.starts, t, config.n_samples, config.seed);
    const SampleBatch onestep =
        onestep_batch(config.model, config.starts, t, config.n_samples, config.seed);

    const auto fns = supermodular_test_functions();
    const DominanceResult lower = dominance_mc(indep, iterate, fns);
    const DominanceResult upper = dominance_mc(iterate, onestep, fns);

    os << "independent <= comonotone iterate (m=" << m << "):\n";
    for (const auto& c : lower.per_fn)
        os << "  " << c.name << ": " << format_double(c.mean_a) << " <= "
           << format_double(c.mean_b) << " + 3*" << format_double(c.std_error)
           << (c.pass ? " (pass)" : " (FAIL)") << '\n';
    os << "comonotone iterate (m=" << m << ") <= one-step:\n";
    for (const auto& c : upper.per_fn)
        os << "  " << c.name << ": " << format_double(c.mean_a) << " <= "
           << format_double(c.mean_b) << " + 3*" << format_double(c.std_error)
           << (c.pass ? " (pass)" : " (FAIL)") << '\n';
    const bool pass = lower.pass && upper.pass;
    os << (pass ? "dominance: pass\n" : "dominance: FAIL\n");
    return pass ? 0 : 1;
}

}  // namespace cmf
