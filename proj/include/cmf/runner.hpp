// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cmf/chain.hpp"
#include "cmf/stats.hpp"

namespace cmf {

// Seed used when none is given; any fixed value keeps runs reproducible.
inline constexpr std::uint64_t kDefaultSeed = 7;

// Shortest round-trip decimal formatting (std::to_chars).
std::string format_double(double v);
// Same, but always with a decimal point ("1.0" rather than "1").
std::string format_double_pointed(double v);

// Resolved configuration of a CLI run; flags and --config files both land here.
struct RunConfig {
    SemigroupModel model = CirParams{3.0, 2.0, 8.0};
    std::vector<ExtendedReal> starts = {ExtendedReal(0.5), ExtendedReal(2.0)};
    std::int64_t t_num = 1;
    int t_log2den = 1;
    int m_lo = 1;
    int m_hi = 6;
    std::int64_t n_samples = 5000;
    std::uint64_t seed = kDefaultSeed;
    double alpha = 0.01;
    std::string out = "simulate";

    DyadicTime time() const;  // ConfigError when not representable
};

struct SimulatePerLevel {
    int level = 0;
    std::string path;
    double order_fraction = 0.0;
    std::vector<KsReport> marginal_ks;
};

struct SimulateSummary {
    std::vector<SimulatePerLevel> per_level;
    bool all_order_exact = false;
    bool all_ks_pass = false;
};

// Writes one CSV per level m in [m_lo, m_hi] named "<out>_m<m>.csv".  For two
// starts the columns are x,y,x_keep,y_minus_x; otherwise c1..cn.
SimulateSummary run_simulate(const RunConfig& config);

void print_simulate_summary(const SimulateSummary& summary, std::ostream& os);

// Prints "monotone: ...; P(a->a)=...; P(b->b)=...; violation: ..." and
// returns the process exit code (0 confirmed, 1 not confirmed).
int run_counterexample(double t, const std::optional<std::string>& qmatrix_path,
                       std::ostream& os);

// Verdict plus one line per violated cut; 0 monotone, 1 violated, 2 parse error.
int run_check_monotone(const std::string& path, std::ostream& os);

// Writes the convergence table to "<out>" (single CSV) and prints it.
std::vector<ConvergenceRow> run_converge(const RunConfig& config, std::ostream& os);

// Independent vs iterate and iterate vs one-step dominance at level m_lo.
// Returns 0 when every test function passes.
int run_dominance(const RunConfig& config, std::ostream& os);

}  // namespace cmf
