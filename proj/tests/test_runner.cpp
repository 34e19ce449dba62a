// SPDX-License-Identifier: MIT
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cmf/errors.hpp"
#include "cmf/runner.hpp"

using namespace cmf;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string temp_path(const std::string& name) {
    return std::string("runner_test_") + name;
}

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = temp_path(name);
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("format_double round trips and keeps the decimal point") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(std::stod(format_double(0.1)) == 0.1);
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double_pointed(1.0) == "1.0");
    CHECK(format_double_pointed(0.25) == "0.25");
}

TEST_CASE("run config dyadic time") {
    RunConfig config;
    config.t_num = 6;
    config.t_log2den = 3;
    CHECK(config.time() == DyadicTime{3, 2});
    config.t_num = -1;
    CHECK_THROWS_AS(config.time(), ConfigError);
}

TEST_CASE("simulate writes one CSV per level with the documented layout") {
    RunConfig config;
    config.n_samples = 1;
    config.m_lo = config.m_hi = 1;
    config.out = temp_path("single");
    const auto summary = run_simulate(config);
    REQUIRE(summary.per_level.size() == 1);

    const std::string text = slurp(summary.per_level[0].path);
    std::istringstream lines(text);
    std::string header, row, extra;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row));
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(header == "x,y,x_keep,y_minus_x");
    CHECK(std::count(row.begin(), row.end(), ',') == 3);
    std::remove(summary.per_level[0].path.c_str());
}

TEST_CASE("simulate is byte-identical across runs and thread counts") {
    RunConfig config;
    config.n_samples = 400;
    config.m_lo = 1;
    config.m_hi = 3;
    config.out = temp_path("det_a");
    const auto first = run_simulate(config);
    config.out = temp_path("det_b");
    const auto second = run_simulate(config);
    REQUIRE(first.per_level.size() == second.per_level.size());
    for (std::size_t i = 0; i < first.per_level.size(); ++i)
        CHECK(slurp(first.per_level[i].path) == slurp(second.per_level[i].path));

#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    config.out = temp_path("det_c");
    const auto third = run_simulate(config);
    omp_set_num_threads(saved);
    for (std::size_t i = 0; i < first.per_level.size(); ++i)
        CHECK(slurp(first.per_level[i].path) == slurp(third.per_level[i].path));
    for (const auto& p : third.per_level) std::remove(p.path.c_str());
#endif

    CHECK(first.all_order_exact);
    for (const auto& p : first.per_level) std::remove(p.path.c_str());
    for (const auto& p : second.per_level) std::remove(p.path.c_str());
}

TEST_CASE("counterexample output and exit codes") {
    {
        std::ostringstream os;
        CHECK(run_counterexample(1.0, std::nullopt, os) == 0);
        const std::string text = os.str();
        CHECK(text.find("monotone: true") != std::string::npos);
        CHECK(text.find("P(a->a)=0.362") != std::string::npos);
        CHECK(text.find("P(b->b)=0.374") != std::string::npos);
        CHECK(text.find("violation: true") != std::string::npos);
        CHECK(text.find("VIOLATION CONFIRMED") != std::string::npos);
    }
    {
        std::ostringstream os;
        CHECK(run_counterexample(0.0, std::nullopt, os) == 1);
        CHECK(os.str().find("violation: false") != std::string::npos);
        CHECK(os.str().find("P(a->a)=1.000") != std::string::npos);
    }
    {
        const std::string path = write_temp("bad_gen.txt",
                                            "3\n-3.5 1.5 2\n1.5 -2.5 1\n0.5 0 -0.5\n");
        std::ostringstream os;
        CHECK(run_counterexample(1.0, path, os) == 1);
        CHECK(os.str().find("monotone: false") != std::string::npos);
        CHECK(os.str().find("violation check skipped") != std::string::npos);
        std::remove(path.c_str());
    }
}

TEST_CASE("check-monotone exit codes") {
    const std::string good = write_temp("good_gen.txt",
                                        "3\n-2.5 1.75 0.75\n1.5 -2.5 1\n0.5 0 -0.5\n");
    const std::string bad = write_temp("bad_gen2.txt",
                                       "3\n-3.5 1.5 2\n1.5 -2.5 1\n0.5 0 -0.5\n");
    const std::string broken = write_temp("broken_gen.txt", "3\n-2.5 1.75\n");

    std::ostringstream os1;
    CHECK(run_check_monotone(good, os1) == 0);
    CHECK(os1.str().find("monotone") == 0);

    std::ostringstream os2;
    CHECK(run_check_monotone(bad, os2) == 1);
    CHECK(os2.str().find("not monotone") != std::string::npos);
    CHECK(os2.str().find("cut") != std::string::npos);

    std::ostringstream os3;
    CHECK(run_check_monotone(broken, os3) == 2);
    CHECK(os3.str().find("line") != std::string::npos);

    std::ostringstream os4;
    CHECK(run_check_monotone("no_such_file.txt", os4) == 2);

    std::remove(good.c_str());
    std::remove(bad.c_str());
    std::remove(broken.c_str());
}

TEST_CASE("converge run writes the table") {
    RunConfig config;
    config.model = DeterministicModel{};
    config.starts = {ExtendedReal(0.5), ExtendedReal(2.0)};
    config.n_samples = 100;
    config.m_lo = 1;
    config.m_hi = 3;
    config.out = temp_path("conv.csv");
    std::ostringstream os;
    const auto rows = run_converge(config, os);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].phi_product == rows[2].phi_product);

    const std::string text = slurp(config.out);
    CHECK(text.find("m,phi_product,spearman,delta_phi_product,delta_spearman") == 0);
    // First row carries empty delta fields.
    const auto first_row = text.substr(text.find('\n') + 1);
    CHECK(first_row.find(",,") != std::string::npos);
    std::remove(config.out.c_str());
}

TEST_CASE("dominance run passes on the default configuration") {
    RunConfig config;
    config.n_samples = 1500;
    config.m_lo = config.m_hi = 3;
    std::ostringstream os;
    CHECK(run_dominance(config, os) == 0);
    CHECK(os.str().find("dominance: pass") != std::string::npos);
}
