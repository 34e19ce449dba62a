// SPDX-License-Identifier: MIT
//
// cmf -- comonotone couplings of stochastically monotone Markov semigroups.
//
// Subcommands: simulate | counterexample | check-monotone | converge | dominance.
// Exit codes: 0 success/confirmed, 1 property check failed, 2 input error.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cmf/errors.hpp"
#include "cmf/runner.hpp"

namespace {

using nlohmann::json;

struct ModelFlags {
    std::string model = "cir";
    double a = 3.0, b = 2.0, sigma2 = 8.0;
    double drift = 0.0, vol = 1.0;
    std::string qmatrix;
};

std::vector<cmf::ExtendedReal> parse_starts(const std::string& csv) {
    std::vector<cmf::ExtendedReal> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok == "+inf" || tok == "inf")
            out.push_back(cmf::ExtendedReal::pos_inf());
        else if (tok == "-inf")
            out.push_back(cmf::ExtendedReal::neg_inf());
        else {
            try {
                out.push_back(cmf::ExtendedReal(std::stod(tok)));
            } catch (const std::exception&) {
                throw cmf::ConfigError("cannot parse start value '" + tok + "'");
            }
        }
    }
    if (out.empty()) throw cmf::ConfigError("--starts must list at least one value");
    return out;
}

cmf::SemigroupModel build_model(const ModelFlags& mf) {
    if (mf.model == "cir") {
        cmf::CirParams p{mf.a, mf.b, mf.sigma2};
        p.validate();
        return p;
    }
    if (mf.model == "brownian") {
        cmf::BrownianParams p{mf.drift, mf.vol};
        p.validate();
        return p;
    }
    if (mf.model == "chain") {
        if (mf.qmatrix.empty())
            throw cmf::ConfigError("--model chain requires --qmatrix PATH");
        return cmf::ChainModel(cmf::read_qmatrix_file(mf.qmatrix));
    }
    if (mf.model == "deterministic") return cmf::DeterministicModel{};
    throw cmf::ConfigError("unknown model '" + mf.model + "'");
}

// Pre-fill flag defaults from a flat JSON object; explicit flags override.
void apply_config_file(const std::string& path, ModelFlags& mf, cmf::RunConfig& rc,
                       std::string& starts_csv, std::string& m_range) {
    std::ifstream in(path);
    if (!in) throw cmf::ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw cmf::ConfigError(std::string("config file: ") + e.what());
    }
    if (j.contains("model")) mf.model = j["model"].get<std::string>();
    if (j.contains("a")) mf.a = j["a"].get<double>();
    if (j.contains("b")) mf.b = j["b"].get<double>();
    if (j.contains("sigma2")) mf.sigma2 = j["sigma2"].get<double>();
    if (j.contains("drift")) mf.drift = j["drift"].get<double>();
    if (j.contains("vol")) mf.vol = j["vol"].get<double>();
    if (j.contains("qmatrix")) mf.qmatrix = j["qmatrix"].get<std::string>();
    if (j.contains("starts")) {
        if (j["starts"].is_array()) {
            std::ostringstream os;
            for (std::size_t i = 0; i < j["starts"].size(); ++i)
                os << (i ? "," : "") << j["starts"][i].get<double>();
            starts_csv = os.str();
        } else {
            starts_csv = j["starts"].get<std::string>();
        }
    }
    if (j.contains("t_num")) rc.t_num = j["t_num"].get<std::int64_t>();
    if (j.contains("t_log2den")) rc.t_log2den = j["t_log2den"].get<int>();
    if (j.contains("m")) m_range = std::to_string(j["m"].get<int>());
    if (j.contains("m_range")) m_range = j["m_range"].get<std::string>();
    if (j.contains("n")) rc.n_samples = j["n"].get<std::int64_t>();
    if (j.contains("seed")) rc.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("alpha")) rc.alpha = j["alpha"].get<double>();
    if (j.contains("out")) rc.out = j["out"].get<std::string>();
}

void parse_m_range(const std::string& text, int& lo, int& hi) {
    const auto colon = text.find(':');
    try {
        if (colon == std::string::npos) {
            lo = hi = std::stoi(text);
        } else {
            lo = std::stoi(text.substr(0, colon));
            hi = std::stoi(text.substr(colon + 1));
        }
    } catch (const std::exception&) {
        throw cmf::ConfigError("cannot parse m range '" + text + "'");
    }
    if (hi < lo) throw cmf::ConfigError("empty m range '" + text + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"comonotone coupling kernels, dyadic iterates and diagnostics "
                 "for stochastically monotone Markov semigroups"};
    app.require_subcommand(1);

    ModelFlags mf;
    cmf::RunConfig rc;
    std::string starts_csv = "0.5,2";
    std::string m_range;
    std::string config_path;
    double ce_t = 1.0;
    std::string ce_qmatrix;
    std::string check_path;

    auto add_common = [&](CLI::App* sub, bool with_model) {
        sub->add_option("--config", config_path, "JSON key/value config file");
        if (with_model) {
            sub->add_option("--model", mf.model, "cir | brownian | chain | deterministic");
            sub->add_option("--a", mf.a, "CIR mean-reversion rate");
            sub->add_option("--b", mf.b, "CIR long-run mean");
            sub->add_option("--sigma2", mf.sigma2, "CIR squared volatility");
            sub->add_option("--drift", mf.drift, "Brownian drift");
            sub->add_option("--vol", mf.vol, "Brownian volatility");
            sub->add_option("--qmatrix", mf.qmatrix, "Q-matrix file for chain models");
            sub->add_option("--starts", starts_csv, "comma-separated start values");
            sub->add_option("--t-num", rc.t_num, "dyadic time numerator");
            sub->add_option("--t-log2den", rc.t_log2den, "dyadic time log2 denominator");
            sub->add_option("--n", rc.n_samples, "Monte Carlo sample count");
            sub->add_option("--seed", rc.seed, "64-bit RNG seed");
            sub->add_option("--alpha", rc.alpha, "DKW confidence parameter");
            sub->add_option("--out", rc.out, "output path (prefix for per-m files)");
        }
    };

    CLI::App* simulate = app.add_subcommand(
        "simulate", "draw N comonotone-iterate samples per level m, emit CSV");
    add_common(simulate, true);
    simulate->add_option("--m", m_range, "iterate level");
    simulate->add_option("--m-range", m_range, "iterate level range LO:HI");

    CLI::App* counterexample = app.add_subcommand(
        "counterexample", "reproduce the monotone-generator bridge violation");
    counterexample->add_option("--t", ce_t, "bridge half-interval length");
    counterexample->add_option("--qmatrix", ce_qmatrix, "alternative generator file");

    CLI::App* check = app.add_subcommand(
        "check-monotone", "ordered-cut monotonicity check of a Q-matrix file");
    check->add_option("path", check_path, "Q-matrix file")->required();

    CLI::App* converge = app.add_subcommand(
        "converge", "per-level coupling statistics and successive deltas");
    add_common(converge, true);
    converge->add_option("--m-range", m_range, "iterate level range LO:HI");
    converge->add_option("--m", m_range, "single iterate level");

    CLI::App* dominance = app.add_subcommand(
        "dominance", "supermodular dominance of couplings at one level");
    add_common(dominance, true);
    dominance->add_option("--m", m_range, "iterate level");

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();

        if (sub == check) return cmf::run_check_monotone(check_path, std::cout);

        if (sub == counterexample) {
            std::optional<std::string> qpath;
            if (!ce_qmatrix.empty()) qpath = ce_qmatrix;
            return cmf::run_counterexample(ce_t, qpath, std::cout);
        }

        // --config pre-fills, then explicit flags win.
        if (!config_path.empty()) {
            ModelFlags mf2;
            cmf::RunConfig rc2;
            std::string starts2 = starts_csv, mr2 = m_range;
            apply_config_file(config_path, mf2, rc2, starts2, mr2);
            auto keep = [&sub](const std::string& name) {
                return sub->count(name) > 0;
            };
            if (!keep("--model")) mf.model = mf2.model;
            if (!keep("--a")) mf.a = mf2.a;
            if (!keep("--b")) mf.b = mf2.b;
            if (!keep("--sigma2")) mf.sigma2 = mf2.sigma2;
            if (!keep("--drift")) mf.drift = mf2.drift;
            if (!keep("--vol")) mf.vol = mf2.vol;
            if (!keep("--qmatrix")) mf.qmatrix = mf2.qmatrix;
            if (!keep("--starts")) starts_csv = starts2;
            if (!keep("--t-num")) rc.t_num = rc2.t_num;
            if (!keep("--t-log2den")) rc.t_log2den = rc2.t_log2den;
            if (!keep("--n")) rc.n_samples = rc2.n_samples;
            if (!keep("--seed")) rc.seed = rc2.seed;
            if (!keep("--alpha")) rc.alpha = rc2.alpha;
            if (!keep("--out")) rc.out = rc2.out;
            if (!keep("--m") && !keep("--m-range") && !mr2.empty()) m_range = mr2;
        }

        rc.model = build_model(mf);
        rc.starts = parse_starts(starts_csv);

        if (sub == simulate) {
            if (m_range.empty()) m_range = "1:6";
            parse_m_range(m_range, rc.m_lo, rc.m_hi);
            const auto summary = cmf::run_simulate(rc);
            cmf::print_simulate_summary(summary, std::cout);
            return summary.all_order_exact && summary.all_ks_pass ? 0 : 1;
        }
        if (sub == converge) {
            if (m_range.empty()) m_range = "1:6";
            parse_m_range(m_range, rc.m_lo, rc.m_hi);
            if (rc.out == "simulate") rc.out = "converge.csv";
            cmf::run_converge(rc, std::cout);
            return 0;
        }
        if (sub == dominance) {
            if (m_range.empty()) m_range = "4";
            parse_m_range(m_range, rc.m_lo, rc.m_hi);
            return cmf::run_dominance(rc, std::cout);
        }
    } catch (const cmf::QMatrixParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
