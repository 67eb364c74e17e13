#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "kaclab/scenario.hpp"

namespace {

void print_result(const kaclab::ScenarioResult& result,
                  const kaclab::ScenarioConfig& config) {
    std::printf("scenario %s rows %zu wall %.2fs\n",
                kaclab::scenario_name(result.scenario).c_str(),
                result.rows.size(), result.wall_time);
    for (const kaclab::ScenarioRow& row : result.rows) {
        std::string line = "  N=" + std::to_string(row.report.N) +
                           " family=" + row.report.family + " h/N=";
        char value[64];
        std::snprintf(value, sizeof(value), "%.6g", row.report.h_per_particle);
        line += value;
        if (row.report.estimate.std_error > 0.0) {
            std::snprintf(value, sizeof(value), " sigma/N=%.3g",
                          row.report.estimate.std_error / row.report.N);
            line += value;
        }
        if (row.sup_gap) {
            std::snprintf(value, sizeof(value), " sup-gap=%.4g", *row.sup_gap);
            line += value;
        }
        std::printf("%s\n", line.c_str());
    }
    for (const kaclab::ScenarioAssertion& a : result.assertions)
        std::printf("  assert %-34s %s  %s\n", a.name.c_str(),
                    a.holds ? "ok  " : "FAIL", a.detail.c_str());
    if (!config.csv_path.empty())
        std::printf("csv written to %s\n", config.csv_path.c_str());
    if (!config.svg_path.empty() &&
        result.scenario != kaclab::Scenario::verify)
        std::printf("svg written to %s\n", config.svg_path.c_str());
    std::printf("verdict %s\n", result.verdict.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for probability densities on the Kac sphere"};
    std::string scenario;
    std::string n_text;
    std::string samples_text;
    std::string seed_text;
    std::string eta_text;
    std::string eps_rule;
    std::string beta_rule;
    std::string alpha_rule;
    std::string m_text;
    std::string csv_path;
    std::string svg_path;
    std::string config_path;

    app.add_option("scenario", scenario,
                   "thm-mixture | thm-polynomial | thm-concentration | "
                   "thm-stereographic | thm-convex | verify");
    app.add_option("--N", n_text,
                   "comma-separated strictly increasing sweep, e.g. 50,100,200");
    app.add_option("--samples", samples_text,
                   "Monte Carlo sample count per N (default 100000)");
    app.add_option("--seed", seed_text, "master seed (default 7)");
    app.add_option("--eta", eta_text,
                   "mixture exponent, delta_N = N^-eta (default 0.9)");
    app.add_option("--eps-rule", eps_rule,
                   "cap radius rule: auto | invlog | invsq");
    app.add_option("--beta-rule", beta_rule, "chart shift rule: sqrt | log");
    app.add_option("--alpha-rule", alpha_rule,
                   "convex weight rule: adaptive");
    app.add_option("--m", m_text,
                   "fixed polynomial power; 0 selects the varying power");
    app.add_option("--csv", csv_path, "write the result table to this path");
    app.add_option("--svg", svg_path, "write the line chart to this path");
    app.add_option("--config", config_path,
                   "flat key = value file; explicit flags override it");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        kaclab::ScenarioConfig config;
        if (!config_path.empty())
            config = kaclab::load_config_file(config_path);
        if (!scenario.empty())
            kaclab::apply_config_entry(config, "scenario", scenario);
        else if (config_path.empty())
            throw std::invalid_argument(
                "missing scenario; run with --help for the list");
        if (app.count("--N")) kaclab::apply_config_entry(config, "N", n_text);
        if (app.count("--samples"))
            kaclab::apply_config_entry(config, "samples", samples_text);
        if (app.count("--seed"))
            kaclab::apply_config_entry(config, "seed", seed_text);
        if (app.count("--eta"))
            kaclab::apply_config_entry(config, "eta", eta_text);
        if (app.count("--eps-rule"))
            kaclab::apply_config_entry(config, "eps-rule", eps_rule);
        if (app.count("--beta-rule"))
            kaclab::apply_config_entry(config, "beta-rule", beta_rule);
        if (app.count("--alpha-rule"))
            kaclab::apply_config_entry(config, "alpha-rule", alpha_rule);
        if (app.count("--m")) kaclab::apply_config_entry(config, "m", m_text);
        if (app.count("--csv"))
            kaclab::apply_config_entry(config, "csv", csv_path);
        if (app.count("--svg"))
            kaclab::apply_config_entry(config, "svg", svg_path);

        const kaclab::ScenarioResult result = kaclab::run_scenario(config);
        print_result(result, config);
        return result.pass ? 0 : 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "kaclab: error: %s\n", e.what());
        return 2;
    }
}
