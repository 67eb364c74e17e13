#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kaclab/entropy.hpp"
#include "kaclab/families.hpp"

namespace kaclab {

enum class Scenario {
    thm_mixture,
    thm_polynomial,
    thm_concentration,
    thm_stereographic,
    thm_convex,
    verify,
};

/// Maps "thm-mixture", ..., "verify" to the enum; throws std::invalid_argument
/// on anything else.
Scenario parse_scenario(const std::string& name);
std::string scenario_name(Scenario scenario);

/// Full description of one scenario run. An empty n_list selects the
/// per-scenario default sweep; "auto" rules resolve per scenario
/// (eps invlog everywhere except the convex scenario, which uses invsq).
struct ScenarioConfig {
    Scenario scenario = Scenario::verify;
    std::vector<int> n_list;
    std::int64_t samples = 100000;
    std::uint64_t seed = 7;
    double eta = 0.9;
    std::string eps_rule = "auto";
    std::string beta_rule = "sqrt";
    std::string alpha_rule = "adaptive";
    double m = 0.0;
    std::string csv_path;
    std::string svg_path;
};

/// Reads a flat `key = value` file with `#` comments into a config. Accepted
/// keys mirror the command-line flags: scenario, N, samples, seed, eta,
/// eps-rule, beta-rule, alpha-rule, m, csv, svg.
ScenarioConfig load_config_file(const std::string& path);

/// Applies one key/value pair to the config; shared between the file loader
/// and flag handling. Throws std::invalid_argument on unknown keys or
/// unparseable values.
void apply_config_entry(ScenarioConfig& config, const std::string& key,
                        const std::string& value);

/// Family descriptor grammar, one CSV-safe token per sweep entry:
///   uniform
///   tensor:mixture:eta=V
///   poly:m=V | poly:varying
///   concentration:eps=V|auto
///   stereo:beta=V|sqrt|log
///   convex:G=D;F=D;alpha=V|auto
/// auto resolves eps to 1/log(N+e) and alpha to min(1/2, (H(F)/N)^{-1/2});
/// the convex grammar nests one level only.
DensityFamily make_family(const std::string& descriptor, int N);

struct ScenarioAssertion {
    std::string name;
    bool holds = false;
    std::string detail;
};

/// One sweep entry: the entropy report plus the marginal gaps when the
/// scenario tabulates a chaoticity sweep.
struct ScenarioRow {
    EntropyReport report;
    std::optional<double> sup_gap;
    std::optional<double> l1_gap;
};

struct ScenarioResult {
    Scenario scenario = Scenario::verify;
    std::vector<ScenarioRow> rows;
    std::vector<ScenarioAssertion> assertions;
    std::optional<double> target_line;
    std::optional<double> limit_line;
    std::string verdict;
    bool pass = false;
    double wall_time = 0.0;
    std::string csv_text;
};

/// Runs the configured scenario: builds the family at every N in parallel,
/// tabulates entropy and marginal gaps, derives the verdict from the
/// assembled rows, and writes the CSV (and SVG when the result has at least
/// two rows) to the configured paths. Pipeline errors surface as
/// std::runtime_error naming the scenario, the offending N, and the stage.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Self-contained SVG line chart of the result: per-particle entropy with
/// error bars against ln N, dashed reference lines at the target and limit
/// values, and a second panel with the marginal sup gap when present.
/// Requires at least two rows.
std::string render_plot_svg(const ScenarioResult& result);
void emit_plot(const ScenarioResult& result, const std::string& path);

}  // namespace kaclab
