#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "kaclab/scenario.hpp"

using kaclab::Scenario;
using kaclab::ScenarioConfig;
using kaclab::ScenarioResult;
using kaclab::ScenarioRow;

namespace {

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

std::filesystem::path work_dir() {
    static const std::filesystem::path dir = [] {
        std::filesystem::path p =
            std::filesystem::temp_directory_path() / "kaclab_cli_tests";
        std::filesystem::remove_all(p);
        std::filesystem::create_directories(p);
        return p;
    }();
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << text;
}

const std::string& binary_path() {
    static const std::string path = [] {
        const char* env = std::getenv("KACLAB_BIN");
        REQUIRE_MESSAGE(env != nullptr, "KACLAB_BIN must point at the binary");
        return std::string(env);
    }();
    return path;
}

CliRun run_cli(const std::string& args) {
    const std::filesystem::path out_path = work_dir() / "stdout.txt";
    const std::filesystem::path err_path = work_dir() / "stderr.txt";
    const std::string command = "\"" + binary_path() + "\" " + args + " > \"" +
                                out_path.string() + "\" 2> \"" +
                                err_path.string() + "\"";
    const int status = std::system(command.c_str());
    CliRun run;
    run.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    run.out = read_file(out_path);
    run.err = read_file(err_path);
    return run;
}

bool contains(const std::string& text, const std::string& needle) {
    return text.find(needle) != std::string::npos;
}

/// Minimal well-formedness scan: every element tag closes in LIFO order.
/// Comments and processing instructions are skipped; the plot text nodes
/// never contain a raw '<'.
bool xml_balanced(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    while ((i = text.find('<', i)) != std::string::npos) {
        const std::size_t end = text.find('>', i);
        if (end == std::string::npos) return false;
        std::string tag = text.substr(i + 1, end - i - 1);
        i = end + 1;
        if (tag.empty()) return false;
        if (tag.front() == '?' || tag.front() == '!') continue;
        const bool closing = tag.front() == '/';
        if (closing) tag = tag.substr(1);
        const bool self_closing = !closing && !tag.empty() && tag.back() == '/';
        const std::string name = tag.substr(0, tag.find_first_of(" \t\n/"));
        if (name.empty()) return false;
        if (closing) {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            stack.push_back(name);
        }
    }
    return stack.empty();
}

ScenarioRow fake_row(int n, double h, double sigma, double sup) {
    ScenarioRow row;
    row.report.family = "tensor:mixture:eta=0.9";
    row.report.N = n;
    row.report.h_per_particle = h;
    row.report.estimate.value = h * n;
    row.report.estimate.std_error = sigma;
    row.sup_gap = sup;
    row.l1_gap = sup;
    return row;
}

}  // namespace

TEST_CASE("verify command exits cleanly") {
    const CliRun run = run_cli("verify");
    CHECK(run.code == 0);
    CHECK(contains(run.out, "verdict PASS"));
}

TEST_CASE("polynomial sweep writes identical csv on rerun") {
    const std::string first = (work_dir() / "poly_a.csv").string();
    const std::string second = (work_dir() / "poly_b.csv").string();
    const std::string flags = "thm-polynomial --N 20,30 --samples 2000 --seed 3";
    CHECK(run_cli(flags + " --csv " + first).code == 0);
    CHECK(run_cli(flags + " --csv " + second).code == 0);

    const std::string csv = read_file(first);
    CHECK(csv == read_file(second));
    CHECK(csv.starts_with(
        "family,N,method,h_per_particle,std_error_per_particle,"
        "target,bound_lower,ess\n"));
    CHECK(contains(csv, "poly:varying,20,"));
    CHECK(contains(csv, "poly:varying,30,"));
    CHECK(contains(csv, "0.176880666473"));
    CHECK(contains(csv, "0.216729005586"));
    CHECK(contains(csv, "# assert,marginal-sup-decreasing,true,"));
    CHECK(contains(csv, "# verdict,PASS"));
}

TEST_CASE("mixture sweep emits csv and svg") {
    const std::string csv_path = (work_dir() / "mixture.csv").string();
    const std::string svg_path = (work_dir() / "mixture.svg").string();
    const CliRun run = run_cli("thm-mixture --N 10,20 --csv " + csv_path +
                               " --svg " + svg_path);
    CHECK(run.code == 0);
    CHECK(contains(run.out, "verdict PASS"));

    const std::string csv = read_file(csv_path);
    CHECK(contains(csv, "tensor:mixture:eta=0.9,10,"));
    CHECK(contains(csv, "0.173477211676"));
    CHECK(contains(csv, "0.212472912434"));
    CHECK(contains(csv, "# gap,10,"));
    CHECK(contains(csv, "# verdict,PASS"));

    const std::string svg = read_file(svg_path);
    CHECK(svg.starts_with("<?xml version=\"1.0\" encoding=\"UTF-8\"?>"));
    CHECK(contains(svg, "<svg"));
    CHECK(contains(svg, "</svg>"));
    CHECK(contains(svg, "0.34657"));
    CHECK(contains(svg, "0.09657"));
    CHECK(xml_balanced(svg));
}

TEST_CASE("trend violation exits with failure status") {
    const CliRun run = run_cli("thm-mixture --N 8,10 --eta 0.35");
    CHECK(run.code == 1);
    CHECK(contains(run.out, "verdict FAIL"));
}

TEST_CASE("usage and config errors exit with status two") {
    CHECK(run_cli("thm-mixture --bogus-flag").code == 2);
    CHECK(run_cli("thm-unknown").code == 2);
    CHECK(run_cli("").code == 2);

    const CliRun order = run_cli("thm-mixture --N 30,20");
    CHECK(order.code == 2);
    CHECK(contains(order.err, "kaclab: error:"));

    CHECK(run_cli("thm-mixture --N 3").code == 2);
    CHECK(run_cli("thm-polynomial --N 20,30 --samples 10").code == 2);

    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("config file drives the run and flags override it") {
    const std::string base = (work_dir() / "base.csv").string();
    CHECK(run_cli("thm-polynomial --N 20,30 --samples 2000 --seed 3 --csv " +
                  base)
              .code == 0);

    const std::filesystem::path cfg = work_dir() / "sweep.cfg";
    const std::string cfg_csv = (work_dir() / "from_config.csv").string();
    write_file(cfg,
               "# polynomial sweep\n"
               "scenario = thm-polynomial\n"
               "N = 20,30\n"
               "samples = 999999\n"
               "seed = 3\n"
               "csv = " +
                   cfg_csv + "\n");
    const CliRun run =
        run_cli("--config " + cfg.string() + " --samples 2000");
    CHECK(run.code == 0);
    CHECK(read_file(cfg_csv) == read_file(base));
}

TEST_CASE("scenario names round trip") {
    const std::vector<Scenario> all = {
        Scenario::thm_mixture,       Scenario::thm_polynomial,
        Scenario::thm_concentration, Scenario::thm_stereographic,
        Scenario::thm_convex,        Scenario::verify,
    };
    for (const Scenario s : all)
        CHECK(kaclab::parse_scenario(kaclab::scenario_name(s)) == s);
    CHECK_THROWS_AS(kaclab::parse_scenario("thm-unknown"),
                    std::invalid_argument);
}

TEST_CASE("config entries validate keys and values") {
    ScenarioConfig config;
    kaclab::apply_config_entry(config, "N", "10, 20,40");
    CHECK(config.n_list == std::vector<int>{10, 20, 40});
    kaclab::apply_config_entry(config, "eta", "0.5");
    CHECK(config.eta == doctest::Approx(0.5));
    kaclab::apply_config_entry(config, "eps-rule", "invsq");
    CHECK(config.eps_rule == "invsq");

    CHECK_THROWS_AS(kaclab::apply_config_entry(config, "gamma", "1"),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::apply_config_entry(config, "N", "10,abc"),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::apply_config_entry(config, "N", "0"),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::apply_config_entry(config, "N", "2000000"),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::apply_config_entry(config, "seed", "-4"),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::apply_config_entry(config, "eta", ""),
                    std::invalid_argument);
    CHECK_THROWS_AS(kaclab::apply_config_entry(config, "samples", "1e4"),
                    std::invalid_argument);
}

TEST_CASE("config files reject malformed lines") {
    const std::filesystem::path good = work_dir() / "good.cfg";
    write_file(good,
               "\n"
               "# comment only\n"
               "scenario = thm-concentration   # trailing note\n"
               "  N=10,100\n"
               "seed = 11\n");
    const ScenarioConfig config = kaclab::load_config_file(good.string());
    CHECK(config.scenario == Scenario::thm_concentration);
    CHECK(config.n_list == std::vector<int>{10, 100});
    CHECK(config.seed == 11);

    const std::filesystem::path bad = work_dir() / "bad.cfg";
    write_file(bad, "scenario = verify\n\njust words\n");
    CHECK_THROWS_WITH_AS(kaclab::load_config_file(bad.string()),
                         "config: line 3 is not 'key = value'",
                         std::invalid_argument);
    CHECK_THROWS_AS(kaclab::load_config_file((work_dir() / "none.cfg").string()),
                    std::invalid_argument);
}

TEST_CASE("family descriptors build matching dimensions") {
    const std::vector<std::string> good = {
        "uniform",
        "tensor:mixture:eta=0.9",
        "poly:varying",
        "poly:m=2",
        "concentration:eps=auto",
        "concentration:eps=0.05",
        "stereo:beta=sqrt",
        "stereo:beta=log",
        "stereo:beta=3.5",
        "convex:G=uniform;F=concentration:eps=0.01;alpha=0.25",
        "convex:G=uniform;F=concentration:eps=auto;alpha=auto",
    };
    for (const std::string& descriptor : good) {
        CAPTURE(descriptor);
        CHECK(kaclab::make_family(descriptor, 12).dim == 12);
    }

    const std::vector<std::string> bad = {
        "",
        "gauss",
        "poly",
        "poly:m=",
        "tensor:mixture",
        "stereo:beta=bogus",
        "convex:G=uniform;alpha=0.5",
        "convex:G=uniform;F=convex:x;alpha=0.5",
        "convex:G=uniform;F=uniform;alpha=auto",
    };
    for (const std::string& descriptor : bad) {
        CAPTURE(descriptor);
        CHECK_THROWS_AS(kaclab::make_family(descriptor, 12),
                        std::invalid_argument);
    }
}

TEST_CASE("scenario family strings parse back through the grammar") {
    ScenarioConfig config;
    config.scenario = Scenario::thm_convex;
    config.n_list = {20, 30};
    config.samples = 2000;
    config.seed = 5;
    const ScenarioResult result = kaclab::run_scenario(config);
    REQUIRE(result.rows.size() == 2);
    for (const ScenarioRow& row : result.rows) {
        CAPTURE(row.report.family);
        CHECK(kaclab::make_family(row.report.family, row.report.N).dim ==
              row.report.N);
    }
}

TEST_CASE("plot rendering requires two rows") {
    ScenarioResult result;
    result.scenario = Scenario::thm_mixture;
    result.verdict = "PASS";
    result.pass = true;
    result.target_line = 0.34657359028;
    result.limit_line = 0.09657359028;
    result.rows.push_back(fake_row(10, 0.17, 0.001, 0.05));
    CHECK_THROWS_AS(kaclab::render_plot_svg(result), std::invalid_argument);

    result.rows.push_back(fake_row(20, 0.21, 0.001, 0.03));
    const std::string svg = kaclab::render_plot_svg(result);
    CHECK(svg.starts_with("<?xml"));
    CHECK(contains(svg, "thm-mixture"));
    CHECK(contains(svg, "0.34657"));
    CHECK(xml_balanced(svg));
}

TEST_CASE("scenario results are deterministic in process") {
    ScenarioConfig config;
    config.scenario = Scenario::thm_polynomial;
    config.n_list = {20, 30};
    config.samples = 2000;
    config.seed = 3;
    const ScenarioResult first = kaclab::run_scenario(config);
    const ScenarioResult second = kaclab::run_scenario(config);

    CHECK(first.pass);
    CHECK(first.verdict == "PASS");
    REQUIRE(first.rows.size() == 2);
    CHECK(first.rows[0].report.N == 20);
    CHECK(first.rows[1].report.N == 30);
    CHECK(first.rows[0].report.h_per_particle ==
          doctest::Approx(0.176880666473).epsilon(1e-9));
    CHECK(first.rows[1].report.h_per_particle ==
          doctest::Approx(0.216729005586).epsilon(1e-9));
    CHECK(first.csv_text == second.csv_text);

    config.samples = 10;
    CHECK_THROWS_AS(kaclab::run_scenario(config), std::invalid_argument);
}
