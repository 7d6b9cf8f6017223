// Command-line front end: runs one verification scenario and writes its report.

#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "pdo/error.hpp"
#include "pdo/report.hpp"
#include "pdo/scenario.hpp"
#include "pdo/serialize.hpp"

namespace {

enum ExitCode { kPass = 0, kMetricFailure = 1, kUsageError = 2, kConvergenceError = 3 };

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
    std::filesystem::path p = out;
    p.replace_extension();
    p += suffix;
    return p;
}

void print_summary(const pdo::VerificationReport& report) {
    for (const auto& m : report.metrics())
        std::cout << (m.pass ? "PASS " : "FAIL ") << m.name << " = " << m.value << " (" << pdo::to_string(m.comparison)
                  << ' ' << m.threshold << ")\n";
    for (const auto& w : report.warnings()) std::cout << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification scenarios for the pseudodifferential operator calculus"};
    app.require_subcommand(1);

    std::string scenario;
    std::string config_path;
    std::string out_path;
    bool emit_plots = false;
    bool oracle = false;
    auto* run = app.add_subcommand("run", "Run one scenario and write its report");
    run->add_option("scenario", scenario, "Scenario name (see `list`)")->required();
    run->add_option("--config", config_path, "JSON config (schema_version 1); defaults when omitted");
    run->add_option("--out", out_path, "Path of the JSON report")->required();
    run->add_flag("--emit-plots", emit_plots, "Also write <out>.plot.csv with the report series");
    run->add_flag("--oracle", oracle, "Cross-validate against the slow reference paths");

    auto* list = app.add_subcommand("list", "Print the scenario names");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsageError;
    }

    if (list->parsed()) {
        for (const auto& name : pdo::scenario_names()) std::cout << name << '\n';
        return kPass;
    }

    pdo::ScenarioConfig config;
    try {
        const auto doc = config_path.empty() ? nlohmann::ordered_json{{"schema_version", pdo::kConfigSchemaVersion}}
                                             : pdo::read_json_file(config_path);
        config = pdo::parse_config(doc, scenario);
        if (oracle) config.oracle = true;
    } catch (const pdo::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }

    pdo::VerificationReport report;
    try {
        report = pdo::run_scenario(config);
    } catch (const pdo::ConvergenceError& e) {
        std::cerr << "convergence error: " << e.what() << '\n';
        return kConvergenceError;
    } catch (const pdo::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }

    try {
        const std::filesystem::path out(out_path);
        pdo::write_report_json(report, out);
        pdo::write_report_csv(report, sibling(out, ".summary.csv"));
        if (emit_plots) pdo::write_plot_csv(report, sibling(out, ".plot.csv"));
    } catch (const pdo::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    }

    print_summary(report);
    if (pdo::convergence_failed(report)) return kConvergenceError;
    return report.pass() ? kPass : kMetricFailure;
}
