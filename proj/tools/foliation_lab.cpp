#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "folab/errors.hpp"
#include "folab/suites.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"foliation-lab: verification suites for flow groupoid algebras"};
    app.require_subcommand(1, 1);
    std::string config, out, csv_dir;
    std::vector<std::string> overrides;
    for (const auto& name : folab::suite_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " suite");
        sub->add_option("--config", config, "suite config (JSON)")->required();
        sub->add_option("--out", out, "report path (JSON)")->required();
        sub->add_option("--override", overrides, "dotted.key=value, repeatable");
        sub->add_option("--csv-dir", csv_dir, "directory for CSV data dumps");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }
    const std::string suite = app.get_subcommands().front()->get_name();

    folab::SuiteConfig cfg;
    try {
        cfg = folab::load_config(config, overrides);
    } catch (const folab::ConfigError& e) {
        std::cerr << "foliation-lab: " << e.what() << '\n';
        return kExitUsage;
    }
    if (!csv_dir.empty() && !std::filesystem::is_directory(csv_dir)) {
        std::cerr << "foliation-lab: --csv-dir is not a directory: " << csv_dir << '\n';
        return kExitUsage;
    }

    try {
        const auto report = folab::run_suite(suite, cfg);
        folab::write_file_atomic(out, report.to_json().dump(2) + "\n");
        if (!csv_dir.empty())
            for (const auto& d : report.dumps) folab::write_file_atomic(std::filesystem::path(csv_dir) / d.name, d.contents);
        for (const auto& r : report.records)
            if (!r.passed) std::cerr << "FAIL " << r.name << " [" << r.anchor << "] measured " << r.measured << '\n';
        std::cout << suite << ": " << (report.passed() ? "pass" : "fail") << " (" << report.records.size()
                  << " checks, " << report.wall_time << " s)\n";
        return report.passed() ? 0 : kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "foliation-lab: " << e.what() << '\n';
        return kExitFail;
    }
}
