#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cho/harness/run.hpp"

namespace {

struct Options {
    std::string config;
    std::string preset;
    std::string out;
    long long seed = -1;
    bool override_compatibility = false;
    std::vector<std::string> set;
};

void add_common(CLI::App* cmd, Options& o) {
    auto* src = cmd->add_option("--config", o.config, "configuration file");
    cmd->add_option("--preset", o.preset, "bundled preset name")->excludes(src);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--seed", o.seed, "random seed")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--override-compatibility", o.override_compatibility,
                  "run even when phi0 and M violate the compatibility condition");
    cmd->add_option("--set", o.set, "extra section.key=value overrides");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cahn-Hilliard-Oono control toolkit"};
    app.require_subcommand(1);
    Options o;
    const std::pair<const char*, const char*> commands[] = {
        {"simulate", "forward run: diagnostics.csv, phi.cho"},
        {"optimize", "projected-gradient solve: history.csv, u_star.cho"},
        {"verify", "run invariant checks: verify.csv"},
        {"oracle-compare", "PDE against the Galerkin reference: oracle.csv"},
    };
    for (const auto& [name, help] : commands) add_common(app.add_subcommand(name, help), o);
    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    using namespace cho::harness;
    Overrides overrides;
    for (const std::string& s : o.set) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            std::cerr << "--set expects section.key=value, got '" << s << "'\n";
            return 2;
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    if (!o.out.empty()) overrides.emplace_back("run.out", o.out);
    if (o.seed >= 0) overrides.emplace_back("run.seed", std::to_string(o.seed));
    if (o.override_compatibility) overrides.emplace_back("run.override_compatibility", "true");

    const std::filesystem::path fallback_out = o.out.empty() ? "out" : o.out;
    RunConfig config;
    try {
        std::filesystem::path path = o.config;
        if (!o.preset.empty()) path = std::filesystem::path(CHO_PRESET_DIR) / (o.preset + ".cfg");
        if (path.empty()) {
            config = parse_config_text("", ".", overrides);
        } else {
            if (!std::filesystem::exists(path)) throw cho::IoError("no such config: " + path.string());
            config = parse_config(path, overrides);
        }
    } catch (const cho::Error& e) {
        write_failure(fallback_out, e.kind(), e.what());
        std::cerr << fmt::format("error [{}]: {}\n", e.kind(), e.what());
        return 2;
    }
    return run_command(command, config, std::cout);
}
