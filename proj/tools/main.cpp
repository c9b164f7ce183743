#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "json.hpp"
#include "wavegraph/generator_oracle.hpp"
#include "wavegraph/simulator.hpp"
#include "wavegraph/wave_ode.hpp"

namespace {

using nlohmann::json;
namespace cli = wavegraph::cli;

int fail(const std::string& kind, const std::string& message, const std::string& experiment, int code) {
    json err{{"error", {{"kind", kind}, {"message", message}}}};
    if (!experiment.empty()) err["error"]["experiment"] = experiment;
    std::cerr << err.dump() << std::endl;
    return code;
}

int run(const std::string& kind, const std::string& config_file, const std::vector<std::string>& overrides) {
    try {
        json cfg = cli::load_config(config_file);
        for (const auto& o : overrides) cli::apply_override(cfg, o);
        auto base = std::filesystem::path(config_file).parent_path();
        auto result = cli::run_experiment(kind, std::move(cfg), base.empty() ? "." : base);
        for (const auto& p : cli::write_outputs(result)) std::cout << p.string() << '\n';
        return 0;
    } catch (const cli::ConfigError& e) {
        return fail("config", e.what(), kind, 2);
    } catch (const std::invalid_argument& e) {
        return fail("invalid_argument", e.what(), kind, 2);
    } catch (const wavegraph::StateExplosionError& e) {
        return fail("state_explosion", e.what(), kind, 3);
    } catch (const wavegraph::ExplosionError& e) {
        return fail("jump_budget", e.what(), kind, 3);
    } catch (const wavegraph::SolverError& e) {
        return fail("solver", e.what(), kind, 3);
    } catch (const json::exception& e) {
        return fail("config", e.what(), kind, 2);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), kind, 1);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic particle representation of graph wave equations"};
    app.set_version_flag("--version", WAVEGRAPH_VERSION);
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> overrides;
    std::string chosen;
    for (const auto& kind : cli::experiment_kinds()) {
        auto* sub = app.add_subcommand(kind, "Run the '" + kind + "' experiment");
        sub->require_subcommand(1);
        auto* r = sub->add_subcommand("run", "Run from a JSON config");
        r->add_option("--config", config_file, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
        r->add_option("--set", overrides, "override a config field, key=value (dotted keys descend)");
        r->callback([&chosen, kind] { chosen = kind; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), "", 64);
    }
    return run(chosen, config_file, overrides);
}
