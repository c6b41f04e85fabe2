// Command-line front end: single runs, ensembles, probe suites.

#include "slc/config.hpp"
#include "slc/ensemble.hpp"
#include "slc/errors.hpp"
#include "slc/probes.hpp"
#include "slc/snapshot.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<int> trajectories;
    std::optional<std::string> scheme;
};

slc::SimConfig resolve(const Overrides& o)
{
    slc::SimConfig c = o.config_path.empty() ? slc::SimConfig{} : slc::parse_config(slc::read_file(o.config_path));
    if (o.seed)
        c.seed = *o.seed;
    if (o.out)
        c.output_dir = *o.out;
    if (o.trajectories)
        c.trajectories = *o.trajectories;
    if (o.scheme)
        c.scheme = slc::parse_scheme(*o.scheme);
    auto violations = slc::config_violations(c);
    if (!violations.empty())
        throw slc::ConfigError(violations);
    return c;
}

void add_common(CLI::App* cmd, Overrides& o)
{
    cmd->add_option("--config", o.config_path, "configuration file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--scheme", o.scheme, "em or picard");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Stochastic nematic liquid crystal solver"};
    app.require_subcommand(1);

    Overrides run_o, ens_o, probe_o;
    auto* run = app.add_subcommand("run", "integrate one trajectory");
    add_common(run, run_o);
    auto* ens = app.add_subcommand("ensemble", "integrate a Monte Carlo ensemble");
    add_common(ens, ens_o);
    ens->add_option("--trajectories", ens_o.trajectories, "ensemble size")->check(CLI::PositiveNumber);
    auto* probes = app.add_subcommand("probes", "run the operator and inequality probe suite");
    add_common(probes, probe_o);
    app.add_subcommand("describe-config", "list every configuration key with its default");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("describe-config")) {
            std::cout << slc::describe_config();
            return 0;
        }
        const int threads = slc::thread_count_from_env();
        if (*run) {
            slc::SimConfig c = resolve(run_o);
            c.trajectories = 1;
            return slc::run_ensemble(c, threads);
        }
        if (*ens)
            return slc::run_ensemble(resolve(ens_o), threads);
        if (*probes) {
            slc::SimConfig c = resolve(probe_o);
            auto results = slc::run_probes(c);
            std::string json = slc::probes_json(results);
            if (probe_o.out) {
                std::filesystem::create_directories(*probe_o.out);
                slc::write_file((std::filesystem::path(*probe_o.out) / "probes.json").string(), json);
            }
            std::cout << json;
            for (const auto& r : results)
                if (!r.passed)
                    return 1;
            return 0;
        }
    } catch (const slc::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const slc::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
