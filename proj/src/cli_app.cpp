#include "alley/cli_app.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "alley/oracle.hpp"
#include "alley/report.hpp"

namespace alley {

namespace {

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

void write_rows(const RunReport& report, const std::string& path, const std::string& format,
                std::ostream& err) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + path + "'");
    if (format == "json")
        write_json(out, report);
    else
        write_csv(out, report);
    err << "wrote " << format << " results to " << path << "\n";
}

RunReport execute(const RunConfig& config, int jobs) {
    RunReport report;
    report.config = config;
    std::optional<PoaResult> denominator;
    for (PolicyKind policy : config.policies) {
        PolicyRun run;
        run.policy = policy;
        run.experiment = run_experiment(config.scenario, policy, config.replications,
                                        config.scenario.seed, jobs);
        if (config.want_poa) {
            if (!denominator) denominator = optimum_denominator(config.scenario);
            PoaResult poa = *denominator;
            double sum = 0.0;
            for (const EpisodeSummary& e : run.experiment.episodes) {
                std::int64_t cost = e.result.terminated
                                        ? e.result.max_elapsed()
                                        : config.scenario.config.safety_horizon;
                if (!e.result.terminated) poa.horizon_episodes += 1;
                sum += static_cast<double>(cost) / static_cast<double>(poa.denominator);
            }
            poa.value = sum / run.experiment.episodes.size();
            run.poa = poa;
        }
        report.runs.push_back(std::move(run));
    }
    return report;
}

RunConfig fig5_config(int replications, std::uint64_t seed) {
    RunConfig config;
    config.preset = "fig5";
    config.scenario.config = AlleyConfig::with_length(20);
    config.scenario.policy.utility = UtilityParams::for_length(20);
    config.scenario.east_positions = {0};
    config.scenario.west_positions = {0};
    config.scenario.type_prior_unselfish = 0.5;
    config.scenario.seed = seed;
    config.policies = {PolicyKind::Random, PolicyKind::GameNoComm, PolicyKind::GameCommTypes,
                       PolicyKind::GameCommTypesState};
    config.replications = replications;
    return config;
}

RunConfig fig6_config(int vehicles_per_side, int replications, std::uint64_t seed) {
    RunConfig config;
    config.preset = "fig6";
    config.scenario.config = AlleyConfig::with_length(8);
    config.scenario.policy.utility = UtilityParams::for_length(8);
    for (int i = 0; i < vehicles_per_side; ++i) {
        config.scenario.east_positions.push_back(i);
        config.scenario.west_positions.push_back(i);
    }
    config.scenario.type_prior_unselfish = 0.5;
    config.scenario.seed = seed;
    config.policies = {PolicyKind::GameNoComm, PolicyKind::GameCommTypes,
                       PolicyKind::CentralAuthority};
    config.replications = replications;
    config.want_poa = true;
    // A fair non-termination budget scales with the instance: a flat horizon
    // would shrink the PoA saturation ceiling as the optimum grows.
    config.scenario.config.safety_horizon =
        10 * static_cast<int>(optimum_denominator(config.scenario).denominator);
    return config;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"narrow-alley vehicle game simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string format;
    int jobs = 1;

    CLI::App* cmd_run = app.add_subcommand("run", "run the experiments described by a config file");
    cmd_run->add_option("--config", config_path, "experiment config file")->required();
    cmd_run->add_option("--out", out_path, "result file (overrides run.output_path)");
    cmd_run->add_option("--format", format, "csv or json (overrides run.output_format)");
    cmd_run->add_option("--jobs", jobs, "parallel episode workers")->check(CLI::PositiveNumber);

    std::string preset_name;
    int max_vehicles = 4;
    int replications = -1;
    std::uint64_t seed = 1;
    CLI::App* cmd_preset =
        app.add_subcommand("preset", "run a canned experiment (fig5: elapsed-time comparison, "
                                     "fig6: price-of-anarchy sweep)");
    cmd_preset->add_option("name", preset_name, "fig5 or fig6")->required();
    cmd_preset->add_option("--max-vehicles", max_vehicles, "fig6: vehicles per side, 1..N")
        ->check(CLI::Range(1, 4));
    cmd_preset->add_option("--replications", replications, "episodes per policy");
    cmd_preset->add_option("--seed", seed, "base seed");
    cmd_preset->add_option("--out", out_path, "result file");
    cmd_preset->add_option("--format", format, "csv or json");
    cmd_preset->add_option("--jobs", jobs, "parallel episode workers")->check(CLI::PositiveNumber);

    CLI::App* cmd_oracle =
        app.add_subcommand("oracle", "print the min-max optimum for an oracle-sized instance");
    cmd_oracle->add_option("--config", config_path, "experiment config file")->required();

    std::vector<const char*> argv{"alley-game"};
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 1;
    }

    if (cmd_run->parsed()) {
        RunConfig config = load_config_file(config_path);
        if (!out_path.empty()) config.output_path = out_path;
        if (!format.empty()) config.output_format = format;
        config.validate();
        RunReport report = execute(config, jobs);
        write_rows(report, config.output_path, config.output_format, err);
        write_summary(out, report);
        return 0;
    }

    if (cmd_preset->parsed()) {
        if (preset_name == "fig5") {
            RunConfig config = fig5_config(replications > 0 ? replications : 10000, seed);
            if (!out_path.empty()) config.output_path = out_path;
            if (!format.empty()) config.output_format = format;
            RunReport report = execute(config, jobs);
            write_rows(report, config.output_path, config.output_format, err);
            write_summary(out, report);
            return 0;
        }
        if (preset_name == "fig6") {
            int reps = replications > 0 ? replications : 1000;
            out << "vehicles_per_side";
            RunConfig probe = fig6_config(1, reps, seed);
            for (PolicyKind p : probe.policies) out << "  PoA(" << to_string(p) << ")";
            out << "  denominator\n";
            RunReport combined;
            for (int count = 1; count <= max_vehicles; ++count) {
                RunConfig config = fig6_config(count, reps, seed);
                if (!format.empty()) config.output_format = format;
                RunReport report = execute(config, jobs);
                out << count;
                for (const PolicyRun& run : report.runs) {
                    char buf[64];
                    std::snprintf(buf, sizeof buf, "  %.6f%s", run.poa ? run.poa->value : 0.0,
                                  run.poa && run.poa->used_fallback_denominator ? "*" : "");
                    out << buf;
                }
                if (!report.runs.empty() && report.runs.front().poa)
                    out << "  " << report.runs.front().poa->denominator
                        << (report.runs.front().poa->used_fallback_denominator
                                ? " (central fallback)"
                                : " (oracle)");
                out << "\n";
                if (combined.runs.empty()) combined.config = config;
                for (PolicyRun& run : report.runs) combined.runs.push_back(std::move(run));
            }
            write_rows(combined, out_path, format.empty() ? "csv" : format, err);
            return 0;
        }
        err << "unknown preset '" << preset_name << "' (expected fig5 or fig6)\n";
        return 1;
    }

    if (cmd_oracle->parsed()) {
        RunConfig config = load_config_file(config_path);
        std::vector<VehicleState> initial = config.scenario.initial_states();
        OracleResult result =
            minmax_oracle(initial, config.scenario.config, config.scenario.config.safety_horizon);
        out << "min-max optimum: " << result.value << " slots over " << result.schedule.size()
            << " slots\n";
        for (std::size_t slot = 0; slot < result.schedule.size(); ++slot) {
            out << "slot " << slot + 1 << ":";
            for (std::size_t i = 0; i < result.schedule[slot].size(); ++i)
                out << " v" << i << "=" << to_string(result.schedule[slot][i]);
            out << "\n";
        }
        return 0;
    }
    return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        return dispatch(args, out, err);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace alley
