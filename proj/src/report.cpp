#include "alley/report.hpp"

#include <cstdio>
#include <iomanip>
#include <ostream>

#include <json.hpp>

namespace alley {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

const PolicyRun* find_run(const RunReport& report, PolicyKind policy) {
    for (const PolicyRun& run : report.runs)
        if (run.policy == policy) return &run;
    return nullptr;
}

}  // namespace

std::optional<double> RunReport::reduction_vs_random(PolicyKind policy) const {
    const PolicyRun* base = find_run(*this, PolicyKind::Random);
    const PolicyRun* run = find_run(*this, policy);
    if (!base || !run || policy == PolicyKind::Random) return std::nullopt;
    double baseline = base->experiment.stats.mean_elapsed_per_vehicle;
    if (base->experiment.stats.completed == 0 || run->experiment.stats.completed == 0 ||
        baseline <= 0.0)
        return std::nullopt;
    return 100.0 * (baseline - run->experiment.stats.mean_elapsed_per_vehicle) / baseline;
}

void write_csv(std::ostream& out, const RunReport& report) {
    out << "policy,replication,seed,vehicle_id,direction,vtype,elapsed_time,slots_used,"
           "collisions,terminated\n";
    for (const PolicyRun& run : report.runs) {
        for (const EpisodeSummary& e : run.experiment.episodes) {
            for (const VehicleOutcome& v : e.result.vehicles) {
                out << to_string(run.policy) << ',' << e.replication << ',' << e.seed << ','
                    << v.id << ',' << to_string(v.direction) << ',' << to_string(v.vtype) << ','
                    << v.elapsed_time << ',' << e.result.slots_used << ',' << v.collision_count
                    << ',' << (e.result.terminated ? "true" : "false") << '\n';
            }
        }
    }
}

void write_json(std::ostream& out, const RunReport& report) {
    nlohmann::ordered_json doc;
    doc["metadata"]["replications"] = report.config.replications;
    doc["metadata"]["seed"] = report.config.scenario.seed;
    doc["metadata"]["length_L"] = report.config.scenario.config.length;
    doc["metadata"]["collision_cost_k"] = report.config.scenario.config.collision_cost;
    if (report.config.preset) doc["metadata"]["preset_override"] = *report.config.preset;

    auto& rows = doc["rows"] = nlohmann::ordered_json::array();
    for (const PolicyRun& run : report.runs) {
        for (const EpisodeSummary& e : run.experiment.episodes) {
            for (const VehicleOutcome& v : e.result.vehicles) {
                rows.push_back({{"policy", to_string(run.policy)},
                                {"replication", e.replication},
                                {"seed", e.seed},
                                {"vehicle_id", v.id},
                                {"direction", to_string(v.direction)},
                                {"vtype", to_string(v.vtype)},
                                {"elapsed_time", v.elapsed_time},
                                {"slots_used", e.result.slots_used},
                                {"collisions", v.collision_count},
                                {"terminated", e.result.terminated}});
            }
        }
    }

    auto& summary = doc["summary"] = nlohmann::ordered_json::array();
    for (const PolicyRun& run : report.runs) {
        const ExperimentStats& s = run.experiment.stats;
        nlohmann::ordered_json entry{{"policy", to_string(run.policy)},
                                     {"episodes", s.episodes},
                                     {"completed", s.completed},
                                     {"non_termination_rate", s.non_termination_rate},
                                     {"mean_elapsed_per_vehicle", s.mean_elapsed_per_vehicle},
                                     {"max_elapsed_mean", s.max_elapsed_mean}};
        if (auto red = report.reduction_vs_random(run.policy)) entry["reduction_vs_random_pct"] = *red;
        if (run.poa) {
            entry["poa"] = run.poa->value;
            entry["poa_denominator"] = run.poa->denominator;
            entry["poa_denominator_is_central_fallback"] = run.poa->used_fallback_denominator;
            entry["poa_horizon_episodes"] = run.poa->horizon_episodes;
        }
        summary.push_back(entry);
    }
    out << doc.dump(2) << '\n';
}

void write_summary(std::ostream& out, const RunReport& report) {
    out << "policy              episodes completed non_term  mean_elapsed  max_elapsed";
    bool any_red = false, any_poa = false;
    for (const PolicyRun& run : report.runs) {
        any_red |= report.reduction_vs_random(run.policy).has_value();
        any_poa |= run.poa.has_value();
    }
    if (any_red) out << "  red_vs_random%";
    if (any_poa) out << "  PoA";
    out << '\n';
    for (const PolicyRun& run : report.runs) {
        const ExperimentStats& s = run.experiment.stats;
        out << std::left << std::setw(20) << to_string(run.policy) << std::right << std::setw(8)
            << s.episodes << std::setw(10) << s.completed << std::setw(9)
            << fixed(s.non_termination_rate, 4) << std::setw(14)
            << fixed(s.mean_elapsed_per_vehicle, 6) << std::setw(13) << fixed(s.max_elapsed_mean, 6);
        if (any_red) {
            auto red = report.reduction_vs_random(run.policy);
            out << std::setw(16) << (red ? fixed(*red, 6) : std::string("-"));
        }
        if (any_poa) {
            out << "  ";
            if (run.poa) {
                out << fixed(run.poa->value, 6);
                if (run.poa->used_fallback_denominator) out << " (vs central)";
            } else {
                out << "-";
            }
        }
        out << '\n';
    }
}

}  // namespace alley
