#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "alley/config_io.hpp"
#include "alley/sim.hpp"

namespace alley {

struct PolicyRun {
    PolicyKind policy = PolicyKind::Random;
    ExperimentResult experiment;
    std::optional<PoaResult> poa;
};

struct RunReport {
    RunConfig config;
    std::vector<PolicyRun> runs;

    // Mean elapsed reduction vs the Random baseline, in percent; only
    // meaningful when Random ran on the same seeds.
    std::optional<double> reduction_vs_random(PolicyKind policy) const;
};

// One row per (policy, replication, vehicle); the column set is fixed:
// policy,replication,seed,vehicle_id,direction,vtype,elapsed_time,slots_used,
// collisions,terminated
void write_csv(std::ostream& out, const RunReport& report);

void write_json(std::ostream& out, const RunReport& report);

// Human-readable per-policy table with reductions and PoA when present.
void write_summary(std::ostream& out, const RunReport& report);

}  // namespace alley
