#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "alley/comms.hpp"
#include "alley/strategy.hpp"
#include "alley/types.hpp"

namespace alley {

// One experiment instance: geometry, comms, payoff shape, initial placements
// and the episode seed. Types are either assigned explicitly (east vehicles
// first, then west) or resampled per episode from a Bernoulli prior.
struct Scenario {
    AlleyConfig config;
    CommConfig comm_cfg;
    PolicyParams policy;
    std::vector<int> east_positions;  // initial passed distances from coordinate 0
    std::vector<int> west_positions;  // initial passed distances from coordinate L
    std::optional<std::vector<VehicleType>> types;
    double type_prior_unselfish = 0.5;
    std::uint64_t seed = 0;

    int vehicle_count() const {
        return static_cast<int>(east_positions.size() + west_positions.size());
    }

    void validate() const;
    std::vector<VehicleState> initial_states() const;  // resolves types from the seed
};

struct VehicleOutcome {
    int id = 0;
    Direction direction = Direction::Eastbound;
    VehicleType vtype = VehicleType::Unselfish;
    std::int64_t elapsed_time = 0;
    int collision_count = 0;
};

struct EpisodeResult {
    std::vector<VehicleOutcome> vehicles;
    int slots_used = 0;
    std::vector<CollisionEvent> collisions;
    bool terminated = false;  // false when the safety horizon cut the episode

    std::int64_t max_elapsed() const;
    double mean_elapsed() const;
};

// Runs the slotted loop: beacon, sensing, broadcast (comm policies only),
// decisions (or one central plan), movement resolution; stops when everyone
// has exited or the safety horizon hits. Deterministic given (scenario.seed,
// policy).
EpisodeResult run_episode(const Scenario& scenario, PolicyKind policy);

struct ExperimentStats {
    PolicyKind policy = PolicyKind::Random;
    int episodes = 0;
    int completed = 0;
    double mean_elapsed_per_vehicle = 0.0;  // over completed episodes
    double max_elapsed_mean = 0.0;          // over completed episodes
    double non_termination_rate = 0.0;
    std::optional<double> poa;
    bool poa_used_fallback_denominator = false;
    int poa_horizon_episodes = 0;
};

struct EpisodeSummary {
    int replication = 0;
    std::uint64_t seed = 0;
    EpisodeResult result;
};

struct ExperimentResult {
    ExperimentStats stats;
    std::vector<EpisodeSummary> episodes;
};

// Independent episodes with seeds base_seed + replication index; types are
// resampled per episode when the scenario carries a prior. Episodes may run
// on several threads; aggregation is ordered by replication index.
ExperimentResult run_experiment(const Scenario& scenario_template, PolicyKind policy,
                                int replications, std::uint64_t base_seed, int jobs = 1);

struct PoaResult {
    double value = 1.0;
    bool used_fallback_denominator = false;  // central realized cost, not the oracle
    int horizon_episodes = 0;                // episodes that contributed the horizon value
    std::int64_t denominator = 0;
};

// Min-max optimum of the template's initial placement (oracle when the
// instance fits its guards, otherwise the central plan's realized cost,
// flagged). Types never enter: the optimum is a property of the geometry.
PoaResult optimum_denominator(const Scenario& scenario_template);

// Mean over episodes of (max elapsed under the policy) / (min-max optimum).
// Episodes cut at the safety horizon contribute the horizon value.
PoaResult price_of_anarchy(const Scenario& scenario_template, PolicyKind policy,
                           int replications, std::uint64_t base_seed, int jobs = 1);

// Paired-sample mean difference with a normal-approximation 95% interval.
struct PairedComparison {
    double mean_difference = 0.0;
    double ci_half_width = 0.0;
    int pairs = 0;

    bool significantly_positive() const {
        return pairs > 1 && mean_difference - ci_half_width > 0.0;
    }
};

PairedComparison paired_difference(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace alley
