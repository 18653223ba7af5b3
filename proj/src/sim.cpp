#include "alley/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include "alley/dynamics.hpp"
#include "alley/oracle.hpp"

namespace alley {

void Scenario::validate() const {
    config.validate();
    comm_cfg.validate();
    policy.utility.validate();
    if (east_positions.empty() && west_positions.empty())
        throw std::invalid_argument("scenario needs at least one vehicle");
    if (type_prior_unselfish < 0.0 || type_prior_unselfish > 1.0)
        throw std::invalid_argument("type_prior must be within [0,1]");
    if (types && static_cast<int>(types->size()) != vehicle_count())
        throw std::invalid_argument("types list must cover every vehicle");
    std::set<int> coords;
    for (int x : east_positions) {
        if (x < 0 || x >= config.length)
            throw std::invalid_argument("east position out of [0, L)");
        if (!coords.insert(x).second)
            throw std::invalid_argument("initial coordinates must be distinct");
    }
    for (int x : west_positions) {
        if (x < 0 || x >= config.length)
            throw std::invalid_argument("west position out of [0, L)");
        if (!coords.insert(config.length - x).second)
            throw std::invalid_argument("initial coordinates must be distinct");
    }
    if (policy.decision_noise < 0.0 || policy.decision_noise > 1.0)
        throw std::invalid_argument("decision_noise must be within [0,1]");
}

std::vector<VehicleState> Scenario::initial_states() const {
    std::vector<VehicleState> states;
    Rng type_rng = Rng::derive(seed, 0x7E);
    int id = 0;
    auto add = [&](Direction dir, int x) {
        VehicleState v;
        v.id = id;
        v.direction = dir;
        v.passed_distance = x;
        v.vtype = types ? (*types)[id]
                        : (type_rng.bernoulli(type_prior_unselfish) ? VehicleType::Unselfish
                                                                    : VehicleType::Selfish);
        states.push_back(v);
        ++id;
    };
    for (int x : east_positions) add(Direction::Eastbound, x);
    for (int x : west_positions) add(Direction::Westbound, x);
    return states;
}

std::int64_t EpisodeResult::max_elapsed() const {
    std::int64_t m = 0;
    for (const VehicleOutcome& v : vehicles) m = std::max(m, v.elapsed_time);
    return m;
}

double EpisodeResult::mean_elapsed() const {
    if (vehicles.empty()) return 0.0;
    double sum = 0.0;
    for (const VehicleOutcome& v : vehicles) sum += static_cast<double>(v.elapsed_time);
    return sum / vehicles.size();
}

namespace {

bool uses_comms(PolicyKind policy) {
    return policy == PolicyKind::GameCommTypes || policy == PolicyKind::GameCommTypesState;
}

}  // namespace

EpisodeResult run_episode(const Scenario& scenario, PolicyKind policy) {
    scenario.validate();
    std::vector<VehicleState> states = scenario.initial_states();
    const int n = static_cast<int>(states.size());

    std::vector<Rng> vehicle_rng;
    vehicle_rng.reserve(n);
    for (int i = 0; i < n; ++i) vehicle_rng.push_back(Rng::derive(scenario.seed, 1 + i));
    std::vector<std::uint32_t> sequence(n, 0);

    EpisodeResult episode;
    int slot = 0;
    bool all_exited = false;
    while (slot < scenario.config.safety_horizon && !all_exited) {
        SlotMarker marker = slot_beacon(++slot);

        std::vector<SensingResult> sensed(n);
        for (int i = 0; i < n; ++i)
            if (!states[i].exited) sensed[i] = sense(states[i], states, scenario.config);

        DeliveryMap inboxes;
        if (uses_comms(policy)) {
            std::vector<Message> outgoing;
            for (int i = 0; i < n; ++i) {
                if (states[i].exited || sensed[i].detected.empty()) continue;
                outgoing.push_back(policy == PolicyKind::GameCommTypesState
                                       ? type_and_state_message(states[i], sequence[i]++,
                                                                marker.slot)
                                       : type_only_message(states[i], sequence[i]++, marker.slot));
            }
            Rng comm_rng = Rng::derive(scenario.seed, 0xC0, static_cast<std::uint64_t>(marker.slot));
            inboxes = broadcast_round(outgoing, states, scenario.comm_cfg, scenario.config,
                                      comm_rng);
        }

        std::vector<Action> actions(n, Action::Wait);
        if (policy == PolicyKind::CentralAuthority) {
            actions = plan_central(states, scenario.config);
        } else {
            static const std::vector<Message> kNoMail;
            for (int i = 0; i < n; ++i) {
                if (states[i].exited) continue;
                auto it = inboxes.find(states[i].id);
                const std::vector<Message>& mail = it == inboxes.end() ? kNoMail : it->second;
                actions[i] = decide(policy, states[i], sensed[i], mail, vehicle_rng[i],
                                    scenario.policy, scenario.config);
            }
        }

        StepResult step = apply_actions(states, actions, scenario.config, marker.slot);
        states = std::move(step.states);
        for (CollisionEvent& e : step.collisions) episode.collisions.push_back(std::move(e));

        all_exited = std::all_of(states.begin(), states.end(),
                                 [](const VehicleState& v) { return v.exited; });
    }

    episode.slots_used = slot;
    episode.terminated = all_exited;
    for (const VehicleState& v : states) {
        VehicleOutcome out;
        out.id = v.id;
        out.direction = v.direction;
        out.vtype = v.vtype;
        out.elapsed_time = v.elapsed_time;
        for (const CollisionEvent& e : episode.collisions)
            out.collision_count += std::count(e.vehicle_ids.begin(), e.vehicle_ids.end(), v.id);
        episode.vehicles.push_back(out);
    }
    return episode;
}

ExperimentResult run_experiment(const Scenario& scenario_template, PolicyKind policy,
                                int replications, std::uint64_t base_seed, int jobs) {
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
    ExperimentResult result;
    result.episodes.resize(replications);

    auto worker = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            Scenario scenario = scenario_template;
            scenario.seed = base_seed + static_cast<std::uint64_t>(i);
            result.episodes[i] = {i, scenario.seed, run_episode(scenario, policy)};
        }
    };
    jobs = std::max(1, std::min(jobs, replications));
    if (jobs == 1) {
        worker(0, replications);
    } else {
        std::vector<std::thread> pool;
        int chunk = (replications + jobs - 1) / jobs;
        for (int j = 0; j < jobs; ++j) {
            int begin = j * chunk;
            int end = std::min(replications, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (std::thread& t : pool) t.join();
    }

    ExperimentStats& stats = result.stats;
    stats.policy = policy;
    stats.episodes = replications;
    double mean_sum = 0.0, max_sum = 0.0;
    for (const EpisodeSummary& e : result.episodes) {
        if (!e.result.terminated) continue;
        stats.completed += 1;
        mean_sum += e.result.mean_elapsed();
        max_sum += static_cast<double>(e.result.max_elapsed());
    }
    if (stats.completed > 0) {
        stats.mean_elapsed_per_vehicle = mean_sum / stats.completed;
        stats.max_elapsed_mean = max_sum / stats.completed;
    }
    stats.non_termination_rate =
        static_cast<double>(replications - stats.completed) / replications;
    return result;
}

PoaResult optimum_denominator(const Scenario& scenario_template) {
    PoaResult poa;
    std::vector<VehicleState> initial = scenario_template.initial_states();
    for (VehicleState& v : initial) v.elapsed_time = 0;
    if (oracle_feasible(initial, scenario_template.config)) {
        poa.denominator = minmax_oracle(initial, scenario_template.config,
                                        scenario_template.config.safety_horizon)
                              .value;
    } else {
        Scenario central = scenario_template;
        EpisodeResult realized = run_episode(central, PolicyKind::CentralAuthority);
        if (!realized.terminated)
            throw std::runtime_error("central plan failed to clear the road");
        poa.denominator = realized.max_elapsed();
        poa.used_fallback_denominator = true;
    }
    if (poa.denominator < 1)
        throw std::logic_error("optimum must be at least one slot");
    return poa;
}

PoaResult price_of_anarchy(const Scenario& scenario_template, PolicyKind policy,
                           int replications, std::uint64_t base_seed, int jobs) {
    PoaResult poa = optimum_denominator(scenario_template);
    ExperimentResult experiment =
        run_experiment(scenario_template, policy, replications, base_seed, jobs);
    double sum = 0.0;
    for (const EpisodeSummary& e : experiment.episodes) {
        std::int64_t cost = e.result.terminated
                                ? e.result.max_elapsed()
                                : scenario_template.config.safety_horizon;
        if (!e.result.terminated) poa.horizon_episodes += 1;
        sum += static_cast<double>(cost) / static_cast<double>(poa.denominator);
    }
    poa.value = sum / replications;
    return poa;
}

PairedComparison paired_difference(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("paired samples must align");
    PairedComparison cmp;
    cmp.pairs = static_cast<int>(a.size());
    if (cmp.pairs == 0) return cmp;
    double mean = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) mean += a[i] - b[i];
    mean /= cmp.pairs;
    double var = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i] - mean;
        var += d * d;
    }
    var = cmp.pairs > 1 ? var / (cmp.pairs - 1) : 0.0;
    cmp.mean_difference = mean;
    cmp.ci_half_width = 1.96 * std::sqrt(var / cmp.pairs);
    return cmp;
}

}  // namespace alley
