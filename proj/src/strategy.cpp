#include "alley/strategy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "alley/dynamics.hpp"

namespace alley {

std::string to_string(PolicyKind p) {
    switch (p) {
        case PolicyKind::Random: return "Random";
        case PolicyKind::GameNoComm: return "GameNoComm";
        case PolicyKind::GameCommTypes: return "GameCommTypes";
        case PolicyKind::GameCommTypesState: return "GameCommTypesState";
        case PolicyKind::CentralAuthority: return "CentralAuthority";
    }
    return "?";
}

std::optional<PolicyKind> policy_from_string(const std::string& name) {
    for (PolicyKind p : {PolicyKind::Random, PolicyKind::GameNoComm, PolicyKind::GameCommTypes,
                         PolicyKind::GameCommTypesState, PolicyKind::CentralAuthority})
        if (to_string(p) == name) return p;
    return std::nullopt;
}

TypeBelief PolicyParams::default_type_prior() {
    TypeBelief prior;
    prior.p_unselfish = 0.5;
    prior.if_unselfish.probs = Eigen::Vector3d(0.15, 0.35, 0.50);  // yields
    prior.if_selfish.probs = Eigen::Vector3d(0.70, 0.20, 0.10);    // pushes
    return prior;
}

MixedStrategy PolicyParams::believed_mixture(VehicleType t, int priority_sign) const {
    if (priority_sign == 0)
        return t == VehicleType::Unselfish ? default_prior.if_unselfish
                                           : default_prior.if_selfish;
    MixedStrategy m;
    if (priority_sign > 0)
        m.probs = t == VehicleType::Unselfish ? Eigen::Vector3d(0.70, 0.22, 0.08)
                                              : Eigen::Vector3d(0.85, 0.12, 0.03);
    else
        m.probs = t == VehicleType::Unselfish ? Eigen::Vector3d(0.03, 0.12, 0.85)
                                              : Eigen::Vector3d(0.08, 0.12, 0.80);
    return m;
}

std::optional<OpponentSummary> summarize_opponents(std::span<const VehicleState> states,
                                                   Direction my_direction) {
    OpponentSummary summary;
    bool found = false;
    for (const VehicleState& v : states) {
        if (v.exited || v.direction == my_direction) continue;
        summary.x_jstar = found ? std::min(summary.x_jstar, v.passed_distance)
                                : v.passed_distance;
        summary.opposing_count += 1;
        found = true;
    }
    if (!found) return std::nullopt;
    return summary;
}

namespace {

// Finish-time estimate when no opposing vehicle constrains the road: a lost
// slot costs one slot, a backward move the slot plus the cell back.
double free_run_estimate(const VehicleState& me, Action action, const AlleyConfig& config) {
    double remaining = config.length - me.passed_distance;
    switch (action) {
        case Action::Forward: return remaining;
        case Action::Wait: return remaining + 1.0;
        case Action::Backward: return remaining + 2.0;
    }
    throw std::logic_error("invalid action");
}

struct Outcome {
    double prob;
    Action action;
};

// The six (type, action) outcomes of one neighbor, flattened.
std::array<Outcome, 6> outcomes_of(const TypeBelief& belief) {
    std::array<Outcome, 6> out{};
    for (int a = 0; a < kNumActions; ++a) {
        out[a] = {belief.p_unselfish * belief.if_unselfish.probs[a], action_from_index(a)};
        out[3 + a] = {(1.0 - belief.p_unselfish) * belief.if_selfish.probs[a],
                      action_from_index(a)};
    }
    return out;
}

const NeighborModel* nearest_opposing_ahead(const BeliefProfile& beliefs) {
    const NeighborModel* best = nullptr;
    for (const NeighborModel& n : beliefs.neighbors)
        if (n.ahead && n.opposing && (!best || n.gap < best->gap)) best = &n;
    return best;
}

const NeighborModel* adjacent_same_direction_ahead(const BeliefProfile& beliefs) {
    for (const NeighborModel& n : beliefs.neighbors)
        if (n.ahead && !n.opposing && n.gap == 1) return &n;
    return nullptr;
}

int priority_sign(int neighbor_passed, int my_passed) {
    if (neighbor_passed > my_passed) return +1;
    if (neighbor_passed < my_passed) return -1;
    return 0;
}

}  // namespace

TypeBelief neighbor_belief(const PolicyParams& params, std::optional<VehicleType> type,
                           int x_neighbor, int x_self) {
    TypeBelief b;
    int standing = priority_sign(x_neighbor, x_self);
    b.if_unselfish = params.believed_mixture(VehicleType::Unselfish, standing);
    b.if_selfish = params.believed_mixture(VehicleType::Selfish, standing);
    b.p_unselfish = type ? (*type == VehicleType::Unselfish ? 1.0 : 0.0)
                         : params.default_prior.p_unselfish;
    return b;
}

Action best_response_bayes(const VehicleState& me, const BeliefProfile& beliefs,
                           const UtilityParams& params, const AlleyConfig& config) {
    if (me.exited) throw std::invalid_argument("exited vehicles do not act");
    beliefs.validate();

    const NeighborModel* opp = nearest_opposing_ahead(beliefs);
    const NeighborModel* gate = adjacent_same_direction_ahead(beliefs);
    double penalty = contact_penalty(config);
    bool my_forward_exits = me.passed_distance + 1 >= config.length;
    bool their_forward_exits = opp && opp->passed_distance + 1 >= config.length;

    double best_value = 0.0;
    Action best_action = Action::Forward;
    for (int ai = 0; ai < kNumActions; ++ai) {
        Action a = action_from_index(ai);
        double expected = 0.0;
        std::array<Outcome, 6> gate_outcomes =
            gate ? outcomes_of(gate->belief)
                 : std::array<Outcome, 6>{{{1.0, Action::Wait}}};
        for (const Outcome& g : gate_outcomes) {
            if (g.prob == 0.0) continue;
            Action effective = a;
            if (gate && a == Action::Forward && g.action != Action::Forward)
                effective = Action::Wait;  // queued behind a non-moving leader
            if (opp) {
                for (const Outcome& o : outcomes_of(opp->belief)) {
                    if (o.prob == 0.0) continue;
                    double f = expected_elapsed_time_vs(0.0, me.passed_distance,
                                                        opp->passed_distance, effective, config);
                    if (joint_contact(opp->gap, effective, o.action, my_forward_exits,
                                      their_forward_exits))
                        f += penalty;
                    else if (effective == Action::Wait && o.action == Action::Wait)
                        f += config.standoff_slots;
                    expected += g.prob * o.prob * utility(me.vtype, f, params);
                }
            } else {
                expected += g.prob * utility(me.vtype, free_run_estimate(me, effective, config),
                                             params);
            }
        }
        if (ai == 0 || expected > best_value) {
            best_value = expected;
            best_action = a;
        }
    }
    return best_action;
}

BeliefProfile build_beliefs(const VehicleState& me, const SensingResult& sensed,
                            std::span<const Message> inbox, PolicyKind policy,
                            const PolicyParams& params, const AlleyConfig& config) {
    BeliefProfile profile;
    const int L = config.length;
    int my_coord = coordinate(me, L);
    int sign = heading_sign(me.direction);
    const bool use_types = policy == PolicyKind::GameCommTypes ||
                           policy == PolicyKind::GameCommTypesState;
    const bool use_state = policy == PolicyKind::GameCommTypesState;

    auto belief_for = [&](std::optional<VehicleType> type, int x_estimate) {
        return neighbor_belief(params, type, x_estimate, me.passed_distance);
    };

    auto add_model = [&](int id, int obj_coord, const Message* msg) {
        NeighborModel model;
        model.vehicle_id = id;
        model.gap = std::abs(obj_coord - my_coord);
        model.ahead = (obj_coord - my_coord) * sign > 0;
        if (!model.ahead || model.gap == 0) return;  // behind: no path interaction

        std::optional<VehicleType> type;
        if (msg) {
            type = msg->vtype;
            model.type_known = true;
            model.known_type = msg->vtype;
            model.opposing = msg->direction != me.direction;
            if (use_state && msg->has_state) {
                model.passed_distance = msg->passed_distance;
                model.exact_state = true;
            } else if (model.opposing) {
                model.passed_distance = me.direction == Direction::Eastbound ? L - obj_coord
                                                                             : obj_coord;
            } else {
                // Same heading shares my frame.
                model.passed_distance = me.direction == Direction::Eastbound ? obj_coord
                                                                             : L - obj_coord;
            }
        } else {
            // No word from it: assume opposing, the binding case in a single
            // lane, and infer its progress from the geometry.
            model.opposing = true;
            model.passed_distance = me.direction == Direction::Eastbound ? L - obj_coord
                                                                         : obj_coord;
        }
        model.belief = belief_for(type, model.opposing ? model.passed_distance
                                                       : me.passed_distance);
        profile.neighbors.push_back(model);
    };

    auto message_from = [&](int id) -> const Message* {
        if (!use_types) return nullptr;
        const Message* found = nullptr;
        for (const Message& m : inbox)
            if (m.source_id == id) found = &m;
        return found;
    };

    for (const Detection& d : sensed.detected)
        add_model(d.vehicle_id, my_coord + (d.side == Side::Ahead ? sign : -sign) * d.distance,
                  message_from(d.vehicle_id));

    if (use_state) {
        // State messages also locate vehicles beyond sensing range.
        for (const Message& m : inbox) {
            if (!m.has_state) continue;
            bool seen = false;
            for (const Detection& d : sensed.detected) seen |= d.vehicle_id == m.source_id;
            if (seen) continue;
            int coord = m.direction == Direction::Eastbound ? m.passed_distance
                                                            : L - m.passed_distance;
            add_model(m.source_id, coord, &m);
        }
    } else if (use_types) {
        // A type beacon from an opposing vehicle that no rangefinder echo
        // matches means the contention sits just past our queue. Place it at
        // the binding spot, adjacent beyond the front of the own-direction
        // queue, so the retreat-wave prediction has an opponent to weigh.
        int front_gap = 0;
        bool have_opposing = false;
        for (const NeighborModel& n : profile.neighbors) {
            if (n.ahead && !n.opposing) front_gap = std::max(front_gap, n.gap);
            have_opposing |= n.opposing;
        }
        if (front_gap > 0 && !have_opposing) {
            const Message* beacon = nullptr;
            for (const Message& m : inbox) {
                if (m.direction == me.direction) continue;
                bool seen = false;
                for (const Detection& d : sensed.detected) seen |= d.vehicle_id == m.source_id;
                if (!seen && (!beacon || m.source_id < beacon->source_id)) beacon = &m;
            }
            if (beacon)
                add_model(beacon->source_id, my_coord + sign * (front_gap + 1), beacon);
        }
    }
    return profile;
}

namespace {

Action tremble(const VehicleState& me, const PolicyParams& params, Rng& rng) {
    const MixedStrategy& mixture = me.vtype == VehicleType::Unselfish
                                       ? params.default_prior.if_unselfish
                                       : params.default_prior.if_selfish;
    return mixture.sample(rng);
}

VehicleState from_model(const NeighborModel& model, Direction dir) {
    VehicleState v;
    v.id = model.vehicle_id;
    v.direction = dir;
    v.passed_distance = model.passed_distance;
    v.elapsed_time = 0;  // decisions run on incremental finish times
    v.vtype = model.type_known ? model.known_type : VehicleType::Selfish;
    return v;
}

Action play(const MixedStrategy& strategy, Rng& rng) {
    return strategy.is_degenerate() ? strategy.mode() : strategy.sample(rng);
}

// How one vehicle engages the opposing vehicle facing it: the full-state
// policy solves the exact game, the others best-respond to beliefs.
Action engage_opposing(PolicyKind policy, const VehicleState& self, const NeighborModel& opp,
                       const PolicyParams& params, const AlleyConfig& config, Rng* rng) {
    if (opp.gap >= config.sensing_range) return Action::Forward;  // not engaged yet
    if (policy == PolicyKind::GameCommTypesState && opp.type_known) {
        Direction opposite = self.direction == Direction::Eastbound ? Direction::Westbound
                                                                    : Direction::Eastbound;
        MixedStrategy strategy =
            solve_two_vehicle_game(self, from_model(opp, opposite), params.utility, config);
        if (rng) return play(strategy, *rng);
        return strategy.mode();  // deterministic prediction for the wave
    }
    BeliefProfile single;
    single.neighbors.push_back(opp);
    single.neighbors[0].belief = neighbor_belief(
        params, opp.type_known ? std::optional<VehicleType>(opp.known_type) : std::nullopt,
        opp.passed_distance, self.passed_distance);
    return best_response_bayes(self, single, params.utility, config);
}

// Queue-aware decision for the communicating policies: engage the nearest
// opposing vehicle directly, or, when own-direction traffic sits in between,
// follow the queue and join the retreat wave when the front vehicle's own
// decision is to give way.
Action decide_resolved(PolicyKind policy, const VehicleState& me, const BeliefProfile& beliefs,
                       const PolicyParams& params, const AlleyConfig& config, Rng& rng) {
    const NeighborModel* opp = nearest_opposing_ahead(beliefs);
    std::vector<const NeighborModel*> chain;
    for (const NeighborModel& n : beliefs.neighbors)
        if (n.ahead && !n.opposing && (!opp || n.gap < opp->gap)) chain.push_back(&n);
    std::sort(chain.begin(), chain.end(),
              [](const NeighborModel* a, const NeighborModel* b) { return a->gap < b->gap; });

    if (!opp) return Action::Forward;  // own-direction traffic only: queue up

    if (chain.empty()) return engage_opposing(policy, me, *opp, params, config, &rng);

    // Retreat wave: predict whether the front of our queue gives way; if so,
    // everyone packed behind it at unit gaps backs up in the same slot.
    const NeighborModel* front = chain.back();
    NeighborModel opp_from_front = *opp;
    opp_from_front.gap = opp->gap - front->gap;
    Action front_action = engage_opposing(policy, from_model(*front, me.direction),
                                          opp_from_front, params, config, nullptr);
    bool wave = front_action == Action::Backward;
    for (std::size_t i = chain.size(); wave && i-- > 1;)
        wave = chain[i]->gap - chain[i - 1]->gap == 1;
    if (wave) return chain.front()->gap == 1 ? Action::Backward : Action::Wait;
    return Action::Forward;  // queue up; blocked moves convert to Wait for free
}

}  // namespace

Action decide(PolicyKind policy, const VehicleState& me, const SensingResult& sensed,
              std::span<const Message> inbox, Rng& rng, const PolicyParams& params,
              const AlleyConfig& config) {
    if (policy == PolicyKind::CentralAuthority)
        throw std::invalid_argument("CentralAuthority decides via plan_central, not per vehicle");
    if (me.exited) throw std::invalid_argument("exited vehicles do not act");

    if (sensed.detected.empty()) return Action::Forward;

    if (policy == PolicyKind::Random)
        return action_from_index(static_cast<int>(rng.uniform_int(kNumActions)));

    BeliefProfile beliefs = build_beliefs(me, sensed, inbox, policy, params, config);

    bool anything_ahead = false;
    for (const NeighborModel& n : beliefs.neighbors) anything_ahead |= n.ahead;
    if (!anything_ahead) return Action::Forward;

    Action action;
    if (policy == PolicyKind::GameCommTypesState || policy == PolicyKind::GameCommTypes) {
        action = decide_resolved(policy, me, beliefs, params, config, rng);
    } else {
        action = best_response_bayes(me, beliefs, params.utility, config);
    }
    if (params.decision_noise > 0.0 && rng.bernoulli(params.decision_noise))
        action = tremble(me, params, rng);
    return action;
}

std::vector<Action> plan_central(std::span<const VehicleState> states,
                                 const AlleyConfig& config) {
    (void)config;
    int x_max = 0;
    bool east_has_max = false, west_has_max = false, any = false;
    for (const VehicleState& v : states) {
        if (v.exited) continue;
        if (!any || v.passed_distance > x_max) {
            x_max = v.passed_distance;
            east_has_max = west_has_max = false;
        }
        if (v.passed_distance == x_max) {
            (v.direction == Direction::Eastbound ? east_has_max : west_has_max) = true;
        }
        any = true;
    }
    if (!any) throw std::invalid_argument("plan_central: all vehicles exited");

    // Ties across groups break toward Eastbound.
    Direction high = east_has_max ? Direction::Eastbound : Direction::Westbound;
    std::vector<Action> actions(states.size(), Action::Wait);
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].exited) continue;
        actions[i] = states[i].direction == high ? Action::Forward : Action::Backward;
    }
    return actions;
}

double central_predicted_objective(std::span<const VehicleState> states,
                                   const AlleyConfig& config) {
    std::vector<Action> actions = plan_central(states, config);
    double objective = 0.0;
    bool low_found = false;
    double high_max = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].exited) continue;
        if (actions[i] == Action::Forward) {
            high_max = std::max(high_max, expected_elapsed_time_central(
                                              states[i], 0, Action::Forward, config));
        } else {
            auto opponents = summarize_opponents(states, states[i].direction);
            int x_jstar = opponents ? opponents->x_jstar : 0;
            objective = std::max(objective, expected_elapsed_time_central(
                                                states[i], x_jstar, Action::Backward, config));
            low_found = true;
        }
    }
    return low_found ? objective : high_max;
}

}  // namespace alley
