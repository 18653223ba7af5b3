#include <doctest.h>

#include "alley/dynamics.hpp"
#include "alley/strategy.hpp"

using namespace alley;

namespace {

VehicleState vehicle(int id, Direction dir, int passed, VehicleType t = VehicleType::Selfish,
                     std::int64_t elapsed = 0) {
    VehicleState v;
    v.id = id;
    v.direction = dir;
    v.passed_distance = passed;
    v.vtype = t;
    v.elapsed_time = elapsed;
    return v;
}

NeighborModel opposing_neighbor(int x_opp, int gap, const TypeBelief& belief) {
    NeighborModel n;
    n.vehicle_id = 9;
    n.ahead = true;
    n.opposing = true;
    n.gap = gap;
    n.passed_distance = x_opp;
    n.belief = belief;
    return n;
}

TypeBelief point_action(Action a) {
    TypeBelief b;
    b.p_unselfish = 0.0;
    b.if_selfish = MixedStrategy::pure(a);
    b.if_unselfish = MixedStrategy::pure(a);
    return b;
}

}  // namespace

TEST_CASE("bayes response to a surely-backing opponent is forward") {
    AlleyConfig config = AlleyConfig::with_length(20);
    UtilityParams params = UtilityParams::for_length(20);
    BeliefProfile beliefs;
    beliefs.neighbors.push_back(opposing_neighbor(5, 7, point_action(Action::Backward)));
    VehicleState me = vehicle(0, Direction::Eastbound, 8);
    CHECK(best_response_bayes(me, beliefs, params, config) == Action::Forward);
}

TEST_CASE("bayes expectation matches hand enumeration of the two-outcome sum") {
    AlleyConfig config = AlleyConfig::with_length(20);
    UtilityParams params = UtilityParams::for_length(20);

    TypeBelief belief;
    belief.p_unselfish = 0.5;
    belief.if_unselfish = MixedStrategy::pure(Action::Backward);
    belief.if_selfish = MixedStrategy::pure(Action::Forward);

    VehicleState me = vehicle(0, Direction::Eastbound, 8, VehicleType::Selfish);
    int x_opp = 5;
    int gap = (20 - x_opp) - 8;  // coordinates 8 and 15
    BeliefProfile beliefs;
    beliefs.neighbors.push_back(opposing_neighbor(x_opp, gap, belief));

    double penalty = contact_penalty(config);
    double best = -1.0;
    Action best_action = Action::Forward;
    for (Action a : {Action::Forward, Action::Wait, Action::Backward}) {
        double f_base = expected_elapsed_time_vs(0.0, 8, x_opp, a, config);
        double u_vs_backward = utility(me.vtype, f_base, params);
        double f_vs_forward = f_base + (joint_contact(gap, a, Action::Forward) ? penalty : 0.0);
        double u_vs_forward = utility(me.vtype, f_vs_forward, params);
        double expected = 0.5 * u_vs_backward + 0.5 * u_vs_forward;
        if (expected > best) {
            best = expected;
            best_action = a;
        }
    }
    CHECK(best_response_bayes(me, beliefs, params, config) == best_action);
}

TEST_CASE("bayes expectation is invariant to relabeling symmetric neighbors") {
    AlleyConfig config = AlleyConfig::with_length(20);
    UtilityParams params = UtilityParams::for_length(20);
    TypeBelief prior = PolicyParams::default_type_prior();
    VehicleState me = vehicle(0, Direction::Eastbound, 8);

    BeliefProfile ab;
    ab.neighbors.push_back(opposing_neighbor(9, 3, prior));
    ab.neighbors.push_back(opposing_neighbor(7, 5, prior));
    BeliefProfile ba;
    ba.neighbors.push_back(ab.neighbors[1]);
    ba.neighbors.push_back(ab.neighbors[0]);
    CHECK(best_response_bayes(me, ab, params, config) ==
          best_response_bayes(me, ba, params, config));
}

TEST_CASE("malformed beliefs are rejected") {
    AlleyConfig config = AlleyConfig::with_length(20);
    UtilityParams params = UtilityParams::for_length(20);
    TypeBelief broken;
    broken.if_selfish.probs = Eigen::Vector3d(0.9, 0.9, 0.9);
    BeliefProfile beliefs;
    beliefs.neighbors.push_back(opposing_neighbor(5, 7, broken));
    CHECK_THROWS_AS(best_response_bayes(vehicle(0, Direction::Eastbound, 8), beliefs, params,
                                        config),
                    std::invalid_argument);
}

TEST_CASE("nothing sensed means forward under every decentralized policy") {
    AlleyConfig config = AlleyConfig::with_length(20);
    PolicyParams params;
    params.utility = UtilityParams::for_length(20);
    VehicleState me = vehicle(0, Direction::Eastbound, 3);
    SensingResult nothing;
    for (PolicyKind p : {PolicyKind::Random, PolicyKind::GameNoComm, PolicyKind::GameCommTypes,
                         PolicyKind::GameCommTypesState}) {
        Rng rng(11);
        CHECK(decide(p, me, nothing, {}, rng, params, config) == Action::Forward);
    }
}

TEST_CASE("random policy is reproducible for a fixed seed") {
    AlleyConfig config = AlleyConfig::with_length(20);
    PolicyParams params;
    SensingResult sensed;
    sensed.detected.push_back({1, 2, Side::Ahead});
    VehicleState me = vehicle(0, Direction::Eastbound, 9);
    Rng a(123), b(123);
    for (int i = 0; i < 32; ++i)
        CHECK(decide(PolicyKind::Random, me, sensed, {}, a, params, config) ==
              decide(PolicyKind::Random, me, sensed, {}, b, params, config));
}

TEST_CASE("central policy cannot be decided per vehicle") {
    AlleyConfig config = AlleyConfig::with_length(20);
    PolicyParams params;
    Rng rng(1);
    CHECK_THROWS_AS(decide(PolicyKind::CentralAuthority, vehicle(0, Direction::Eastbound, 1),
                           SensingResult{}, {}, rng, params, config),
                    std::invalid_argument);
}

TEST_CASE("a type message sharpens beliefs exactly like a point mass") {
    AlleyConfig config = AlleyConfig::with_length(20);
    PolicyParams params;
    params.utility = UtilityParams::for_length(20);
    params.decision_noise = 0.0;

    VehicleState me = vehicle(0, Direction::Eastbound, 9, VehicleType::Selfish);
    VehicleState opp = vehicle(1, Direction::Westbound, 9, VehicleType::Unselfish);  // coord 11
    SensingResult sensed;
    sensed.detected.push_back({1, 2, Side::Ahead});
    std::vector<Message> inbox{type_only_message(opp, 0, 1)};

    Rng rng(3);
    Action via_policy =
        decide(PolicyKind::GameCommTypes, me, sensed, inbox, rng, params, config);

    BeliefProfile beliefs =
        build_beliefs(me, sensed, inbox, PolicyKind::GameCommTypes, params, config);
    REQUIRE(beliefs.neighbors.size() == 1);
    CHECK(beliefs.neighbors[0].belief.p_unselfish == doctest::Approx(1.0));
    CHECK(via_policy == best_response_bayes(me, beliefs, params.utility, config));
}

TEST_CASE("central plan gives forward to the most advanced group") {
    AlleyConfig config = AlleyConfig::with_length(20);
    std::vector<VehicleState> states{vehicle(0, Direction::Eastbound, 8),
                                     vehicle(1, Direction::Westbound, 5)};
    std::vector<Action> actions = plan_central(states, config);
    CHECK(actions[0] == Action::Forward);
    CHECK(actions[1] == Action::Backward);
}

TEST_CASE("a lone group is sent forward") {
    AlleyConfig config = AlleyConfig::with_length(20);
    std::vector<VehicleState> states{vehicle(0, Direction::Westbound, 2),
                                     vehicle(1, Direction::Westbound, 5)};
    std::vector<Action> actions = plan_central(states, config);
    CHECK(actions[0] == Action::Forward);
    CHECK(actions[1] == Action::Forward);
}

TEST_CASE("cross-group ties go to the eastbound group") {
    AlleyConfig config = AlleyConfig::with_length(20);
    std::vector<VehicleState> states{vehicle(0, Direction::Westbound, 6),
                                     vehicle(1, Direction::Eastbound, 6)};
    std::vector<Action> actions = plan_central(states, config);
    CHECK(actions[1] == Action::Forward);
    CHECK(actions[0] == Action::Backward);
}

TEST_CASE("central planning requires a live vehicle") {
    AlleyConfig config = AlleyConfig::with_length(20);
    VehicleState gone = vehicle(0, Direction::Eastbound, 20);
    gone.exited = true;
    std::vector<VehicleState> states{gone};
    CHECK_THROWS_AS(plan_central(states, config), std::invalid_argument);
}

TEST_CASE("central objective matches the closed-form prediction") {
    AlleyConfig config = AlleyConfig::with_length(20);
    std::vector<VehicleState> states{vehicle(0, Direction::Eastbound, 3),
                                     vehicle(1, Direction::Westbound, 8)};
    CHECK(central_predicted_objective(states, config) == doctest::Approx(32.0));
}

TEST_CASE("opponent summary tracks the least progressed opponent") {
    std::vector<VehicleState> states{vehicle(0, Direction::Eastbound, 3),
                                     vehicle(1, Direction::Westbound, 8),
                                     vehicle(2, Direction::Westbound, 2)};
    auto summary = summarize_opponents(states, Direction::Eastbound);
    REQUIRE(summary.has_value());
    CHECK(summary->x_jstar == 2);
    CHECK(summary->opposing_count == 2);
    CHECK_FALSE(summarize_opponents(states, Direction::Westbound)->x_jstar == 8);
    CHECK_FALSE(summarize_opponents({states.begin(), states.begin() + 1}, Direction::Eastbound)
                    .has_value());
}

TEST_CASE("an adjacent same-direction leader gates the forward estimate") {
    AlleyConfig config = AlleyConfig::with_length(20);
    UtilityParams params = UtilityParams::for_length(20);
    VehicleState me = vehicle(0, Direction::Eastbound, 8);

    // Opponent far enough that forwarding is clean; the gate decides whether
    // forward is priced as a move or as a queued wait.
    NeighborModel opp = opposing_neighbor(5, 7, point_action(Action::Backward));

    NeighborModel moving_leader;
    moving_leader.vehicle_id = 2;
    moving_leader.ahead = true;
    moving_leader.opposing = false;
    moving_leader.gap = 1;
    moving_leader.passed_distance = 9;
    moving_leader.belief = point_action(Action::Forward);

    NeighborModel parked_leader = moving_leader;
    parked_leader.belief = point_action(Action::Wait);

    BeliefProfile flowing;
    flowing.neighbors = {opp, moving_leader};
    BeliefProfile queued;
    queued.neighbors = {opp, parked_leader};

    // Either way Forward remains the argmax (a blocked Forward converts to a
    // free Wait), so the gate must not flip the decision here.
    CHECK(best_response_bayes(me, flowing, params, config) == Action::Forward);
    CHECK(best_response_bayes(me, queued, params, config) == Action::Forward);
}

TEST_CASE("full-state followers join the front's retreat wave") {
    AlleyConfig config = AlleyConfig::with_length(8);
    PolicyParams params;
    params.utility = UtilityParams::for_length(8);
    params.decision_noise = 0.0;

    // West queue me@6 <- leader@5 <- front@4, eastbound opponent at 3.
    VehicleState me = vehicle(0, Direction::Westbound, 2, VehicleType::Unselfish);
    VehicleState leader = vehicle(1, Direction::Westbound, 3, VehicleType::Unselfish);
    VehicleState front = vehicle(2, Direction::Westbound, 4, VehicleType::Unselfish);
    VehicleState opp = vehicle(3, Direction::Eastbound, 3, VehicleType::Selfish);
    std::vector<VehicleState> all{me, leader, front, opp};

    SensingResult sensed = sense(me, all, config);
    std::vector<Message> inbox{type_and_state_message(leader, 0, 1),
                               type_and_state_message(front, 0, 1),
                               type_and_state_message(opp, 0, 1)};
    Rng rng(5);
    Action mine = decide(PolicyKind::GameCommTypesState, me, sensed, inbox, rng, params, config);

    MixedStrategy front_strategy = solve_two_vehicle_game(front, opp, params.utility, config);
    if (front_strategy.is_degenerate() && front_strategy.mode() == Action::Backward) {
        CHECK(mine == Action::Backward);  // wave reaches the packed follower
    } else {
        CHECK(mine == Action::Forward);
    }
}

TEST_CASE("a point-mass belief reduces bayes to the pure best response") {
    AlleyConfig config = AlleyConfig::with_length(20);
    UtilityParams params = UtilityParams::for_length(20);
    VehicleState me = vehicle(0, Direction::Eastbound, 8, VehicleType::Selfish);
    int x_opp = 9;
    int gap = (20 - x_opp) - 8;  // coordinates 8 and 11

    for (Action realized : {Action::Forward, Action::Wait, Action::Backward}) {
        BeliefProfile beliefs;
        beliefs.neighbors.push_back(opposing_neighbor(x_opp, gap, point_action(realized)));

        std::vector<ActionEvaluation> evals;
        for (Action a : {Action::Forward, Action::Wait, Action::Backward}) {
            ActionEvaluation e;
            e.action = a;
            e.expected_elapsed_time = expected_elapsed_time_vs(0.0, 8, x_opp, a, config);
            if (joint_contact(gap, a, realized))
                e.expected_elapsed_time += contact_penalty(config);
            else if (a == Action::Wait && realized == Action::Wait)
                e.expected_elapsed_time += config.standoff_slots;
            e.utility = utility(me.vtype, e.expected_elapsed_time, params);
            evals.push_back(e);
        }
        CHECK(best_response_bayes(me, beliefs, params, config) == best_response_pure(evals));
    }
}
