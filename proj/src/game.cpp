#include "alley/game.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "alley/dynamics.hpp"

namespace alley {

namespace {

constexpr double kEqTol = 1e-9;

double best_reply_value(const Eigen::Vector3d& utilities) { return utilities.maxCoeff(); }

}  // namespace

double max_unilateral_gain(const BimatrixGame& game, const EquilibriumProfile& profile) {
    Eigen::Vector3d row_values = game.row * profile.col.probs;  // per row action
    Eigen::Vector3d col_values = game.col.transpose() * profile.row.probs;
    double row_current = profile.row.probs.dot(row_values);
    double col_current = profile.col.probs.dot(col_values);
    return std::max(best_reply_value(row_values) - row_current,
                    best_reply_value(col_values) - col_current);
}

namespace {

// All pure equilibria, then payoff-dominant selection. Ties resolve to the
// first profile in Forward/Wait/Backward scan order, which is what makes the
// selection a usable convention between two vehicles solving the same game.
bool find_pure_equilibrium(const BimatrixGame& g, EquilibriumProfile& out) {
    double best_sum = -1e300;
    double best_min = -1e300;
    int best_a = -1, best_b = -1;
    for (int a = 0; a < kNumActions; ++a) {
        for (int b = 0; b < kNumActions; ++b) {
            bool row_ok = g.row(a, b) >= g.row.col(b).maxCoeff() - kEqTol;
            bool col_ok = g.col(a, b) >= g.col.row(a).maxCoeff() - kEqTol;
            if (!row_ok || !col_ok) continue;
            double sum = g.row(a, b) + g.col(a, b);
            double lo = std::min(g.row(a, b), g.col(a, b));
            if (sum > best_sum + kEqTol ||
                (sum > best_sum - kEqTol && lo > best_min + kEqTol)) {
                best_sum = sum;
                best_min = lo;
                best_a = a;
                best_b = b;
            }
        }
    }
    if (best_a < 0) return false;
    out.row = MixedStrategy::pure(action_from_index(best_a));
    out.col = MixedStrategy::pure(action_from_index(best_b));
    return true;
}

std::vector<int> mask_members(int mask) {
    std::vector<int> members;
    for (int i = 0; i < kNumActions; ++i)
        if (mask & (1 << i)) members.push_back(i);
    return members;
}

// Solves for the mixer's weights that make the responder indifferent across
// its support: unknowns are the weights plus the responder's value.
bool indifference_weights(const Eigen::Matrix3d& responder_payoff, const std::vector<int>& mixer,
                          const std::vector<int>& responder, bool mixer_is_row,
                          Eigen::Vector3d& weights, double& value) {
    int nm = static_cast<int>(mixer.size());
    int nr = static_cast<int>(responder.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nr + 1, nm + 1);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nr + 1);
    for (int r = 0; r < nr; ++r) {
        for (int m = 0; m < nm; ++m)
            A(r, m) = mixer_is_row ? responder_payoff(mixer[m], responder[r])
                                   : responder_payoff(responder[r], mixer[m]);
        A(r, nm) = -1.0;  // responder's value
    }
    A.row(nr).head(nm).setOnes();
    rhs(nr) = 1.0;

    Eigen::VectorXd x = A.colPivHouseholderQr().solve(rhs);
    if (!x.allFinite()) return false;

    weights.setZero();
    for (int m = 0; m < nm; ++m) {
        if (x(m) < -1e-7) return false;
        weights[mixer[m]] = std::max(0.0, x(m));
    }
    double total = weights.sum();
    if (total < 1e-12) return false;
    weights /= total;
    value = x(nm);
    return true;
}

bool try_support_pair(const BimatrixGame& g, int row_mask, int col_mask,
                      EquilibriumProfile& out) {
    std::vector<int> rs = mask_members(row_mask);
    std::vector<int> cs = mask_members(col_mask);

    EquilibriumProfile candidate;
    double col_value = 0.0, row_value = 0.0;
    if (!indifference_weights(g.col, rs, cs, /*mixer_is_row=*/true, candidate.row.probs,
                              col_value))
        return false;
    if (!indifference_weights(g.row, cs, rs, /*mixer_is_row=*/false, candidate.col.probs,
                              row_value))
        return false;
    if (!candidate.row.is_valid(1e-7) || !candidate.col.is_valid(1e-7)) return false;
    if (max_unilateral_gain(g, candidate) > kEqTol) return false;
    out = candidate;
    return true;
}

}  // namespace

EquilibriumProfile solve_bimatrix(const BimatrixGame& game) {
    EquilibriumProfile profile;
    if (find_pure_equilibrium(game, profile)) return profile;

    // Support pairs by total size, then mask order; pure/pure is covered above.
    std::vector<std::pair<int, int>> pairs;
    for (int rm = 1; rm < 8; ++rm)
        for (int cm = 1; cm < 8; ++cm)
            if (std::popcount(unsigned(rm)) + std::popcount(unsigned(cm)) > 2)
                pairs.emplace_back(rm, cm);
    std::stable_sort(pairs.begin(), pairs.end(), [](auto a, auto b) {
        return std::popcount(unsigned(a.first)) + std::popcount(unsigned(a.second)) <
               std::popcount(unsigned(b.first)) + std::popcount(unsigned(b.second));
    });
    for (const auto& [rm, cm] : pairs)
        if (try_support_pair(game, rm, cm, profile)) return profile;

    throw std::logic_error("solve_bimatrix: no equilibrium found in a finite game");
}

double contact_penalty(const AlleyConfig& config) {
    return config.collision_cost +
           config.standoff_slots * (config.collision_cost + 1.0);
}

bool joint_contact(int gap, Action mine, Action theirs, bool my_forward_exits,
                   bool their_forward_exits) {
    if (gap <= 0) return false;  // already past each other
    bool i_leave = mine == Action::Forward && my_forward_exits;
    bool they_leave = theirs == Action::Forward && their_forward_exits;
    if (i_leave && they_leave) return false;
    if (i_leave) return theirs == Action::Forward && gap == 1;
    if (they_leave) return mine == Action::Forward && gap == 1;
    return gap - action_value(mine) - action_value(theirs) <= 0;
}

BimatrixGame build_two_vehicle_game(const VehicleState& east, const VehicleState& west,
                                    const UtilityParams& params, const AlleyConfig& config) {
    if (east.direction != Direction::Eastbound || west.direction != Direction::Westbound)
        throw std::invalid_argument("canonical game expects an east row player and west column player");
    int gap = coordinate(west, config.length) - coordinate(east, config.length);
    double penalty = contact_penalty(config);
    bool east_exits = east.passed_distance + 1 >= config.length;
    bool west_exits = west.passed_distance + 1 >= config.length;

    // Payoffs are evaluated on incremental finish times (the player's own
    // accumulated elapsed time removed). The accumulated time is a common
    // constant across that player's actions, so the equilibrium structure is
    // the intended one, and the zero clip of the utility cannot saturate all
    // entries as an episode ages.
    BimatrixGame g;
    for (int a = 0; a < kNumActions; ++a) {
        for (int b = 0; b < kNumActions; ++b) {
            Action mine = action_from_index(a);
            Action theirs = action_from_index(b);
            // Joints that leave the standoff unresolved carry its expected
            // cost: collisions burn slots plus k, mutual waiting burns slots.
            double extra = 0.0;
            if (joint_contact(gap, mine, theirs, east_exits, west_exits))
                extra = penalty;
            else if (gap > 0 && mine == Action::Wait && theirs == Action::Wait)
                extra = config.standoff_slots;
            double f_east = expected_elapsed_time_vs(0.0, east.passed_distance,
                                                     west.passed_distance, mine, config) +
                            extra;
            double f_west = expected_elapsed_time_vs(0.0, west.passed_distance,
                                                     east.passed_distance, theirs, config) +
                            extra;
            g.row(a, b) = utility(east.vtype, f_east, params);
            g.col(a, b) = utility(west.vtype, f_west, params);
        }
    }
    return g;
}

MixedStrategy solve_two_vehicle_game(const VehicleState& me, const VehicleState& opponent,
                                     const UtilityParams& params, const AlleyConfig& config) {
    if (me.direction == opponent.direction)
        throw std::invalid_argument("two-vehicle game requires opposing directions");
    if (me.exited || opponent.exited)
        throw std::invalid_argument("two-vehicle game requires unexited vehicles");
    int dist = std::abs(coordinate(me, config.length) - coordinate(opponent, config.length));
    if (dist >= config.sensing_range)
        throw std::invalid_argument("two-vehicle game requires vehicles within sensing range");

    const VehicleState& east = me.direction == Direction::Eastbound ? me : opponent;
    const VehicleState& west = me.direction == Direction::Eastbound ? opponent : me;
    EquilibriumProfile profile = solve_bimatrix(build_two_vehicle_game(east, west, params, config));
    return me.direction == Direction::Eastbound ? profile.row : profile.col;
}

Action best_response_pure(std::span<const ActionEvaluation> evals) {
    if (evals.size() != kNumActions)
        throw std::invalid_argument("best_response_pure expects one evaluation per action");
    std::array<const ActionEvaluation*, kNumActions> by_action{};
    for (const ActionEvaluation& e : evals) {
        int idx = action_index(e.action);
        if (by_action[idx] != nullptr)
            throw std::invalid_argument("best_response_pure: duplicate action evaluation");
        by_action[idx] = &e;
    }
    int best = 0;
    for (int i = 1; i < kNumActions; ++i)
        if (by_action[i]->utility > by_action[best]->utility) best = i;
    return action_from_index(best);
}

}  // namespace alley
