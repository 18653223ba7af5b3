#include "alley/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace alley {

double utility(VehicleType vtype, double f, const UtilityParams& params) {
    double threshold = vtype == VehicleType::Unselfish ? params.threshold_unselfish
                                                       : params.threshold_selfish;
    if (f <= threshold) return params.plateau;
    return std::max(0.0, params.plateau - params.slope * (f - threshold));
}

double expected_elapsed_time_vs(double my_elapsed, int my_passed, int opp_passed, Action action,
                                const AlleyConfig& config) {
    double remaining = config.length - my_passed;
    double opp_clears = 2.0 * config.length - opp_passed;
    switch (action) {
        case Action::Forward: return my_elapsed + remaining;
        case Action::Backward: return my_elapsed + opp_clears;
        case Action::Wait: return my_elapsed + 0.5 * remaining + 0.5 * opp_clears + 1.0;
    }
    throw std::logic_error("invalid action");
}

double expected_elapsed_time_two_vehicle(const VehicleState& me, const VehicleState& opponent,
                                         Action action, const AlleyConfig& config) {
    if (me.direction == opponent.direction)
        throw std::invalid_argument("two-vehicle estimate requires an opposing vehicle");
    if (me.exited || opponent.exited)
        throw std::invalid_argument("two-vehicle estimate requires unexited vehicles");
    return expected_elapsed_time_vs(static_cast<double>(me.elapsed_time), me.passed_distance,
                                    opponent.passed_distance, action, config);
}

double expected_elapsed_time_central(const VehicleState& me, int x_jstar, Action action,
                                     const AlleyConfig& config) {
    if (action == Action::Wait)
        throw std::invalid_argument("central authority never issues Wait");
    int a = action_value(action);
    double base = static_cast<double>(me.elapsed_time) + (config.length - me.passed_distance);
    double detour = (1 - a) / 2.0 * (config.length - x_jstar + me.passed_distance);
    return base + detour;
}

namespace {

struct Mover {
    bool active = false;    // unexited at slot start
    bool exiting = false;   // resolved move crosses the far end
    int coord = 0;          // current coordinate
    int target = 0;         // proposed coordinate after the slot
    Action action = Action::Wait;
    Direction dir = Direction::Eastbound;
    int passed = 0;

    bool moving() const { return target != coord; }
};

bool opposite(const Mover& a, const Mover& b) { return a.dir != b.dir; }

}  // namespace

StepResult apply_actions(std::span<const VehicleState> states, std::span<const Action> actions,
                         const AlleyConfig& config, int slot) {
    if (states.size() != actions.size())
        throw std::invalid_argument("apply_actions: one action per vehicle required");
    const int n = static_cast<int>(states.size());
    const int L = config.length;

    std::vector<Mover> m(n);
    for (int i = 0; i < n; ++i) {
        const VehicleState& v = states[i];
        m[i].active = !v.exited;
        m[i].coord = coordinate(v, L);
        m[i].target = m[i].coord;
        m[i].action = actions[i];
        m[i].dir = v.direction;
        m[i].passed = v.passed_distance;
        if (!m[i].active) continue;
        int dx = action_value(actions[i]);
        if (actions[i] == Action::Backward && v.passed_distance <= 0) {
            // Holds at the mouth / in the staging line unless pushed below.
            continue;
        }
        m[i].target = m[i].coord + heading_sign(v.direction) * dx;
    }

    // Backing chains: a held vehicle at or beyond its entrance gives way one
    // cell when a same-direction backer needs its cell.
    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            if (!m[i].active || m[i].action != Action::Backward) continue;
            if (m[i].moving() || m[i].passed > 0) continue;
            for (int j = 0; j < n; ++j) {
                if (j == i || !m[j].active || m[j].dir != m[i].dir) continue;
                if (m[j].action == Action::Backward && m[j].moving() && m[j].target == m[i].coord) {
                    m[i].target = m[i].coord - heading_sign(m[i].dir);
                    changed = true;
                    break;
                }
            }
        }
    }

    auto crosses_far_end = [&](const Mover& v) {
        return v.dir == Direction::Eastbound ? v.target >= L : v.target <= 0;
    };
    for (int i = 0; i < n; ++i)
        if (m[i].active && m[i].moving()) m[i].exiting = crosses_far_end(m[i]);

    // Conflict resolution to a fixed point. Reverting a mover (or cancelling
    // an exit) can only create new blockers, so the loop terminates.
    std::set<std::pair<int, int>> collision_pairs;
    auto collide = [&](int a, int b) {
        m[a].target = m[a].coord;
        m[a].exiting = false;
        m[b].target = m[b].coord;
        m[b].exiting = false;
        collision_pairs.insert({std::min(a, b), std::max(a, b)});
    };

    for (bool changed = true; changed;) {
        changed = false;
        for (int i = 0; i < n; ++i) {
            if (!m[i].active) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!m[j].active) continue;
                Mover& a = m[i];
                Mover& b = m[j];
                if (a.exiting && b.exiting) continue;
                if (a.exiting != b.exiting) {
                    // Head-on swap across the exit edge: the opposing vehicle
                    // enters from the exit cell as the exiter crosses it.
                    Mover& e = a.exiting ? a : b;
                    Mover& o = a.exiting ? b : a;
                    if (opposite(e, o) && o.moving() && o.target == e.coord &&
                        o.coord == e.target) {
                        collide(i, j);
                        changed = true;
                    }
                    continue;
                }
                if (opposite(a, b)) {
                    bool same_cell = a.target == b.target;
                    bool swap = a.moving() && b.moving() && a.target == b.coord &&
                                b.target == a.coord;
                    if ((same_cell && (a.moving() || b.moving())) || swap) {
                        collide(i, j);
                        changed = true;
                    }
                    continue;
                }
                // Same direction: queueing, never a cost.
                if (a.moving() && b.moving() && a.target == b.coord && b.target == a.coord) {
                    a.target = a.coord;
                    b.target = b.coord;
                    changed = true;
                } else if (a.target == b.target) {
                    if (a.moving() && b.moving()) {
                        // Converging on one empty cell: the forward mover wins.
                        Mover& loser = a.action == Action::Forward ? b : a;
                        loser.target = loser.coord;
                    } else if (a.moving()) {
                        a.target = a.coord;
                    } else if (b.moving()) {
                        b.target = b.coord;
                    } else {
                        continue;  // both stationary on distinct cells; unreachable
                    }
                    changed = true;
                }
            }
        }
    }

    // Merge overlapping collision pairs; each participant pays k once.
    std::vector<int> group(n, -1);
    std::vector<CollisionEvent> events;
    for (const auto& [a, b] : collision_pairs) {
        int ga = group[a], gb = group[b];
        if (ga < 0 && gb < 0) {
            group[a] = group[b] = static_cast<int>(events.size());
            events.push_back({slot, {a, b}, config.collision_cost});
        } else if (ga < 0) {
            group[a] = gb;
            events[gb].vehicle_ids.push_back(a);
        } else if (gb < 0) {
            group[b] = ga;
            events[ga].vehicle_ids.push_back(b);
        } else if (ga != gb) {
            for (int v : events[gb].vehicle_ids) {
                group[v] = ga;
                events[ga].vehicle_ids.push_back(v);
            }
            events[gb].vehicle_ids.clear();
        }
    }
    std::erase_if(events, [](const CollisionEvent& e) { return e.vehicle_ids.empty(); });
    for (CollisionEvent& e : events) {
        std::sort(e.vehicle_ids.begin(), e.vehicle_ids.end());
        for (int& idx : e.vehicle_ids) idx = states[idx].id;
    }

    StepResult result;
    result.states.assign(states.begin(), states.end());
    for (int i = 0; i < n; ++i) {
        if (!m[i].active) continue;
        VehicleState& v = result.states[i];
        v.passed_distance = v.direction == Direction::Eastbound ? m[i].target : L - m[i].target;
        v.elapsed_time += 1;
        if (group[i] >= 0) v.elapsed_time += config.collision_cost;
        if (m[i].exiting) v.exited = true;
    }
    result.collisions = std::move(events);

    check_world_invariants(result.states, config);
    return result;
}

void check_world_invariants(std::span<const VehicleState> states, const AlleyConfig& config) {
    const int n = static_cast<int>(states.size());
    for (int i = 0; i < n; ++i) {
        if (states[i].exited) continue;
        int c = coordinate(states[i], config.length);
        if (c < -n || c > config.length + n)
            throw std::logic_error("coordinate out of bounds for vehicle " +
                                   std::to_string(states[i].id));
        for (int j = i + 1; j < n; ++j) {
            if (states[j].exited) continue;
            if (c == coordinate(states[j], config.length))
                throw std::logic_error("vehicles " + std::to_string(states[i].id) + " and " +
                                       std::to_string(states[j].id) + " share a cell");
        }
    }
}

}  // namespace alley
