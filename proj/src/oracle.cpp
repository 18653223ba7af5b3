#include "alley/oracle.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <unordered_map>

#include "alley/dynamics.hpp"

namespace alley {

namespace {

constexpr int kMaxVehicles = 4;
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

using ElapsedVec = std::array<std::int64_t, kMaxVehicles>;

std::uint64_t position_key(std::span<const VehicleState> states, int length) {
    std::uint64_t key = 0;
    for (const VehicleState& v : states) {
        std::uint64_t cell = v.exited ? 0xFFu
                                      : static_cast<std::uint64_t>(coordinate(v, length) +
                                                                   kMaxVehicles + 1);
        key = key << 9 | (cell & 0xFF) << 1 | (v.exited ? 1 : 0);
    }
    return key;
}

ElapsedVec elapsed_of(std::span<const VehicleState> states) {
    ElapsedVec e{};
    for (std::size_t i = 0; i < states.size(); ++i) e[i] = states[i].elapsed_time;
    return e;
}

bool dominates(const ElapsedVec& a, const ElapsedVec& b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] > b[i]) return false;
    return true;
}

std::int64_t lower_bound_value(std::span<const VehicleState> states, int length) {
    std::int64_t bound = 0;
    for (const VehicleState& v : states) {
        std::int64_t b = v.elapsed_time + (v.exited ? 0 : std::max(0, length - v.passed_distance));
        bound = std::max(bound, b);
    }
    return bound;
}

// Joint actions packed two bits per vehicle; exited vehicles stay at Wait so
// equivalent branches are expanded once.
void enumerate_joint_actions(std::span<const VehicleState> states,
                             std::vector<std::uint8_t>& codes) {
    codes.clear();
    codes.push_back(0);
    std::vector<std::uint8_t> next;
    for (std::size_t i = 0; i < states.size(); ++i) {
        next.clear();
        for (std::uint8_t base : codes) {
            if (states[i].exited) {
                next.push_back(static_cast<std::uint8_t>(base | action_index(Action::Wait) << (2 * i)));
            } else {
                for (int a = 0; a < kNumActions; ++a)
                    next.push_back(static_cast<std::uint8_t>(base | a << (2 * i)));
            }
        }
        codes.swap(next);
    }
}

std::vector<Action> decode_joint(std::uint8_t code, std::size_t n) {
    std::vector<Action> actions(n);
    for (std::size_t i = 0; i < n; ++i)
        actions[i] = action_from_index(code >> (2 * i) & 0x3);
    return actions;
}

struct SearchNode {
    std::vector<VehicleState> states;
    int parent = -1;
    std::uint8_t joint = 0;
};

}  // namespace

bool oracle_feasible(std::span<const VehicleState> states, const AlleyConfig& config) {
    return states.size() <= kMaxVehicles && config.length <= 8;
}

OracleResult minmax_oracle(std::span<const VehicleState> states, const AlleyConfig& config,
                           int horizon) {
    if (!oracle_feasible(states, config))
        throw std::invalid_argument("minmax_oracle: instance exceeds guard bounds (<=4 vehicles, L<=8)");
    if (horizon > config.safety_horizon)
        throw std::invalid_argument("minmax_oracle: horizon exceeds safety_horizon");
    const std::size_t n = states.size();

    std::vector<SearchNode> arena;
    arena.push_back({std::vector<VehicleState>(states.begin(), states.end()), -1, 0});

    std::unordered_map<std::uint64_t, std::vector<ElapsedVec>> pareto;
    pareto[position_key(states, config.length)].push_back(elapsed_of(states));

    std::vector<int> frontier{0};
    std::int64_t incumbent = kInf;
    int best_node = -1;

    std::vector<std::uint8_t> codes;
    for (int slot = 1; slot <= horizon && !frontier.empty(); ++slot) {
        std::vector<int> next_frontier;
        for (int idx : frontier) {
            // The arena may reallocate while expanding, so copy the state.
            std::vector<VehicleState> current = arena[idx].states;
            if (lower_bound_value(current, config.length) >= incumbent) continue;
            enumerate_joint_actions(current, codes);
            for (std::uint8_t code : codes) {
                std::vector<Action> actions = decode_joint(code, n);
                StepResult step = apply_actions(current, actions, config, slot);

                bool all_exited = std::all_of(step.states.begin(), step.states.end(),
                                              [](const VehicleState& v) { return v.exited; });
                if (all_exited) {
                    std::int64_t value = 0;
                    for (const VehicleState& v : step.states)
                        value = std::max(value, v.elapsed_time);
                    if (value < incumbent) {
                        incumbent = value;
                        arena.push_back({std::move(step.states), idx, code});
                        best_node = static_cast<int>(arena.size()) - 1;
                    }
                    continue;
                }
                if (lower_bound_value(step.states, config.length) >= incumbent) continue;

                std::uint64_t key = position_key(step.states, config.length);
                ElapsedVec elapsed = elapsed_of(step.states);
                auto& front = pareto[key];
                bool dominated = false;
                for (const ElapsedVec& seen : front)
                    if (dominates(seen, elapsed, n)) {
                        dominated = true;
                        break;
                    }
                if (dominated) continue;
                std::erase_if(front,
                              [&](const ElapsedVec& seen) { return dominates(elapsed, seen, n); });
                front.push_back(elapsed);

                arena.push_back({std::move(step.states), idx, code});
                next_frontier.push_back(static_cast<int>(arena.size()) - 1);
            }
        }
        frontier = std::move(next_frontier);
    }

    if (best_node < 0)
        throw std::runtime_error("minmax_oracle: no terminating schedule within horizon");

    OracleResult result;
    result.value = incumbent;
    for (int node = best_node; arena[node].parent >= 0; node = arena[node].parent)
        result.schedule.push_back(decode_joint(arena[node].joint, n));
    std::reverse(result.schedule.begin(), result.schedule.end());
    return result;
}

}  // namespace alley
