#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "alley/types.hpp"

namespace alley {

struct OracleResult {
    std::int64_t value = 0;  // exact min over schedules of the max final elapsed time
    std::vector<std::vector<Action>> schedule;  // one action vector per slot
};

// Exhaustive min-max search over joint action sequences, simulated through
// apply_actions, with dominance memoization: a (positions, exited) state
// already reached with componentwise <= elapsed times dominates. Ground truth
// for central-plan verification and PoA denominators at desk scale.
//
// Guards: at most 4 vehicles, length <= 8, horizon <= safety_horizon.
// Throws std::invalid_argument outside the guards and std::runtime_error when
// no schedule clears the road within the horizon.
OracleResult minmax_oracle(std::span<const VehicleState> states, const AlleyConfig& config,
                           int horizon);

// True when the instance fits the oracle's guard bounds.
bool oracle_feasible(std::span<const VehicleState> states, const AlleyConfig& config);

}  // namespace alley
