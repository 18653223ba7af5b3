#pragma once

#include <span>
#include <utility>
#include <vector>

#include "alley/types.hpp"

namespace alley {

// Piecewise block-plus-triangle payoff over the expected elapsed time f:
// plateau while f is within the type's threshold, then linear decay to zero.
double utility(VehicleType vtype, double expected_elapsed_time, const UtilityParams& params);

// Expected absolute finish time of `me` against one opposing vehicle, per
// candidate action:
//   Forward  -> t_e + (L - x_me)
//   Backward -> t_e + (2L - x_opp)
//   Wait     -> t_e + 0.5 (L - x_me) + 0.5 (2L - x_opp) + 1
// Throws if the two vehicles travel in the same direction.
double expected_elapsed_time_two_vehicle(const VehicleState& me, const VehicleState& opponent,
                                         Action action, const AlleyConfig& config);

// Same formulas with passed distances given directly (used by the belief
// layer, where the opponent's state is an estimate rather than a VehicleState).
double expected_elapsed_time_vs(double my_elapsed, int my_passed, int opp_passed, Action action,
                                const AlleyConfig& config);

// Central-authority finish-time prediction:
//   f = t_e + (L - x) + ((1 - a) / 2) (L - x_jstar + x),  a in {+1, -1}.
// Wait is rejected: the central authority only issues forward or backward.
double expected_elapsed_time_central(const VehicleState& me, int x_jstar, Action action,
                                     const AlleyConfig& config);

struct StepResult {
    std::vector<VehicleState> states;
    std::vector<CollisionEvent> collisions;
};

// Advances the world by one slot.
//
// Resolution rules:
//  - A vehicle whose move would cross its far end (east coordinate >= L,
//    west <= 0) exits this slot; it does not contend for its target cell, so
//    it may leave through a mouth cell an opposing vehicle is parked on. A
//    head-on swap across the exit edge still collides.
//  - Backward at or beyond the own entrance holds position unless a
//    same-direction backer needs the cell, in which case the vehicle is
//    pushed one cell deeper into the staging line outside the mouth.
//  - A move into a cell that a same-direction vehicle occupies after the
//    slot becomes Wait (single lane, no passing). Two same-direction
//    vehicles converging on one empty cell: the forward mover wins.
//  - Opposite-direction vehicles that would share a cell or swap cells all
//    stay put and each pays collision_cost once for the slot; overlapping
//    pairs merge into one CollisionEvent.
//  - Every vehicle that was unexited at slot start ages one slot; exiting
//    vehicles freeze after the increment.
StepResult apply_actions(std::span<const VehicleState> states, std::span<const Action> actions,
                         const AlleyConfig& config, int slot = 0);

// Invariant check used by tests and the episode loop: no two non-exited
// vehicles share a cell, and all coordinates stay inside the alley plus its
// two staging lines. Throws std::logic_error on violation.
void check_world_invariants(std::span<const VehicleState> states, const AlleyConfig& config);

}  // namespace alley
