#pragma once

#include <Eigen/Dense>
#include <span>

#include "alley/rng.hpp"
#include "alley/types.hpp"

namespace alley {

// Probability distribution over the three actions, in Forward/Wait/Backward
// order.
struct MixedStrategy {
    Eigen::Vector3d probs = Eigen::Vector3d::Zero();

    double forward() const { return probs[0]; }
    double wait() const { return probs[1]; }
    double backward() const { return probs[2]; }

    static MixedStrategy pure(Action a) {
        MixedStrategy s;
        s.probs[action_index(a)] = 1.0;
        return s;
    }

    bool is_valid(double tol = 1e-9) const {
        return probs.minCoeff() >= -tol && std::abs(probs.sum() - 1.0) <= tol;
    }

    bool is_degenerate(double tol = 1e-9) const { return probs.maxCoeff() >= 1.0 - tol; }

    // The pure action carrying (almost) all mass; Forward/Wait/Backward order
    // breaks ties.
    Action mode() const {
        int best = 0;
        for (int i = 1; i < kNumActions; ++i)
            if (probs[i] > probs[best]) best = i;
        return action_from_index(best);
    }

    Action sample(Rng& rng) const {
        double u = rng.uniform01();
        double acc = 0.0;
        for (int i = 0; i < kNumActions; ++i) {
            acc += probs[i];
            if (u < acc) return action_from_index(i);
        }
        return Action::Backward;
    }
};

// 3x3 bimatrix in row-player perspective: row(i, j) is the row player's
// utility when the row player takes action i and the column player action j;
// col(i, j) is the column player's utility in the same cell.
struct BimatrixGame {
    Eigen::Matrix3d row = Eigen::Matrix3d::Zero();
    Eigen::Matrix3d col = Eigen::Matrix3d::Zero();
};

struct EquilibriumProfile {
    MixedStrategy row;
    MixedStrategy col;
};

// Largest expected-utility gain either player can obtain by unilateral
// deviation from the profile. Zero (within tolerance) certifies a Nash
// equilibrium.
double max_unilateral_gain(const BimatrixGame& game, const EquilibriumProfile& profile);

// Finds a Nash equilibrium of the 3x3 bimatrix. Pure equilibria are preferred
// (selected by total payoff, then by the worse-off player's payoff, then by
// Forward/Wait/Backward scan order, so that two vehicles solving the same
// canonical game pick the same profile); otherwise support enumeration with
// small least-squares solves. Throws std::logic_error if no equilibrium
// passes verification.
EquilibriumProfile solve_bimatrix(const BimatrixGame& game);

// Decision-layer price of one contact: the immediate collision charge plus
// the slots a standoff is expected to burn before it clears.
double contact_penalty(const AlleyConfig& config);

// True when the joint move closes the gap between two approaching opposing
// vehicles to zero or past each other (same-cell or swap contact). A forward
// move that crosses the mover's far end leaves the lane and only collides
// with an opposing forward move across the same edge (the exit-edge swap),
// mirroring the movement rules.
bool joint_contact(int gap, Action mine, Action theirs, bool my_forward_exits = false,
                   bool their_forward_exits = false);

// Builds the canonical two-vehicle game between an eastbound row player and a
// westbound column player from exact states: f per cell from the two-vehicle
// formulas, plus the contact penalty on cells whose joint move collides.
BimatrixGame build_two_vehicle_game(const VehicleState& east, const VehicleState& west,
                                    const UtilityParams& params, const AlleyConfig& config);

// Solves the game between `me` and one sensed opposing vehicle and returns
// my mixed strategy. The game is canonicalized (eastbound = row player), so
// both vehicles derive the same profile and coordinate on the same
// equilibrium.
MixedStrategy solve_two_vehicle_game(const VehicleState& me, const VehicleState& opponent,
                                     const UtilityParams& params, const AlleyConfig& config);

// Pure best response over one evaluation per action; ties broken
// Forward > Wait > Backward.
Action best_response_pure(std::span<const ActionEvaluation> evals);

}  // namespace alley
