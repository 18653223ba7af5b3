#pragma once

#include <optional>
#include <span>
#include <vector>

#include "alley/comms.hpp"
#include "alley/game.hpp"
#include "alley/rng.hpp"
#include "alley/types.hpp"

namespace alley {

enum class PolicyKind { Random, GameNoComm, GameCommTypes, GameCommTypesState, CentralAuthority };

std::string to_string(PolicyKind p);
std::optional<PolicyKind> policy_from_string(const std::string& name);

// Distribution over a neighbor's type together with the action mixture the
// neighbor is believed to play conditional on each type.
struct TypeBelief {
    double p_unselfish = 0.5;
    MixedStrategy if_unselfish;
    MixedStrategy if_selfish;

    void validate() const {
        if (p_unselfish < -1e-9 || p_unselfish > 1.0 + 1e-9 || !if_unselfish.is_valid() ||
            !if_selfish.is_valid())
            throw std::invalid_argument("malformed beliefs");
    }

    static TypeBelief point_mass(VehicleType t, const TypeBelief& prior) {
        TypeBelief b = prior;
        b.p_unselfish = t == VehicleType::Unselfish ? 1.0 : 0.0;
        return b;
    }
};

// One modeled neighbor, built from sensing plus whatever messages said about
// it. Without a state message a sensed-ahead vehicle is modeled as opposing
// (the binding assumption in a single lane).
struct NeighborModel {
    int vehicle_id = 0;
    bool ahead = true;
    bool opposing = true;
    int gap = 1;               // coordinate distance to the neighbor
    int passed_distance = 0;   // neighbor's progress in its own frame
    bool exact_state = false;  // true when fixed by a TypeAndState message
    bool type_known = false;
    VehicleType known_type = VehicleType::Selfish;  // meaningful when type_known
    TypeBelief belief;
};

struct BeliefProfile {
    std::vector<NeighborModel> neighbors;

    void validate() const {
        for (const NeighborModel& n : neighbors) n.belief.validate();
    }
};

// Everything a decentralized policy needs besides the world: payoff shape,
// the prior over strangers, and the tremble rate.
struct PolicyParams {
    UtilityParams utility;
    // Tie-row action mixtures per type; doubles as the tremble behavior.
    TypeBelief default_prior = default_type_prior();
    // Probability per decision of playing a draw from the vehicle's own
    // type-conditional mixture instead of the computed action. Breaks the
    // symmetric standoffs a memoryless argmax can never leave.
    double decision_noise = 0.1;

    // Believed action mixture of a neighbor: vehicles expect the more
    // progressed party to push and the less progressed one to give way (the
    // priority rule of the central authority, applied through local
    // inference). priority_sign is the neighbor's standing: +1 when it has
    // made more progress than the decider, -1 when less, 0 on ties, where
    // the tie row comes from default_prior.
    MixedStrategy believed_mixture(VehicleType t, int priority_sign) const;

    static TypeBelief default_type_prior();
};

struct OpponentSummary {
    int x_jstar = 0;  // minimum passed distance among non-exited opposing vehicles
    int opposing_count = 0;
};

std::optional<OpponentSummary> summarize_opponents(std::span<const VehicleState> states,
                                                   Direction my_direction);

// Belief about one neighbor from the decider at x_self: type point mass when
// known, prior otherwise; action mixtures from the priority convention.
TypeBelief neighbor_belief(const PolicyParams& params, std::optional<VehicleType> type,
                           int x_neighbor, int x_self);

// Expected-utility argmax over own actions, enumerating the joint
// (type, action) outcomes of the binding neighbors: the nearest opposing
// vehicle ahead sets f (two-vehicle formulas plus the contact penalty on
// colliding joints); a same-direction vehicle directly ahead gates Forward.
// Independent outcomes of farther neighbors marginalize out exactly.
// Utilities are evaluated on incremental finish times (own elapsed time
// removed, a common constant per the argmax-invariance property). Ties break
// Forward > Wait > Backward.
Action best_response_bayes(const VehicleState& me, const BeliefProfile& beliefs,
                           const UtilityParams& params, const AlleyConfig& config);

// Builds the per-slot neighbor models a policy sees from sensing plus inbox.
// Under the full-state policy, state messages resolve headings and exact
// progress, including for messaged vehicles beyond sensing range.
BeliefProfile build_beliefs(const VehicleState& me, const SensingResult& sensed,
                            std::span<const Message> inbox, PolicyKind policy,
                            const PolicyParams& params, const AlleyConfig& config);

// Per-vehicle decision for the decentralized policies. Nothing sensed means
// Forward. CentralAuthority must go through plan_central instead.
Action decide(PolicyKind policy, const VehicleState& me, const SensingResult& sensed,
              std::span<const Message> inbox, Rng& rng, const PolicyParams& params,
              const AlleyConfig& config);

// Central authority: the group holding the maximum passed distance goes
// forward, the other group backward; ties go to the eastbound group.
std::vector<Action> plan_central(std::span<const VehicleState> states,
                                 const AlleyConfig& config);

// The min-max value the central plan predicts via the closed-form finish
// times: the prediction for the last escaping vehicle of the low-priority
// group (or of the only group when there is no opposition).
double central_predicted_objective(std::span<const VehicleState> states,
                                   const AlleyConfig& config);

}  // namespace alley
