#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace alley {

// Per-slot action of a vehicle. Integer encoding is +1 / 0 / -1.
enum class Action : int { Forward = 0, Wait = 1, Backward = 2 };

inline constexpr int kNumActions = 3;

inline int action_value(Action a) {
    switch (a) {
        case Action::Forward: return +1;
        case Action::Wait: return 0;
        case Action::Backward: return -1;
    }
    throw std::logic_error("invalid action");
}

// Index in the fixed order Forward, Wait, Backward. This order is also the
// deterministic tie-break order used by every argmax in the strategy layer.
inline int action_index(Action a) { return static_cast<int>(a); }

inline Action action_from_index(int i) {
    if (i < 0 || i >= kNumActions) throw std::invalid_argument("action index out of range");
    return static_cast<Action>(i);
}

inline std::string to_string(Action a) {
    switch (a) {
        case Action::Forward: return "Forward";
        case Action::Wait: return "Wait";
        case Action::Backward: return "Backward";
    }
    return "?";
}

enum class Direction { Eastbound, Westbound };

inline std::string to_string(Direction d) {
    return d == Direction::Eastbound ? "east" : "west";
}

// Vehicle type: unselfish (UR, high) tolerates a longer expected elapsed time
// before its payoff starts to decay; selfish (SR, low) does not.
enum class VehicleType { Unselfish, Selfish };

inline std::string to_string(VehicleType t) {
    return t == VehicleType::Unselfish ? "UR" : "SR";
}

struct VehicleState {
    int id = 0;
    Direction direction = Direction::Eastbound;
    // Cells traversed from the vehicle's own entrance. Negative values mean
    // the vehicle has backed out of the alley mouth into the staging line
    // outside its own entrance.
    int passed_distance = 0;
    // Slots spent so far, including collision penalties. Frozen on exit.
    std::int64_t elapsed_time = 0;
    VehicleType vtype = VehicleType::Unselfish;
    bool exited = false;
};

// Absolute coordinate on the alley axis. Eastbound origin is 0, westbound
// origin is L; eastbound travel increases the coordinate.
inline int coordinate(const VehicleState& v, int length) {
    return v.direction == Direction::Eastbound ? v.passed_distance
                                               : length - v.passed_distance;
}

// +1 if forward motion increases the coordinate, -1 otherwise.
inline int heading_sign(Direction d) { return d == Direction::Eastbound ? +1 : -1; }

struct AlleyConfig {
    int length = 20;              // L, in cells
    int collision_cost = 10;      // k, slots added per collision participant
    int sensing_range = 3;        // D, strict-inequality detection radius
    int comm_range = 6;           // broadcast radius in cells
    double movement_slot_seconds = 3.0;  // reporting only
    double comm_slot_seconds = 1.0;      // reporting only
    int safety_horizon = 200;     // slots before an episode is cut off
    // Extra standoff slots a vehicle expects a contact to cost when pricing
    // collision outcomes in its decision layer (physics still charges k once
    // per collision slot).
    double standoff_slots = 5.0;

    void validate() const {
        if (length < 2) throw std::invalid_argument("length_L must be >= 2");
        if (collision_cost < 0) throw std::invalid_argument("collision_cost_k must be >= 0");
        if (sensing_range < 1) throw std::invalid_argument("sensing_range_D must be >= 1");
        if (comm_range < sensing_range)
            throw std::invalid_argument("comm_range must be >= sensing_range_D");
        if (safety_horizon <= 2 * length)
            throw std::invalid_argument("safety_horizon must exceed 2 * length_L");
        if (standoff_slots < 0) throw std::invalid_argument("standoff_slots must be >= 0");
    }

    static AlleyConfig with_length(int len) {
        AlleyConfig c;
        c.length = len;
        c.safety_horizon = 10 * len;
        return c;
    }
};

// Block-plus-triangle payoff: flat at plateau up to the type's threshold,
// then linear decay, clipped at zero.
struct UtilityParams {
    double plateau = 10.0;
    double threshold_unselfish = 20.0;  // defaults to L when built from a scenario
    double threshold_selfish = 10.0;    // defaults to L/2
    double slope = 0.125;

    void validate() const {
        if (slope <= 0) throw std::invalid_argument("utility slope must be > 0");
        if (threshold_unselfish < threshold_selfish)
            throw std::invalid_argument("threshold_UR must be >= threshold_SR");
    }

    static UtilityParams for_length(int length) {
        UtilityParams p;
        p.threshold_unselfish = static_cast<double>(length);
        p.threshold_selfish = length / 2.0;
        return p;
    }
};

struct ActionEvaluation {
    Action action = Action::Forward;
    double expected_elapsed_time = 0.0;  // f, absolute finish-time estimate
    double utility = 0.0;                // u(vtype, f)
};

struct CollisionEvent {
    int slot = 0;
    std::vector<int> vehicle_ids;  // >= 2 participants
    int cost = 0;                  // equals collision_cost exactly
};

}  // namespace alley
