#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "alley/rng.hpp"
#include "alley/types.hpp"

namespace alley {

// Broadcast payloads. TypeOnly fuels the type-sharing policy; TypeAndState
// additionally carries the sender's exact progress and elapsed time. The
// sender's heading travels as envelope metadata next to its address, the way
// any V2V beacon identifies its group.
struct Message {
    int source_id = 0;
    Direction direction = Direction::Eastbound;
    std::uint32_t sequence = 0;  // monotone per source; (source_id, sequence) dedups
    int slot = 0;
    VehicleType vtype = VehicleType::Unselfish;
    bool has_state = false;
    int passed_distance = 0;
    std::int64_t elapsed_time = 0;
    int hop_count = 0;
};

inline Message type_only_message(const VehicleState& v, std::uint32_t seq, int slot) {
    Message msg;
    msg.source_id = v.id;
    msg.direction = v.direction;
    msg.sequence = seq;
    msg.slot = slot;
    msg.vtype = v.vtype;
    return msg;
}

inline Message type_and_state_message(const VehicleState& v, std::uint32_t seq, int slot) {
    Message msg = type_only_message(v, seq, slot);
    msg.has_state = true;
    msg.passed_distance = v.passed_distance;
    msg.elapsed_time = v.elapsed_time;
    return msg;
}

enum class Side { Ahead, Behind };

struct Detection {
    int vehicle_id = 0;
    int distance = 0;  // absolute coordinate distance, < sensing_range
    Side side = Side::Ahead;
};

struct SensingResult {
    std::vector<Detection> detected;  // ordered by distance, then id
};

struct CommConfig {
    double loss_probability = 0.0;  // per-hop, per-receiver Bernoulli loss
    bool relay_enabled = true;
    int max_hops = 4;

    void validate() const {
        if (loss_probability < 0.0 || loss_probability > 1.0)
            throw std::invalid_argument("loss_probability must be within [0,1]");
        if (max_hops < 1) throw std::invalid_argument("max_hops must be >= 1");
    }
};

// Range-limited detection: every non-exited vehicle whose coordinate distance
// from `me` is strictly below sensing_range, classified ahead/behind relative
// to me's heading. Reveals presence and distance only.
SensingResult sense(const VehicleState& me, std::span<const VehicleState> all,
                    const AlleyConfig& config);

using DeliveryMap = std::map<int, std::vector<Message>>;

// One synchronous broadcast exchange: direct delivery within comm_range, then
// flood relaying up to max_hops with (source_id, sequence) dedup. Each hop
// delivery independently fails with loss_probability. Vehicles never receive
// their own messages; exited vehicles neither receive nor relay.
DeliveryMap broadcast_round(std::span<const Message> outgoing,
                            std::span<const VehicleState> states, const CommConfig& comm_cfg,
                            const AlleyConfig& config, Rng& rng);

// Global slot counter handed to every vehicle; kept as an operation so a
// distributed synchronization scheme could replace it.
struct SlotMarker {
    int slot = 0;
};

inline SlotMarker slot_beacon(int slot) { return SlotMarker{slot}; }

}  // namespace alley
