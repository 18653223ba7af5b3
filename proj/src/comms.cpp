#include "alley/comms.hpp"

#include <algorithm>
#include <set>

namespace alley {

SensingResult sense(const VehicleState& me, std::span<const VehicleState> all,
                    const AlleyConfig& config) {
    if (me.exited) throw std::invalid_argument("exited vehicles do not sense");
    SensingResult result;
    int my_coord = coordinate(me, config.length);
    for (const VehicleState& other : all) {
        if (other.exited || other.id == me.id) continue;
        int c = coordinate(other, config.length);
        int dist = std::abs(c - my_coord);
        if (dist >= config.sensing_range) continue;  // strict inequality
        Side side = (c - my_coord) * heading_sign(me.direction) > 0 ? Side::Ahead : Side::Behind;
        result.detected.push_back({other.id, dist, side});
    }
    std::sort(result.detected.begin(), result.detected.end(),
              [](const Detection& a, const Detection& b) {
                  return a.distance != b.distance ? a.distance < b.distance
                                                  : a.vehicle_id < b.vehicle_id;
              });
    return result;
}

DeliveryMap broadcast_round(std::span<const Message> outgoing,
                            std::span<const VehicleState> states, const CommConfig& comm_cfg,
                            const AlleyConfig& config, Rng& rng) {
    DeliveryMap inboxes;
    std::vector<const VehicleState*> nodes;
    for (const VehicleState& v : states)
        if (!v.exited) nodes.push_back(&v);

    auto coord_of = [&](int id) -> int {
        for (const VehicleState* v : nodes)
            if (v->id == id) return coordinate(*v, config.length);
        throw std::invalid_argument("unknown sender id " + std::to_string(id));
    };
    auto in_range = [&](int c1, int c2) { return std::abs(c1 - c2) <= config.comm_range; };

    for (const Message& origin : outgoing) {
        int source_coord = coord_of(origin.source_id);
        // Vehicles that already hold a copy of (source_id, sequence).
        std::set<int> has_copy{origin.source_id};
        // Frontier of rebroadcasters for the current hop.
        std::vector<std::pair<int, int>> frontier{{origin.source_id, source_coord}};
        for (int hop = 0; hop < comm_cfg.max_hops && !frontier.empty(); ++hop) {
            std::vector<std::pair<int, int>> next;
            for (const auto& [sender_id, sender_coord] : frontier) {
                for (const VehicleState* v : nodes) {
                    if (v->id == sender_id || !in_range(sender_coord, coordinate(*v, config.length)))
                        continue;
                    bool lost = comm_cfg.loss_probability > 0.0 &&
                                rng.bernoulli(comm_cfg.loss_probability);
                    if (lost) continue;
                    if (has_copy.count(v->id)) continue;  // dedup on (source, sequence)
                    has_copy.insert(v->id);
                    Message delivered = origin;
                    delivered.hop_count = hop;
                    inboxes[v->id].push_back(delivered);
                    if (comm_cfg.relay_enabled)
                        next.emplace_back(v->id, coordinate(*v, config.length));
                }
            }
            frontier = std::move(next);
            if (!comm_cfg.relay_enabled) break;
        }
    }
    return inboxes;
}

}  // namespace alley
