#include <doctest.h>

#include <queue>
#include <set>

#include "alley/comms.hpp"

using namespace alley;

namespace {

VehicleState vehicle(int id, Direction dir, int passed) {
    VehicleState v;
    v.id = id;
    v.direction = dir;
    v.passed_distance = passed;
    return v;
}

// Independent reachability reference for the flooding property.
std::set<int> bfs_reachable(const std::vector<VehicleState>& states, int source_id, int comm_range,
                            int length, int max_hops) {
    std::set<int> reached;
    std::queue<std::pair<int, int>> frontier;  // (id, hops used)
    frontier.push({source_id, 0});
    std::set<int> visited{source_id};
    while (!frontier.empty()) {
        auto [id, hops] = frontier.front();
        frontier.pop();
        if (hops == max_hops) continue;
        const VehicleState* self = nullptr;
        for (const VehicleState& v : states)
            if (v.id == id) self = &v;
        for (const VehicleState& v : states) {
            if (v.exited || v.id == id || visited.count(v.id)) continue;
            if (std::abs(coordinate(v, length) - coordinate(*self, length)) <= comm_range) {
                visited.insert(v.id);
                reached.insert(v.id);
                frontier.push({v.id, hops + 1});
            }
        }
    }
    return reached;
}

}  // namespace

TEST_CASE("sensing respects the strict range predicate") {
    AlleyConfig config = AlleyConfig::with_length(20);
    config.sensing_range = 2;
    std::vector<VehicleState> states{vehicle(0, Direction::Eastbound, 5),
                                     vehicle(1, Direction::Westbound, 14)};  // coords 5 and 6
    SensingResult r = sense(states[0], states, config);
    REQUIRE(r.detected.size() == 1);
    CHECK(r.detected[0].vehicle_id == 1);
    CHECK(r.detected[0].distance == 1);
    CHECK(r.detected[0].side == Side::Ahead);

    states[1].passed_distance = 13;  // coord 7, distance 2: not detected
    CHECK(sense(states[0], states, config).detected.empty());
}

TEST_CASE("sensing classifies sides relative to the heading") {
    AlleyConfig config = AlleyConfig::with_length(20);
    config.sensing_range = 5;
    std::vector<VehicleState> states{vehicle(0, Direction::Westbound, 10),  // coord 10
                                     vehicle(1, Direction::Eastbound, 8),   // coord 8: ahead
                                     vehicle(2, Direction::Eastbound, 12)}; // coord 12: behind
    SensingResult r = sense(states[0], states, config);
    REQUIRE(r.detected.size() == 2);
    CHECK(r.detected[0].vehicle_id == 1);
    CHECK(r.detected[0].side == Side::Ahead);
    CHECK(r.detected[1].vehicle_id == 2);
    CHECK(r.detected[1].side == Side::Behind);
}

TEST_CASE("sensing is symmetric and ignores exited vehicles") {
    AlleyConfig config = AlleyConfig::with_length(12);
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<VehicleState> states;
        std::set<int> used;
        for (int i = 0; i < 4; ++i) {
            int coord;
            do {
                coord = static_cast<int>(rng.uniform_int(13));
            } while (used.count(coord));
            used.insert(coord);
            Direction dir = rng.bernoulli(0.5) ? Direction::Eastbound : Direction::Westbound;
            int passed = dir == Direction::Eastbound ? coord : 12 - coord;
            VehicleState v = vehicle(i, dir, std::min(passed, 11));
            states.push_back(v);
        }
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                if (i == j) continue;
                auto detects = [&](int a, int b) {
                    for (const Detection& d : sense(states[a], states, config).detected)
                        if (d.vehicle_id == states[b].id) return true;
                    return false;
                };
                CHECK(detects(i, j) == detects(j, i));
            }
        }
    }
}

TEST_CASE("two vehicles in range each receive exactly one copy") {
    AlleyConfig config = AlleyConfig::with_length(20);
    config.comm_range = 5;
    std::vector<VehicleState> states{vehicle(0, Direction::Eastbound, 5),
                                     vehicle(1, Direction::Westbound, 12)};  // coords 5, 8
    std::vector<Message> outgoing{type_only_message(states[0], 0, 1),
                                  type_only_message(states[1], 0, 1)};
    CommConfig cc;
    Rng rng(1);
    DeliveryMap inboxes = broadcast_round(outgoing, states, cc, config, rng);
    REQUIRE(inboxes[0].size() == 1);
    REQUIRE(inboxes[1].size() == 1);
    CHECK(inboxes[0][0].source_id == 1);
    CHECK(inboxes[1][0].source_id == 0);
}

TEST_CASE("relay flooding reaches across a line topology") {
    AlleyConfig config = AlleyConfig::with_length(20);
    config.comm_range = 3;
    // Coordinates 0, 3, 6: only adjacent pairs are in range.
    std::vector<VehicleState> states{vehicle(0, Direction::Eastbound, 0),
                                     vehicle(1, Direction::Eastbound, 3),
                                     vehicle(2, Direction::Eastbound, 6)};
    std::vector<Message> outgoing{type_only_message(states[0], 0, 1)};
    CommConfig cc;
    cc.max_hops = 2;
    Rng rng(1);
    DeliveryMap inboxes = broadcast_round(outgoing, states, cc, config, rng);
    REQUIRE(inboxes[2].size() == 1);
    CHECK(inboxes[2][0].source_id == 0);
    CHECK(inboxes[2][0].hop_count == 1);

    cc.max_hops = 1;
    Rng rng2(1);
    DeliveryMap short_reach = broadcast_round(outgoing, states, cc, config, rng2);
    CHECK(short_reach.find(2) == short_reach.end());
}

TEST_CASE("total loss empties every inbox") {
    AlleyConfig config = AlleyConfig::with_length(20);
    std::vector<VehicleState> states{vehicle(0, Direction::Eastbound, 5),
                                     vehicle(1, Direction::Westbound, 14)};
    std::vector<Message> outgoing{type_only_message(states[0], 0, 1),
                                  type_only_message(states[1], 0, 1)};
    CommConfig cc;
    cc.loss_probability = 1.0;
    Rng rng(1);
    CHECK(broadcast_round(outgoing, states, cc, config, rng).empty());
}

TEST_CASE("flooding reachability equals BFS reachability and dedup holds") {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        int length = 10 + static_cast<int>(rng.uniform_int(8));
        AlleyConfig config = AlleyConfig::with_length(length);
        config.comm_range = 2 + static_cast<int>(rng.uniform_int(4));
        CommConfig cc;
        cc.max_hops = 1 + static_cast<int>(rng.uniform_int(4));

        std::vector<VehicleState> states;
        std::set<int> used;
        int n = 2 + static_cast<int>(rng.uniform_int(5));
        for (int i = 0; i < n; ++i) {
            int coord;
            do {
                coord = static_cast<int>(rng.uniform_int(length + 1));
            } while (used.count(coord));
            used.insert(coord);
            states.push_back(vehicle(i, Direction::Eastbound, coord));
        }
        std::vector<Message> outgoing;
        for (int i = 0; i < n; ++i) outgoing.push_back(type_only_message(states[i], trial, 1));

        Rng round_rng(trial);
        DeliveryMap inboxes = broadcast_round(outgoing, states, cc, config, round_rng);

        for (int i = 0; i < n; ++i) {
            std::set<int> sources;
            if (auto it = inboxes.find(i); it != inboxes.end()) {
                for (const Message& msg : it->second) {
                    CHECK(!sources.count(msg.source_id));  // dedup
                    sources.insert(msg.source_id);
                    CHECK(msg.source_id != i);  // never own messages
                }
            }
            for (int s = 0; s < n; ++s) {
                if (s == i) continue;
                bool reachable =
                    bfs_reachable(states, s, config.comm_range, length, cc.max_hops).count(i) > 0;
                CHECK(reachable == (sources.count(s) > 0));
            }
        }
    }
}

TEST_CASE("slot beacon is a strictly increasing shared marker") {
    CHECK(slot_beacon(0).slot == 0);
    int prev = -1;
    for (int s = 0; s < 5; ++s) {
        SlotMarker m = slot_beacon(s);
        CHECK(m.slot > prev);
        prev = m.slot;
    }
}
