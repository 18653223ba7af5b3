#include <doctest.h>

#include <set>

#include "alley/oracle.hpp"
#include "alley/sim.hpp"

using namespace alley;

namespace {

Scenario small_scenario(int length, std::vector<int> east, std::vector<int> west,
                        std::uint64_t seed = 1) {
    Scenario s;
    s.config = AlleyConfig::with_length(length);
    s.policy.utility = UtilityParams::for_length(length);
    s.east_positions = std::move(east);
    s.west_positions = std::move(west);
    s.seed = seed;
    return s;
}

bool same_result(const EpisodeResult& a, const EpisodeResult& b) {
    if (a.slots_used != b.slots_used || a.terminated != b.terminated) return false;
    if (a.vehicles.size() != b.vehicles.size()) return false;
    for (std::size_t i = 0; i < a.vehicles.size(); ++i) {
        if (a.vehicles[i].elapsed_time != b.vehicles[i].elapsed_time) return false;
        if (a.vehicles[i].vtype != b.vehicles[i].vtype) return false;
        if (a.vehicles[i].collision_count != b.vehicles[i].collision_count) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("a lone vehicle traverses in exactly L slots under every policy") {
    for (PolicyKind p : {PolicyKind::Random, PolicyKind::GameNoComm, PolicyKind::GameCommTypes,
                         PolicyKind::GameCommTypesState, PolicyKind::CentralAuthority}) {
        Scenario s = small_scenario(20, {0}, {});
        EpisodeResult r = run_episode(s, p);
        CHECK(r.terminated);
        CHECK(r.slots_used == 20);
        CHECK(r.vehicles[0].elapsed_time == 20);
    }
}

TEST_CASE("central episode hits the oracle optimum on a tiny instance") {
    Scenario s = small_scenario(4, {1}, {1});
    s.config.collision_cost = 10;
    EpisodeResult r = run_episode(s, PolicyKind::CentralAuthority);
    CHECK(r.terminated);
    auto initial = s.initial_states();
    OracleResult oracle = minmax_oracle(initial, s.config, s.config.safety_horizon);
    CHECK(r.max_elapsed() == oracle.value);
    CHECK(r.max_elapsed() == 7);
}

TEST_CASE("episodes are bit-stable across reruns") {
    for (PolicyKind p : {PolicyKind::Random, PolicyKind::GameNoComm, PolicyKind::GameCommTypes,
                         PolicyKind::GameCommTypesState}) {
        Scenario s = small_scenario(12, {0, 1}, {0}, 99);
        EpisodeResult a = run_episode(s, p);
        EpisodeResult b = run_episode(s, p);
        CHECK(same_result(a, b));
    }
}

TEST_CASE("paired seeds resample identical types across policies") {
    Scenario s = small_scenario(10, {0}, {0}, 5);
    s.type_prior_unselfish = 0.5;
    for (int rep = 0; rep < 20; ++rep) {
        s.seed = 1000 + rep;
        EpisodeResult a = run_episode(s, PolicyKind::Random);
        EpisodeResult b = run_episode(s, PolicyKind::GameNoComm);
        REQUIRE(a.vehicles.size() == b.vehicles.size());
        for (std::size_t i = 0; i < a.vehicles.size(); ++i)
            CHECK(a.vehicles[i].vtype == b.vehicles[i].vtype);
    }
}

TEST_CASE("elapsed time never beats the remaining distance") {
    Rng rng(31337);
    for (int trial = 0; trial < 60; ++trial) {
        int length = 6 + static_cast<int>(rng.uniform_int(6));
        Scenario s = small_scenario(length, {}, {});
        std::set<int> used;
        int n = 1 + static_cast<int>(rng.uniform_int(3));
        for (int i = 0; i < n; ++i) {
            int x;
            do {
                x = static_cast<int>(rng.uniform_int(length / 2));
            } while (used.count(x) || used.count(length - x));
            used.insert(x);
            if (rng.bernoulli(0.5) && !used.count(length - x)) {
                used.insert(length - x);
                s.west_positions.push_back(x);
            } else {
                s.east_positions.push_back(x);
            }
        }
        if (s.east_positions.empty() && s.west_positions.empty()) continue;
        s.seed = trial;
        EpisodeResult r = run_episode(s, PolicyKind::Random);
        if (!r.terminated) continue;
        auto initial = s.initial_states();
        for (std::size_t i = 0; i < r.vehicles.size(); ++i) {
            std::int64_t lower = length - initial[i].passed_distance;
            CHECK(r.vehicles[i].elapsed_time >= lower);
        }
    }
}

TEST_CASE("central authority clears every small instance") {
    for (int length : {4, 5, 6}) {
        for (int e0 = 0; e0 < length; ++e0) {
            for (int w0 = 0; w0 < length; ++w0) {
                if (e0 == length - w0) continue;  // same cell
                Scenario s = small_scenario(length, {e0}, {w0});
                EpisodeResult r = run_episode(s, PolicyKind::CentralAuthority);
                CHECK(r.terminated);
            }
        }
    }
}

TEST_CASE("experiment with one replication equals that episode") {
    Scenario s = small_scenario(8, {0}, {0}, 77);
    ExperimentResult exp = run_experiment(s, PolicyKind::GameNoComm, 1, 77);
    Scenario single = s;
    single.seed = 77;
    EpisodeResult episode = run_episode(single, PolicyKind::GameNoComm);
    REQUIRE(exp.episodes.size() == 1);
    CHECK(same_result(exp.episodes[0].result, episode));
    CHECK(exp.stats.episodes == 1);
    if (episode.terminated) {
        CHECK(exp.stats.completed == 1);
        CHECK(exp.stats.mean_elapsed_per_vehicle == doctest::Approx(episode.mean_elapsed()));
    }
}

TEST_CASE("parallel and serial experiments agree") {
    Scenario s = small_scenario(10, {0, 1}, {0}, 4);
    ExperimentResult serial = run_experiment(s, PolicyKind::GameCommTypesState, 24, 4, 1);
    ExperimentResult parallel = run_experiment(s, PolicyKind::GameCommTypesState, 24, 4, 4);
    REQUIRE(serial.episodes.size() == parallel.episodes.size());
    for (std::size_t i = 0; i < serial.episodes.size(); ++i)
        CHECK(same_result(serial.episodes[i].result, parallel.episodes[i].result));
}

TEST_CASE("price of anarchy of the central policy is one on oracle-sized instances") {
    Scenario s = small_scenario(6, {0, 1}, {0, 1});
    PoaResult poa = price_of_anarchy(s, PolicyKind::CentralAuthority, 20, 9);
    CHECK_FALSE(poa.used_fallback_denominator);
    CHECK(poa.value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("price of anarchy is never below one with the oracle denominator") {
    Scenario s = small_scenario(6, {0}, {0});
    for (PolicyKind p : {PolicyKind::Random, PolicyKind::GameNoComm}) {
        PoaResult poa = price_of_anarchy(s, p, 50, 11);
        CHECK(poa.value >= 1.0 - 1e-12);
    }
}

TEST_CASE("scenario validation rejects bad geometry") {
    Scenario s = small_scenario(8, {0}, {});
    s.east_positions.push_back(0);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    Scenario clash = small_scenario(8, {3}, {5});  // west 5 sits at coord 3 too
    CHECK_THROWS_AS(clash.validate(), std::invalid_argument);

    Scenario empty = small_scenario(8, {}, {});
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    Scenario bad_types = small_scenario(8, {0}, {0});
    bad_types.types = std::vector<VehicleType>{VehicleType::Selfish};
    CHECK_THROWS_AS(bad_types.validate(), std::invalid_argument);
}

TEST_CASE("paired difference flags a clear gap and not a null one") {
    std::vector<double> worse, better;
    Rng rng(2);
    for (int i = 0; i < 400; ++i) {
        double noise = rng.uniform01();
        worse.push_back(10.0 + noise);
        better.push_back(8.0 + noise * 0.9);
    }
    PairedComparison gap = paired_difference(worse, better);
    CHECK(gap.significantly_positive());
    PairedComparison null_gap = paired_difference(worse, worse);
    CHECK_FALSE(null_gap.significantly_positive());
}

TEST_CASE("disjoint seed ranges give independent converging estimates") {
    Scenario s = small_scenario(8, {0}, {0});
    ExperimentResult a = run_experiment(s, PolicyKind::GameCommTypesState, 4000, 1, 4);
    ExperimentResult b = run_experiment(s, PolicyKind::GameCommTypesState, 4000, 1000000, 4);
    REQUIRE(a.stats.completed > 3500);
    REQUIRE(b.stats.completed > 3500);
    double m1 = a.stats.mean_elapsed_per_vehicle;
    double m2 = b.stats.mean_elapsed_per_vehicle;
    CHECK(std::abs(m1 - m2) < 0.05 * std::max(m1, m2));  // loose Monte Carlo agreement
}
