#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dpn/storage.hpp"

using namespace dpn;

TEST_CASE("charging a nearly full battery absorbs only the headroom") {
    StorageUnit battery{StorageConfig{10.0, 0.0}, 9.4556};
    auto outcome = charge(battery, 2.0);
    CHECK(outcome.absorbed == doctest::Approx(0.5444).epsilon(1e-12));
    CHECK(outcome.unit.charge == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("a full battery absorbs nothing") {
    StorageUnit battery{StorageConfig{10.0, 0.0}, 10.0};
    auto outcome = charge(battery, 5.0);
    CHECK(outcome.absorbed == 0.0);
    CHECK(outcome.unit.charge == 10.0);
}

TEST_CASE("an empty battery takes the whole surplus when it fits") {
    StorageUnit battery{StorageConfig{10.0, 0.0}, 0.0};
    auto outcome = charge(battery, 3.0);
    CHECK(outcome.absorbed == 3.0);
    CHECK(outcome.unit.charge == 3.0);
}

TEST_CASE("the queued special user is served from storage") {
    StorageUnit battery{StorageConfig{1.0, 1.0}, 1.0};
    std::vector<PendingRequest> queued{{1, 0.4869, 0u}};
    auto outcome = discharge_to_queue(battery, queued, AllocationPolicy::LargestFirst);
    REQUIRE(outcome.grants.size() == 1);
    CHECK(outcome.grants[0].first == 1);
    CHECK(outcome.grants[0].second == 0.4869);
    CHECK(outcome.unit.charge == doctest::Approx(1.0 - 0.4869).epsilon(1e-12));
}

TEST_CASE("an empty battery grants nothing") {
    StorageUnit battery{StorageConfig{10.0, 0.0}, 0.0};
    std::vector<PendingRequest> queued{{1, 0.2, 0u}, {2, 0.3, 0u}};
    auto outcome = discharge_to_queue(battery, queued, AllocationPolicy::SmallestFirst);
    CHECK(outcome.grants.empty());
    CHECK(outcome.unit.charge == 0.0);
}

TEST_CASE("charge 1.0 with requests 0.6 and 0.7: only the smaller fits") {
    StorageUnit battery{StorageConfig{10.0, 0.0}, 1.0};
    std::vector<PendingRequest> queued{{1, 0.6, 0u}, {2, 0.7, 0u}};
    auto outcome = discharge_to_queue(battery, queued, AllocationPolicy::SmallestFirst);
    REQUIRE(outcome.grants.size() == 1);
    CHECK(outcome.grants[0].first == 1);
    CHECK(outcome.unit.charge == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("p_sun 0 never produces") {
    SolarConfig solar{10.0, 0.0};
    StorageUnit battery{StorageConfig{10.0, 0.0}, 0.0};
    RngStream rng(dpn::splitmix64(5), 2);
    for (int round = 0; round < 200; ++round) {
        auto outcome = solar_step(solar, battery, rng);
        CHECK(outcome.produced == 0.0);
        CHECK(outcome.grid_bonus == 0.0);
    }
}

TEST_CASE("production beyond a full battery becomes grid bonus") {
    SolarConfig solar{10.0, 1.0};
    StorageUnit battery{StorageConfig{10.0, 0.0}, 10.0};
    RngStream rng(dpn::splitmix64(6), 2);
    auto outcome = solar_step(solar, battery, rng);
    CHECK(outcome.produced > 0.0);
    CHECK(outcome.grid_bonus == doctest::Approx(outcome.produced).epsilon(1e-12));
    CHECK(outcome.battery.charge == 10.0);
}

TEST_CASE("long-run mean production is p_sun times half the solar cap") {
    SolarConfig solar{10.0, 0.5};
    StorageUnit battery{StorageConfig{10.0, 0.0}, 10.0}; // full: all output visible
    RngStream rng(dpn::splitmix64(7), 2);
    double sum = 0.0;
    const int rounds = 20000;
    for (int round = 0; round < rounds; ++round) {
        sum += solar_step(solar, battery, rng).produced;
    }
    CHECK(sum / rounds == doctest::Approx(2.5).epsilon(0.04));
}

TEST_CASE("battery balance holds across a charge/discharge/solar chain") {
    StorageUnit battery{StorageConfig{10.0, 0.0}, 4.0};
    RngStream rng(dpn::splitmix64(8), 2);
    SolarConfig solar{5.0, 0.7};

    for (int round = 0; round < 500; ++round) {
        double before = battery.charge;

        std::vector<PendingRequest> queued{
            {1, rng.uniform_pos(1.0), 0u}, {2, rng.uniform_pos(1.0), 0u}};
        auto discharge = discharge_to_queue(battery, queued,
                                            AllocationPolicy::SmallestFirst);
        battery = discharge.unit;
        double discharged = discharge.discharged_total();

        auto charged = charge(battery, rng.uniform_pos(2.0));
        battery = charged.unit;

        auto produced = solar_step(solar, battery, rng);
        battery = produced.battery;
        double solar_in = produced.produced - produced.grid_bonus;

        CHECK(battery.charge ==
              doctest::Approx(before - discharged + charged.absorbed + solar_in)
                  .epsilon(1e-12));
        CHECK(battery.charge >= -kEnergyTol);
        CHECK(battery.charge <= battery.config.capacity + kEnergyTol);
    }
}
