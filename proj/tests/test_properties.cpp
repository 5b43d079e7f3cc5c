#include <doctest.h>

#include "scenario_testing.hpp"

using namespace abrsim;
using abrsim::testing::check_invariants;
using abrsim::testing::random_config;

TEST_CASE("protocol invariants hold across policies and random topologies") {
    for (std::uint64_t seed = 1; seed <= 18; ++seed) {
        CAPTURE(seed);
        ScenarioConfig cfg = random_config(seed);
        cfg.validate();
        auto sc = build_scenario(cfg);
        run_scenario(*sc, cfg);
        auto rep = check_invariants(*sc, cfg);
        CAPTURE(rep.detail);
        CHECK(rep.ok);
    }
}

TEST_CASE("two identical runs are bit-identical for every policy kind") {
    for (std::uint64_t seed = 1; seed <= 9; ++seed) {
        CAPTURE(seed);
        ScenarioConfig cfg = random_config(seed);
        auto a = build_scenario(cfg);
        auto b = build_scenario(cfg);
        MetricsSummary sa = run_scenario(*a, cfg);
        MetricsSummary sb = run_scenario(*b, cfg);
        CHECK(sa.dispatched_events == sb.dispatched_events);
        CHECK(a->trace.acr_csv() == b->trace.acr_csv());
        CHECK(a->trace.queue_csv() == b->trace.queue_csv());
        CHECK(a->trace.burst_csv() == b->trace.burst_csv());
        CHECK(sa.to_json_text() == sb.to_json_text());
    }
}
