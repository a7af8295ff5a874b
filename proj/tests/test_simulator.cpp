#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "browselab/simulate.hpp"

using namespace browselab;

namespace {

const BrowsingConfig kGeometric = preset_geometric(0.8);
const RelevanceVector kRel5 = RelevanceVector::binary({1, 1, 1, 1, 1});
const LayoutSpec kList5 = LayoutSpec::linear_vertical(5);

}  // namespace

TEST_CASE("identical inputs reproduce the identical report") {
    const auto a = simulate(kGeometric, kRel5, kList5, 20000, 42);
    const auto b = simulate(kGeometric, kRel5, kList5, 20000, 42);
    CHECK(a == b);

    const auto c = simulate(kGeometric, kRel5, kList5, 20000, 43);
    CHECK_FALSE(a == c);
}

TEST_CASE("every trial ends in exactly one absorbing state") {
    BrowsingConfig config;
    config.selection = SelectionModel::binary(0.4, 0.05);
    config.abandon = AbandonModel::constant(0.15);
    config.grid.row_skip = 0.3;
    config.grid.row_decay = RowDecay::row_continuation(0.8);
    const auto layout = LayoutSpec::multi_list({2, 4, 3});
    const RelevanceVector rel({1, 0, 1, 1, 0, 0, 1, 0, 1}, 1);

    const auto report = simulate(config, rel, layout, 50000, 9);
    CHECK(report.trials == 50000);
    CHECK(report.selected_total() + report.abandoned_total() + report.exhausted_count ==
          report.trials);
    // Selections can never exceed examinations at any position.
    for (std::size_t i = 0; i < report.examined_count.size(); ++i)
        CHECK(report.selected_count[i] <= report.examined_count[i]);
}

TEST_CASE("degenerate parameters behave exactly") {
    // psi = 1: every trial selects position 1.
    BrowsingConfig always;
    always.selection = SelectionModel::constant(1.0);
    auto report = simulate(always, kRel5, kList5, 1000, 1);
    CHECK(report.selected_count[0] == 1000);
    CHECK(report.examined_count[0] == 1000);
    CHECK(report.examined_count[1] == 0);

    // psi = 0, alpha = 0: every trial exhausts and examines everything.
    BrowsingConfig never;
    never.selection = SelectionModel::constant(0.0);
    report = simulate(never, kRel5, kList5, 1000, 1);
    CHECK(report.exhausted_count == 1000);
    CHECK(report.examined_count == std::vector<std::int64_t>(5, 1000));

    // gamma = 1: every row is skipped, nothing is ever examined.
    never.grid.row_skip = 1.0;
    report = simulate(never, kRel5, kList5, 1000, 1);
    CHECK(report.exhausted_count == 1000);
    CHECK(report.examined_count == std::vector<std::int64_t>(5, 0));
    CHECK(report.skipped_count == std::vector<std::int64_t>(5, 1000));
}

TEST_CASE("sub-seed derivation is splittable and frozen") {
    // Regression constants: stable within this implementation by contract.
    CHECK(partition_seed(0, 0) == 7960286522194355700ULL);
    CHECK(partition_seed(42, 7) == 6270620877612482005ULL);

    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 128; ++k) seen.insert(partition_seed(7, k));
    CHECK(seen.size() == 128);
}

TEST_CASE("merge is a pure count reduction") {
    const auto a = simulate(kGeometric, kRel5, kList5, 3000, partition_seed(5, 0));
    const auto b = simulate(kGeometric, kRel5, kList5, 2000, partition_seed(5, 1));
    const auto merged = merge(a, b);
    CHECK(merged.trials == 5000);
    for (std::size_t i = 0; i < merged.examined_count.size(); ++i) {
        CHECK(merged.examined_count[i] == a.examined_count[i] + b.examined_count[i]);
        CHECK(merged.selected_count[i] == a.selected_count[i] + b.selected_count[i]);
    }
    CHECK(merged.exhausted_count == a.exhausted_count + b.exhausted_count);
    CHECK(merged.selected_total() + merged.abandoned_total() + merged.exhausted_count ==
          merged.trials);

    const auto other = simulate(kGeometric, RelevanceVector::binary({1, 1}),
                                LayoutSpec::linear_vertical(2), 100, 0);
    CHECK_THROWS_AS(merge(a, other), std::invalid_argument);
}

TEST_CASE("partitioned simulation is deterministic and statistically sound") {
    const auto once = simulate_partitioned(kGeometric, kRel5, kList5, 40001, 5, 4);
    const auto again = simulate_partitioned(kGeometric, kRel5, kList5, 40001, 5, 4);
    CHECK(once == again);
    CHECK(once.trials == 40001);  // remainder trials are not dropped
    CHECK(once.seed == 5);

    const auto closed = examine_prob_linear(kGeometric, kRel5);
    CHECK(validate(closed, once).pass);

    CHECK_THROWS_AS(simulate_partitioned(kGeometric, kRel5, kList5, 100, 5, 0),
                    std::invalid_argument);
    // More partitions than trials degrades gracefully.
    CHECK(simulate_partitioned(kGeometric, kRel5, kList5, 3, 5, 8).trials == 3);
}

TEST_CASE("empirical profile carries binomial standard errors") {
    SimulationReport report;
    report.trials = 10000;
    report.examined_count = {10000, 5000};
    report.selected_count = {0, 2500};
    report.skipped_count = {0, 0};
    report.exhausted_count = 10000;

    const auto profile = empirical_profile(report);
    CHECK(profile.examine[0] == 1.0);
    CHECK(profile.examine_se[0] == 0.0);  // p_hat = 1 has no binomial spread
    CHECK(profile.examine[1] == 0.5);
    CHECK(profile.examine_se[1] == Catch::Approx(0.005).margin(1e-12));
    CHECK(profile.select[1] == 0.25);

    SimulationReport empty;
    CHECK_THROWS_AS(empirical_profile(empty), std::invalid_argument);
}

TEST_CASE("validation passes matched models and flags corrupted ones") {
    const auto closed = examine_prob_linear(kGeometric, kRel5);
    const auto report = simulate(kGeometric, kRel5, kList5, 100000, 3);

    const auto good = validate(closed, report);
    CHECK(good.pass);
    CHECK(good.conservation_ok);
    CHECK(good.failures == 0);
    CHECK(good.positions_checked == 10);  // 5 examine + 5 select
    CHECK(good.worst_z < 4.0);
    CHECK((good.worst_quantity == "examine" || good.worst_quantity == "select"));

    auto corrupted = closed;
    for (double& v : corrupted.examine) v = std::min(1.0, v + 0.05);
    const auto bad = validate(corrupted, report);
    CHECK_FALSE(bad.pass);
    CHECK(bad.failures > 0);
}

TEST_CASE("large deviations score the documented z magnitude") {
    // Closed examine 0.8 vs empirical 0.5 over 200000 trials: the difference
    // is about 335 null standard errors.
    AttentionProfile closed;
    closed.examine = {0.8};
    closed.select = {0.0};
    SimulationReport report;
    report.trials = 200000;
    report.seed = 0;
    report.examined_count = {100000};
    report.selected_count = {0};
    report.skipped_count = {0};
    report.exhausted_count = 200000;

    const auto verdict = validate(closed, report);
    CHECK_FALSE(verdict.pass);
    CHECK(verdict.conservation_ok);
    CHECK(verdict.worst_z == Catch::Approx(335.4).margin(0.5));
    CHECK(verdict.worst_rank == 1);
    CHECK(verdict.worst_quantity == "examine");
}

TEST_CASE("zero-variance positions pass through the absolute floor") {
    // examine[1] = 1 exactly: the null SE is zero and any empirical deviation
    // would be infinite in z terms; agreement and small floors still pass.
    const auto closed = examine_prob_linear(kGeometric, kRel5);
    auto report = simulate(kGeometric, kRel5, kList5, 50000, 8);
    CHECK(validate(closed, report).pass);

    // Tampering with an exact-probability position beyond the absolute floor
    // is caught, and the reported z stays finite for serialization.
    report.examined_count[0] -= 500;
    const auto verdict = validate(closed, report);
    CHECK_FALSE(verdict.pass);
    CHECK(verdict.worst_z == 1e12);
    CHECK(std::isfinite(verdict.worst_z));
}

TEST_CASE("conservation is checked on the report itself") {
    const auto closed = examine_prob_linear(kGeometric, kRel5);
    auto report = simulate(kGeometric, kRel5, kList5, 10000, 2);
    report.exhausted_count += 1;  // counts no longer sum to trials
    const auto verdict = validate(closed, report);
    CHECK_FALSE(verdict.conservation_ok);
    CHECK_FALSE(verdict.pass);
}

TEST_CASE("simulator input contracts") {
    CHECK_THROWS_AS(simulate(kGeometric, kRel5, kList5, 0, 1), std::invalid_argument);

    BrowsingConfig beta = kGeometric;
    beta.grid.row_decay = RowDecay::beta_boost(1.5);
    CHECK_THROWS_AS(simulate(beta, kRel5, kList5, 100, 1), std::invalid_argument);

    BrowsingConfig invalid = kGeometric;
    invalid.selection.psi = 1.5;
    CHECK_THROWS_AS(simulate(invalid, kRel5, kList5, 100, 1), std::invalid_argument);

    CHECK_THROWS_AS(simulate(kGeometric, RelevanceVector::binary({1}), kList5, 100, 1),
                    std::invalid_argument);

    const auto closed = examine_prob_linear(kGeometric, kRel5);
    const auto report = simulate(kGeometric, kRel5, kList5, 100, 1);
    CHECK_THROWS_AS(validate(closed, report, 0.0, 0.005), std::invalid_argument);
    CHECK_THROWS_AS(validate(closed, report, 4.0, 0.0), std::invalid_argument);
    const auto shorter = examine_prob_linear(kGeometric, RelevanceVector::binary({1}));
    CHECK_THROWS_AS(validate(shorter, report), std::invalid_argument);
}
