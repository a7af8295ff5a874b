#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "browselab/grid.hpp"
#include "oracle.hpp"

using namespace browselab;

namespace {

RelevanceVector alternating(int n, int g_max = 1) {
    std::vector<int> grades;
    for (int i = 0; i < n; ++i) grades.push_back((i % (g_max + 1)));
    return RelevanceVector(std::move(grades), g_max);
}

}  // namespace

TEST_CASE("single-column grid with all row behavior off reduces to the linear form") {
    const auto config = preset_extended_cascade(0.6, 0.1, 0.2);
    const auto rel = alternating(8);
    const auto layout = LayoutSpec::linear_vertical(8);

    const auto grid = examine_prob_grid(config, rel, layout);
    const auto linear = examine_prob_linear(config, rel);

    // gamma = 0 and rho = 1 multiply by exact identities, so the reduction is
    // bitwise, not merely close.
    CHECK(grid.examine == linear.examine);
    CHECK(grid.select == linear.select);
    CHECK(grid.total_select == linear.total_select);
    CHECK(grid.total_abandon == linear.total_abandon);
    CHECK(grid.total_exhaust == linear.total_exhaust);
    CHECK(grid.total_abandon_row == 0.0);
}

TEST_CASE("row skipping discounts entry into every row") {
    // 2x2, gamma = 0.3, psi = 0.2: examine(1,1) = 0.7 and
    // examine(2,1) = (0.3 + 0.7 * 0.8^2) * 0.7 = 0.5236.
    BrowsingConfig config;
    config.selection = SelectionModel::constant(0.2);
    config.grid.row_skip = 0.3;
    const auto profile = examine_prob_grid(config, RelevanceVector::binary({0, 0, 0, 0}),
                                           LayoutSpec::wrapped_grid(2, 2));
    CHECK(profile.examine[0] == Catch::Approx(0.7).margin(1e-12));
    CHECK(profile.examine[1] == Catch::Approx(0.56).margin(1e-12));
    CHECK(profile.examine[2] == Catch::Approx(0.5236).margin(1e-12));
    CHECK(profile.examine[3] == Catch::Approx(0.41888).margin(1e-12));
    CHECK(profile.row_reach[0] == 1.0);
    CHECK(profile.row_skipped == std::vector<double>{0.3, 0.3});
}

TEST_CASE("row continuation charges each boundary after the first row") {
    BrowsingConfig config;
    config.selection = SelectionModel::constant(0.0);
    config.grid.row_decay = RowDecay::row_continuation(0.8);
    const auto profile = examine_prob_grid(config, RelevanceVector::binary({0, 0, 0}),
                                           LayoutSpec::linear_vertical(3));
    CHECK(profile.examine[0] == 1.0);
    CHECK(profile.examine[1] == Catch::Approx(0.8).margin(1e-15));
    CHECK(profile.examine[2] == Catch::Approx(0.64).margin(1e-15));
    CHECK(profile.total_abandon_row == Catch::Approx(0.36).margin(1e-15));
    CHECK(profile.total_exhaust == Catch::Approx(0.64).margin(1e-15));
}

TEST_CASE("middle bias weights peak at the row center") {
    CHECK(middle_bias_weight(2, 3, 1.0) == 1.0);
    CHECK(middle_bias_weight(1, 3, 1.0) == Catch::Approx(std::exp(-0.5)).margin(1e-15));
    CHECK(middle_bias_weight(3, 3, 1.0) == middle_bias_weight(1, 3, 1.0));
    // Even width: the peak falls between the two middle cells.
    CHECK(middle_bias_weight(2, 4, 1.0) == middle_bias_weight(3, 4, 1.0));
    CHECK(middle_bias_weight(1, 4, 1.0) < middle_bias_weight(2, 4, 1.0));
    // Wider sigma flattens the profile.
    CHECK(middle_bias_weight(1, 5, 3.0) > middle_bias_weight(1, 5, 1.0));
    CHECK_THROWS_AS(middle_bias_weight(0, 3, 1.0), std::out_of_range);
    CHECK_THROWS_AS(middle_bias_weight(4, 3, 1.0), std::out_of_range);
    CHECK_THROWS_AS(middle_bias_weight(1, 3, 0.0), std::invalid_argument);
}

TEST_CASE("closed form matches exact event-tree enumeration") {
    std::mt19937 gen(11);
    std::uniform_real_distribution<double> unit(0.05, 0.9);
    const std::vector<LayoutSpec> layouts = {
        LayoutSpec::wrapped_grid(3, 3),
        LayoutSpec::wrapped_grid(4, 4),
        LayoutSpec::multi_list({2, 4, 3}),
        LayoutSpec::linear_horizontal(6),
    };
    const double gammas[] = {0.0, 0.3, 0.7};
    const double rhos[] = {1.0, 0.8};

    int combos = 0;
    for (const auto& layout : layouts) {
        for (double gamma : gammas) {
            for (double rho : rhos) {
                for (bool bias : {false, true}) {
                    BrowsingConfig config;
                    config.selection = SelectionModel::binary(unit(gen), unit(gen) * 0.3);
                    config.abandon = AbandonModel::constant(unit(gen) * 0.3);
                    config.grid.row_skip = gamma;
                    config.grid.row_decay = RowDecay::row_continuation(rho);
                    if (bias) config.grid.middle_bias = MiddleBias::gaussian(1.2);

                    const auto rel = alternating(layout.total_items());
                    const auto closed = examine_prob_grid(config, rel, layout);
                    const auto oracle =
                        browselab_test::enumerate_machine(config, rel, layout);

                    for (std::size_t i = 0; i < closed.examine.size(); ++i) {
                        CHECK(std::abs(closed.examine[i] - oracle.examine[i]) <= 1e-12);
                        CHECK(std::abs(closed.select[i] - oracle.select[i]) <= 1e-12);
                    }
                    CHECK(std::abs(closed.total_select - oracle.select_total) <= 1e-12);
                    CHECK(std::abs(closed.total_abandon_cell - oracle.abandon_cell) <=
                          1e-12);
                    CHECK(std::abs(closed.total_abandon_row - oracle.abandon_row) <=
                          1e-12);
                    CHECK(std::abs(closed.total_exhaust - oracle.exhaust) <= 1e-12);
                    const double mass = closed.total_select + closed.total_abandon +
                                        closed.total_exhaust;
                    CHECK(std::abs(mass - 1.0) <= 1e-12);
                    ++combos;
                }
            }
        }
    }
    CHECK(combos == 48);
}

TEST_CASE("row reach composes skip brackets and boundary survival") {
    BrowsingConfig config;
    config.selection = SelectionModel::constant(0.5);
    config.grid.row_skip = 0.4;
    config.grid.row_decay = RowDecay::row_continuation(0.9);
    const auto profile = examine_prob_grid(config, RelevanceVector::binary({0, 0, 0, 0}),
                                           LayoutSpec::wrapped_grid(2, 2));
    // reach(2) = rho * (gamma + (1-gamma) * 0.5^2)
    CHECK(profile.row_reach[1] == Catch::Approx(0.9 * (0.4 + 0.6 * 0.25)).margin(1e-15));
    // First examined cell of an entered row carries the (1-gamma) entry factor.
    CHECK(profile.examine[2] ==
          Catch::Approx(profile.row_reach[1] * 0.6).margin(1e-15));
}

TEST_CASE("beta decay has no machine semantics and is rejected by the closed form") {
    BrowsingConfig config = preset_geometric(0.8);
    config.grid.row_decay = RowDecay::beta_boost(1.2);
    CHECK_THROWS_WITH(
        examine_prob_grid(config, RelevanceVector::binary({1, 1}),
                          LayoutSpec::linear_vertical(2)),
        Catch::Matchers::ContainsSubstring("paper_formula_examine_prob"));
}

TEST_CASE("relevance and layout sizes must agree") {
    CHECK_THROWS_AS(examine_prob_grid(preset_geometric(0.8),
                                      RelevanceVector::binary({1, 1, 1}),
                                      LayoutSpec::wrapped_grid(2, 2)),
                    std::invalid_argument);
}

TEST_CASE("published beta formula boosts per row and clamps at one") {
    BrowsingConfig config;
    config.selection = SelectionModel::constant(0.2);
    config.grid.row_decay = RowDecay::beta_boost(1.2);
    const auto rel = RelevanceVector::binary({0, 0, 0});
    const auto layout = LayoutSpec::linear_vertical(3);

    const auto result =
        paper_formula_examine_prob(PaperVariant::SlowerDecayBeta, config, rel, layout);
    REQUIRE(result.examine.size() == 3);
    CHECK(result.examine[0] == 1.0);  // boost exponent row-1 leaves row 1 unchanged
    CHECK(result.examine[1] == Catch::Approx(1.2 * 0.8).margin(1e-12));
    CHECK(result.examine[2] == Catch::Approx(1.44 * 0.64).margin(1e-12));
    CHECK_FALSE(result.notes.empty());

    // With a strong boost the corrective product exceeds one and is clamped.
    config.grid.row_decay = RowDecay::beta_boost(2.0);
    config.selection = SelectionModel::constant(0.1);
    const auto clamped =
        paper_formula_examine_prob(PaperVariant::SlowerDecayBeta, config, rel, layout);
    CHECK(clamped.examine[2] == 1.0);

    // The variant is only meaningful for a beta-decay config.
    config.grid.row_decay = RowDecay::none();
    CHECK_THROWS_AS(
        paper_formula_examine_prob(PaperVariant::SlowerDecayBeta, config, rel, layout),
        std::invalid_argument);
}

TEST_CASE("published row-skip formula differs from the machine only at row one") {
    BrowsingConfig config;
    config.selection = SelectionModel::binary(0.4, 0.1);
    config.grid.row_skip = 0.3;
    const auto layout = LayoutSpec::wrapped_grid(2, 3);
    const auto rel = alternating(6);

    const auto literal =
        paper_formula_examine_prob(PaperVariant::RowSkipLiteral, config, rel, layout);
    const auto machine = examine_prob_grid(config, rel, layout);

    for (int rank = 1; rank <= 3; ++rank) {
        // Row 1: the formula assumes the row is always entered; the machine
        // charges the skip probability. Ratio exactly (1 - gamma).
        const std::size_t i = static_cast<std::size_t>(rank - 1);
        CHECK(machine.examine[i] / literal.examine[i] ==
              Catch::Approx(0.7).margin(1e-14));
    }
    for (int rank = 4; rank <= 6; ++rank) {
        const std::size_t i = static_cast<std::size_t>(rank - 1);
        CHECK(std::abs(machine.examine[i] - literal.examine[i]) <= 1e-12);
    }
    CHECK_FALSE(literal.notes.empty());

    // With per-item abandonment the psi-only survival terms drift away from
    // the machine at deeper rows too.
    config.abandon = AbandonModel::constant(0.2);
    const auto drifted =
        paper_formula_examine_prob(PaperVariant::RowSkipLiteral, config, rel, layout);
    const auto machine2 = examine_prob_grid(config, rel, layout);
    CHECK(std::abs(machine2.examine[3] - drifted.examine[3]) > 1e-6);
}
