#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rrmc/analysis.hpp"

namespace rrmc {
namespace {

Eigen::VectorXd reference_pb() {
    Eigen::VectorXd pb(5);
    pb << 0.27, 0.15, 0.17, 0.18, 0.23;
    return pb;
}

SchemeMetrics metrics_of(const SchemePreset& preset, Quantum n) {
    return metrics(propagate(preset.init, build_matrix(preset.params), n), preset.params);
}

std::vector<SchemePreset> reference_presets(std::initializer_list<SchemeId> ids) {
    std::vector<SchemePreset> out;
    for (SchemeId id : ids) {
        FreeParams free{.r = 0.166};
        if (id == SchemeId::III_A) {
            free = {.p = 0.5};
        }
        out.push_back(make_preset_lenient(id, free, id == SchemeId::IV ? unit_start(5) : reference_pb()));
    }
    return out;
}

TEST(JainFairness, Extremes) {
    EXPECT_DOUBLE_EQ(jain_fairness(Eigen::VectorXd::Constant(5, 0.2)), 1.0);
    EXPECT_DOUBLE_EQ(jain_fairness(Eigen::VectorXd::Unit(5, 2)), 0.2);
    EXPECT_DOUBLE_EQ(jain_fairness(Eigen::VectorXd::Zero(5)), 1.0);
}

TEST(Metrics, UniformIsPerfectlyFair) {
    const auto params = SchemeParamsd::make(0.5, 0.5, 0, 0, 4);
    const auto m = metrics(propagate(Distributiond::uniform(4), build_matrix(params), 3), params);
    for (Eigen::Index n = 0; n <= 3; ++n) {
        EXPECT_DOUBLE_EQ(m.fairness[n], 1.0);
        EXPECT_DOUBLE_EQ(m.efficiency_index[n], 1.0);
        EXPECT_EQ(m.survival[n], 1.0);
    }
    EXPECT_TRUE(std::isinf(m.expected_absorption));
}

TEST(Metrics, UnitMassIsMaximallyUnfair) {
    const auto params = SchemeParamsd::make(0, 1, 0, 0, 5);
    const auto m = metrics(propagate(Distributiond::concentrated(StateIndex::process(4), 5), build_matrix(params), 2),
                           params);
    EXPECT_DOUBLE_EQ(m.fairness[2], 0.2);
}

TEST(Metrics, FifoWithDeadlockFirstQuantum) {
    const auto preset = make_preset(SchemeId::I_B, {.r = 0.166}, reference_pb());
    const auto m = metrics_of(preset, 1);
    EXPECT_NEAR(m.survival[1], 0.834, 1e-15);
    // 1 / (5 * 0.2096), computed directly.
    const double direct = 1.0 / (5.0 * (0.27 * 0.27 + 0.15 * 0.15 + 0.17 * 0.17 + 0.18 * 0.18 + 0.23 * 0.23));
    EXPECT_NEAR(direct, 0.954198473282, 1e-12);
    EXPECT_NEAR(m.fairness[1], direct, 1e-12);
    EXPECT_NEAR(m.efficiency_index[1], 0.834 * direct, 1e-12);
    EXPECT_NEAR(m.expected_absorption, 1 / 0.166, 1e-12);
}

TEST(Metrics, SurvivalZeroHasVacuousFairness) {
    const auto params = SchemeParamsd::make(0, 0, 0, 1, 3);
    const auto m = metrics(propagate(Distributiond::uniform(3), build_matrix(params), 2), params);
    EXPECT_EQ(m.survival[1], 0.0);
    EXPECT_EQ(m.fairness[1], 1.0);
    EXPECT_EQ(m.efficiency_index[1], 0.0);
}

TEST(Metrics, Invariants) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 2 + trial % 7;
        const auto w = oracle::random_simplex(rng, 4);
        const auto pb = oracle::random_simplex(rng, m);
        const auto params = SchemeParamsd::make(w[0], w[1], w[2], w[3], m);
        const auto metr = metrics(
            propagate(Distributiond::initial(Eigen::Map<const Eigen::VectorXd>(pb.data(), m)), build_matrix(params), 60),
            params);
        EXPECT_EQ(metr.survival[0], 1.0);
        for (Eigen::Index n = 0; n < metr.survival.size(); ++n) {
            if (n > 0) {
                EXPECT_LE(metr.survival[n], metr.survival[n - 1]);
            }
            EXPECT_GE(metr.fairness[n], 1.0 / m);
            EXPECT_LE(metr.fairness[n], 1.0);
            EXPECT_DOUBLE_EQ(metr.efficiency_index[n], metr.survival[n] * metr.fairness[n]);
        }
    }
}

TEST(Metrics, PeriodicFairnessForRoundRobin) {
    const auto rr = metrics_of(make_preset(SchemeId::II_A, {}, reference_pb()), 40);
    const auto iv = metrics_of(make_preset(SchemeId::IV, {}, unit_start(5)), 40);
    for (Eigen::Index n = 0; n + 5 <= 40; ++n) {
        EXPECT_NEAR(rr.fairness[n + 5], rr.fairness[n], 1e-15);
        EXPECT_DOUBLE_EQ(iv.fairness[n], 0.2);
        EXPECT_EQ(rr.survival[n], 1.0);
    }
}

TEST(Metrics, RotationInvariantForRoundRobin) {
    Eigen::VectorXd rotated(5);
    rotated << 0.23, 0.27, 0.15, 0.17, 0.18;
    const auto a = metrics_of(make_preset(SchemeId::II_A, {}, reference_pb()), 20);
    const auto b = metrics_of(make_preset(SchemeId::II_A, {}, rotated), 20);
    EXPECT_LT((a.efficiency_index - b.efficiency_index).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Compare, FairStartRanksFirst) {
    const auto unit = make_preset(SchemeId::I_A, {}, unit_start(5));
    const auto uniform = make_preset(SchemeId::I_A, {}, Eigen::VectorXd::Constant(5, 0.2));
    const auto report = compare({unit, uniform}, 10);
    EXPECT_EQ(report.ranking, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(report.entries[0].label, "I_A");
    EXPECT_EQ(report.entries[1].label, "I_A#2");
}

TEST(Compare, MixtureBeatsDeadlockingFifoAndRoundRobin) {
    const auto report = compare(reference_presets({SchemeId::I_B, SchemeId::II_B, SchemeId::III_A}), 50);
    EXPECT_EQ(report.ranked(0).preset.id, SchemeId::III_A);
    const auto with_deadlock = compare(reference_presets({SchemeId::I_B, SchemeId::II_B, SchemeId::III_B}), 50);
    EXPECT_EQ(with_deadlock.ranked(0).preset.id, SchemeId::III_B);
    // I_B and II_B are tied (Jain's index ignores rotation); rounding must not split them.
    EXPECT_EQ(with_deadlock.ranked(1).preset.id, SchemeId::I_B);
    EXPECT_EQ(with_deadlock.ranked(2).preset.id, SchemeId::II_B);
}

TEST(Compare, SingletonAndErrors) {
    const auto report = compare(reference_presets({SchemeId::II_A}), 3);
    ASSERT_EQ(report.ranking.size(), 1u);
    EXPECT_EQ(report.ranked(0).label, "II_A");

    const auto four = make_preset(SchemeId::I_A, {}, Eigen::VectorXd::Constant(4, 0.25));
    try {
        compare({four, reference_presets({SchemeId::I_A}).front()}, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MixedProcessCount);
    }
    EXPECT_THROW(compare({four}, 0), Error);
    EXPECT_THROW(compare({}, 5), Error);
}

TEST(Compare, TiesBrokenBySchemeOrder) {
    // I_A and II_A from a uniform start are both perfectly fair forever.
    const Eigen::VectorXd uniform = Eigen::VectorXd::Constant(5, 0.2);
    const auto report = compare({make_preset(SchemeId::II_A, {}, uniform), make_preset(SchemeId::I_A, {}, uniform)}, 7);
    EXPECT_EQ(report.ranked(0).preset.id, SchemeId::I_A);
    EXPECT_EQ(report.ranked(1).preset.id, SchemeId::II_A);
}

TEST(Compare, RankingUnchangedByRenormalizedPb) {
    const auto base = reference_presets({SchemeId::I_B, SchemeId::II_B, SchemeId::III_B});
    Eigen::VectorXd scaled = reference_pb() * 3.0;
    scaled /= scaled.sum();
    std::vector<SchemePreset> rescaled;
    for (const auto& p : base) {
        rescaled.push_back(make_preset_lenient(p.id, {.r = 0.166}, scaled));
    }
    EXPECT_EQ(compare(base, 50).ranking, compare(rescaled, 50).ranking);
}

} // namespace
} // namespace rrmc
