#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rrmc/monte_carlo.hpp"

namespace rrmc {
namespace {

Eigen::VectorXd reference_pb() {
    Eigen::VectorXd pb(5);
    pb << 0.27, 0.15, 0.17, 0.18, 0.23;
    return pb;
}

SimConfig config_for(const SchemeParamsd& params, const Distributiond& init, Quantum quanta, std::int64_t walks,
                     std::uint64_t seed = 1) {
    return SimConfig{params, init, quanta, walks, seed, 1};
}

TEST(WalkStream, DeterministicAndDistinct) {
    WalkStream a(42, 0);
    WalkStream b(42, 0);
    WalkStream c(42, 1);
    WalkStream d(43, 0);
    for (int k = 0; k < 10; ++k) {
        const auto x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        EXPECT_NE(x, c.next_u64());
        EXPECT_NE(x, d.next_u64());
    }
    WalkStream e(0, 0);
    for (int k = 0; k < 1000; ++k) {
        const double u = e.next_unit();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Simulate, IdentityChainFreezesWalks) {
    const auto init = Distributiond::initial(reference_pb());
    const auto est = simulate(config_for(SchemeParamsd::make(0, 1, 0, 0, 5), init, 8, 1000));
    for (Eigen::Index n = 0; n <= 8; ++n) {
        EXPECT_EQ(est.counts.row(n), est.counts.row(0));
        EXPECT_EQ(est.counts.row(n).sum(), 1000);
    }
    const auto freq = est.frequencies();
    for (Eigen::Index n = 0; n <= 8; ++n) {
        EXPECT_NEAR(freq.row(n).sum(), 1.0, 1e-12);
    }
}

TEST(TraceWalk, DeterministicCycle) {
    const auto init = Distributiond::concentrated(StateIndex::process(2), 5);
    const auto path = trace_walk(config_for(SchemeParamsd::make(1, 0, 0, 0, 5), init, 7, 1), 0);
    const std::vector<int> expected = {2, 3, 4, 5, 1, 2, 3, 4};
    ASSERT_EQ(path.size(), expected.size());
    for (std::size_t n = 0; n < path.size(); ++n) {
        EXPECT_EQ(path[n], StateIndex::process(expected[n]));
    }
}

TEST(TraceWalk, DeadlockAbsorbs) {
    const auto config = config_for(SchemeParamsd::make(0.3, 0.2, 0.2, 0.3, 4), Distributiond::uniform(4), 30, 200, 9);
    for (std::int64_t walk = 0; walk < config.n_walks; ++walk) {
        const auto path = trace_walk(config, walk);
        bool absorbed = false;
        for (const auto& state : path) {
            if (absorbed) {
                EXPECT_TRUE(state.is_deadlock());
            }
            absorbed = absorbed || state.is_deadlock();
        }
    }
}

TEST(Simulate, DeadlockFrequencyFirstQuantum) {
    const auto preset = make_preset(SchemeId::I_B, {.r = 0.166}, reference_pb());
    const auto est = simulate(SimConfig::from_preset(preset, 10, 100000, 42));
    const double sigma = std::sqrt(0.166 * 0.834 / 1e5);
    EXPECT_NEAR(est.frequencies()(1, 5), 0.166, 3 * sigma);
}

TEST(Simulate, AgreesWithClosedForm) {
    const std::int64_t walks = 100000;
    for (SchemeId id : kAllSchemes) {
        FreeParams free;
        if (id == SchemeId::I_B || id == SchemeId::II_B) {
            free.r = 0.166;
        } else if (id == SchemeId::III_A) {
            free.p = 0.5;
        } else if (id == SchemeId::III_B) {
            free.p = 0.417;
            free.r = 0.166;
        }
        const auto preset = make_preset(id, free, id == SchemeId::IV ? unit_start(5) : reference_pb());
        const auto freq = simulate(SimConfig::from_preset(preset, 20, walks, 7)).frequencies();
        for (Quantum n = 0; n <= 20; ++n) {
            const auto exact = closed_form(preset, n).probs();
            for (Eigen::Index k = 0; k < 6; ++k) {
                const double observed = freq(n, k);
                const double bound = 4 * std::sqrt(observed * (1 - observed) / walks) + 1e-9;
                EXPECT_LE(std::abs(observed - exact[k]), bound) << to_string(id) << " n=" << n << " k=" << k;
            }
        }
    }
}

TEST(Simulate, IndependentOfThreadCount) {
    auto config = config_for(SchemeParamsd::make(0.4, 0.3, 0.2, 0.1, 6), Distributiond::uniform(6), 25, 5000, 99);
    const auto sequential = simulate(config);
    for (unsigned threads : {2u, 3u, 8u, 0u}) {
        config.threads = threads;
        EXPECT_EQ(simulate(config).counts, sequential.counts) << threads;
    }
    config.threads = 4;
    const auto a = absorption_times(config);
    config.threads = 1;
    const auto b = absorption_times(config);
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
        EXPECT_EQ(a.records[k].first_hit, b.records[k].first_hit);
    }
}

TEST(Simulate, InvalidConfig) {
    const auto params = SchemeParamsd::make(1, 0, 0, 0, 3);
    EXPECT_THROW(simulate(config_for(params, Distributiond::uniform(3), 0, 10)), Error);
    EXPECT_THROW(simulate(config_for(params, Distributiond::uniform(3), 5, 0)), Error);
    EXPECT_THROW(simulate(config_for(params, Distributiond::uniform(4), 5, 10)), Error);
}

TEST(AbsorptionTimes, CertainDeadlock) {
    const auto sample =
        absorption_times(config_for(SchemeParamsd::make(0, 0, 0, 1, 3), Distributiond::uniform(3), 10, 500));
    EXPECT_EQ(sample.absorbed(), 500);
    EXPECT_EQ(*sample.mean_first_hit(), 1.0);
    EXPECT_FALSE(sample.biased_low());
}

TEST(AbsorptionTimes, NoDeadlockCensorsAll) {
    const auto sample =
        absorption_times(config_for(SchemeParamsd::make(0.5, 0.5, 0, 0, 3), Distributiond::uniform(3), 10, 500));
    EXPECT_EQ(sample.censored(), 500);
    EXPECT_FALSE(sample.mean_first_hit().has_value());
    EXPECT_TRUE(sample.biased_low());
}

TEST(AbsorptionTimes, GeometricMean) {
    const double oracle_mean = oracle::geometric_mean_partial(0.166, 200);
    EXPECT_NEAR(oracle_mean, 1 / 0.166, 1e-12);
    for (SchemeId id : {SchemeId::I_B, SchemeId::II_B}) {
        const auto preset = make_preset(id, {.r = 0.166}, reference_pb());
        const auto sample = absorption_times(SimConfig::from_preset(preset, 200, 100000, 5));
        EXPECT_EQ(sample.censored(), 0);
        EXPECT_NEAR(*sample.mean_first_hit(), oracle_mean, 0.02 * oracle_mean);
    }
}

TEST(AbsorptionTimes, ShortHorizonIsFlaggedBiased) {
    const auto preset = make_preset(SchemeId::I_B, {.r = 0.166}, reference_pb());
    const auto sample = absorption_times(SimConfig::from_preset(preset, 5, 10000, 5));
    EXPECT_GT(sample.censored(), 0);
    EXPECT_TRUE(sample.biased_low());
    EXPECT_LT(*sample.mean_first_hit(), 1 / 0.166);
}

} // namespace
} // namespace rrmc
