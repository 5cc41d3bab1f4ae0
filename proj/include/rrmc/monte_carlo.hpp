#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

#include "rrmc/model.hpp"
#include "rrmc/schemes.hpp"

namespace rrmc {

/// Independent random stream per walk, keyed by (seed, walk index). The
/// draws of walk k do not depend on which thread runs it or in what order.
class WalkStream {
public:
    WalkStream(std::uint64_t seed, std::uint64_t walk);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double next_unit();

private:
    std::uint64_t state_;
};

struct SimConfig {
    SchemeParamsd params;
    Distributiond init;
    Quantum n_quanta = 1;
    std::int64_t n_walks = 1;
    std::uint64_t seed = 0;
    /// Worker threads; 0 picks the hardware concurrency. Does not affect results.
    unsigned threads = 1;

    static SimConfig from_preset(const SchemePreset& preset, Quantum n_quanta, std::int64_t n_walks,
                                 std::uint64_t seed);
};

/// Throws InvalidConfig unless n_walks >= 1, n_quanta >= 1 and the
/// parameters and initial distribution agree on m.
void validate(const SimConfig& config);

struct OccupancyEstimate {
    using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

    /// (n_quanta + 1) x (m + 1); row n counts walks in each state at quantum n.
    Counts counts;
    std::int64_t n_walks = 0;

    Eigen::MatrixXd frequencies() const;
};

OccupancyEstimate simulate(const SimConfig& config);

/// States visited by one walk at quanta 0..n_quanta.
std::vector<StateIndex> trace_walk(const SimConfig& config, std::int64_t walk);

struct AbsorptionRecord {
    /// First quantum spent in D; unset when the walk survives the horizon.
    std::optional<Quantum> first_hit;

    bool censored() const { return !first_hit.has_value(); }
};

struct AbsorptionSample {
    std::vector<AbsorptionRecord> records;
    Quantum horizon = 0;

    std::int64_t absorbed() const;
    std::int64_t censored() const;
    /// Mean over uncensored walks; empty when every walk was censored.
    std::optional<double> mean_first_hit() const;
    /// Censored mass above 0.1% of walks biases the mean low.
    bool biased_low() const;
};

AbsorptionSample absorption_times(const SimConfig& config);

} // namespace rrmc
