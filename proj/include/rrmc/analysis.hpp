#pragma once

// Deadlock and fairness metrics over trajectories, and side-by-side scheme
// comparison.
//
// The comparison index is defined here, not derived from the model:
//
//   efficiency_index(n) = survival(n) * jain(P1..Pm at n)
//
// where survival(n) = 1 - P[D at n] and jain(c) = (sum c)^2 / (m sum c^2)
// is Jain's fairness index of the process probabilities. Jain's index is
// scale-invariant, so it equals the index of the distribution conditioned
// on not being deadlocked. When no process mass is left the fairness is 1
// by convention and the index is carried to 0 by the survival factor.

#include <Eigen/Core>

#include <string>
#include <vector>

#include "rrmc/model.hpp"
#include "rrmc/schemes.hpp"

namespace rrmc {

struct SchemeMetrics {
    Eigen::VectorXd survival;
    /// 1 / r, or +infinity when r = 0.
    double expected_absorption = 0.0;
    Eigen::VectorXd fairness;
    Eigen::VectorXd efficiency_index;
};

/// Jain's index of non-negative shares; 1 when all shares are zero.
double jain_fairness(const Eigen::Ref<const Eigen::VectorXd>& shares);

SchemeMetrics metrics(const Trajectoryd& trajectory, const SchemeParamsd& params);

struct ComparisonEntry {
    /// Scheme id, suffixed "#2", "#3", ... when the same id is compared more than once.
    std::string label;
    SchemePreset preset;
    SchemeMetrics metrics;
};

struct ComparisonReport {
    std::vector<ComparisonEntry> entries;
    /// Indices into entries, best first by efficiency_index at the horizon.
    std::vector<std::size_t> ranking;
    Quantum horizon = 0;
    std::string engine = "matrix";

    const ComparisonEntry& ranked(std::size_t place) const { return entries[ranking[place]]; }
};

/// Index values closer than this are ranked as ties. Survival is computed as
/// 1 - P[D], so smaller absolute differences are rounding noise.
inline constexpr double kRankingTieTolerance = 1e-12;

/// Ties are broken by scheme id order (I_A, I_B, II_A, II_B, III_A, III_B, IV),
/// then by input position.
ComparisonReport compare(const std::vector<SchemePreset>& presets, Quantum horizon);

} // namespace rrmc
