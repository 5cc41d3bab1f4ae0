#include "rrmc/analysis.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

namespace rrmc {

double jain_fairness(const Eigen::Ref<const Eigen::VectorXd>& shares) {
    const auto m = static_cast<double>(shares.size());
    const double sum_sq = shares.squaredNorm();
    if (sum_sq <= 0.0) {
        return 1.0;
    }
    const double sum = shares.sum();
    return std::clamp(sum * sum / (m * sum_sq), 1.0 / m, 1.0);
}

SchemeMetrics metrics(const Trajectoryd& trajectory, const SchemeParamsd& params) {
    if (trajectory.size() == 0) {
        throw Error(ErrorCode::EmptyTrajectory, "no rows");
    }
    if (trajectory.process_count() != params.process_count()) {
        throw Error(ErrorCode::DimensionMismatch, "trajectory and parameters disagree on m");
    }
    const auto rows = static_cast<Eigen::Index>(trajectory.size());
    SchemeMetrics out;
    out.survival.resize(rows);
    out.fairness.resize(rows);
    for (Eigen::Index n = 0; n < rows; ++n) {
        const auto& row = trajectory[static_cast<std::size_t>(n)];
        out.survival[n] = std::clamp(1.0 - row.deadlock_mass(), 0.0, 1.0);
        out.fairness[n] = out.survival[n] > 0.0 ? jain_fairness(row.process_probs()) : 1.0;
    }
    out.efficiency_index = out.survival.cwiseProduct(out.fairness);
    out.expected_absorption =
        params.deadlock() > 0.0 ? 1.0 / params.deadlock() : std::numeric_limits<double>::infinity();
    return out;
}

ComparisonReport compare(const std::vector<SchemePreset>& presets, Quantum horizon) {
    if (presets.empty()) {
        throw Error(ErrorCode::InvalidConfig, "nothing to compare");
    }
    if (horizon < 1) {
        throw Error(ErrorCode::InvalidConfig, "horizon must be >= 1");
    }
    const int m = presets.front().params.process_count();
    ComparisonReport report;
    report.horizon = horizon;
    std::map<SchemeId, int> seen;
    for (const auto& preset : presets) {
        if (preset.params.process_count() != m) {
            throw Error(ErrorCode::MixedProcessCount, "all compared schemes must share m");
        }
        std::string label(to_string(preset.id));
        if (const int count = ++seen[preset.id]; count > 1) {
            label += "#" + std::to_string(count);
        }
        const auto trajectory = propagate(preset.init, build_matrix(preset.params), horizon);
        report.entries.push_back({std::move(label), preset, metrics(trajectory, preset.params)});
    }

    report.ranking.resize(report.entries.size());
    std::iota(report.ranking.begin(), report.ranking.end(), std::size_t{0});
    const auto at_horizon = [&](std::size_t k) { return report.entries[k].metrics.efficiency_index[horizon]; };
    std::stable_sort(report.ranking.begin(), report.ranking.end(), [&](std::size_t a, std::size_t b) {
        const double ia = at_horizon(a);
        const double ib = at_horizon(b);
        if (std::abs(ia - ib) > kRankingTieTolerance) {
            return ia > ib;
        }
        return report.entries[a].preset.id < report.entries[b].preset.id;
    });
    return report;
}

} // namespace rrmc
