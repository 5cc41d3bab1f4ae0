#include "rrmc/monte_carlo.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <thread>

namespace rrmc {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Inverse CDF over a fixed category order. Falls back to the last category
// with positive weight when rounding leaves u above the final cumulative sum.
template <std::size_t N>
struct Categorical {
    std::array<double, N> cumulative{};
    std::size_t last_positive = 0;

    template <typename Weights>
    explicit Categorical(const Weights& weights) {
        double acc = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            acc += weights[k];
            cumulative[k] = acc;
            if (weights[k] > 0.0) {
                last_positive = k;
            }
        }
    }

    std::size_t draw(double u) const {
        for (std::size_t k = 0; k < N; ++k) {
            if (u < cumulative[k]) {
                return k;
            }
        }
        return last_positive;
    }
};

// Dynamic-size variant for the initial distribution.
struct InitialSampler {
    std::vector<double> cumulative;
    Eigen::Index last_positive = 0;

    explicit InitialSampler(const Eigen::VectorXd& probs) : cumulative(static_cast<std::size_t>(probs.size())) {
        double acc = 0.0;
        for (Eigen::Index k = 0; k < probs.size(); ++k) {
            acc += probs[k];
            cumulative[static_cast<std::size_t>(k)] = acc;
            if (probs[k] > 0.0) {
                last_positive = k;
            }
        }
    }

    Eigen::Index draw(double u) const {
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        if (it == cumulative.end()) {
            return last_positive;
        }
        return static_cast<Eigen::Index>(it - cumulative.begin());
    }
};

enum Move : std::size_t { kAdvance, kStay, kRetreat, kDeadlock };

class Walker {
public:
    explicit Walker(const SimConfig& config)
        : config_(config),
          m_(config.params.process_count()),
          initial_(config.init.probs()),
          moves_(std::array<double, 4>{config.params.advance(), config.params.stay(), config.params.retreat(),
                                       config.params.deadlock()}) {}

    // Calls visit(quantum, state offset) for quanta 0..n_quanta. State
    // offsets are 0..m-1 for processes and m for D.
    template <typename Visit>
    void run(std::int64_t walk, Visit&& visit) const {
        WalkStream stream(config_.seed, static_cast<std::uint64_t>(walk));
        Eigen::Index state = initial_.draw(stream.next_unit());
        visit(Quantum{0}, state);
        for (Quantum n = 1; n <= config_.n_quanta; ++n) {
            if (state != m_) {
                state = next_state(state, stream.next_unit());
            }
            visit(n, state);
        }
    }

    int process_count() const { return m_; }

private:
    Eigen::Index next_state(Eigen::Index state, double u) const {
        const auto i = static_cast<int>(state) + 1;
        switch (moves_.draw(u)) {
        case kAdvance: return wrap_process(i + 1, m_) - 1;
        case kStay: return state;
        case kRetreat: return wrap_process(i - 1, m_) - 1;
        default: return m_;
        }
    }

    const SimConfig& config_;
    int m_;
    InitialSampler initial_;
    Categorical<4> moves_;
};

unsigned worker_count(const SimConfig& config) {
    unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    return static_cast<unsigned>(std::min<std::int64_t>(threads, config.n_walks));
}

// Runs body(first, last) over contiguous walk ranges, one per worker.
template <typename Body>
void for_each_chunk(const SimConfig& config, Body&& body) {
    const unsigned workers = worker_count(config);
    if (workers <= 1) {
        body(0, config.n_walks, 0u);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::int64_t chunk = (config.n_walks + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::int64_t first = std::min<std::int64_t>(config.n_walks, chunk * w);
        const std::int64_t last = std::min<std::int64_t>(config.n_walks, first + chunk);
        pool.emplace_back([&body, first, last, w] { body(first, last, w); });
    }
    for (auto& t : pool) {
        t.join();
    }
}

} // namespace

WalkStream::WalkStream(std::uint64_t seed, std::uint64_t walk) : state_(seed) {
    std::uint64_t key = walk;
    state_ ^= splitmix64(key);
    splitmix64(state_);
}

std::uint64_t WalkStream::next_u64() { return splitmix64(state_); }

double WalkStream::next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

SimConfig SimConfig::from_preset(const SchemePreset& preset, Quantum n_quanta, std::int64_t n_walks,
                                 std::uint64_t seed) {
    return SimConfig{preset.params, preset.init, n_quanta, n_walks, seed, 1};
}

void validate(const SimConfig& config) {
    if (config.n_walks < 1) {
        throw Error(ErrorCode::InvalidConfig, "n_walks must be >= 1");
    }
    if (config.n_quanta < 1) {
        throw Error(ErrorCode::InvalidConfig, "n_quanta must be >= 1");
    }
    if (config.init.process_count() != config.params.process_count()) {
        throw Error(ErrorCode::InvalidConfig, "initial distribution and parameters disagree on m");
    }
}

Eigen::MatrixXd OccupancyEstimate::frequencies() const {
    return counts.cast<double>() / static_cast<double>(n_walks);
}

OccupancyEstimate simulate(const SimConfig& config) {
    validate(config);
    const Walker walker(config);
    const int m = walker.process_count();
    const auto rows = static_cast<Eigen::Index>(config.n_quanta) + 1;

    std::vector<OccupancyEstimate::Counts> partial(worker_count(config),
                                                   OccupancyEstimate::Counts::Zero(rows, m + 1));
    for_each_chunk(config, [&](std::int64_t first, std::int64_t last, unsigned worker) {
        auto& counts = partial[worker];
        for (std::int64_t walk = first; walk < last; ++walk) {
            [[maybe_unused]] bool absorbed = false;
            walker.run(walk, [&](Quantum n, Eigen::Index state) {
                assert(!absorbed || state == m);
                absorbed = state == m;
                ++counts(static_cast<Eigen::Index>(n), state);
            });
        }
    });

    OccupancyEstimate estimate{OccupancyEstimate::Counts::Zero(rows, m + 1), config.n_walks};
    for (const auto& counts : partial) {
        estimate.counts += counts;
    }
    return estimate;
}

std::vector<StateIndex> trace_walk(const SimConfig& config, std::int64_t walk) {
    validate(config);
    if (walk < 0 || walk >= config.n_walks) {
        throw Error(ErrorCode::InvalidConfig, "walk index out of range");
    }
    const Walker walker(config);
    const int m = walker.process_count();
    std::vector<StateIndex> path;
    path.reserve(static_cast<std::size_t>(config.n_quanta) + 1);
    walker.run(walk, [&](Quantum, Eigen::Index state) {
        path.push_back(state == m ? StateIndex::deadlock() : StateIndex::process(static_cast<int>(state) + 1));
    });
    return path;
}

AbsorptionSample absorption_times(const SimConfig& config) {
    validate(config);
    const Walker walker(config);
    const int m = walker.process_count();
    AbsorptionSample sample;
    sample.horizon = config.n_quanta;
    sample.records.resize(static_cast<std::size_t>(config.n_walks));
    for_each_chunk(config, [&](std::int64_t first, std::int64_t last, unsigned) {
        for (std::int64_t walk = first; walk < last; ++walk) {
            auto& record = sample.records[static_cast<std::size_t>(walk)];
            walker.run(walk, [&](Quantum n, Eigen::Index state) {
                if (state == m && !record.first_hit) {
                    record.first_hit = n;
                }
            });
        }
    });
    return sample;
}

std::int64_t AbsorptionSample::absorbed() const {
    return std::count_if(records.begin(), records.end(), [](const AbsorptionRecord& r) { return !r.censored(); });
}

std::int64_t AbsorptionSample::censored() const { return static_cast<std::int64_t>(records.size()) - absorbed(); }

std::optional<double> AbsorptionSample::mean_first_hit() const {
    double total = 0.0;
    std::int64_t hits = 0;
    for (const auto& record : records) {
        if (record.first_hit) {
            total += static_cast<double>(*record.first_hit);
            ++hits;
        }
    }
    if (hits == 0) {
        return std::nullopt;
    }
    return total / static_cast<double>(hits);
}

bool AbsorptionSample::biased_low() const {
    return !records.empty() && static_cast<double>(censored()) > 0.001 * static_cast<double>(records.size());
}

} // namespace rrmc
