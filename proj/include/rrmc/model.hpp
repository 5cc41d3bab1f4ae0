#pragma once

// Ring-plus-deadlock Markov chain: m process states P1..Pm arranged in a
// circle and one absorbing deadlock state D. Each quantum the scheduler
// advances to the next process, stays, retreats to the previous one, or
// falls into D.
//
// Everything here is templated on the scalar type; the `...d` aliases at
// the bottom are what the rest of the library uses.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "rrmc/error.hpp"

namespace rrmc {

/// Absolute tolerance for stochasticity and conservation checks.
inline constexpr double kStochasticTolerance = 1e-12;
/// Inputs farther than this from summing to one are rejected; closer ones are renormalized.
inline constexpr double kInputTolerance = 1e-9;

using Quantum = std::int64_t;

/// 1-based circular index: wrap_process(0, m) == m, wrap_process(m + 1, m) == 1.
inline int wrap_process(std::int64_t k, int m) {
    const std::int64_t r = ((k - 1) % m + m) % m;
    return static_cast<int>(r) + 1;
}

class StateIndex {
public:
    static StateIndex process(int i) {
        if (i < 1) {
            throw Error(ErrorCode::InvalidParams, "process index must be >= 1, got " + std::to_string(i));
        }
        return StateIndex(i);
    }
    static constexpr StateIndex deadlock() { return StateIndex(0); }

    constexpr bool is_deadlock() const { return value_ == 0; }
    constexpr int process_number() const { return value_; }

    /// Position in an (m+1)-vector ordered P1..Pm, D.
    Eigen::Index offset(int m) const {
        if (is_deadlock()) {
            return m;
        }
        if (value_ > m) {
            throw Error(ErrorCode::DimensionMismatch,
                        "process P" + std::to_string(value_) + " outside 1.." + std::to_string(m));
        }
        return value_ - 1;
    }

    std::string name() const { return is_deadlock() ? std::string("D") : "P" + std::to_string(value_); }

    friend constexpr bool operator==(StateIndex a, StateIndex b) { return a.value_ == b.value_; }

private:
    constexpr explicit StateIndex(int value) : value_(value) {}
    int value_;
};

/// The four one-quantum transition probabilities plus the process count.
template <typename Scalar = double>
class SchemeParams {
    static_assert(std::is_floating_point_v<Scalar>);

public:
    static SchemeParams make(Scalar advance, Scalar stay, Scalar retreat, Scalar deadlock, int process_count) {
        if (process_count < 2) {
            throw Error(ErrorCode::InvalidParams, "process count must be >= 2, got " + std::to_string(process_count));
        }
        const Scalar values[] = {advance, stay, retreat, deadlock};
        const char* names[] = {"p", "s", "q", "r"};
        Scalar sum = 0;
        for (int k = 0; k < 4; ++k) {
            if (!(values[k] >= 0 && values[k] <= 1)) {
                throw Error(ErrorCode::InvalidParams, std::string(names[k]) + " outside [0, 1]");
            }
            sum += values[k];
        }
        using std::abs;
        if (abs(sum - Scalar(1)) > Scalar(kInputTolerance)) {
            throw Error(ErrorCode::InvalidParams, "p + s + q + r must equal 1");
        }
        return SchemeParams(advance / sum, stay / sum, retreat / sum, deadlock / sum, process_count);
    }

    Scalar advance() const { return advance_; }
    Scalar stay() const { return stay_; }
    Scalar retreat() const { return retreat_; }
    Scalar deadlock() const { return deadlock_; }
    int process_count() const { return process_count_; }

    template <typename Other>
    SchemeParams<Other> cast() const {
        return SchemeParams<Other>::make(Other(advance_), Other(stay_), Other(retreat_), Other(deadlock_),
                                         process_count_);
    }

    friend bool operator==(const SchemeParams&, const SchemeParams&) = default;

private:
    SchemeParams(Scalar advance, Scalar stay, Scalar retreat, Scalar deadlock, int process_count)
        : advance_(advance), stay_(stay), retreat_(retreat), deadlock_(deadlock), process_count_(process_count) {}

    Scalar advance_;
    Scalar stay_;
    Scalar retreat_;
    Scalar deadlock_;
    int process_count_;
};

namespace detail {
struct Unchecked {};
} // namespace detail

/// Probability vector over P1..Pm, D at one quantum.
template <typename Scalar = double>
class Distribution {
    static_assert(std::is_floating_point_v<Scalar>);

public:
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    /// Validates and, within kInputTolerance, renormalizes.
    static Distribution make(Vector probs, Quantum quantum = 0) {
        if (probs.size() < 3) {
            throw Error(ErrorCode::InvalidDistribution, "need at least two processes plus the deadlock state");
        }
        if (quantum < 0) {
            throw Error(ErrorCode::InvalidDistribution, "quantum must be non-negative");
        }
        for (Eigen::Index k = 0; k < probs.size(); ++k) {
            if (!(probs[k] >= 0 && probs[k] <= 1)) {
                throw Error(ErrorCode::InvalidDistribution, "entry " + std::to_string(k) + " outside [0, 1]");
            }
        }
        const Scalar sum = probs.sum();
        using std::abs;
        if (abs(sum - Scalar(1)) > Scalar(kInputTolerance)) {
            throw Error(ErrorCode::InvalidDistribution, "entries must sum to 1");
        }
        probs /= sum;
        return Distribution(std::move(probs), quantum, detail::Unchecked{});
    }

    /// Quantum-0 distribution with the given process probabilities and no deadlock mass.
    static Distribution initial(const Vector& process_probs) {
        Vector probs(process_probs.size() + 1);
        probs << process_probs, Scalar(0);
        return make(std::move(probs), 0);
    }

    static Distribution uniform(int process_count) {
        if (process_count < 2) {
            throw Error(ErrorCode::InvalidDistribution, "process count must be >= 2");
        }
        return initial(Vector::Constant(process_count, Scalar(1) / Scalar(process_count)));
    }

    static Distribution concentrated(StateIndex state, int process_count, Quantum quantum = 0) {
        Vector probs = Vector::Zero(process_count + 1);
        probs[state.offset(process_count)] = 1;
        return make(std::move(probs), quantum);
    }

    Distribution(Vector probs, Quantum quantum, detail::Unchecked) : probs_(std::move(probs)), quantum_(quantum) {}

    const Vector& probs() const { return probs_; }
    Quantum quantum() const { return quantum_; }
    int process_count() const { return static_cast<int>(probs_.size()) - 1; }
    Eigen::Index size() const { return probs_.size(); }

    Scalar operator[](StateIndex state) const { return probs_[state.offset(process_count())]; }
    Scalar deadlock_mass() const { return probs_[probs_.size() - 1]; }
    auto process_probs() const { return probs_.head(probs_.size() - 1); }

    template <typename Other>
    Distribution<Other> cast() const {
        return Distribution<Other>(probs_.template cast<Other>(), quantum_, detail::Unchecked{});
    }

private:
    Vector probs_;
    Quantum quantum_;
};

/// (m+1)x(m+1) row-stochastic matrix; rows and columns ordered P1..Pm, D.
template <typename Scalar = double>
class TransitionMatrix {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    TransitionMatrix(Matrix entries, detail::Unchecked) : entries_(std::move(entries)) {}

    const Matrix& entries() const { return entries_; }
    int process_count() const { return static_cast<int>(entries_.rows()) - 1; }
    Eigen::Index size() const { return entries_.rows(); }

    Scalar operator()(StateIndex from, StateIndex to) const {
        return entries_(from.offset(process_count()), to.offset(process_count()));
    }

private:
    Matrix entries_;
};

/// Successor of Pm is P1 and predecessor of P1 is Pm. For m = 2 both
/// neighbours coincide, so that entry carries p + q.
template <typename Scalar>
TransitionMatrix<Scalar> build_matrix(const SchemeParams<Scalar>& params) {
    const int m = params.process_count();
    using Matrix = typename TransitionMatrix<Scalar>::Matrix;
    Matrix entries = Matrix::Zero(m + 1, m + 1);
    for (int i = 1; i <= m; ++i) {
        const Eigen::Index row = i - 1;
        entries(row, wrap_process(i + 1, m) - 1) += params.advance();
        entries(row, row) += params.stay();
        entries(row, wrap_process(i - 1, m) - 1) += params.retreat();
        entries(row, m) += params.deadlock();
    }
    entries(m, m) = 1;
    return TransitionMatrix<Scalar>(std::move(entries), detail::Unchecked{});
}

/// One quantum: the row vector times the transition matrix.
template <typename Scalar>
Distribution<Scalar> step(const Distribution<Scalar>& dist, const TransitionMatrix<Scalar>& matrix) {
    if (dist.size() != matrix.size()) {
        throw Error(ErrorCode::DimensionMismatch, "distribution has " + std::to_string(dist.size()) +
                                                      " states, matrix has " + std::to_string(matrix.size()));
    }
    typename Distribution<Scalar>::Vector next = matrix.entries().transpose() * dist.probs();
    return Distribution<Scalar>(std::move(next), dist.quantum() + 1, detail::Unchecked{});
}

/// Distributions for quanta 0..N.
template <typename Scalar = double>
class Trajectory {
public:
    using Row = Distribution<Scalar>;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    /// Checks that quanta run 0, 1, 2, ... and that the deadlock mass never decreases.
    static Trajectory from_rows(std::vector<Row> rows) {
        if (rows.empty()) {
            throw Error(ErrorCode::EmptyTrajectory, "trajectory needs at least the quantum-0 row");
        }
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (rows[k].quantum() != static_cast<Quantum>(k)) {
                throw Error(ErrorCode::InvalidDistribution, "row " + std::to_string(k) + " has quantum " +
                                                                std::to_string(rows[k].quantum()));
            }
            if (rows[k].size() != rows.front().size()) {
                throw Error(ErrorCode::DimensionMismatch, "rows disagree on the number of states");
            }
            if (k > 0 && rows[k].deadlock_mass() < rows[k - 1].deadlock_mass() - Scalar(kStochasticTolerance)) {
                throw Error(ErrorCode::InvalidDistribution, "deadlock mass decreases at quantum " + std::to_string(k));
            }
        }
        return Trajectory(std::move(rows));
    }

    std::size_t size() const { return rows_.size(); }
    Quantum horizon() const { return static_cast<Quantum>(rows_.size()) - 1; }
    int process_count() const { return rows_.front().process_count(); }

    const Row& operator[](std::size_t n) const { return rows_[n]; }
    const Row& back() const { return rows_.back(); }
    auto begin() const { return rows_.begin(); }
    auto end() const { return rows_.end(); }

    /// One row per quantum, one column per state.
    Matrix as_matrix() const {
        Matrix out(static_cast<Eigen::Index>(rows_.size()), rows_.front().size());
        for (std::size_t n = 0; n < rows_.size(); ++n) {
            out.row(static_cast<Eigen::Index>(n)) = rows_[n].probs().transpose();
        }
        return out;
    }

private:
    explicit Trajectory(std::vector<Row> rows) : rows_(std::move(rows)) {}
    std::vector<Row> rows_;
};

template <typename Scalar>
Trajectory<Scalar> propagate(const Distribution<Scalar>& init, const TransitionMatrix<Scalar>& matrix, Quantum n) {
    if (init.size() != matrix.size()) {
        throw Error(ErrorCode::DimensionMismatch, "distribution has " + std::to_string(init.size()) +
                                                      " states, matrix has " + std::to_string(matrix.size()));
    }
    if (init.quantum() != 0) {
        throw Error(ErrorCode::InvalidDistribution, "propagation starts at quantum 0");
    }
    if (n < 0) {
        throw Error(ErrorCode::InvalidConfig, "quantum count must be non-negative");
    }
    std::vector<Distribution<Scalar>> rows;
    rows.reserve(static_cast<std::size_t>(n) + 1);
    rows.push_back(init);
    for (Quantum k = 0; k < n; ++k) {
        rows.push_back(step(rows.back(), matrix));
    }
    return Trajectory<Scalar>::from_rows(std::move(rows));
}

using SchemeParamsd = SchemeParams<double>;
using Distributiond = Distribution<double>;
using TransitionMatrixd = TransitionMatrix<double>;
using Trajectoryd = Trajectory<double>;

} // namespace rrmc
