#include "rrmc/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace rrmc {

namespace {

enum Slot { kAdvance, kStay, kDeadlock };

struct Rule {
    std::string_view name;
    std::string_view constraints;
    // Parameters the caller may set; q is pinned to 0 for every scheme.
    std::vector<Slot> free;
    // Values of the pinned parameters, indexed by Slot.
    std::array<double, 3> pinned;
    bool starts_on_first = false;
};

const Rule& rule_for(SchemeId id) {
    static const std::array<Rule, 7> rules = {{
        {"I_A", "q = 0, p = 0, r = 0, s = 1", {}, {0.0, 1.0, 0.0}},
        {"I_B", "q = 0, p = 0, r + s = 1", {kStay, kDeadlock}, {0.0, 0.0, 0.0}},
        {"II_A", "q = 0, s = 0, r = 0, p = 1", {}, {1.0, 0.0, 0.0}},
        {"II_B", "q = 0, s = 0, p + r = 1", {kAdvance, kDeadlock}, {0.0, 0.0, 0.0}},
        {"III_A", "q = 0, r = 0, p + s = 1", {kAdvance, kStay}, {0.0, 0.0, 0.0}},
        {"III_B", "q = 0, p + r + s = 1", {kAdvance, kStay, kDeadlock}, {0.0, 0.0, 0.0}},
        {"IV", "q = 0, s = 0, r = 0, p = 1, starts on P1", {}, {1.0, 0.0, 0.0}, true},
    }};
    return rules[static_cast<std::size_t>(id)];
}

const char* slot_name(Slot slot) {
    switch (slot) {
    case kAdvance: return "p";
    case kStay: return "s";
    case kDeadlock: return "r";
    }
    return "?";
}

std::array<std::optional<double>, 3> supplied_slots(const FreeParams& free) { return {free.p, free.s, free.r}; }

bool is_free(const Rule& rule, Slot slot) { return std::find(rule.free.begin(), rule.free.end(), slot) != rule.free.end(); }

void check_range(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::InvalidParams, std::string(name) + " outside [0, 1]");
    }
}

Distributiond initial_for(const Rule& rule, const Eigen::VectorXd& pb) {
    if (pb.size() < 2) {
        throw Error(ErrorCode::InvalidParams, "process count must be >= 2, got " + std::to_string(pb.size()));
    }
    Distributiond init = Distributiond::initial(pb);
    if (rule.starts_on_first) {
        const Eigen::VectorXd expected = unit_start(static_cast<int>(pb.size()));
        if ((pb - expected).cwiseAbs().maxCoeff() > kStochasticTolerance) {
            throw Error(ErrorCode::ConstraintViolation, std::string(rule.name) + " starts with all mass on P1");
        }
    }
    return init;
}

SchemePreset assemble(SchemeId id, const std::array<double, 3>& values, const Eigen::VectorXd& pb) {
    const Rule& rule = rule_for(id);
    Distributiond init = initial_for(rule, pb);
    auto params = SchemeParamsd::make(values[kAdvance], values[kStay], 0.0, values[kDeadlock],
                                      static_cast<int>(pb.size()));
    return SchemePreset{id, params, std::move(init)};
}

// w[k] = C(n, k) a^k b^(n-k) for k = 0..n.
std::vector<double> binomial_weights(Quantum n, double a, double b) {
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    if (a == 0.0) {
        w.front() = std::pow(b, static_cast<double>(n));
        return w;
    }
    if (b == 0.0) {
        w.back() = std::pow(a, static_cast<double>(n));
        return w;
    }
    const double log_a = std::log(a);
    const double log_b = std::log(b);
    const double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    for (Quantum k = 0; k <= n; ++k) {
        const auto kd = static_cast<double>(k);
        const auto rest = static_cast<double>(n - k);
        const double log_term =
            log_n_fact - std::lgamma(kd + 1.0) - std::lgamma(rest + 1.0) + kd * log_a + rest * log_b;
        w[static_cast<std::size_t>(k)] = std::exp(log_term);
    }
    return w;
}

// out_i = pb_{wrap(i - shift)}
Eigen::VectorXd rotate(const Eigen::VectorXd& pb, Quantum shift) {
    const int m = static_cast<int>(pb.size());
    Eigen::VectorXd out(m);
    for (int i = 1; i <= m; ++i) {
        out[i - 1] = pb[wrap_process(i - shift, m) - 1];
    }
    return out;
}

} // namespace

std::string_view to_string(SchemeId id) { return rule_for(id).name; }

std::string_view constraint_text(SchemeId id) { return rule_for(id).constraints; }

std::optional<SchemeId> parse_scheme_id(std::string_view text) {
    std::string canonical(text);
    for (char& c : canonical) {
        if (c == '[') {
            c = '_';
        }
        if (c >= 'a' && c <= 'z') {
            c = static_cast<char>(c - 'a' + 'A');
        }
    }
    canonical.erase(std::remove(canonical.begin(), canonical.end(), ']'), canonical.end());
    for (SchemeId id : kAllSchemes) {
        if (canonical == rule_for(id).name) {
            return id;
        }
    }
    return std::nullopt;
}

Eigen::VectorXd unit_start(int process_count) {
    Eigen::VectorXd pb = Eigen::VectorXd::Zero(process_count);
    if (process_count > 0) {
        pb[0] = 1.0;
    }
    return pb;
}

SchemePreset make_preset(SchemeId id, const FreeParams& free, const Eigen::VectorXd& pb) {
    const Rule& rule = rule_for(id);
    const std::string scheme(rule.name);
    if (free.q) {
        throw Error(ErrorCode::ConstraintViolation, scheme + " fixes q = 0");
    }
    const auto supplied = supplied_slots(free);
    std::array<double, 3> values = rule.pinned;
    std::size_t given = 0;
    double given_sum = 0.0;
    for (Slot slot : {kAdvance, kStay, kDeadlock}) {
        if (!supplied[slot]) {
            continue;
        }
        if (!is_free(rule, slot)) {
            throw Error(ErrorCode::ConstraintViolation,
                        scheme + " fixes " + slot_name(slot) + " (" + std::string(rule.constraints) + ")");
        }
        check_range(*supplied[slot], slot_name(slot));
        values[slot] = *supplied[slot];
        given_sum += *supplied[slot];
        ++given;
    }
    if (!rule.free.empty()) {
        const std::size_t needed = rule.free.size() - 1;
        if (given != needed) {
            throw Error(ErrorCode::ConstraintViolation, scheme + " takes exactly " + std::to_string(needed) +
                                                            " of its free parameters, got " + std::to_string(given));
        }
        double remainder = 1.0 - given_sum;
        if (remainder < -kInputTolerance) {
            throw Error(ErrorCode::ConstraintViolation, scheme + ": supplied probabilities exceed 1");
        }
        remainder = std::max(remainder, 0.0);
        for (Slot slot : rule.free) {
            if (!supplied[slot]) {
                values[slot] = remainder;
            }
        }
    }
    return assemble(id, values, pb);
}

SchemePreset make_preset_lenient(SchemeId id, const FreeParams& free, const Eigen::VectorXd& pb) {
    const Rule& rule = rule_for(id);
    const auto supplied = supplied_slots(free);
    std::array<double, 3> values = rule.pinned;
    if (!rule.free.empty()) {
        const std::size_t needed = rule.free.size() - 1;
        std::vector<Slot> open;
        double used = 0.0;
        std::size_t taken = 0;
        for (Slot slot : rule.free) {
            if (supplied[slot] && taken < needed) {
                check_range(*supplied[slot], slot_name(slot));
                values[slot] = *supplied[slot];
                used += *supplied[slot];
                ++taken;
            } else {
                open.push_back(slot);
            }
        }
        const double remainder = 1.0 - used;
        if (remainder < -kInputTolerance) {
            throw Error(ErrorCode::ConstraintViolation, std::string(rule.name) + ": supplied probabilities exceed 1");
        }
        for (Slot slot : open) {
            values[slot] = std::max(remainder, 0.0) / static_cast<double>(open.size());
        }
    }
    return assemble(id, values, pb);
}

Distributiond closed_form(const SchemePreset& preset, Quantum n) {
    if (n < 0) {
        throw Error(ErrorCode::InvalidConfig, "quantum must be non-negative");
    }
    const int m = preset.params.process_count();
    const Eigen::VectorXd pb = preset.init.process_probs();
    const double advance = preset.params.advance();
    const double stay = preset.params.stay();
    const auto nd = static_cast<double>(n);

    Eigen::VectorXd probs = Eigen::VectorXd::Zero(m + 1);
    auto processes = probs.head(m);
    double deadlock = 0.0;

    switch (preset.id) {
    case SchemeId::I_A:
        processes = pb;
        break;
    case SchemeId::I_B: {
        const double survive = std::pow(stay, nd);
        processes = pb * survive;
        deadlock = 1.0 - survive;
        break;
    }
    case SchemeId::II_A:
        processes = rotate(pb, n);
        break;
    case SchemeId::II_B: {
        const double survive = std::pow(advance, nd);
        processes = rotate(pb, n) * survive;
        deadlock = 1.0 - survive;
        break;
    }
    case SchemeId::III_A:
    case SchemeId::III_B: {
        // Unrolling the one-step recursion gives sum_k C(n,k) p^k s^(n-k) pb_{i-k};
        // terms whose shifts agree mod m are folded first.
        const std::vector<double> weights = binomial_weights(n, advance, stay);
        Eigen::VectorXd by_shift = Eigen::VectorXd::Zero(m);
        for (std::size_t k = 0; k < weights.size(); ++k) {
            by_shift[static_cast<Eigen::Index>(k % static_cast<std::size_t>(m))] += weights[k];
        }
        for (int shift = 0; shift < m; ++shift) {
            if (by_shift[shift] != 0.0) {
                processes += by_shift[shift] * rotate(pb, shift);
            }
        }
        if (preset.id == SchemeId::III_B) {
            deadlock = 1.0 - std::pow(advance + stay, nd);
        }
        break;
    }
    case SchemeId::IV:
        processes[wrap_process(1 + n, m) - 1] = 1.0;
        break;
    }
    probs[m] = deadlock;
    return Distributiond(std::move(probs), n, detail::Unchecked{});
}

Trajectoryd closed_form_trajectory(const SchemePreset& preset, Quantum n) {
    if (n < 0) {
        throw Error(ErrorCode::InvalidConfig, "quantum count must be non-negative");
    }
    std::vector<Distributiond> rows;
    rows.reserve(static_cast<std::size_t>(n) + 1);
    for (Quantum k = 0; k <= n; ++k) {
        rows.push_back(closed_form(preset, k));
    }
    return Trajectoryd::from_rows(std::move(rows));
}

} // namespace rrmc
