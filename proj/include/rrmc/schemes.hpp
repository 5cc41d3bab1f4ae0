#pragma once

// Named specializations of the general class. Every scheme has q = 0:
//
//   I_A    FIFO                      p = r = 0, s = 1
//   I_B    FIFO with deadlock        p = 0, s + r = 1
//   II_A   round robin               s = r = 0, p = 1
//   II_B   round robin with deadlock s = 0, p + r = 1
//   III_A  FIFO/round-robin mixture  r = 0, p + s = 1
//   III_B  mixture with deadlock     p + s + r = 1
//   IV     round robin from P1       s = r = 0, p = 1, start on P1

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "rrmc/model.hpp"

namespace rrmc {

enum class SchemeId { I_A, I_B, II_A, II_B, III_A, III_B, IV };

inline constexpr std::array<SchemeId, 7> kAllSchemes = {SchemeId::I_A,   SchemeId::I_B,   SchemeId::II_A, SchemeId::II_B,
                                                        SchemeId::III_A, SchemeId::III_B, SchemeId::IV};

std::string_view to_string(SchemeId id);
/// Accepts the canonical spelling ("III_A") and the bracketed one ("III[A]").
std::optional<SchemeId> parse_scheme_id(std::string_view text);
/// Human-readable constraint set, e.g. "q = 0, p = 0, r + s = 1".
std::string_view constraint_text(SchemeId id);

/// Transition probabilities supplied by the caller; the scheme fixes the rest.
struct FreeParams {
    std::optional<double> p;
    std::optional<double> s;
    std::optional<double> q;
    std::optional<double> r;
};

struct SchemePreset {
    SchemeId id;
    SchemeParamsd params;
    Distributiond init;
};

/// Rejects inputs that leave the parameters under- or over-determined,
/// any value for a parameter the scheme pins, and pb vectors that do not
/// sum to one. Scheme IV requires pb to be the unit vector on P1.
SchemePreset make_preset(SchemeId id, const FreeParams& free, const Eigen::VectorXd& pb);

/// Like make_preset, but ignores supplied values the scheme does not use
/// and splits any undetermined remainder evenly across the scheme's free
/// parameters (III_B with only r gives p = s = (1 - r) / 2).
SchemePreset make_preset_lenient(SchemeId id, const FreeParams& free, const Eigen::VectorXd& pb);

/// Unit mass on P1, the starting vector of scheme IV.
Eigen::VectorXd unit_start(int process_count);

/// Analytic distribution at quantum n, evaluated without the transition matrix.
Distributiond closed_form(const SchemePreset& preset, Quantum n);

/// closed_form for every quantum 0..n.
Trajectoryd closed_form_trajectory(const SchemePreset& preset, Quantum n);

} // namespace rrmc
