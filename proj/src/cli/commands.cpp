#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rrmc/analysis.hpp"
#include "rrmc/cli.hpp"
#include "rrmc/monte_carlo.hpp"

namespace rrmc::cli {

namespace {

using nlohmann::ordered_json;

constexpr double kVerifyTolerance = 1e-10;

std::string header_row(int m) {
    std::string line = "quantum";
    for (int i = 1; i <= m; ++i) {
        line += ",P" + std::to_string(i);
    }
    return line + ",D\n";
}

ordered_json column_names(int m) {
    ordered_json names = ordered_json::array({"quantum"});
    for (int i = 1; i <= m; ++i) {
        names.push_back("P" + std::to_string(i));
    }
    names.push_back("D");
    return names;
}

// One row per quantum; columns P1..Pm, D.
std::string csv_table(const Eigen::MatrixXd& rows) {
    std::string text = header_row(static_cast<int>(rows.cols()) - 1);
    for (Eigen::Index n = 0; n < rows.rows(); ++n) {
        text += std::to_string(n);
        for (Eigen::Index k = 0; k < rows.cols(); ++k) {
            text += ',';
            text += format_number(rows(n, k));
        }
        text += '\n';
    }
    return text;
}

ordered_json json_rows(const Eigen::MatrixXd& rows) {
    ordered_json out = ordered_json::array();
    for (Eigen::Index n = 0; n < rows.rows(); ++n) {
        ordered_json row = ordered_json::array({n});
        for (Eigen::Index k = 0; k < rows.cols(); ++k) {
            row.push_back(rows(n, k));
        }
        out.push_back(std::move(row));
    }
    return out;
}

ordered_json envelope(const RunSpec& spec, std::string_view engine) {
    ordered_json meta = to_json(spec);
    meta["engine"] = std::string(engine);
    meta["version"] = std::string(kVersion);
    return ordered_json{{"meta", std::move(meta)}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

ordered_json finite_or_null(double value) { return std::isfinite(value) ? ordered_json(value) : ordered_json(nullptr); }

std::string render_trajectory(const RunSpec& spec, bool* verify_ok) {
    const Resolved resolved = resolve(spec);
    const bool closed = spec.command == Command::ClosedForm;
    const auto matrix_engine = [&] { return propagate(resolved.init, build_matrix(resolved.params), spec.quanta); };
    const auto closed_engine = [&] { return closed_form_trajectory(*resolved.preset, spec.quanta); };

    const Trajectoryd trajectory = closed ? closed_engine() : matrix_engine();
    const Eigen::MatrixXd rows = trajectory.as_matrix();
    double divergence = 0.0;
    if (spec.verify) {
        const Eigen::MatrixXd other = (closed ? matrix_engine() : closed_engine()).as_matrix();
        divergence = (rows - other).cwiseAbs().maxCoeff();
        if (verify_ok != nullptr) {
            *verify_ok = divergence <= kVerifyTolerance;
        }
    }
    if (spec.format == Format::Csv) {
        return csv_table(rows);
    }
    ordered_json j = envelope(spec, closed ? "closed-form" : "matrix");
    if (spec.verify) {
        j["verify"] = {{"max_abs_difference", divergence}, {"tolerance", kVerifyTolerance}};
    }
    j["columns"] = column_names(trajectory.process_count());
    j["rows"] = json_rows(rows);
    return dump(j);
}

SimConfig sim_config(const RunSpec& spec) {
    const Resolved resolved = resolve(spec);
    return SimConfig{resolved.params, resolved.init, spec.quanta, spec.walks, spec.seed, spec.threads};
}

std::string render_simulation(const RunSpec& spec) {
    const OccupancyEstimate estimate = simulate(sim_config(spec));
    const Eigen::MatrixXd freq = estimate.frequencies();
    if (spec.format == Format::Csv) {
        return csv_table(freq);
    }
    ordered_json j = envelope(spec, "monte-carlo");
    j["columns"] = column_names(static_cast<int>(freq.cols()) - 1);
    j["rows"] = json_rows(freq);
    ordered_json counts = ordered_json::array();
    for (Eigen::Index n = 0; n < estimate.counts.rows(); ++n) {
        ordered_json row = ordered_json::array({n});
        for (Eigen::Index k = 0; k < estimate.counts.cols(); ++k) {
            row.push_back(estimate.counts(n, k));
        }
        counts.push_back(std::move(row));
    }
    j["counts"] = std::move(counts);
    return dump(j);
}

std::string render_absorption(const RunSpec& spec) {
    const SimConfig config = sim_config(spec);
    const AbsorptionSample sample = absorption_times(config);
    const auto mean = sample.mean_first_hit();
    const double analytic = config.params.deadlock() > 0.0 ? 1.0 / config.params.deadlock()
                                                           : std::numeric_limits<double>::infinity();
    if (spec.format == Format::Csv) {
        std::string text = "statistic,value\n";
        text += "walks," + std::to_string(sample.records.size()) + "\n";
        text += "horizon," + std::to_string(sample.horizon) + "\n";
        text += "absorbed," + std::to_string(sample.absorbed()) + "\n";
        text += "censored," + std::to_string(sample.censored()) + "\n";
        text += "mean_first_hit," + (mean ? format_number(*mean) : std::string("nan")) + "\n";
        text += "expected_absorption," + format_number(analytic) + "\n";
        text += std::string("biased_low,") + (sample.biased_low() ? "true" : "false") + "\n";
        return text;
    }
    ordered_json histogram = ordered_json::array();
    std::vector<std::int64_t> per_quantum(static_cast<std::size_t>(sample.horizon) + 1, 0);
    for (const auto& record : sample.records) {
        if (record.first_hit) {
            ++per_quantum[static_cast<std::size_t>(*record.first_hit)];
        }
    }
    for (std::size_t n = 0; n < per_quantum.size(); ++n) {
        histogram.push_back({n, per_quantum[n]});
    }
    ordered_json j = envelope(spec, "monte-carlo");
    j["summary"] = {{"walks", sample.records.size()},
                    {"horizon", sample.horizon},
                    {"absorbed", sample.absorbed()},
                    {"censored", sample.censored()},
                    {"mean_first_hit", mean ? ordered_json(*mean) : ordered_json(nullptr)},
                    {"expected_absorption", finite_or_null(analytic)},
                    {"biased_low", sample.biased_low()}};
    j["first_hit_histogram"] = std::move(histogram);
    return dump(j);
}

std::string render_comparison(const RunSpec& spec) {
    const ComparisonReport report = compare(resolve_all(spec), spec.quanta);
    const auto horizon = static_cast<Eigen::Index>(report.horizon);
    if (spec.format == Format::Csv) {
        std::string text = "rank,scheme,survival,fairness,efficiency_index,expected_absorption\n";
        for (std::size_t place = 0; place < report.ranking.size(); ++place) {
            const auto& entry = report.ranked(place);
            text += std::to_string(place + 1) + "," + entry.label + "," +
                    format_number(entry.metrics.survival[horizon]) + "," +
                    format_number(entry.metrics.fairness[horizon]) + "," +
                    format_number(entry.metrics.efficiency_index[horizon]) + "," +
                    format_number(entry.metrics.expected_absorption) + "\n";
        }
        return text;
    }
    ordered_json j = envelope(spec, report.engine);
    j["horizon"] = report.horizon;
    j["ranking"] = ordered_json::array();
    for (std::size_t place = 0; place < report.ranking.size(); ++place) {
        j["ranking"].push_back(report.ranked(place).label);
    }
    j["schemes"] = ordered_json::array();
    for (const auto& entry : report.entries) {
        const auto& params = entry.preset.params;
        j["schemes"].push_back({
            {"label", entry.label},
            {"scheme", std::string(rrmc::to_string(entry.preset.id))},
            {"params",
             {{"p", params.advance()}, {"s", params.stay()}, {"q", params.retreat()}, {"r", params.deadlock()}}},
            {"pb", vector_json(entry.preset.init.process_probs())},
            {"expected_absorption", finite_or_null(entry.metrics.expected_absorption)},
            {"survival", vector_json(entry.metrics.survival)},
            {"fairness", vector_json(entry.metrics.fairness)},
            {"efficiency_index", vector_json(entry.metrics.efficiency_index)},
        });
    }
    return dump(j);
}

void write_traces(const RunSpec& spec) {
    const SimConfig config = sim_config(spec);
    std::ostringstream text;
    text << "walk,quantum,state\n";
    for (std::int64_t walk = 0; walk < spec.traces; ++walk) {
        const auto path = trace_walk(config, walk);
        for (std::size_t n = 0; n < path.size(); ++n) {
            text << walk << ',' << n << ',' << path[n].name() << '\n';
        }
    }
    std::ofstream file(spec.trace_file, std::ios::binary);
    file << text.str();
    if (!file) {
        throw std::ios_base::failure("cannot write " + spec.trace_file);
    }
}

} // namespace

std::string format_number(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 12);
    return std::string(buffer, ptr);
}

std::string render(const RunSpec& spec, bool* verify_ok) {
    if (verify_ok != nullptr) {
        *verify_ok = true;
    }
    switch (spec.command) {
    case Command::Run:
    case Command::ClosedForm: return render_trajectory(spec, verify_ok);
    case Command::Simulate: return render_simulation(spec);
    case Command::Absorb: return render_absorption(spec);
    case Command::Compare: return render_comparison(spec);
    }
    return {};
}

int run_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunSpec spec;
    std::string text;
    bool verify_ok = true;
    try {
        auto parsed = parse_args(argc, argv, out);
        if (!parsed) {
            return exit_code::kOk;
        }
        spec = std::move(*parsed);
        text = render(spec, &verify_ok);
    } catch (const UsageError& e) {
        err << "rrmc: " << e.what() << "\nRun with --help for usage.\n";
        return exit_code::kUsage;
    } catch (const Error& e) {
        err << "rrmc: " << e.what() << "\n";
        return exit_code::kConstraint;
    }

    try {
        if (spec.output.empty()) {
            out << text << std::flush;
            if (!out) {
                throw std::ios_base::failure("cannot write to standard output");
            }
        } else {
            std::ofstream file(spec.output, std::ios::binary);
            file << text;
            file.close();
            if (!file) {
                throw std::ios_base::failure("cannot write " + spec.output);
            }
        }
        if (spec.traces > 0) {
            write_traces(spec);
        }
    } catch (const std::ios_base::failure& e) {
        err << "rrmc: " << e.what() << "\n";
        return exit_code::kIo;
    }

    if (!verify_ok) {
        err << "rrmc: closed form and matrix propagation diverge beyond 1e-10\n";
        return exit_code::kVerifyFailed;
    }
    return exit_code::kOk;
}

} // namespace rrmc::cli
