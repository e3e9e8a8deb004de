// Command-line front end: flag parsing (with optional key=value config file),
// the `sweep` and `diff` subcommands, and the exit-code contract
// (0 ok, 1 usage, 2 self-check failure, 3 I/O).

#pragma once

#include "squidmw/sweep.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <complex>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace squidmw {

namespace cli_detail {

constexpr double kUnsetSentinel = std::numeric_limits<double>::quiet_NaN();

struct SweepBindings {
    std::string state = "number-sep";
    int n1 = 1;
    int n2 = 4;
    double a1_mag = 1.0;
    double a1_phase = 0.0;
    double a2_mag = 2.0;
    double a2_phase = 0.0;
    double q = 1.0;
    double omega1 = 1.2e-4;
    double omega2 = 1.0e-4;
    double omega_a = kUnsetSentinel;  // defaults to omega1
    double omega_b = kUnsetSentinel;  // defaults to omega2
    double i1 = 1.0;
    double i2 = 1.0;
    double t_start = 0.0;
    double t_end = kUnsetSentinel;  // defaults to t_start + 4 pi / |omega1 - omega2|
    int steps = 2000;
    int dim = 40;
    std::string method = "both";
    std::string format = "csv";
    std::string out = "sweep.csv";
};

inline const std::map<std::string, StateKind>& state_kind_map() {
    static const std::map<std::string, StateKind> m = {
        {"number-sep", StateKind::number_sep},
        {"number-ent", StateKind::number_ent},
        {"coherent-sep", StateKind::coherent_sep},
        {"coherent-ent", StateKind::coherent_ent},
        {"factorized-number", StateKind::factorized_number},
        {"factorized-coherent", StateKind::factorized_coherent},
    };
    return m;
}

inline void add_sweep_options(CLI::App& app, SweepBindings& b) {
    app.add_option("--state", b.state, "State kind")
        ->check(CLI::IsMember({"number-sep", "number-ent", "coherent-sep", "coherent-ent",
                               "factorized-number", "factorized-coherent"}))
        ->capture_default_str();
    app.add_option("--n1", b.n1, "Photon number N1")->capture_default_str();
    app.add_option("--n2", b.n2, "Photon number N2")->capture_default_str();
    app.add_option("--a1-mag", b.a1_mag, "|A1|")->capture_default_str();
    app.add_option("--a1-phase", b.a1_phase, "arg(A1) in radians")->capture_default_str();
    app.add_option("--a2-mag", b.a2_mag, "|A2|")->capture_default_str();
    app.add_option("--a2-phase", b.a2_phase, "arg(A2) in radians")->capture_default_str();
    app.add_option("--q", b.q, "Ring-field coupling q = sqrt(2) e xi")
        ->capture_default_str();
    app.add_option("--omega1", b.omega1, "Drive-mode frequency for ring A")
        ->capture_default_str();
    app.add_option("--omega2", b.omega2, "Drive-mode frequency for ring B")
        ->capture_default_str();
    app.add_option("--omega-a", b.omega_a, "Ring A bias frequency (default: omega1)");
    app.add_option("--omega-b", b.omega_b, "Ring B bias frequency (default: omega2)");
    app.add_option("--i1", b.i1, "Critical current of ring A")->capture_default_str();
    app.add_option("--i2", b.i2, "Critical current of ring B")->capture_default_str();
    app.add_option("--t-start", b.t_start, "Grid start time")->capture_default_str();
    app.add_option("--t-end", b.t_end,
                   "Grid end time (default: t-start + 4 pi / |omega1 - omega2|)");
    app.add_option("--steps", b.steps, "Number of grid points (>= 2)")
        ->capture_default_str();
    app.add_option("--dim", b.dim, "Fock truncation dimension")->capture_default_str();
    app.add_option("--method", b.method, "Evaluation route")
        ->check(CLI::IsMember({"analytic", "numeric", "both"}))
        ->capture_default_str();
    app.add_option("--format", b.format, "Series file format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    app.add_option("--out", b.out, "Series output path")->capture_default_str();
    app.set_config("--config", "", "Read options from a key=value config file");
}

inline SweepSpec resolve_sweep_spec(const SweepBindings& b) {
    SweepSpec spec;
    spec.state.kind = state_kind_map().at(b.state);
    spec.state.numbers = NumberPairSpec{b.n1, b.n2};
    if (b.a1_mag < 0.0 || b.a2_mag < 0.0) {
        throw UsageError("amplitude magnitudes must be non-negative");
    }
    spec.state.amplitudes =
        CoherentPairSpec{std::polar(b.a1_mag, b.a1_phase), std::polar(b.a2_mag, b.a2_phase)};
    spec.ring_a = RingConfig{b.i1, b.q, std::isnan(b.omega_a) ? b.omega1 : b.omega_a,
                             b.omega1};
    spec.ring_b = RingConfig{b.i2, b.q, std::isnan(b.omega_b) ? b.omega2 : b.omega_b,
                             b.omega2};
    spec.grid.t_start = b.t_start;
    if (std::isnan(b.t_end)) {
        const double beat = std::abs(b.omega1 - b.omega2);
        if (beat <= 0.0) {
            throw UsageError("default t-end needs omega1 != omega2; pass --t-end");
        }
        spec.grid.t_end = b.t_start + 4.0 * M_PI / beat;
    } else {
        spec.grid.t_end = b.t_end;
    }
    spec.grid.steps = b.steps;
    spec.dim = b.dim;
    spec.method = b.method == "analytic" ? Method::analytic
                  : b.method == "numeric" ? Method::numeric
                                          : Method::both;
    spec.format = b.format == "json" ? OutputFormat::json : OutputFormat::csv;
    spec.out_path = b.out;
    spec.epsilon_r = default_epsilon_r(spec.ring_a, spec.ring_b);
    validate_sweep_spec(spec);
    return spec;
}

}  // namespace cli_detail

/// Parse sweep flags (as passed after `squidmw sweep`) into a resolved spec.
/// Throws UsageError on any invalid or missing value.
inline SweepSpec parse_config(const std::vector<std::string>& args) {
    CLI::App app{"sweep"};
    cli_detail::SweepBindings b;
    cli_detail::add_sweep_options(app, b);
    std::vector<const char*> argv;
    argv.push_back("sweep");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }
    return cli_detail::resolve_sweep_spec(b);
}

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Josephson-current observables for two SQUID rings driven by "
                 "correlated two-mode microwaves"};
    app.require_subcommand(1);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "Evaluate the observable time series and write it to disk");
    cli_detail::SweepBindings b;
    cli_detail::add_sweep_options(*sweep, b);

    CLI::App* diff =
        app.add_subcommand("diff", "Column-wise difference of two series CSV files");
    std::string file_a, file_b, diff_out;
    diff->add_option("file_a", file_a, "First series CSV")->required();
    diff->add_option("file_b", file_b, "Second series CSV")->required();
    diff->add_option("--out", diff_out, "Write the difference CSV here (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sweep->parsed()) {
            const SweepSpec spec = cli_detail::resolve_sweep_spec(b);
            const RunOutcome outcome = run_sweep(spec);
            if (outcome.exit_code == 0) {
                std::cout << "wrote " << spec.out_path << " ("
                          << outcome.series.samples.size() << " samples)\n";
                if (outcome.manifest.self_check_enabled) {
                    double worst = 0.0;
                    for (const auto& [col, val] : outcome.manifest.max_discrepancy) {
                        worst = std::max(worst, val);
                    }
                    std::cout << "self-check passed (max discrepancy " << worst << ")\n";
                }
            } else {
                std::cerr << "self-check FAILED: " << outcome.manifest.failure_reason
                          << "\n";
            }
            return outcome.exit_code;
        }
        if (diff->parsed()) {
            const auto d = diff_runs(file_a, file_b);
            const std::string csv = series_to_csv(d);
            if (diff_out.empty()) {
                std::cout << csv;
            } else {
                write_text_file(diff_out, csv);
            }
            return 0;
        }
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const NoAnalyticFormError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace squidmw
