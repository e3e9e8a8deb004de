// Sweep execution and serialization: resolved sweep specifications, CSV/JSON
// series output, the run manifest, and series diffing.
//
// Output contract:
//   * CSV header is exactly  t,i_a,i_b,i_a2,i_b2,i_ab,ratio_r  with 17
//     significant digits per value and `nan` for an undefined ratio; the file
//     is bit-identical across runs of the same spec.
//   * JSON output is {"manifest": ..., "samples": [...]}; samples carry both
//     raw t and the dimensionless abscissa scaled_t = (w1 - w2) t.
//   * A manifest <out>.manifest.json is written on every run and records
//     whether the analytic-vs-numeric self-check passed.
// Exit codes: 0 ok, 1 usage, 2 self-check failure, 3 I/O.

#pragma once

#include "squidmw/observables.hpp"
#include "squidmw/version.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace squidmw {

inline constexpr double kSelfCheckThreshold = 1e-6;
inline constexpr const char* kCsvHeader = "t,i_a,i_b,i_a2,i_b2,i_ab,ratio_r";

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

enum class OutputFormat { csv, json };

struct SweepSpec {
    StateModel state{};
    RingConfig ring_a{1.0, 1.0, 1.2e-4, 1.2e-4};
    RingConfig ring_b{1.0, 1.0, 1.0e-4, 1.0e-4};
    TimeGrid grid{0.0, 0.0, 2000};
    int dim = 40;
    Method method = Method::both;
    OutputFormat format = OutputFormat::csv;
    std::string out_path = "sweep.csv";
    double epsilon_r = 1e-9;
};

inline const char* state_kind_name(StateKind kind) {
    switch (kind) {
        case StateKind::number_sep: return "number-sep";
        case StateKind::number_ent: return "number-ent";
        case StateKind::coherent_sep: return "coherent-sep";
        case StateKind::coherent_ent: return "coherent-ent";
        case StateKind::factorized_number: return "factorized-number";
        case StateKind::factorized_coherent: return "factorized-coherent";
    }
    return "?";
}

inline const char* method_name(Method m) {
    switch (m) {
        case Method::analytic: return "analytic";
        case Method::numeric: return "numeric";
        case Method::both: return "both";
    }
    return "?";
}

inline const char* format_name(OutputFormat f) {
    return f == OutputFormat::csv ? "csv" : "json";
}

/// Grid spanning (w1 - w2) t in [0, 4 pi]; parameters as in the reference
/// configuration (N1 = 1, N2 = 4, A1 = 1, A2 = 2, q = 1, dim = 40).
inline SweepSpec default_sweep_spec() {
    SweepSpec spec;
    spec.state.kind = StateKind::number_sep;
    spec.state.numbers = NumberPairSpec{1, 4};
    spec.state.amplitudes = CoherentPairSpec{Complex(1.0, 0.0), Complex(2.0, 0.0)};
    spec.grid.t_start = 0.0;
    spec.grid.t_end = 4.0 * M_PI / (spec.ring_a.omega_mode - spec.ring_b.omega_mode);
    spec.grid.steps = 2000;
    spec.epsilon_r = default_epsilon_r(spec.ring_a, spec.ring_b);
    return spec;
}

inline void validate_sweep_spec(const SweepSpec& spec) {
    if (spec.grid.steps < 2) throw UsageError("steps must be at least 2");
    if (!(spec.grid.t_end > spec.grid.t_start)) {
        throw UsageError("t-end must exceed t-start");
    }
    if (spec.dim < 2 || spec.dim > kMaxFockDim) {
        throw UsageError("dim must be in [2, " + std::to_string(kMaxFockDim) + "]");
    }
    for (const RingConfig* ring : {&spec.ring_a, &spec.ring_b}) {
        if (!(ring->critical_current > 0.0)) {
            throw UsageError("critical currents must be positive");
        }
        if (ring->coupling < 0.0) throw UsageError("coupling q must be non-negative");
        if (!std::isfinite(ring->omega_ring) || !std::isfinite(ring->omega_mode)) {
            throw UsageError("frequencies must be finite");
        }
    }
    const StateKind k = spec.state.kind;
    if (k == StateKind::number_sep || k == StateKind::number_ent ||
        k == StateKind::factorized_number) {
        const auto& np = spec.state.numbers;
        if (np.n1 < 0 || np.n2 < 0 || np.n1 >= spec.dim || np.n2 >= spec.dim) {
            throw UsageError("photon numbers must satisfy 0 <= n < dim");
        }
        if (k != StateKind::factorized_number && np.n1 == np.n2) {
            throw UsageError("n1 and n2 must differ for " +
                             std::string(state_kind_name(k)) +
                             " (use factorized-number for equal occupations)");
        }
    }
    if (spec.epsilon_r < 0.0) throw UsageError("epsilon_r must be non-negative");
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

inline std::string format_double17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string series_to_csv(const std::vector<ObservableSample>& samples) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& s : samples) {
        out += format_double17(s.t);
        for (double v : {s.i_a, s.i_b, s.i_a2, s.i_b2, s.i_ab}) {
            out += ',';
            out += format_double17(v);
        }
        out += ',';
        out += s.ratio_r ? format_double17(*s.ratio_r) : "nan";
        out += '\n';
    }
    return out;
}

struct RunManifest {
    std::string version = kToolVersion;
    SweepSpec spec;
    double abscissa_scale = 0.0;
    bool self_check_enabled = false;
    bool self_check_passed = true;
    std::string failure_reason;
    std::vector<std::pair<std::string, double>> max_discrepancy;
    double duration_seconds = 0.0;
    std::string series_path;
};

inline nlohmann::ordered_json manifest_to_json(const RunManifest& m) {
    nlohmann::ordered_json j;
    j["tool"] = kToolName;
    j["version"] = m.version;
    const SweepSpec& s = m.spec;
    j["spec"] = {
        {"state",
         {{"kind", state_kind_name(s.state.kind)},
          {"n1", s.state.numbers.n1},
          {"n2", s.state.numbers.n2},
          {"a1_mag", std::abs(s.state.amplitudes.a1)},
          {"a1_phase", std::arg(s.state.amplitudes.a1)},
          {"a2_mag", std::abs(s.state.amplitudes.a2)},
          {"a2_phase", std::arg(s.state.amplitudes.a2)}}},
        {"ring_a",
         {{"critical_current", s.ring_a.critical_current},
          {"coupling", s.ring_a.coupling},
          {"omega_ring", s.ring_a.omega_ring},
          {"omega_mode", s.ring_a.omega_mode}}},
        {"ring_b",
         {{"critical_current", s.ring_b.critical_current},
          {"coupling", s.ring_b.coupling},
          {"omega_ring", s.ring_b.omega_ring},
          {"omega_mode", s.ring_b.omega_mode}}},
        {"grid", {{"t_start", s.grid.t_start}, {"t_end", s.grid.t_end}, {"steps", s.grid.steps}}},
        {"dim", s.dim},
        {"method", method_name(s.method)},
        {"format", format_name(s.format)},
        {"epsilon_r", s.epsilon_r},
        {"out", s.out_path}};
    j["abscissa_scale"] = m.abscissa_scale;
    nlohmann::ordered_json check;
    check["enabled"] = m.self_check_enabled;
    check["passed"] = m.self_check_passed;
    check["threshold"] = kSelfCheckThreshold;
    if (!m.failure_reason.empty()) check["failure_reason"] = m.failure_reason;
    nlohmann::ordered_json disc = nlohmann::ordered_json::object();
    for (const auto& [col, val] : m.max_discrepancy) disc[col] = val;
    check["max_discrepancy"] = disc;
    j["self_check"] = check;
    j["duration_seconds"] = m.duration_seconds;
    j["series_path"] = m.series_path;
    return j;
}

inline nlohmann::ordered_json sample_to_json(const ObservableSample& s, double scale) {
    nlohmann::ordered_json j;
    j["t"] = s.t;
    j["scaled_t"] = scale * s.t;
    j["i_a"] = s.i_a;
    j["i_b"] = s.i_b;
    j["i_a2"] = s.i_a2;
    j["i_b2"] = s.i_b2;
    j["i_ab"] = s.i_ab;
    if (s.ratio_r) {
        j["ratio_r"] = *s.ratio_r;
    } else {
        j["ratio_r"] = nullptr;
    }
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw IoError("failed while writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Run
// ---------------------------------------------------------------------------

struct RunOutcome {
    int exit_code = 0;
    RunManifest manifest;
    SeriesResult series;
};

/// Execute a sweep: build the state, evaluate the series, write the series
/// file and the manifest. A state that fails its truncation or validation
/// gate is reported as a failed self-check (exit 2) with the manifest still
/// written.
inline RunOutcome run_sweep(const SweepSpec& spec) {
    validate_sweep_spec(spec);
    const auto t0 = std::chrono::steady_clock::now();

    RunOutcome outcome;
    RunManifest& manifest = outcome.manifest;
    manifest.spec = spec;
    manifest.abscissa_scale = spec.ring_a.omega_mode - spec.ring_b.omega_mode;
    manifest.self_check_enabled = spec.method == Method::both;
    manifest.series_path = spec.out_path;

    const auto finish = [&](int code) {
        manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_text_file(spec.out_path + ".manifest.json",
                        manifest_to_json(manifest).dump(2) + "\n");
        outcome.exit_code = code;
        return outcome;
    };

    std::optional<TwoModeState> state;
    try {
        state.emplace(build_state(spec.state, spec.dim));
    } catch (const TruncationError& e) {
        manifest.self_check_passed = false;
        manifest.failure_reason = std::string("truncation: ") + e.what();
        manifest.series_path.clear();
        return finish(2);
    } catch (const StateValidationError& e) {
        manifest.self_check_passed = false;
        manifest.failure_reason = std::string("state validation: ") + e.what();
        manifest.series_path.clear();
        return finish(2);
    }

    outcome.series = observable_series(*state, spec.state, spec.ring_a, spec.ring_b,
                                       spec.grid, spec.method, spec.epsilon_r);
    manifest.max_discrepancy = outcome.series.max_discrepancy;

    bool passed = true;
    for (const auto& [col, val] : outcome.series.max_discrepancy) {
        if (!(val < kSelfCheckThreshold)) {
            passed = false;
            manifest.failure_reason = "discrepancy in column " + col;
        }
    }
    manifest.self_check_passed = passed;

    if (spec.format == OutputFormat::csv) {
        write_text_file(spec.out_path, series_to_csv(outcome.series.samples));
    } else {
        nlohmann::ordered_json root;
        manifest.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        root["manifest"] = manifest_to_json(manifest);
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& s : outcome.series.samples) {
            arr.push_back(sample_to_json(s, manifest.abscissa_scale));
        }
        root["samples"] = arr;
        write_text_file(spec.out_path, root.dump(2) + "\n");
    }
    return finish(passed ? 0 : 2);
}

// ---------------------------------------------------------------------------
// Diff
// ---------------------------------------------------------------------------

/// Parse a series CSV produced by run_sweep (strict header and column count).
inline std::vector<ObservableSample> parse_series_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::invalid_argument("'" + path + "': unexpected CSV header");
    }
    std::vector<ObservableSample> samples;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<double> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::invalid_argument("'" + path + "' line " +
                                            std::to_string(lineno) + ": bad number '" +
                                            cell + "'");
            }
        }
        if (fields.size() != 7) {
            throw std::invalid_argument("'" + path + "' line " + std::to_string(lineno) +
                                        ": expected 7 columns");
        }
        ObservableSample s;
        s.t = fields[0];
        s.i_a = fields[1];
        s.i_b = fields[2];
        s.i_a2 = fields[3];
        s.i_b2 = fields[4];
        s.i_ab = fields[5];
        if (!std::isnan(fields[6])) s.ratio_r = fields[6];
        samples.push_back(s);
    }
    return samples;
}

/// Column-wise a - b over two series with identical time grids.
inline std::vector<ObservableSample> diff_series(
    const std::vector<ObservableSample>& a, const std::vector<ObservableSample>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("diff: grids differ in length (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    std::vector<ObservableSample> out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].t != b[i].t) {
            throw std::invalid_argument("diff: grids differ at row " + std::to_string(i));
        }
        ObservableSample d;
        d.t = a[i].t;
        d.i_a = a[i].i_a - b[i].i_a;
        d.i_b = a[i].i_b - b[i].i_b;
        d.i_a2 = a[i].i_a2 - b[i].i_a2;
        d.i_b2 = a[i].i_b2 - b[i].i_b2;
        d.i_ab = a[i].i_ab - b[i].i_ab;
        if (a[i].ratio_r && b[i].ratio_r) d.ratio_r = *a[i].ratio_r - *b[i].ratio_r;
        out.push_back(d);
    }
    return out;
}

inline std::vector<ObservableSample> diff_runs(const std::string& path_a,
                                               const std::string& path_b) {
    return diff_series(parse_series_csv(path_a), parse_series_csv(path_b));
}

}  // namespace squidmw
