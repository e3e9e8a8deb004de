// Josephson-current observables for SQUID rings driven by two-mode microwaves.
//
// Two independent evaluation routes are kept side by side:
//   * numeric  — Weyl-function traces on the truncated Fock space, valid for
//                any state; the phase operator algebra reduces every moment to
//                displacement expectations:
//                  <I>    = I0 Im[e^{i w t} W(lambda)],  lambda = i q e^{i wm t}
//                  <I^2>  = (I0^2/2) {1 - Re[e^{2 i w t} W(2 lambda)]}
//                  <IA IB> = -(I1 I2/4) sum_{s,s'} s s' e^{i(s wA + s' wB) t}
//                            W2(s lambda_A, s' lambda_B)
//   * analytic — Laguerre / exponential closed forms for the named microwave
//                states (number pairs: all observables; coherent pairs: mean
//                currents).
// observable_series evaluates either or both over a time grid and reports the
// worst analytic-vs-numeric discrepancy per column.

#pragma once

#include "squidmw/errors.hpp"
#include "squidmw/states.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace squidmw {

/// One SQUID ring and the microwave mode that drives it. All quantities are
/// dimensionless (hbar = k_B = c = 1): critical current I0, coupling
/// q = sqrt(2) e xi, bias frequency w = 2 e V, and drive-mode frequency.
struct RingConfig {
    double critical_current = 1.0;
    double coupling = 1.0;
    double omega_ring = 1.2e-4;
    double omega_mode = 1.2e-4;
};

/// All current observables at one time point. ratio_r is empty when
/// |i_a * i_b| fell below the epsilon guard.
struct ObservableSample {
    double t = 0.0;
    double i_a = 0.0;
    double i_b = 0.0;
    double i_a2 = 0.0;
    double i_b2 = 0.0;
    double i_ab = 0.0;
    std::optional<double> ratio_r;
};

inline double default_epsilon_r(const RingConfig& a, const RingConfig& b) {
    return 1e-9 * std::abs(a.critical_current * b.critical_current);
}

/// I0 sin[w t + amp sin(wm t)] — the classical-drive current.
inline double classical_current(const RingConfig& ring, double amplitude_2eA, double t) {
    return ring.critical_current *
           std::sin(ring.omega_ring * t + amplitude_2eA * std::sin(ring.omega_mode * t));
}

/// lambda = i q e^{i wm t}, the Weyl argument induced by the drive mode.
inline Complex lambda_arg(const RingConfig& ring, double t) {
    return Complex(0.0, ring.coupling) * std::exp(Complex(0.0, ring.omega_mode * t));
}

/// Weyl function W(x) = Tr[rho D(x)].
inline Complex weyl(const SingleModeState& state, Complex x) {
    return trace_product(state.rho(), displacement_exact(x, state.dim()));
}

/// Two-mode Weyl function W2(xa, xb) = Tr[rho D(xa) ⊗ D(xb)], contracted
/// blockwise so the d^2 x d^2 Kronecker product is never formed.
inline Complex weyl_two_mode(const TwoModeState& state, Complex xa, Complex xb) {
    const int d = state.mode_dim();
    const Matrix da = displacement_exact(xa, d);
    const Matrix dbt = displacement_exact(xb, d).transpose();
    const Matrix& rho = state.rho();
    Complex acc = 0.0;
    for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k)
            acc += da(k, i) * (rho.block(i * d, k * d, d, d).cwiseProduct(dbt)).sum();
    return acc;
}

inline double mean_current_numeric(const SingleModeState& state, const RingConfig& ring,
                                   double t) {
    const Complex w = weyl(state, lambda_arg(ring, t));
    return ring.critical_current *
           std::imag(std::exp(Complex(0.0, ring.omega_ring * t)) * w);
}

inline double second_moment_numeric(const SingleModeState& state, const RingConfig& ring,
                                    double t) {
    const Complex w = weyl(state, 2.0 * lambda_arg(ring, t));
    const double i0 = ring.critical_current;
    return 0.5 * i0 * i0 *
           (1.0 - std::real(std::exp(Complex(0.0, 2.0 * ring.omega_ring * t)) * w));
}

/// <IA IB> from the four-term displacement expansion of sin(theta_A) sin(theta_B).
/// The result is real up to rounding; a residue above 1e-10 indicates a
/// convention bug and throws.
inline double current_product_numeric(const TwoModeState& state, const RingConfig& ring_a,
                                      const RingConfig& ring_b, double t) {
    const Complex la = lambda_arg(ring_a, t);
    const Complex lb = lambda_arg(ring_b, t);
    Complex sum = 0.0;
    for (int sa : {+1, -1}) {
        for (int sb : {+1, -1}) {
            const Complex phase = std::exp(
                Complex(0.0, (sa * ring_a.omega_ring + sb * ring_b.omega_ring) * t));
            sum += static_cast<double>(sa * sb) * phase *
                   weyl_two_mode(state, static_cast<double>(sa) * la,
                                 static_cast<double>(sb) * lb);
        }
    }
    const double scale = ring_a.critical_current * ring_b.critical_current;
    const Complex value = -0.25 * scale * sum;
    if (std::abs(std::imag(value)) >= 1e-10 * std::max(1.0, std::abs(scale))) {
        throw std::logic_error("current_product_numeric: imaginary residue " +
                               std::to_string(std::imag(value)));
    }
    return std::real(value);
}

// ---------------------------------------------------------------------------
// Closed forms, number-state pair
// ---------------------------------------------------------------------------

/// (I0/2) e^{-q^2/2} [L_{N1}(q^2) + L_{N2}(q^2)] sin(w t) — independent of the
/// microwave frequencies.
inline double mean_current_number_analytic(const NumberPairSpec& spec,
                                           const RingConfig& ring, double t) {
    const double q2 = ring.coupling * ring.coupling;
    return 0.5 * ring.critical_current * std::exp(-0.5 * q2) *
           (laguerre(spec.n1, 0, q2) + laguerre(spec.n2, 0, q2)) *
           std::sin(ring.omega_ring * t);
}

/// (I0^2/2) {1 - (1/2) e^{-2q^2} [L_{N1}(4q^2) + L_{N2}(4q^2)] cos(2 w t)}.
inline double second_moment_number_analytic(const NumberPairSpec& spec,
                                            const RingConfig& ring, double t) {
    const double q2 = ring.coupling * ring.coupling;
    const double i0 = ring.critical_current;
    return 0.5 * i0 * i0 *
           (1.0 - 0.5 * std::exp(-2.0 * q2) *
                      (laguerre(spec.n1, 0, 4.0 * q2) + laguerre(spec.n2, 0, 4.0 * q2)) *
                      std::cos(2.0 * ring.omega_ring * t));
}

/// Separable product: the mixture of |N1 N2> and |N2 N1> factorizes term by
/// term, so each ring contributes its own Laguerre factor.
inline double current_product_number_sep(const NumberPairSpec& spec,
                                         const RingConfig& ring_a,
                                         const RingConfig& ring_b, double t) {
    const double qa2 = ring_a.coupling * ring_a.coupling;
    const double qb2 = ring_b.coupling * ring_b.coupling;
    const double laguerre_mix =
        0.5 * (laguerre(spec.n1, 0, qa2) * laguerre(spec.n2, 0, qb2) +
               laguerre(spec.n2, 0, qa2) * laguerre(spec.n1, 0, qb2));
    return ring_a.critical_current * ring_b.critical_current *
           std::exp(-0.5 * (qa2 + qb2)) * laguerre_mix *
           std::sin(ring_a.omega_ring * t) * std::sin(ring_b.omega_ring * t);
}

namespace detail {

inline double common_coupling(const RingConfig& ring_a, const RingConfig& ring_b,
                              const char* who) {
    const double qa = ring_a.coupling;
    const double qb = ring_b.coupling;
    if (std::abs(qa - qb) > 1e-12 * std::max(1.0, std::abs(qa))) {
        throw std::domain_error(std::string(who) +
                                ": closed form is stated for a common ring coupling; "
                                "got q_A != q_B (use the numeric route)");
    }
    return qa;
}

}  // namespace detail

/// Entanglement-induced correction to the current product,
///   I_cross = -(I1 I2/2) e^{-q^2} L_{N1}^{N2-N1}(q^2) L_{N2}^{N1-N2}(q^2)
///             [cos((wA+wB)t) - (-1)^{N1-N2} cos((wA-wB)t)] cos(Omega t),
/// with the beat frequency Omega = (N1-N2)(w1-w2).
inline double i_cross(const NumberPairSpec& spec, const RingConfig& ring_a,
                      const RingConfig& ring_b, double t) {
    const double q = detail::common_coupling(ring_a, ring_b, "i_cross");
    const double q2 = q * q;
    const int diff = spec.n1 - spec.n2;
    const double parity = (diff % 2 == 0) ? 1.0 : -1.0;
    const double omega_beat =
        diff * (ring_a.omega_mode - ring_b.omega_mode);
    const double wa = ring_a.omega_ring;
    const double wb = ring_b.omega_ring;
    const double envelope = std::cos(omega_beat * t);
    const double carrier = std::cos((wa + wb) * t) - parity * std::cos((wa - wb) * t);
    return -0.5 * ring_a.critical_current * ring_b.critical_current *
           std::exp(-q2) * laguerre(spec.n1, spec.n2 - spec.n1, q2) *
           laguerre(spec.n2, spec.n1 - spec.n2, q2) * carrier * envelope;
}

/// <IA IB>_ent = <IA IB>_sep + I_cross.
inline double current_product_number_ent(const NumberPairSpec& spec,
                                         const RingConfig& ring_a,
                                         const RingConfig& ring_b, double t) {
    detail::common_coupling(ring_a, ring_b, "current_product_number_ent");
    return current_product_number_sep(spec, ring_a, ring_b, t) +
           i_cross(spec, ring_a, ring_b, t);
}

/// Time-independent ratio for the separable number pair,
/// R_sep = 4 L_{N1}(q^2) L_{N2}(q^2) / [L_{N1}(q^2) + L_{N2}(q^2)]^2 at common
/// coupling (the sines cancel between numerator and denominator).
inline double ratio_number_sep(const NumberPairSpec& spec, const RingConfig& ring_a,
                               const RingConfig& ring_b) {
    const double qa2 = ring_a.coupling * ring_a.coupling;
    const double qb2 = ring_b.coupling * ring_b.coupling;
    const double num = 2.0 * (laguerre(spec.n1, 0, qa2) * laguerre(spec.n2, 0, qb2) +
                              laguerre(spec.n2, 0, qa2) * laguerre(spec.n1, 0, qb2));
    const double den = (laguerre(spec.n1, 0, qa2) + laguerre(spec.n2, 0, qa2)) *
                       (laguerre(spec.n1, 0, qb2) + laguerre(spec.n2, 0, qb2));
    return num / den;
}

// ---------------------------------------------------------------------------
// Closed forms, coherent-state pair (mean currents; the paper evaluates the
// coherent second moments and products numerically)
// ---------------------------------------------------------------------------

/// (I0/2) e^{-q^2/2} { sin[w t + 2q|A1| cos(wm t - th1)] +
///                     sin[w t + 2q|A2| cos(wm t - th2)] }.
inline double mean_current_coherent_sep(const CoherentPairSpec& spec,
                                        const RingConfig& ring, double t) {
    const double q = ring.coupling;
    const double w = ring.omega_ring;
    const double wm = ring.omega_mode;
    const double m1 = std::abs(spec.a1);
    const double m2 = std::abs(spec.a2);
    const double th1 = std::arg(spec.a1);
    const double th2 = std::arg(spec.a2);
    return 0.5 * ring.critical_current * std::exp(-0.5 * q * q) *
           (std::sin(w * t + 2.0 * q * m1 * std::cos(wm * t - th1)) +
            std::sin(w * t + 2.0 * q * m2 * std::cos(wm * t - th2)));
}

/// 2 N^2 <I>_sep + N^2 E F1 e^{-q^2/2} I0, where
///   E  = exp[-|A1|^2 - |A2|^2 + 2|A1 A2| cos(th1 - th2)]
///   F1 = [e^{q|A1|S1 - q|A2|S2} + e^{-q|A1|S1 + q|A2|S2}]
///        sin(w t + q|A1|C1 + q|A2|C2)
/// with S_i = sin(wm t - th_i), C_i = cos(wm t - th_i).
inline double mean_current_coherent_ent(const CoherentPairSpec& spec,
                                        const RingConfig& ring, double t) {
    const double q = ring.coupling;
    const double wm = ring.omega_mode;
    const double m1 = std::abs(spec.a1);
    const double m2 = std::abs(spec.a2);
    const double th1 = std::arg(spec.a1);
    const double th2 = std::arg(spec.a2);
    const double nn = entangled_normalization(spec);
    const double nsq = nn * nn;
    const double e_fac =
        std::exp(-m1 * m1 - m2 * m2 + 2.0 * m1 * m2 * std::cos(th1 - th2));
    const double s1 = std::sin(wm * t - th1);
    const double s2 = std::sin(wm * t - th2);
    const double c1 = std::cos(wm * t - th1);
    const double c2 = std::cos(wm * t - th2);
    const double f1 = (std::exp(q * m1 * s1 - q * m2 * s2) +
                       std::exp(-q * m1 * s1 + q * m2 * s2)) *
                      std::sin(ring.omega_ring * t + q * m1 * c1 + q * m2 * c2);
    return 2.0 * nsq * mean_current_coherent_sep(spec, ring, t) +
           nsq * e_fac * f1 * std::exp(-0.5 * q * q) * ring.critical_current;
}

/// R = i_ab / (i_a i_b), undefined (empty) when |i_a i_b| < epsilon_r.
inline std::optional<double> ratio_r(double i_ab, double i_a, double i_b,
                                     double epsilon_r) {
    const double den = i_a * i_b;
    if (std::abs(den) < epsilon_r) return std::nullopt;
    return i_ab / den;
}

// ---------------------------------------------------------------------------
// Series over a time grid
// ---------------------------------------------------------------------------

enum class Method { analytic, numeric, both };

enum class StateKind {
    number_sep,
    number_ent,
    coherent_sep,
    coherent_ent,
    factorized_number,
    factorized_coherent,
};

/// Builder provenance of a two-mode state: which family it came from and with
/// which parameters. This is what selects the analytic closed forms.
struct StateModel {
    StateKind kind = StateKind::number_sep;
    NumberPairSpec numbers{};
    CoherentPairSpec amplitudes{};
};

inline TwoModeState build_state(const StateModel& model, int dim) {
    switch (model.kind) {
        case StateKind::number_sep:
            return number_separable(model.numbers, dim);
        case StateKind::number_ent:
            return number_entangled(model.numbers, dim);
        case StateKind::coherent_sep:
            return coherent_separable(model.amplitudes, dim);
        case StateKind::coherent_ent:
            return coherent_entangled(model.amplitudes, dim).first;
        case StateKind::factorized_number:
            return factorized(number_state(model.numbers.n1, dim),
                              number_state(model.numbers.n2, dim));
        case StateKind::factorized_coherent:
            return factorized(coherent_state(model.amplitudes.a1, dim),
                              coherent_state(model.amplitudes.a2, dim));
    }
    throw std::logic_error("build_state: unknown state kind");
}

/// Which observable columns have closed forms for a given state family.
struct AnalyticCoverage {
    bool means = false;
    bool second_moments = false;
    bool product = false;
    bool any() const { return means || second_moments || product; }
};

inline AnalyticCoverage analytic_coverage(StateKind kind) {
    switch (kind) {
        case StateKind::number_sep:
        case StateKind::number_ent:
            return {true, true, true};
        case StateKind::coherent_sep:
        case StateKind::coherent_ent:
            return {true, false, false};
        case StateKind::factorized_number:
        case StateKind::factorized_coherent:
            return {false, false, false};
    }
    return {};
}

/// Closed-form sample for a state family; columns without a closed form are
/// NaN and the ratio stays empty unless all three ingredients are covered.
inline ObservableSample analytic_sample(const StateModel& model, const RingConfig& ring_a,
                                        const RingConfig& ring_b, double t,
                                        double epsilon_r) {
    const AnalyticCoverage cov = analytic_coverage(model.kind);
    if (!cov.any()) {
        throw NoAnalyticFormError("analytic_sample: no closed form for this state kind");
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    ObservableSample s;
    s.t = t;
    s.i_a = s.i_b = s.i_a2 = s.i_b2 = s.i_ab = nan;
    switch (model.kind) {
        case StateKind::number_sep:
        case StateKind::number_ent: {
            const auto& np = model.numbers;
            s.i_a = mean_current_number_analytic(np, ring_a, t);
            s.i_b = mean_current_number_analytic(np, ring_b, t);
            s.i_a2 = second_moment_number_analytic(np, ring_a, t);
            s.i_b2 = second_moment_number_analytic(np, ring_b, t);
            s.i_ab = (model.kind == StateKind::number_sep)
                         ? current_product_number_sep(np, ring_a, ring_b, t)
                         : current_product_number_ent(np, ring_a, ring_b, t);
            s.ratio_r = ratio_r(s.i_ab, s.i_a, s.i_b, epsilon_r);
            break;
        }
        case StateKind::coherent_sep:
        case StateKind::coherent_ent: {
            const auto& cp = model.amplitudes;
            if (model.kind == StateKind::coherent_sep) {
                s.i_a = mean_current_coherent_sep(cp, ring_a, t);
                s.i_b = mean_current_coherent_sep(cp, ring_b, t);
            } else {
                s.i_a = mean_current_coherent_ent(cp, ring_a, t);
                s.i_b = mean_current_coherent_ent(cp, ring_b, t);
            }
            break;
        }
        default:
            break;
    }
    return s;
}

struct SeriesResult {
    std::vector<ObservableSample> samples;
    /// Analytic companion series (populated for method == both).
    std::vector<ObservableSample> analytic;
    /// Worst |analytic - numeric| per covered column (method == both).
    std::vector<std::pair<std::string, double>> max_discrepancy;
};

struct TimeGrid {
    double t_start = 0.0;
    double t_end = 1.0;
    int steps = 2;
    double at(int i) const {
        return t_start + (t_end - t_start) * static_cast<double>(i) /
                             static_cast<double>(steps - 1);
    }
};

namespace detail {

template <typename Fn>
void parallel_index_map(int count, Fn&& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const int workers = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
    if (count < 256 || workers < 2) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::exception_ptr error;
    std::vector<std::thread> pool;
    std::mutex error_mtx;
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (int i = w; i < count; i += workers) fn(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mtx);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace detail

/// Evaluate all observables over a time grid. `model` is the builder
/// provenance of `state`; pass std::nullopt for states with no known closed
/// form (then only method == numeric is allowed). Results are written in grid
/// order regardless of internal parallelism.
inline SeriesResult observable_series(const TwoModeState& state,
                                      const std::optional<StateModel>& model,
                                      const RingConfig& ring_a, const RingConfig& ring_b,
                                      const TimeGrid& grid, Method method,
                                      std::optional<double> epsilon_r = std::nullopt) {
    if (grid.steps < 2) {
        throw std::domain_error("observable_series: grid needs at least 2 steps");
    }
    const double eps = epsilon_r.value_or(default_epsilon_r(ring_a, ring_b));
    const bool want_numeric = method != Method::analytic;
    const bool want_analytic = method != Method::numeric;

    AnalyticCoverage cov;
    if (want_analytic) {
        if (!model.has_value() || !analytic_coverage(model->kind).any()) {
            if (method == Method::analytic) {
                throw NoAnalyticFormError(
                    "observable_series: state has no analytic closed form");
            }
            // method == both degrades to a numeric-only run with an empty
            // self-check; the caller records that no columns were compared.
        } else {
            cov = analytic_coverage(model->kind);
        }
    }
    const bool run_analytic = want_analytic && cov.any();

    SeriesResult out;
    std::vector<ObservableSample> numeric(want_numeric ? grid.steps : 0);
    std::vector<ObservableSample> analytic(run_analytic ? grid.steps : 0);

    if (want_numeric) {
        const SingleModeState rho_a = partial_trace(state, Mode::B);
        const SingleModeState rho_b = partial_trace(state, Mode::A);
        detail::parallel_index_map(grid.steps, [&](int i) {
            const double t = grid.at(i);
            ObservableSample s;
            s.t = t;
            s.i_a = mean_current_numeric(rho_a, ring_a, t);
            s.i_b = mean_current_numeric(rho_b, ring_b, t);
            s.i_a2 = second_moment_numeric(rho_a, ring_a, t);
            s.i_b2 = second_moment_numeric(rho_b, ring_b, t);
            s.i_ab = current_product_numeric(state, ring_a, ring_b, t);
            s.ratio_r = ratio_r(s.i_ab, s.i_a, s.i_b, eps);
            numeric[i] = s;
        });
    }
    if (run_analytic) {
        for (int i = 0; i < grid.steps; ++i) {
            analytic[i] = analytic_sample(*model, ring_a, ring_b, grid.at(i), eps);
        }
    }

    if (method == Method::both && run_analytic) {
        // Self-check over the five observable columns. The ratio is derived
        // from them and is not compared: near current zeros it divides a
        // rounding-level difference by an arbitrarily small denominator.
        const auto column_max = [&](auto getter) {
            double worst = 0.0;
            for (int i = 0; i < grid.steps; ++i) {
                worst = std::max(worst, std::abs(getter(analytic[i]) - getter(numeric[i])));
            }
            return worst;
        };
        if (cov.means) {
            out.max_discrepancy.emplace_back(
                "i_a", column_max([](const ObservableSample& s) { return s.i_a; }));
            out.max_discrepancy.emplace_back(
                "i_b", column_max([](const ObservableSample& s) { return s.i_b; }));
        }
        if (cov.second_moments) {
            out.max_discrepancy.emplace_back(
                "i_a2", column_max([](const ObservableSample& s) { return s.i_a2; }));
            out.max_discrepancy.emplace_back(
                "i_b2", column_max([](const ObservableSample& s) { return s.i_b2; }));
        }
        if (cov.product) {
            out.max_discrepancy.emplace_back(
                "i_ab", column_max([](const ObservableSample& s) { return s.i_ab; }));
        }
    }

    if (method == Method::numeric) {
        out.samples = std::move(numeric);
    } else if (method == Method::analytic) {
        out.samples = std::move(analytic);
    } else {
        // Emitted samples carry the closed form wherever one exists and the
        // numeric value elsewhere; the ratio is rebuilt from the emitted
        // columns so the file stays self-consistent.
        out.samples = numeric;
        if (run_analytic) {
            for (int i = 0; i < grid.steps; ++i) {
                ObservableSample& s = out.samples[i];
                if (cov.means) {
                    s.i_a = analytic[i].i_a;
                    s.i_b = analytic[i].i_b;
                }
                if (cov.second_moments) {
                    s.i_a2 = analytic[i].i_a2;
                    s.i_b2 = analytic[i].i_b2;
                }
                if (cov.product) s.i_ab = analytic[i].i_ab;
                s.ratio_r = ratio_r(s.i_ab, s.i_a, s.i_b, eps);
            }
        }
        out.analytic = std::move(analytic);
    }
    return out;
}

}  // namespace squidmw
