// Truncated Fock-space core: mode operators, single- and two-mode density
// matrices, displacement operators, tensor products and partial traces.
//
// Conventions fixed here and relied on everywhere else:
//   * truncation dimension d in [2, kMaxFockDim]
//   * two-mode composite index i = n_A * d + n_B (mode A on the slow index)
//   * every state is validated at construction: Hermitian within 1e-12,
//     unit trace within 1e-10, smallest eigenvalue >= -1e-10

#pragma once

#include "squidmw/errors.hpp"
#include "squidmw/laguerre.hpp"
#include "squidmw/linalg.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace squidmw {

inline constexpr int kMaxFockDim = 64;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kCoherentTailTol = 1e-12;

enum class Mode { A, B };

/// Declared by the builder that produced a two-mode state; never inferred.
enum class CorrelationClass { factorizable, separable, entangled };

namespace detail {

inline void check_dim(int dim) {
    if (dim < 2 || dim > kMaxFockDim) {
        throw std::domain_error("fock: dimension must be in [2, " +
                                std::to_string(kMaxFockDim) + "], got " +
                                std::to_string(dim));
    }
}

inline void validate_density(const Matrix& rho, const std::string& who) {
    const double herm = hermiticity_defect(rho);
    if (!(herm <= kHermitianTol)) {
        throw StateValidationError(who + ": not Hermitian (defect " +
                                   std::to_string(herm) + ")");
    }
    const double tr_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (!(tr_err <= kTraceTol)) {
        throw StateValidationError(who + ": trace differs from 1 by " +
                                   std::to_string(tr_err));
    }
    const double min_eig = min_eigenvalue_bound(rho);
    if (!(min_eig >= -kPsdTol)) {
        throw StateValidationError(who + ": not positive semidefinite (min eigenvalue bound " +
                                   std::to_string(min_eig) + ")");
    }
}

}  // namespace detail

/// Density matrix of one microwave mode on a d-dimensional truncated space.
class SingleModeState {
public:
    explicit SingleModeState(Matrix rho) : rho_(std::move(rho)) {
        if (rho_.rows() != rho_.cols()) {
            throw std::invalid_argument("SingleModeState: matrix must be square");
        }
        detail::check_dim(static_cast<int>(rho_.rows()));
        detail::validate_density(rho_, "SingleModeState");
    }

    int dim() const { return static_cast<int>(rho_.rows()); }
    const Matrix& rho() const { return rho_; }
    double purity() const { return rho_.squaredNorm(); }

private:
    Matrix rho_;
};

/// Density matrix on the tensor product of two d-dimensional modes,
/// composite index i = n_A * d + n_B.
class TwoModeState {
public:
    TwoModeState(int mode_dim, Matrix rho, CorrelationClass cls)
        : mode_dim_(mode_dim), rho_(std::move(rho)), class_(cls) {
        detail::check_dim(mode_dim_);
        const Eigen::Index expected =
            static_cast<Eigen::Index>(mode_dim_) * mode_dim_;
        if (rho_.rows() != expected || rho_.cols() != expected) {
            throw std::invalid_argument("TwoModeState: matrix must be d^2 x d^2");
        }
        detail::validate_density(rho_, "TwoModeState");
    }

    int mode_dim() const { return mode_dim_; }
    const Matrix& rho() const { return rho_; }
    CorrelationClass correlation_class() const { return class_; }
    double purity() const { return rho_.squaredNorm(); }

private:
    int mode_dim_;
    Matrix rho_;
    CorrelationClass class_;
};

/// <m|a|n> = sqrt(n) delta_{m,n-1}.
inline Matrix annihilation(int dim) {
    detail::check_dim(dim);
    Matrix a = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Matrix creation(int dim) { return annihilation(dim).adjoint(); }

inline Matrix number_operator(int dim) {
    detail::check_dim(dim);
    Matrix n = Matrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) n(k, k) = static_cast<double>(k);
    return n;
}

inline Vector fock_vector(int n, int dim) {
    detail::check_dim(dim);
    if (n < 0 || n >= dim) {
        throw std::domain_error("fock_vector: need 0 <= n < dim, got n = " +
                                std::to_string(n));
    }
    Vector v = Vector::Zero(dim);
    v(n) = 1.0;
    return v;
}

/// Truncated coherent amplitudes e^{-|A|^2/2} A^n / sqrt(n!), renormalized.
/// Rejects the truncation when the discarded tail weight reaches 1e-12.
inline Vector coherent_vector(Complex amplitude, int dim) {
    detail::check_dim(dim);
    Vector v(dim);
    Complex c = std::exp(-0.5 * std::norm(amplitude));
    double kept = 0.0;
    for (int n = 0; n < dim; ++n) {
        if (n > 0) c *= amplitude / std::sqrt(static_cast<double>(n));
        v(n) = c;
        kept += std::norm(c);
    }
    const double tail = 1.0 - kept;
    if (!(tail < kCoherentTailTol)) {
        throw TruncationError("coherent_vector: tail weight " + std::to_string(tail) +
                              " at dim " + std::to_string(dim) + " for |A| = " +
                              std::to_string(std::abs(amplitude)) +
                              "; raise the dimension");
    }
    return v / std::sqrt(kept);
}

inline SingleModeState number_state(int n, int dim) {
    const Vector v = fock_vector(n, dim);
    return SingleModeState(v * v.adjoint());
}

inline SingleModeState coherent_state(Complex amplitude, int dim) {
    const Vector v = coherent_vector(amplitude, dim);
    return SingleModeState(v * v.adjoint());
}

/// Displacement operator D(x) = exp(x a† - x̄ a) from its closed-form matrix
/// elements: for m >= n,
///   <m|D(x)|n> = sqrt(n!/m!) x^{m-n} e^{-|x|^2/2} L_n^{m-n}(|x|^2),
/// and <n|D(x)|n+k> = (-1)^k conj(<n+k|D(x)|n>) with x kept in place (the
/// m < n closed form carries (-x̄)^{n-m}). Filled one diagonal at a time so the
/// Laguerre recurrence runs once per superscript.
inline Matrix displacement_exact(Complex x, int dim) {
    detail::check_dim(dim);
    const double xsq = std::norm(x);
    const double gauss = std::exp(-0.5 * xsq);
    Matrix d(dim, dim);
    for (int k = 0; k < dim; ++k) {
        // L_n^k(xsq) for n = 0 .. dim-1-k
        const int count = dim - k;
        double lag_prev = 1.0;
        double lag_cur = 1.0 + k - xsq;
        // coef(n) = x^k / sqrt((n+k)!/n!)
        Complex coef = 1.0;
        for (int j = 1; j <= k; ++j) coef *= x / std::sqrt(static_cast<double>(j));
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (int n = 0; n < count; ++n) {
            if (n > 0) {
                coef *= std::sqrt(static_cast<double>(n) / (n + k));
                if (n > 1) {
                    const int j = n - 1;
                    const double next =
                        ((2.0 * j + 1.0 + k - xsq) * lag_cur - (j + k) * lag_prev) /
                        (j + 1.0);
                    lag_prev = lag_cur;
                    lag_cur = next;
                }
            }
            const double lag = (n == 0) ? lag_prev : lag_cur;
            const Complex upper = gauss * coef * lag;
            d(n + k, n) = upper;
            if (k > 0) d(n, n + k) = sign * std::conj(upper);
        }
    }
    return d;
}

/// Independent route to D(x): eigendecompose the Hermitian generator
/// -i (x a† - x̄ a) and exponentiate its spectrum.
inline Matrix displacement_expm(Complex x, int dim) {
    detail::check_dim(dim);
    const Matrix gen = x * creation(dim) - std::conj(x) * annihilation(dim);
    const Matrix h = Complex(0.0, -1.0) * gen;
    return apply_hermitian_function(
        h, [](double lam) { return std::exp(Complex(0.0, lam)); });
}

inline TwoModeState tensor(const SingleModeState& a, const SingleModeState& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("tensor: mode dimensions differ (" +
                                    std::to_string(a.dim()) + " vs " +
                                    std::to_string(b.dim()) + ")");
    }
    return TwoModeState(a.dim(), kron(a.rho(), b.rho()),
                        CorrelationClass::factorizable);
}

/// Reduced state after tracing out the given mode (traced = B keeps mode A).
inline SingleModeState partial_trace(const TwoModeState& state, Mode traced) {
    const int d = state.mode_dim();
    const Matrix& rho = state.rho();
    Matrix red = Matrix::Zero(d, d);
    if (traced == Mode::B) {
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                for (int j = 0; j < d; ++j) red(i, k) += rho(i * d + j, k * d + j);
    } else {
        for (int j = 0; j < d; ++j)
            for (int l = 0; l < d; ++l)
                for (int i = 0; i < d; ++i) red(j, l) += rho(i * d + j, i * d + l);
    }
    return SingleModeState(std::move(red));
}

inline Complex expect(const SingleModeState& state, const Matrix& op) {
    if (op.rows() != state.dim() || op.cols() != state.dim()) {
        throw std::invalid_argument("expect: operator dimension mismatch");
    }
    return trace_product(state.rho(), op);
}

inline Complex expect(const TwoModeState& state, const Matrix& op) {
    if (op.rows() != state.rho().rows() || op.cols() != state.rho().cols()) {
        throw std::invalid_argument("expect: operator dimension mismatch");
    }
    return trace_product(state.rho(), op);
}

}  // namespace squidmw
