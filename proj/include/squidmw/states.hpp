// Builders for the two-mode microwave density matrices: number-state and
// coherent-state pairs, each in a classically correlated (separable) and a
// quantum correlated (entangled) variant, plus plain product states.

#pragma once

#include "squidmw/fock.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace squidmw {

/// Photon numbers (N1, N2) of the two correlated modes; N1 != N2.
struct NumberPairSpec {
    int n1 = 1;
    int n2 = 4;
};

/// Coherent amplitudes (A1, A2) of the two correlated modes.
struct CoherentPairSpec {
    Complex a1{1.0, 0.0};
    Complex a2{2.0, 0.0};
};

/// Normalization N of the entangled coherent superposition N(|A1 A2> + |A2 A1>).
struct EntangledNormalization {
    double value = 0.0;
};

/// N = [2 + 2 exp(-|A1 - A2|^2)]^{-1/2}.
inline double entangled_normalization(const CoherentPairSpec& spec) {
    return 1.0 / std::sqrt(2.0 + 2.0 * std::exp(-std::norm(spec.a1 - spec.a2)));
}

/// Coherent-state overlap tau = <A1|A2> = exp(-|A1|^2/2 - |A2|^2/2 + conj(A1) A2).
inline Complex coherent_overlap(const CoherentPairSpec& spec) {
    return std::exp(-0.5 * std::norm(spec.a1) - 0.5 * std::norm(spec.a2) +
                    std::conj(spec.a1) * spec.a2);
}

namespace detail {

inline void check_number_pair(const NumberPairSpec& spec, int dim) {
    if (spec.n1 == spec.n2) {
        throw std::domain_error(
            "number pair: N1 and N2 must differ (got both = " +
            std::to_string(spec.n1) + "); use a factorized number state instead");
    }
    if (spec.n1 < 0 || spec.n2 < 0 || spec.n1 >= dim || spec.n2 >= dim) {
        throw std::domain_error("number pair: need 0 <= N1, N2 < dim");
    }
}

}  // namespace detail

/// rho_sep = (|N1 N2><N1 N2| + |N2 N1><N2 N1|) / 2.
inline TwoModeState number_separable(const NumberPairSpec& spec, int dim) {
    detail::check_number_pair(spec, dim);
    const Eigen::Index d = dim;
    Matrix rho = Matrix::Zero(d * d, d * d);
    const Eigen::Index i12 = spec.n1 * d + spec.n2;
    const Eigen::Index i21 = spec.n2 * d + spec.n1;
    rho(i12, i12) = 0.5;
    rho(i21, i21) = 0.5;
    return TwoModeState(dim, std::move(rho), CorrelationClass::separable);
}

/// Projector onto (|N1 N2> + |N2 N1>) / sqrt(2): rho_sep plus the two cross
/// terms, all with weight exactly 1/2.
inline TwoModeState number_entangled(const NumberPairSpec& spec, int dim) {
    detail::check_number_pair(spec, dim);
    const Eigen::Index d = dim;
    const Eigen::Index i12 = spec.n1 * d + spec.n2;
    const Eigen::Index i21 = spec.n2 * d + spec.n1;
    Matrix rho = Matrix::Zero(d * d, d * d);
    rho(i12, i12) = 0.5;
    rho(i21, i21) = 0.5;
    rho(i12, i21) = 0.5;
    rho(i21, i12) = 0.5;
    return TwoModeState(dim, std::move(rho), CorrelationClass::entangled);
}

/// rho_sep = (|A1 A2><A1 A2| + |A2 A1><A2 A1|) / 2.
inline TwoModeState coherent_separable(const CoherentPairSpec& spec, int dim) {
    const Vector v12 = kron(coherent_vector(spec.a1, dim), coherent_vector(spec.a2, dim));
    const Vector v21 = kron(coherent_vector(spec.a2, dim), coherent_vector(spec.a1, dim));
    Matrix rho = 0.5 * (v12 * v12.adjoint()) + 0.5 * (v21 * v21.adjoint());
    return TwoModeState(dim, std::move(rho), CorrelationClass::separable);
}

/// Normalized projector onto N(|A1 A2> + |A2 A1>). The reported normalization
/// is the closed form; the state itself is normalized by the exact vector norm
/// (the two agree to truncation accuracy).
inline std::pair<TwoModeState, EntangledNormalization> coherent_entangled(
    const CoherentPairSpec& spec, int dim) {
    const Vector v12 = kron(coherent_vector(spec.a1, dim), coherent_vector(spec.a2, dim));
    const Vector v21 = kron(coherent_vector(spec.a2, dim), coherent_vector(spec.a1, dim));
    const Vector v = v12 + v21;
    const double nsq = v.squaredNorm();
    Matrix rho = (v * v.adjoint()) / nsq;
    return {TwoModeState(dim, std::move(rho), CorrelationClass::entangled),
            EntangledNormalization{entangled_normalization(spec)}};
}

/// rho_fact = a ⊗ b.
inline TwoModeState factorized(const SingleModeState& a, const SingleModeState& b) {
    return tensor(a, b);
}

}  // namespace squidmw
