// Generalized Laguerre polynomials L_n^a(x) for integer order and superscript.
//
// Every closed-form current expression and displacement matrix element in this
// library reduces to these polynomials, so the evaluation rules are kept
// deliberately narrow and well tested:
//
//   a >= 0 : ascending three-term recurrence in n,
//            (n+1) L_{n+1}^a = (2n+1+a-x) L_n^a - (n+a) L_{n-1}^a
//   a <  0 : reduction identity (valid for n >= k, k = -a)
//            L_n^{-k}(x) = (-x)^k (n-k)!/n! L_{n-k}^{k}(x)
//
// Degrees above kMaxLaguerreDegree are rejected: the recurrence is validated
// in double precision only up to there, and photon numbers in scope are far
// smaller.

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace squidmw {

inline constexpr int kMaxLaguerreDegree = 64;

/// Degree n and integer superscript alpha of L_n^alpha.
/// Requires n >= 0, and n + alpha >= 0 when alpha is negative.
struct LaguerreOrder {
    int degree = 0;
    int alpha = 0;
};

namespace detail {

// Evaluated in extended precision so the cancellation at the large-n,
// large-x corner stays below the 1e-12 relative contract.
inline long double laguerre_nonneg_alpha(int n, int alpha, long double x) {
    long double prev = 1.0L;  // L_0^a
    if (n == 0) return prev;
    long double cur = 1.0L + alpha - x;  // L_1^a
    for (int k = 1; k < n; ++k) {
        const long double next =
            ((2.0L * k + 1.0L + alpha - x) * cur - (k + alpha) * prev) / (k + 1.0L);
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace detail

inline double laguerre(LaguerreOrder order, double x) {
    const int n = order.degree;
    const int a = order.alpha;
    if (n < 0) {
        throw std::domain_error("laguerre: degree must be non-negative, got " +
                                std::to_string(n));
    }
    if (n > kMaxLaguerreDegree) {
        throw std::domain_error("laguerre: degree " + std::to_string(n) +
                                " exceeds the validated cap " +
                                std::to_string(kMaxLaguerreDegree));
    }
    if (a < 0 && n + a < 0) {
        throw std::domain_error("laguerre: negative superscript requires n + alpha >= 0");
    }
    if (!std::isfinite(x)) {
        throw std::domain_error("laguerre: argument must be finite");
    }

    if (a >= 0) {
        return static_cast<double>(detail::laguerre_nonneg_alpha(n, a, x));
    }
    // L_n^{-k}(x) = (-x)^k (n-k)!/n! L_{n-k}^{k}(x), n >= k
    const int k = -a;
    long double factor = 1.0L;
    for (int j = n - k + 1; j <= n; ++j) factor /= j;  // (n-k)!/n!
    for (int j = 0; j < k; ++j) factor *= -x;          // (-x)^k
    return static_cast<double>(factor * detail::laguerre_nonneg_alpha(n - k, k, x));
}

inline double laguerre(int degree, int alpha, double x) {
    return laguerre(LaguerreOrder{degree, alpha}, x);
}

}  // namespace squidmw
