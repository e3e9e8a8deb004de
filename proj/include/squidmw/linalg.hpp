// Dense complex linear algebra helpers on top of Eigen: Kronecker products,
// trace contractions, Hermitian function calculus, and a smallest-eigenvalue
// bound used by the state positivity gate.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

namespace squidmw {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Kronecker product with the first factor on the slow index:
/// (A ⊗ B)[i_a*db + i_b, j_a*db + j_b] = A(i_a, j_a) B(i_b, j_b).
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Tr(rho * op) without forming the product matrix.
inline Complex trace_product(const Matrix& rho, const Matrix& op) {
    return (rho.transpose().cwiseProduct(op)).sum();
}

/// max_ij |m - m†|.
inline double hermiticity_defect(const Matrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

/// U f(Λ) U† for a Hermitian matrix h = U Λ U†. The scalar function may be
/// complex-valued (e.g. λ ↦ exp(iλ) yields a unitary).
inline Matrix apply_hermitian_function(const Matrix& h,
                                       const std::function<Complex(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    const auto& u = es.eigenvectors();
    Vector fd(h.rows());
    for (Eigen::Index i = 0; i < h.rows(); ++i) fd(i) = f(es.eigenvalues()(i));
    return u * fd.asDiagonal() * u.adjoint();
}

/// Lower bound on the smallest eigenvalue of a Hermitian matrix.
///
/// Small matrices use the exact solver. Large ones use Lanczos with full
/// reorthogonalization (deterministic start vector); the returned value is the
/// smallest Ritz value minus its residual bound, so it never overestimates the
/// true minimum by more than rounding. The states this library builds are low
/// rank, so the iteration terminates by breakdown after a few steps.
inline double min_eigenvalue_bound(const Matrix& h) {
    const Eigen::Index n = h.rows();
    if (n <= 256) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues()(0);
    }

    const int max_steps = static_cast<int>(std::min<Eigen::Index>(n, 160));
    const double scale = h.norm();
    const double breakdown = 1e-13 * (scale > 0 ? scale : 1.0);

    std::mt19937_64 rng(0x51c0ffee);  // fixed seed: deterministic gate
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(gauss(rng), gauss(rng));
    v /= v.norm();

    std::vector<Vector> basis;
    basis.reserve(max_steps);
    std::vector<double> alphas, betas;
    basis.push_back(v);

    int m = 0;
    double last_beta = 0.0;
    for (int j = 0; j < max_steps; ++j) {
        Vector w = h * basis[j];
        const double alpha = std::real(basis[j].dot(w));
        alphas.push_back(alpha);
        w -= alpha * basis[j];
        if (j > 0) w -= betas[j - 1] * basis[j - 1];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
        const double beta = w.norm();
        m = j + 1;
        if (beta < breakdown) {
            last_beta = beta;
            break;
        }
        last_beta = beta;
        if (j + 1 == max_steps) break;
        betas.push_back(beta);
        basis.push_back(w / beta);
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) tri(i, i) = alphas[i];
    for (int i = 0; i + 1 < m; ++i) {
        tri(i, i + 1) = betas[i];
        tri(i + 1, i) = betas[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
    int argmin = 0;
    for (int i = 1; i < m; ++i)
        if (es.eigenvalues()(i) < es.eigenvalues()(argmin)) argmin = i;
    const double residual = std::abs(last_beta * es.eigenvectors()(m - 1, argmin));
    return es.eigenvalues()(argmin) - residual;
}

}  // namespace squidmw
