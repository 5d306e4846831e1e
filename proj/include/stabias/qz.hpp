#pragma once

#include <complex>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <vector>

#include "stabias/errors.hpp"
#include "stabias/numerics.hpp"

namespace stabias {

/// Roots with modulus below this count as stable.
inline constexpr double kUnitCircleCutoff = 1.0 - 1e-9;

namespace detail {

inline lapack_logical select_stable_root(const lapack_complex_double* alpha, const lapack_complex_double* beta) {
    return std::abs(*alpha) < kUnitCircleCutoff * std::abs(*beta) ? 1 : 0;
}

}  // namespace detail

/// Stable-manifold solution of the pencil  lead * E_t w_{t+1} = lag * w_t,
/// where the first `n_state` entries of w are predetermined.
///
/// Returns w_jump = policy * w_state and w_state' = transition * w_state.
struct PencilSolution {
    Matrix transition;
    Matrix policy;
    int stable_roots = 0;
    std::vector<std::complex<double>> roots;  // alpha/beta, infinite roots as inf
};

/// Ordered complex generalized Schur decomposition (Klein's method).
inline PencilSolution solve_stable_pencil(const Matrix& lead, const Matrix& lag, int n_state,
                                          const std::string& context = {}) {
    using CMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
    const int n = static_cast<int>(lag.rows());
    if (lead.rows() != n || lead.cols() != n || lag.cols() != n || n_state < 0 || n_state > n)
        throw Error(ErrorKind::InvalidModel, "solve_stable_pencil: dimension mismatch");

    PencilSolution out;
    if (n == 0) {
        out.transition = Matrix(0, 0);
        out.policy = Matrix(0, 0);
        return out;
    }

    // LAPACK orders the pencil as (A - lambda B): A = lag, B = lead.
    CMatrix a = lag.cast<std::complex<double>>();
    CMatrix b = lead.cast<std::complex<double>>();
    CMatrix q(n, n), z(n, n);
    std::vector<lapack_complex_double> alpha(n), beta(n);
    lapack_int sdim = 0;
    const lapack_int info = LAPACKE_zgges(LAPACK_COL_MAJOR, 'N', 'V', 'S', &detail::select_stable_root, n,
                                          a.data(), n, b.data(), n, &sdim, alpha.data(), beta.data(),
                                          q.data(), n, z.data(), n);
    if (info != 0)
        throw Error(ErrorKind::NoStableSolution, "generalized Schur failed (info " + std::to_string(info) + ")");

    const double scale = std::max(1.0, std::max(max_abs(lead), max_abs(lag)));
    out.roots.resize(n);
    for (int i = 0; i < n; ++i) {
        if (std::abs(alpha[i]) < 1e-13 * scale && std::abs(beta[i]) < 1e-13 * scale)
            throw Error(ErrorKind::SingularRule, "singular pencil" + (context.empty() ? "" : " (" + context + ")"));
        out.roots[i] = std::abs(beta[i]) == 0.0 ? std::complex<double>(INFINITY, 0.0) : alpha[i] / beta[i];
    }
    out.stable_roots = static_cast<int>(sdim);
    if (sdim > n_state) throw DeterminacyError(ErrorKind::Indeterminacy, sdim, n_state, context);
    if (sdim < n_state) throw DeterminacyError(ErrorKind::NoStableSolution, sdim, n_state, context);

    const int n_jump = n - n_state;
    if (n_state == 0) {
        out.transition = Matrix(0, 0);
        out.policy = Matrix::Zero(n_jump, 0);
        return out;
    }
    const CMatrix z11 = z.topLeftCorner(n_state, n_state);
    const CMatrix z21 = z.bottomLeftCorner(n_jump, n_state);
    const CMatrix s11 = a.topLeftCorner(n_state, n_state);
    const CMatrix t11 = b.topLeftCorner(n_state, n_state);

    Eigen::PartialPivLU<CMatrix> z11_lu(z11);
    const double rcond = z11_lu.rcond();
    if (!(rcond > 1e-13))
        throw Error(ErrorKind::NoStableSolution,
                    "stable block not invertible in the predetermined variables" +
                        (context.empty() ? "" : " (" + context + ")"));
    const CMatrix z11_inv = z11_lu.inverse();
    const CMatrix dyn = t11.triangularView<Eigen::Upper>().solve(s11);
    const CMatrix transition = z11 * dyn * z11_inv;
    const CMatrix policy = z21 * z11_inv;
    out.transition = transition.real();
    out.policy = policy.real();
    return out;
}

}  // namespace stabias
