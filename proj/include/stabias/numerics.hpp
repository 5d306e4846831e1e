#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "stabias/errors.hpp"

namespace stabias {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Entry-pair symmetry to within `rel` of the larger magnitude.
inline bool is_symmetric(const Matrix& m, double rel = 1e-12) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j) {
            const double a = m(i, j), b = m(j, i);
            if (std::abs(a - b) > rel * std::max({1.0, std::abs(a), std::abs(b)})) return false;
        }
    return true;
}

inline double min_symmetric_eigenvalue(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

inline bool is_psd(const Matrix& m, double tol = 1e-10) {
    return is_symmetric(m) && min_symmetric_eigenvalue(m) >= -tol * std::max(1.0, max_abs(m));
}

inline double spectral_radius(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Matrix> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Solves S = discount * T S T' + Q by doubling.
inline Matrix discrete_lyapunov(const Matrix& T, const Matrix& Q, double discount = 1.0) {
    if (T.rows() != T.cols() || Q.rows() != T.rows() || Q.cols() != T.cols())
        throw Error(ErrorKind::InvalidModel, "discrete_lyapunov: dimension mismatch");
    if (!(discount > 0.0 && discount <= 1.0))
        throw Error(ErrorKind::InvalidModel, "discrete_lyapunov: discount outside (0,1]");
    const Eigen::Index n = T.rows();
    if (n == 0) return Matrix(0, 0);

    const Matrix A0 = std::sqrt(discount) * T;
    const double radius = spectral_radius(A0);
    if (!(radius < 1.0 - 1e-9))
        throw Error(ErrorKind::NonStationary, "spectral radius " + std::to_string(radius));

    const Matrix Qs = 0.5 * (Q + Q.transpose());
    const double bound = 1e-10 * (1.0 + max_abs(Qs));
    Matrix A = A0;
    Matrix S = Qs;
    for (int step = 0; step < 10000; ++step) {
        Matrix next = S + A * S * A.transpose();
        next = 0.5 * (next + next.transpose());
        A = (A * A).eval();
        const double change = max_abs(next - S);
        S = std::move(next);
        if (change <= 0.1 * bound || max_abs(A) == 0.0) {
            const double residual = max_abs(S - A0 * S * A0.transpose() - Qs);
            if (residual <= bound) return S;
        }
    }
    throw Error(ErrorKind::NonConvergence, "discrete_lyapunov: residual bound not met");
}

struct ScalarMinimum {
    double argmin = 0.0;
    double value = std::numeric_limits<double>::infinity();
    int evaluations = 0;
    /// Points where the objective threw; the message is kept for diagnostics.
    std::vector<std::pair<double, std::string>> failures;
};

/// Grid-seeded golden-section search on [lo, hi].
///
/// A 21-point scan picks the seed; golden section then refines inside the
/// neighbouring grid cells until the bracket is no wider than `tol`. A
/// refined point only replaces the incumbent when it improves the value by
/// more than `tie_tol * (1 + |incumbent|)`, so among equal values the
/// smallest grid point wins. Objective throws are recorded and the point is
/// treated as +inf.
inline ScalarMinimum minimize_scalar(const std::function<double(double)>& f, double lo, double hi,
                                     double tol = 1e-8, double tie_tol = 1e-12) {
    if (!(lo < hi)) throw Error(ErrorKind::InvalidParams, "minimize_scalar: requires lo < hi");

    ScalarMinimum out;
    auto eval = [&](double x) {
        ++out.evaluations;
        try {
            const double v = f(x);
            if (std::isfinite(v)) return v;
            out.failures.emplace_back(x, "non-finite objective");
        } catch (const std::exception& e) {
            out.failures.emplace_back(x, e.what());
        }
        return std::numeric_limits<double>::infinity();
    };
    auto improves = [&](double candidate, double incumbent) {
        if (!std::isfinite(incumbent)) return std::isfinite(candidate);
        return candidate < incumbent - tie_tol * (1.0 + std::abs(incumbent));
    };

    constexpr int kGrid = 21;
    const double step = (hi - lo) / (kGrid - 1);
    auto grid_point = [&](int i) { return i == kGrid - 1 ? hi : lo + i * step; };

    int best = -1;
    for (int i = 0; i < kGrid; ++i) {
        const double x = grid_point(i);
        const double v = eval(x);
        if (improves(v, out.value)) {
            out.value = v;
            out.argmin = x;
            best = i;
        }
    }
    if (best < 0) throw Error(ErrorKind::ObjectiveFailure, "objective failed at every grid point");

    double a = grid_point(std::max(best - 1, 0));
    double b = grid_point(std::min(best + 1, kGrid - 1));
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = eval(c);
    double fd = eval(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    const double x_mid = 0.5 * (a + b);
    const double f_mid = eval(x_mid);
    for (auto [x, v] : {std::pair{c, fc}, std::pair{d, fd}, std::pair{x_mid, f_mid}}) {
        if (improves(v, out.value)) {
            out.value = v;
            out.argmin = x;
        }
    }
    return out;
}

}  // namespace stabias
