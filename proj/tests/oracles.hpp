#pragma once

// Reference computations used only by the tests. They share no code with the
// solvers beyond the model container.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <random>
#include <vector>

#include "stabias/stabias.hpp"

namespace oracle {

using stabias::LQREModel;
using stabias::Matrix;
using stabias::Vector;

/// Discounted loss sum_{t<H} beta^t z_t' W z_t of the date-0 optimal plan
/// starting from k_0, by minimizing over the stacked path subject to every
/// constraint (one sparse KKT system).
inline double commitment_path_loss(const LQREModel& m, const Vector& k0, int horizon) {
    const int nk = m.n_pre, nf = m.n_jump, nu = m.n_inst, ny = nk + nf + nu;
    Matrix S(m.n_target(), ny);
    S << m.S_k, m.S_f, m.S_u;
    const Matrix P = S.transpose() * m.W * S;

    const int n_var = horizon * ny;
    const int n_con = nk + (horizon - 1) * (nk + nf);
    std::vector<Eigen::Triplet<double>> trip;
    auto add_block = [&](int r0, int c0, const Matrix& b, double scale) {
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j)
                if (b(i, j) != 0.0) trip.emplace_back(r0 + i, c0 + j, scale * b(i, j));
    };

    double disc = 1.0;
    for (int t = 0; t < horizon; ++t, disc *= m.beta) add_block(t * ny, t * ny, P, 2.0 * disc);

    Vector rhs = Vector::Zero(n_var + n_con);
    int row = n_var;
    add_block(row, 0, Matrix::Identity(nk, nk), 1.0);
    add_block(0, row, Matrix::Identity(nk, nk), 1.0);
    rhs.segment(row, nk) = k0;
    row += nk;
    for (int t = 0; t + 1 < horizon; ++t) {
        // k_{t+1} - A_kk k_t - A_kf f_t - B_k u_t = 0
        Matrix con_now(nk + nf, ny), con_next = Matrix::Zero(nk + nf, ny);
        con_now << -m.A_kk, -m.A_kf, -m.B_k, -m.A_fk, -m.A_ff, -m.B_f;
        con_next.topLeftCorner(nk, nk).setIdentity();
        con_next.block(nk, nk, nf, nf) = m.A_fE;
        for (const auto& [c0, blk] : {std::pair{t * ny, con_now}, std::pair{(t + 1) * ny, con_next}}) {
            add_block(row, c0, blk, 1.0);
            add_block(c0, row, blk.transpose(), 1.0);
        }
        row += nk + nf;
    }

    Eigen::SparseMatrix<double> kkt(n_var + n_con, n_var + n_con);
    kkt.setFromTriplets(trip.begin(), trip.end());
    kkt.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(kkt);
    if (lu.info() != Eigen::Success) throw std::runtime_error("oracle KKT factorization failed");
    const Vector sol = lu.solve(rhs);

    double loss = 0.0;
    disc = 1.0;
    for (int t = 0; t < horizon; ++t, disc *= m.beta) {
        const Vector y = sol.segment(t * ny, ny);
        loss += disc * y.dot(P * y);
    }
    return loss;
}

/// Same discounted sum along the path generated by a commitment solution
/// with multipliers starting at zero.
inline double solution_path_loss(const stabias::PolicySolution& sol, const LQREModel& m, const Vector& k0,
                                 int horizon) {
    Vector s = Vector::Zero(sol.T().rows());
    s.head(m.n_pre) = k0;
    double loss = 0.0, disc = 1.0;
    for (int t = 0; t < horizon; ++t, disc *= m.beta) {
        const Vector z = sol.target_loading * s;
        loss += disc * z.dot(m.W * z);
        s = sol.T() * s;
    }
    return loss;
}

struct Markov {
    Matrix V, N, F;
};

/// Finite-horizon Markov-perfect policy by backward induction from a zero
/// terminal value. Each period solves the private-sector block jointly with
/// the state transition and minimizes the resulting quadratic form in (k, u).
inline Markov discretion_backward(const LQREModel& m, int periods) {
    const int nk = m.n_pre, nf = m.n_jump, nu = m.n_inst;
    Markov out{Matrix::Zero(nk, nk), Matrix::Zero(nf, nk), Matrix::Zero(nu, nk)};
    for (int p = 0; p < periods; ++p) {
        // Unknowns (f, k'), inputs (k, u).
        Matrix L = Matrix::Zero(nf + nk, nf + nk), R(nf + nk, nk + nu);
        L.topLeftCorner(nk, nf) = -m.A_kf;
        L.topRightCorner(nk, nk).setIdentity();
        L.bottomLeftCorner(nf, nf) = m.A_ff;
        L.bottomRightCorner(nf, nk) = -m.A_fE * out.N;
        R << m.A_kk, m.B_k, -m.A_fk, -m.B_f;
        const Matrix X = L.colPivHouseholderQr().solve(R);
        const Matrix X_f = X.topRows(nf), X_k = X.bottomRows(nk);

        Matrix Z(m.n_target(), nk + nu);
        Z << m.S_k, m.S_u;
        Z += m.S_f * X_f;
        Matrix H = Z.transpose() * m.W * Z + m.beta * X_k.transpose() * out.V * X_k;
        H = 0.5 * (H + H.transpose());
        const Matrix H_uu = H.bottomRightCorner(nu, nu), H_uk = H.bottomLeftCorner(nu, nk);
        const Matrix F = H_uu.colPivHouseholderQr().solve(H_uk);

        Matrix closed(nk + nu, nk);
        closed << Matrix::Identity(nk, nk), -F;
        out.V = closed.transpose() * H * closed;
        out.V = 0.5 * (out.V + out.V.transpose());
        out.N = X_f * closed;
        out.F = F;
    }
    return out;
}

/// A random well-posed model: stable exogenous block, forward block with
/// A_fE = beta I, every variable targeted with positive weight.
inline LQREModel random_model(std::mt19937_64& rng, int max_pre = 4, int max_jump = 3) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    auto randn = [&](int r, int c, double sd) {
        Matrix out(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) out(i, j) = sd * normal(rng);
        return out;
    };
    const int nk = 1 + static_cast<int>(rng() % max_pre);
    const int nf = 1 + static_cast<int>(rng() % max_jump);
    const int nu = 1 + static_cast<int>(rng() % 2);

    LQREModel m;
    m.n_pre = nk;
    m.n_jump = nf;
    m.n_inst = nu;
    m.beta = 0.9 + 0.09 * unif(rng);
    m.A_kk = randn(nk, nk, 1.0);
    const double radius = stabias::spectral_radius(m.A_kk);
    if (radius > 0.0) m.A_kk *= (0.3 + 0.6 * unif(rng)) / radius;
    m.A_kf = randn(nk, nf, 0.3);
    m.B_k = randn(nk, nu, 0.5);
    m.C = Matrix::Identity(nk, nk);
    m.Sigma_eps = Matrix::Identity(nk, nk);
    m.A_fE = m.beta * Matrix::Identity(nf, nf);
    m.A_fk = randn(nf, nk, 0.3);
    m.A_ff = Matrix::Identity(nf, nf) + randn(nf, nf, 0.1);
    m.B_f = randn(nf, nu, 0.5);

    const int nz = nk + nf + nu;
    m.S_k = Matrix::Zero(nz, nk);
    m.S_f = Matrix::Zero(nz, nf);
    m.S_u = Matrix::Zero(nz, nu);
    m.S_k.topRows(nk).setIdentity();
    m.S_f.middleRows(nk, nf).setIdentity();
    m.S_u.bottomRows(nu).setIdentity();
    Vector w(nz);
    for (int i = 0; i < nz; ++i) w(i) = 0.1 + unif(rng);
    const Matrix low = randn(nz, 1, 0.3);
    m.W = Matrix(w.asDiagonal()) + low * low.transpose();

    for (int i = 0; i < nk; ++i) m.names.predetermined.push_back("k" + std::to_string(i));
    for (int i = 0; i < nf; ++i) m.names.jump.push_back("f" + std::to_string(i));
    for (int i = 0; i < nu; ++i) m.names.instrument.push_back("u" + std::to_string(i));
    for (int i = 0; i < nz; ++i) m.names.target.push_back("z" + std::to_string(i));
    return m;
}

}  // namespace oracle
