#pragma once

#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "stabias/lre.hpp"
#include "stabias/numerics.hpp"
#include "stabias/policy.hpp"
#include "stabias/qz.hpp"
#include "stabias/welfare.hpp"

namespace stabias {

namespace detail {

inline void require_policy_model(const LQREModel& model, const char* who) {
    require_valid(model, who);
    if (model.n_inst < 1) throw Error(ErrorKind::InvalidModel, std::string(who) + ": model has no instruments");
}

struct LossMatrices {
    Matrix Q, U, R;  // x'Qx + 2x'Uu + u'Ru with x = (k, f)
};

inline LossMatrices loss_matrices(const LQREModel& m) {
    Matrix S(m.n_target(), m.n_pre + m.n_jump);
    S << m.S_k, m.S_f;
    LossMatrices out;
    out.Q = S.transpose() * m.W * S;
    out.U = S.transpose() * m.W * m.S_u;
    out.R = m.S_u.transpose() * m.W * m.S_u;
    return out;
}

}  // namespace detail

/// Ramsey policy in its stationary form.
///
/// Stacks the constraints and the first-order conditions of the Lagrangian
///   sum beta^t [z'Wz + 2 beta rho_{t+1}'(A x_t + B u_t - Gamma x_{t+1})]
/// into a pencil over (k, rho_f | f, rho_k, u). The multipliers rho_f on the
/// forward-looking block are predetermined co-states starting from zero.
inline PolicySolution solve_commitment(const LQREModel& model) {
    detail::require_policy_model(model, "solve_commitment");
    const int nk = model.n_pre, nf = model.n_jump, nu = model.n_inst;
    const int n = nk + nf;
    const double beta = model.beta;

    Matrix gamma = Matrix::Zero(n, n);
    gamma.topLeftCorner(nk, nk).setIdentity();
    gamma.bottomRightCorner(nf, nf) = model.A_fE;
    Matrix A(n, n);
    A << model.A_kk, model.A_kf, model.A_fk, model.A_ff;
    Matrix B(n, nu);
    B << model.B_k, model.B_f;
    const auto [Q, U, R] = detail::loss_matrices(model);

    // Natural order v = (x, rho, u).
    const int nv = 2 * n + nu;
    Matrix lead = Matrix::Zero(nv, nv), lag = Matrix::Zero(nv, nv);
    lead.block(0, 0, n, n) = gamma;
    lag.block(0, 0, n, n) = A;
    lag.block(0, 2 * n, n, nu) = B;
    lead.block(n, n, n, n) = beta * A.transpose();
    lag.block(n, 0, n, n) = -Q;
    lag.block(n, n, n, n) = gamma.transpose();
    lag.block(n, 2 * n, n, nu) = -U;
    lead.block(2 * n, n, nu, n) = -beta * B.transpose();
    lag.block(2 * n, 0, nu, n) = U.transpose();
    lag.block(2 * n, 2 * n, nu, nu) = R;

    // Reorder to (k, rho_f, f, rho_k, u).
    std::vector<int> order;
    for (int i = 0; i < nk; ++i) order.push_back(i);
    for (int i = 0; i < nf; ++i) order.push_back(n + nk + i);
    for (int i = 0; i < nf; ++i) order.push_back(nk + i);
    for (int i = 0; i < nk; ++i) order.push_back(n + i);
    for (int i = 0; i < nu; ++i) order.push_back(2 * n + i);
    Matrix lead_p(nv, nv), lag_p(nv, nv);
    for (int j = 0; j < nv; ++j) {
        lead_p.col(j) = lead.col(order[j]);
        lag_p.col(j) = lag.col(order[j]);
    }

    PencilSolution ps = solve_stable_pencil(lead_p, lag_p, n, "commitment");

    PolicySolution out;
    out.regime = Regime::Commitment;
    auto& ss = out.state_space;
    ss.T = ps.transition;
    ss.G_f = ps.policy.topRows(nf);
    ss.G_u = ps.policy.bottomRows(nu);
    ss.C = Matrix::Zero(n, model.n_shock());
    ss.C.topRows(nk) = model.C;
    ss.state_names = model.names.predetermined;
    for (const auto& f : model.names.jump) ss.state_names.push_back("lambda_" + f);

    Matrix k_sel = Matrix::Zero(nk, n);
    k_sel.leftCols(nk).setIdentity();
    out.target_loading = model.S_k * k_sel + model.S_f * ss.G_f + model.S_u * *ss.G_u;

    Matrix stacked(nv, n);
    stacked << Matrix::Identity(n, n), ps.policy;
    ss.residual = max_abs(lead_p * stacked * ss.T - lag_p * stacked);
    out.diagnostics.residual = ss.residual;
    out.diagnostics.stable_roots = ps.stable_roots;
    return out;
}

struct DiscretionOptions {
    double tol = 1e-12;
    int max_iter = 20000;
    double damping = 0.0;
};

/// Outcome of one Bellman step of the Markov-perfect problem.
struct DiscretionStep {
    Matrix V;  // value k' V k
    Matrix N;  // private-sector response f = N k
    Matrix F;  // policy u = -F k
    Matrix T;  // closed-loop transition
    Matrix target_loading;
};

/// One-period problem given next period's value matrix V and response N.
inline DiscretionStep discretion_step(const LQREModel& m, const Matrix& V, const Matrix& N) {
    const Matrix M = m.A_ff - m.A_fE * N * m.A_kf;
    Eigen::PartialPivLU<Matrix> m_lu(M);
    if (m.n_jump > 0 && !(std::abs(m_lu.determinant()) > 0.0))
        throw Error(ErrorKind::NonConvergence, "discretion: private-sector block singular");
    const Matrix D = m.n_jump > 0 ? Matrix(m_lu.solve(m.A_fE * N * m.A_kk - m.A_fk)) : Matrix(0, m.n_pre);
    const Matrix G = m.n_jump > 0 ? Matrix(m_lu.solve(m.A_fE * N * m.B_k - m.B_f)) : Matrix(0, m.n_inst);

    const Matrix A_star = m.A_kk + m.A_kf * D;
    const Matrix B_star = m.B_k + m.A_kf * G;
    const Matrix Z_k = m.S_k + m.S_f * D;
    const Matrix Z_u = m.S_u + m.S_f * G;

    const Matrix BV = m.beta * B_star.transpose() * V;
    const Matrix H_uu = Z_u.transpose() * m.W * Z_u + BV * B_star;
    const Matrix H_uk = Z_u.transpose() * m.W * Z_k + BV * A_star;
    Eigen::LDLT<Matrix> h_ldlt(0.5 * (H_uu + H_uu.transpose()));
    if (h_ldlt.info() != Eigen::Success || !(h_ldlt.vectorD().cwiseAbs().minCoeff() > 0.0))
        throw Error(ErrorKind::NonConvergence, "discretion: policy Hessian singular");

    DiscretionStep out;
    out.F = h_ldlt.solve(H_uk);
    out.T = A_star - B_star * out.F;
    out.target_loading = Z_k - Z_u * out.F;
    out.V = out.target_loading.transpose() * m.W * out.target_loading + m.beta * out.T.transpose() * V * out.T;
    out.V = 0.5 * (out.V + out.V.transpose());
    out.N = D - G * out.F;
    return out;
}

/// Markov-perfect policy by backward iteration on (V, N) from V = 0, N = 0.
///
/// Stops when the value matrix (relative to 1 + |V|), the private-sector
/// response and the policy feedback all move by at most `tol`.
inline PolicySolution solve_discretion(const LQREModel& model, const DiscretionOptions& opts = {}) {
    detail::require_policy_model(model, "solve_discretion");
    if (!(opts.damping >= 0.0 && opts.damping < 1.0))
        throw Error(ErrorKind::InvalidParams, "discretion damping must lie in [0,1)");
    const int nk = model.n_pre, nf = model.n_jump;

    Matrix V = Matrix::Zero(nk, nk);
    Matrix N = Matrix::Zero(nf, nk);
    Matrix F = Matrix::Zero(model.n_inst, nk);
    DiscretionStep step;
    double change = std::numeric_limits<double>::infinity();
    int iter = 0;
    while (iter < opts.max_iter) {
        ++iter;
        step = discretion_step(model, V, N);
        change = std::max({max_abs(step.V - V) / (1.0 + max_abs(V)), max_abs(step.N - N), max_abs(step.F - F)});
        if (!std::isfinite(change)) throw Error(ErrorKind::NoStableSolution, "discretion: iteration diverged");
        const double d = opts.damping;
        V = d == 0.0 ? step.V : Matrix((1.0 - d) * step.V + d * V);
        N = d == 0.0 ? step.N : Matrix((1.0 - d) * step.N + d * N);
        F = step.F;
        if (change <= opts.tol) break;
    }
    if (!(change <= opts.tol))
        throw Error(ErrorKind::NonConvergence,
                    "discretion: no fixed point after " + std::to_string(iter) + " iterations (last change " +
                        std::to_string(change) + ")");

    const double radius = spectral_radius(std::sqrt(model.beta) * step.T);
    if (!(radius < kUnitCircleCutoff))
        throw Error(ErrorKind::NoStableSolution, "discretion: explosive closed loop (radius " +
                                                     std::to_string(radius) + ")");

    PolicySolution out;
    out.regime = Regime::Discretion;
    auto& ss = out.state_space;
    ss.T = step.T;
    ss.G_f = step.N;
    ss.G_u = -step.F;
    ss.C = model.C;
    ss.state_names = model.names.predetermined;
    ss.residual = change;
    out.target_loading = step.target_loading;
    out.diagnostics.iterations = iter;
    out.diagnostics.residual = change;
    return out;
}

/// Solves the model closed by R_k k + R_f f + R_u u = 0.
inline PolicySolution solve_with_rule(const LQREModel& model, const Matrix& R_k, const Matrix& R_f,
                                      const Matrix& R_u, const std::string& context = {}) {
    require_valid(model, "solve_with_rule");
    const ClosedModel closed = close_with_rule(model, R_k, R_f, R_u);
    const StateSpaceSolution re = solve_re(closed.model, context);

    PolicySolution out;
    out.regime = Regime::Rule;
    auto& ss = out.state_space;
    ss.T = re.T;
    ss.C = re.C;
    ss.state_names = re.state_names;
    ss.residual = re.residual;
    ss.G_f = re.G_f.topRows(model.n_jump);
    ss.G_u = closed.u_from_k + closed.u_from_f * re.G_f;
    out.target_loading = closed.model.S_k + closed.model.S_f * re.G_f;
    out.diagnostics.residual = re.residual;
    return out;
}

/// Weighted inflation targeting: phi_i f_a + (1 - phi_i) f_b = 0 for each
/// targeting pair (a, b). A single weight is applied to every pair.
inline PolicySolution solve_rule(const LQREModel& model, const Vector& phi) {
    const auto& pairs = model.targeting_pairs;
    if (pairs.empty() || static_cast<int>(pairs.size()) != model.n_inst)
        throw Error(ErrorKind::InvalidModel, "solve_rule: model needs one targeting pair per instrument");
    if (phi.size() != 1 && phi.size() != static_cast<Eigen::Index>(pairs.size()))
        throw Error(ErrorKind::InvalidParams, "solve_rule: need one weight or one per targeting pair");
    for (Eigen::Index i = 0; i < phi.size(); ++i)
        if (!(phi(i) >= 0.0 && phi(i) <= 1.0))
            throw Error(ErrorKind::InvalidParams, "solve_rule: weights must lie in [0,1]");

    const int nu = model.n_inst;
    Matrix R_f = Matrix::Zero(nu, model.n_jump);
    for (int r = 0; r < nu; ++r) {
        const double w = phi.size() == 1 ? phi(0) : phi(r);
        R_f(r, pairs[r].first) += w;
        R_f(r, pairs[r].second) += 1.0 - w;
    }
    std::ostringstream ctx;
    ctx.precision(17);
    ctx << "phi =";
    for (Eigen::Index i = 0; i < phi.size(); ++i) ctx << ' ' << phi(i);

    PolicySolution out;
    try {
        out = solve_with_rule(model, Matrix::Zero(nu, model.n_pre), R_f, Matrix::Zero(nu, nu), ctx.str());
    } catch (const DeterminacyError&) {
        throw;
    } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " [" + ctx.str() + "]");
    }
    out.rule_weights = phi;
    return out;
}

struct RuleOptimum {
    Vector phi;
    PolicySolution solution;
    double loss = 0.0;
    int sweeps = 0;
};

/// Minimizes the unconditional loss over targeting weights in [0,1]^n.
///
/// n_weights = 1 applies one weight to every pair. Otherwise a common-weight
/// search seeds coordinate descent, which stops once a sweep improves the loss
/// by less than 1e-12. Infeasible weights count as +inf.
inline RuleOptimum optimize_rule(const LQREModel& model, int n_weights = 1, double tol = 1e-8) {
    const int n_pairs = static_cast<int>(model.targeting_pairs.size());
    if (n_weights != 1 && n_weights != n_pairs)
        throw Error(ErrorKind::InvalidParams, "optimize_rule: n_weights must be 1 or the number of targeting pairs");

    auto loss_at = [&](const Vector& phi) { return unconditional_loss(solve_rule(model, phi), model).total; };

    Vector phi = Vector::Constant(1, 0.0);
    const ScalarMinimum common = minimize_scalar([&](double x) { return loss_at(Vector::Constant(1, x)); }, 0.0,
                                                 1.0, tol);
    phi(0) = common.argmin;
    double loss = common.value;
    int sweeps = 0;

    if (n_weights > 1) {
        phi = Vector::Constant(n_weights, common.argmin);
        for (sweeps = 1; sweeps <= 100; ++sweeps) {
            const double before = loss;
            for (int i = 0; i < n_weights; ++i) {
                const ScalarMinimum best = minimize_scalar(
                    [&](double x) {
                        Vector trial = phi;
                        trial(i) = x;
                        return loss_at(trial);
                    },
                    0.0, 1.0, tol);
                if (best.value < loss - 1e-12 * (1.0 + std::abs(loss))) {
                    phi(i) = best.argmin;
                    loss = best.value;
                }
            }
            if (before - loss < 1e-12 * (1.0 + loss)) break;
        }
    }

    RuleOptimum out;
    out.phi = phi;
    out.solution = solve_rule(model, phi);
    out.loss = loss;
    out.sweeps = sweeps;
    return out;
}

}  // namespace stabias
