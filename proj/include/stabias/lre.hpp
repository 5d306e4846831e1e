#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stabias/errors.hpp"
#include "stabias/numerics.hpp"
#include "stabias/qz.hpp"

namespace stabias {

struct VariableNames {
    std::vector<std::string> predetermined;
    std::vector<std::string> jump;
    std::vector<std::string> instrument;
    std::vector<std::string> target;
};

/// Linear-quadratic rational-expectations model in partitioned form:
///
///   k_{t+1}            = A_kk k_t + A_kf f_t + B_k u_t + C eps_{t+1}
///   A_fE E_t f_{t+1}   = A_fk k_t + A_ff f_t + B_f u_t
///   z_t                = S_k k_t + S_f f_t + S_u u_t,   loss  z' W z
///
/// The last `n_static` forward rows may be static constraints (zero rows of
/// A_fE); closing a model with a rule that cannot be solved for the
/// instruments produces such rows.
struct LQREModel {
    int n_pre = 0;
    int n_jump = 0;
    int n_inst = 0;
    int n_static = 0;

    Matrix A_kk, A_kf, B_k;
    Matrix A_fk, A_ff, B_f, A_fE;
    Matrix C;
    Matrix Sigma_eps;
    /// Multiplies every innovation standard deviation; covariance is shock_scale^2 * Sigma_eps.
    double shock_scale = 1.0;
    double beta = 0.99;

    Matrix S_k, S_f, S_u;
    Matrix W;
    VariableNames names;

    /// Jump-index pairs (i, j) for the targeting rule phi*f_i + (1-phi)*f_j = 0,
    /// one pair per instrument.
    std::vector<std::pair<int, int>> targeting_pairs;

    int n_shock() const { return static_cast<int>(C.cols()); }
    int n_target() const { return static_cast<int>(W.rows()); }
    Matrix shock_covariance() const { return shock_scale * shock_scale * Sigma_eps; }
};

/// Closed-loop law of motion k_{t+1} = T k_t + C eps_{t+1}, f_t = G_f k_t.
struct StateSpaceSolution {
    Matrix T;
    Matrix G_f;
    std::optional<Matrix> G_u;
    Matrix C;
    std::vector<std::string> state_names;
    double residual = 0.0;
};

namespace detail {

inline void check_shape(std::vector<std::string>& out, const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                        const char* name) {
    if (m.rows() != rows || m.cols() != cols)
        out.push_back(std::string(name) + " has shape " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                      ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    else if (!m.allFinite())
        out.push_back(std::string(name) + " has non-finite entries");
}

}  // namespace detail

/// Every invariant violation of `model`; empty when well formed.
inline std::vector<std::string> validate(const LQREModel& m) {
    std::vector<std::string> out;
    if (m.n_pre < 0 || m.n_jump < 0 || m.n_inst < 0 || m.n_static < 0 || m.n_static > m.n_jump) {
        out.push_back("negative or inconsistent dimension counts");
        return out;
    }
    const int ns = m.n_shock(), nz = static_cast<int>(m.W.rows());
    detail::check_shape(out, m.A_kk, m.n_pre, m.n_pre, "A_kk");
    detail::check_shape(out, m.A_kf, m.n_pre, m.n_jump, "A_kf");
    detail::check_shape(out, m.B_k, m.n_pre, m.n_inst, "B_k");
    detail::check_shape(out, m.A_fk, m.n_jump, m.n_pre, "A_fk");
    detail::check_shape(out, m.A_ff, m.n_jump, m.n_jump, "A_ff");
    detail::check_shape(out, m.B_f, m.n_jump, m.n_inst, "B_f");
    detail::check_shape(out, m.A_fE, m.n_jump, m.n_jump, "A_fE");
    detail::check_shape(out, m.C, m.n_pre, ns, "C");
    detail::check_shape(out, m.Sigma_eps, ns, ns, "Sigma_eps");
    detail::check_shape(out, m.W, nz, nz, "W");
    detail::check_shape(out, m.S_k, nz, m.n_pre, "S_k");
    detail::check_shape(out, m.S_f, nz, m.n_jump, "S_f");
    detail::check_shape(out, m.S_u, nz, m.n_inst, "S_u");
    if (!out.empty()) return out;

    if (!(m.beta > 0.0 && m.beta < 1.0)) out.push_back("beta out of (0,1)");
    if (!std::isfinite(m.shock_scale) || m.shock_scale < 0.0) out.push_back("shock_scale negative or non-finite");
    if (!is_symmetric(m.W))
        out.push_back("W not symmetric");
    else if (!is_psd(m.W))
        out.push_back("W not positive semidefinite");
    if (!is_symmetric(m.Sigma_eps))
        out.push_back("Sigma_eps not symmetric");
    else if (!is_psd(m.Sigma_eps))
        out.push_back("Sigma_eps not positive semidefinite");

    const int n_dyn = m.n_jump - m.n_static;
    if (n_dyn > 0) {
        const Matrix lead = m.A_fE.topLeftCorner(n_dyn, n_dyn);
        Eigen::JacobiSVD<Matrix> svd(lead);
        const auto& sv = svd.singularValues();
        const double smin = sv(sv.size() - 1), smax = sv(0);
        if (!(smin > 0.0) || smax / smin >= 1e12) out.push_back("A_fE not invertible (condition number >= 1e12)");
        if (max_abs(m.A_fE.topRightCorner(n_dyn, m.n_static)) != 0.0)
            out.push_back("A_fE couples dynamic rows to static jumps");
    }
    if (m.n_static > 0 && max_abs(m.A_fE.bottomRows(m.n_static)) != 0.0)
        out.push_back("static constraint rows of A_fE must be zero");

    for (int i = 0; i < nz; ++i) {
        const double row = m.S_k.row(i).cwiseAbs().sum() + m.S_f.row(i).cwiseAbs().sum() +
                           m.S_u.row(i).cwiseAbs().sum();
        if (row == 0.0) out.push_back("target row " + std::to_string(i) + " selects no variable");
    }

    const auto& nm = m.names;
    if (static_cast<int>(nm.predetermined.size()) != m.n_pre || static_cast<int>(nm.jump.size()) != m.n_jump ||
        static_cast<int>(nm.instrument.size()) != m.n_inst || static_cast<int>(nm.target.size()) != nz)
        out.push_back("names do not match dimensions");
    return out;
}

inline void require_valid(const LQREModel& m, const std::string& context) {
    const auto violations = validate(m);
    if (violations.empty()) return;
    std::string msg = context + ":";
    for (const auto& v : violations) msg += " " + v + ";";
    throw Error(ErrorKind::InvalidModel, msg);
}

/// A model closed by a rule, plus the map recovering the eliminated
/// instruments: u_t = u_from_k k_t + u_from_f f_t (f of the closed model).
struct ClosedModel {
    LQREModel model;
    Matrix u_from_k;
    Matrix u_from_f;
};

/// Imposes R_k k_t + R_f f_t + R_u u_t = 0 (one row per instrument).
///
/// Instruments are substituted out when R_u is invertible; otherwise the rows
/// are appended as static constraints and the instruments become jumps.
inline ClosedModel close_with_rule(const LQREModel& model, const Matrix& R_k, const Matrix& R_f, const Matrix& R_u) {
    const int nk = model.n_pre, nf = model.n_jump, nu = model.n_inst;
    if (R_k.rows() != nu || R_f.rows() != nu || R_u.rows() != nu || R_k.cols() != nk || R_f.cols() != nf ||
        R_u.cols() != nu)
        throw Error(ErrorKind::SingularRule, "rule must have one row per instrument and match model dimensions");

    ClosedModel out;
    LQREModel& c = out.model;
    c = model;
    c.n_inst = 0;
    c.B_k = Matrix(nk, 0);
    c.S_u = Matrix(model.n_target(), 0);
    c.names.instrument.clear();

    Eigen::FullPivLU<Matrix> lu(R_u);
    if (nu == 0 || (lu.isInvertible() && lu.rcond() > 1e-12)) {
        const Matrix P_k = -lu.solve(R_k);
        const Matrix P_f = -lu.solve(R_f);
        c.A_kk = model.A_kk + model.B_k * P_k;
        c.A_kf = model.A_kf + model.B_k * P_f;
        c.A_fk = model.A_fk + model.B_f * P_k;
        c.A_ff = model.A_ff + model.B_f * P_f;
        c.B_f = Matrix(nf, 0);
        c.S_k = model.S_k + model.S_u * P_k;
        c.S_f = model.S_f + model.S_u * P_f;
        out.u_from_k = P_k;
        out.u_from_f = P_f;
        return out;
    }

    const int nf2 = nf + nu;
    c.n_jump = nf2;
    c.n_static = model.n_static + nu;
    c.A_kf.resize(nk, nf2);
    c.A_kf << model.A_kf, model.B_k;
    c.A_fk.resize(nf2, nk);
    c.A_fk << model.A_fk, R_k;
    c.A_ff.resize(nf2, nf2);
    c.A_ff << model.A_ff, model.B_f, R_f, R_u;
    c.A_fE = Matrix::Zero(nf2, nf2);
    c.A_fE.topLeftCorner(nf, nf) = model.A_fE;
    c.B_f = Matrix(nf2, 0);
    c.S_f.resize(model.n_target(), nf2);
    c.S_f << model.S_f, model.S_u;
    for (const auto& name : model.names.instrument) c.names.jump.push_back(name);
    // Existing static rows sit at the end of the old jump block, so all static rows stay contiguous and last.
    out.u_from_k = Matrix::Zero(nu, nk);
    out.u_from_f = Matrix::Zero(nu, nf2);
    out.u_from_f.rightCols(nu).setIdentity();

    // Regularity of lead*z - lag at two generic points.
    using CMatrix = Eigen::MatrixXcd;
    const int n = nk + nf2;
    Matrix lead = Matrix::Zero(n, n), lag(n, n);
    lead.topLeftCorner(nk, nk).setIdentity();
    lead.bottomRightCorner(nf2, nf2) = c.A_fE;
    lag << c.A_kk, c.A_kf, c.A_fk, c.A_ff;
    bool regular = false;
    for (const std::complex<double> zpt : {std::complex<double>(0.37, 0.71), std::complex<double>(1.9, -0.3)}) {
        const CMatrix pencil = zpt * lead.cast<std::complex<double>>() - lag.cast<std::complex<double>>();
        Eigen::FullPivLU<CMatrix> plu(pencil);
        if (plu.isInvertible() && plu.rcond() > 1e-14) regular = true;
    }
    if (!regular) throw Error(ErrorKind::SingularRule, "rule leaves the closed system singular");
    return out;
}

/// Determinate rational-expectations solution of a model with no free instruments.
inline StateSpaceSolution solve_re(const LQREModel& model, const std::string& context = {}) {
    if (model.n_inst != 0) throw Error(ErrorKind::InvalidModel, "solve_re requires a model with no free instruments");
    require_valid(model, "solve_re");

    const int nk = model.n_pre, nf = model.n_jump;
    StateSpaceSolution out;
    out.C = model.C;
    out.state_names = model.names.predetermined;
    if (nf == 0) {
        out.T = model.A_kk;
        out.G_f = Matrix(0, nk);
        return out;
    }

    const int n = nk + nf;
    Matrix lead = Matrix::Zero(n, n), lag(n, n);
    lead.topLeftCorner(nk, nk).setIdentity();
    lead.bottomRightCorner(nf, nf) = model.A_fE;
    lag << model.A_kk, model.A_kf, model.A_fk, model.A_ff;
    PencilSolution ps = solve_stable_pencil(lead, lag, nk, context);
    out.T = std::move(ps.transition);
    out.G_f = std::move(ps.policy);

    const Matrix res_k = out.T - (model.A_kk + model.A_kf * out.G_f);
    const Matrix res_f = model.A_fE * out.G_f * out.T - (model.A_fk + model.A_ff * out.G_f);
    out.residual = std::max(max_abs(res_k), max_abs(res_f));
    return out;
}

}  // namespace stabias
