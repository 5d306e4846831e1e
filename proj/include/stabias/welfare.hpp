#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "stabias/numerics.hpp"
#include "stabias/policy.hpp"

namespace stabias {

/// Unconditional expected per-period loss E[z' W z] under the stationary distribution.
struct LossReport {
    double total = 0.0;
    /// Loss with every innovation at unit scale; total = shock_scale^2 * unit_total.
    double unit_total = 0.0;
    double shock_scale = 1.0;
    /// Row i of W * Var(z); sums to total.
    std::vector<double> by_target;
    std::vector<std::string> target_names;
    Regime regime = Regime::Commitment;
};

struct BiasReport {
    double loss_discretion = 0.0;
    double loss_commitment = 0.0;
    double loss_rule = std::numeric_limits<double>::quiet_NaN();
    double bias = 0.0;
    /// Empty when the commitment loss is below 1e-14.
    std::optional<double> bias_ratio;
    double inflation_equivalent = 0.0;
};

/// Permanent inflation deviation worth the same as the loss gap.
inline double inflation_equivalent(double loss_discretion, double loss_commitment) {
    return std::sqrt(std::max(loss_discretion - loss_commitment, 0.0));
}

inline LossReport unconditional_loss(const PolicySolution& sol, const LQREModel& model) {
    const auto& ss = sol.state_space;
    const Matrix Q = ss.C * model.Sigma_eps * ss.C.transpose();
    const Matrix state_cov = discrete_lyapunov(ss.T, Q, 1.0);
    const Matrix target_cov = sol.target_loading * state_cov * sol.target_loading.transpose();
    const Matrix weighted = model.W * target_cov;
    const double scale2 = model.shock_scale * model.shock_scale;

    LossReport out;
    out.regime = sol.regime;
    out.shock_scale = model.shock_scale;
    out.unit_total = weighted.trace();
    out.total = scale2 * out.unit_total;
    out.target_names = model.names.target;
    out.by_target.resize(weighted.rows());
    for (Eigen::Index i = 0; i < weighted.rows(); ++i) out.by_target[i] = scale2 * weighted(i, i);
    return out;
}

inline BiasReport stabilisation_bias(const LossReport& discretion, const LossReport& commitment) {
    BiasReport out;
    out.loss_discretion = discretion.total;
    out.loss_commitment = commitment.total;
    out.bias = discretion.total - commitment.total;
    if (commitment.total >= 1e-14) out.bias_ratio = out.bias / commitment.total;
    // With a common shock scale the difference is taken at unit scale so that
    // the metric scales exactly with the innovations.
    if (discretion.shock_scale == commitment.shock_scale)
        out.inflation_equivalent =
            discretion.shock_scale * inflation_equivalent(discretion.unit_total, commitment.unit_total);
    else
        out.inflation_equivalent = inflation_equivalent(discretion.total, commitment.total);
    return out;
}

}  // namespace stabias
