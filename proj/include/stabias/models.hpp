#pragma once

#include <optional>
#include <string>

#include "stabias/errors.hpp"
#include "stabias/lre.hpp"

namespace stabias {

/// Closed-economy two-sector calibration. Defaults are the baseline values.
struct WoodfordParams {
    double beta = 0.99;
    double eta = 1.0;
    double kappa = 0.024;
    double n1 = 0.5;
    double lambda_x = 0.048;
    double lambda_R = 0.0288;
    double rho = 0.8;
    double w2 = 0.5;
    /// Multiplier on the calibrated relative-price loading (see woodford_slopes).
    double c_rel = 1.0;
    double sigma_eps = 1.0;

    double n2() const { return 1.0 - n1; }
    double w1() const { return 1.0 - w2; }
};

inline constexpr double kWoodfordMinWeight = 0.01;

struct SectorSlopes {
    double kappa1, kappa2, gamma1, gamma2;
};

/// Ratio gamma_j / (kappa_j n_{-j}) implied by the loss weights: the
/// relative-price weight is lambda_R = lambda_x n_1 n_2 eta (gamma_j / (kappa_j n_{-j})),
/// which gives 2.4 at the baseline calibration.
inline double woodford_relative_price_scale(const WoodfordParams& p) {
    return p.c_rel * p.lambda_R / (p.eta * p.n1 * p.n2() * p.lambda_x);
}

/// kappa_j = n_j kappa / w_j; gamma_1 = c kappa_1 n_2, gamma_2 = -c kappa_2 n_1
/// with c = woodford_relative_price_scale(p).
inline SectorSlopes woodford_slopes(const WoodfordParams& p) {
    const double c = woodford_relative_price_scale(p);
    SectorSlopes s{};
    s.kappa1 = p.n1 * p.kappa / p.w1();
    s.kappa2 = p.n2() * p.kappa / p.w2;
    s.gamma1 = c * s.kappa1 * p.n2();
    s.gamma2 = -c * s.kappa2 * p.n1;
    return s;
}

inline void check_params(const WoodfordParams& p) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParams, "woodford: " + what); };
    if (!(p.beta > 0.0 && p.beta < 1.0)) fail("beta must lie in (0,1)");
    if (!(p.rho >= 0.0 && p.rho < 1.0)) fail("rho must lie in [0,1)");
    if (!(p.n1 > 0.0 && p.n1 < 1.0)) fail("n1 must lie in (0,1)");
    if (!(p.kappa > 0.0)) fail("kappa must be positive");
    if (!(p.eta > 0.0)) fail("eta must be positive");
    if (!(p.lambda_x > 0.0) || !(p.lambda_R > 0.0)) fail("lambda_x and lambda_R must be positive");
    if (!(p.w2 >= kWoodfordMinWeight && p.w2 <= 1.0 - kWoodfordMinWeight)) fail("w2 must lie in [0.01, 0.99]");
    if (!(p.c_rel > 0.0)) fail("c_rel must be positive");
    if (!(p.sigma_eps >= 0.0) || !std::isfinite(p.sigma_eps)) fail("sigma_eps must be non-negative");
}

/// k = (p_R lag, natural p_R), f = (pi_1, pi_2), u = x,
/// z = (pi_1, pi_2, x, relative-price gap).
inline LQREModel build_woodford(const WoodfordParams& p) {
    check_params(p);
    const SectorSlopes s = woodford_slopes(p);
    const double g1 = s.gamma1, g2 = s.gamma2;

    LQREModel m;
    m.n_pre = 2;
    m.n_jump = 2;
    m.n_inst = 1;
    m.beta = p.beta;

    // p_R,t = p_R,t-1 + pi_2 - pi_1;  natural p_R follows an AR(1).
    m.A_kk.resize(2, 2);
    m.A_kk << 1.0, 0.0,
              0.0, p.rho;
    m.A_kf.resize(2, 2);
    m.A_kf << -1.0, 1.0,
               0.0, 0.0;
    m.B_k = Matrix::Zero(2, 1);
    m.C.resize(2, 1);
    m.C << 0.0, 1.0;
    m.Sigma_eps = Matrix::Identity(1, 1);
    m.shock_scale = p.sigma_eps;

    // beta E pi_j' = pi_j - kappa_j x - gamma_j (p_R,t-1 + pi_2 - pi_1 - natural p_R)
    m.A_fE = p.beta * Matrix::Identity(2, 2);
    m.A_fk.resize(2, 2);
    m.A_fk << -g1, g1,
              -g2, g2;
    m.A_ff.resize(2, 2);
    m.A_ff << 1.0 + g1, -g1,
              g2, 1.0 - g2;
    m.B_f.resize(2, 1);
    m.B_f << -s.kappa1, -s.kappa2;

    m.S_k.resize(4, 2);
    m.S_k << 0.0, 0.0,
             0.0, 0.0,
             0.0, 0.0,
             1.0, -1.0;
    m.S_f.resize(4, 2);
    m.S_f << 1.0, 0.0,
             0.0, 1.0,
             0.0, 0.0,
             -1.0, 1.0;
    m.S_u.resize(4, 1);
    m.S_u << 0.0, 0.0, 1.0, 0.0;
    m.W = Vector((Vector(4) << p.w1(), p.w2, p.lambda_x, p.lambda_R).finished()).asDiagonal();

    m.names.predetermined = {"p_R_lag", "p_R_nat"};
    m.names.jump = {"pi_1", "pi_2"};
    m.names.instrument = {"x"};
    m.names.target = {"pi_1", "pi_2", "x", "p_R_gap"};
    m.targeting_pairs = {{0, 1}};
    return m;
}

/// Two-country tradable/non-tradable calibration. Foreign values mirror home ones.
struct LiuPappaParams {
    double beta = 0.99;
    double alpha = 0.3;
    double alpha_star = 0.3;
    double alpha_tilde = 0.3;
    double alpha_tilde_star = 0.3;
    double omega = 0.7;  // home bias; does not enter the linear block
    double theta = 10.0;
    double kappa_N = 0.0858;
    double kappa_T = 0.0858;
    double kappa_N_star = 0.0858;
    double kappa_F_star = 0.0858;
    double rho_a = 0.8;
    double sigma_a = 1.0;
    /// Optional reparameterization: tradable inflation weight and aggregate
    /// slope per country. When w2 is set the sectoral slopes are derived from
    /// (w2, kappa_bar); kappa_bar defaults to the value implied by the slopes.
    std::optional<double> w2, w2_star, kappa_bar, kappa_bar_star;
};

struct CountryWeights {
    double w1, w2, kappa_bar;
};

inline CountryWeights lp_country_weights(double alpha, double alpha_tilde, double kappa_N, double kappa_T) {
    const double a = (1.0 - alpha) / kappa_N;
    const double b = alpha_tilde / kappa_T;
    CountryWeights out{};
    out.kappa_bar = 1.0 / (a + b);
    out.w1 = a / (a + b);
    out.w2 = b / (a + b);
    return out;
}

struct LiuPappaWeights {
    CountryWeights home, foreign;
};

/// Slopes after applying the optional (w2, kappa_bar) reparameterization.
struct LiuPappaSlopes {
    double kappa_N, kappa_T, kappa_N_star, kappa_F_star;
};

inline LiuPappaSlopes lp_slopes(const LiuPappaParams& p) {
    LiuPappaSlopes s{p.kappa_N, p.kappa_T, p.kappa_N_star, p.kappa_F_star};
    auto derive = [](double alpha, double alpha_tilde, double& kN, double& kT, std::optional<double> w2,
                     std::optional<double> kbar) {
        if (!w2) return;
        const double kb = kbar ? *kbar : lp_country_weights(alpha, alpha_tilde, kN, kT).kappa_bar;
        kN = (1.0 - alpha) * kb / (1.0 - *w2);
        kT = alpha_tilde * kb / *w2;
    };
    derive(p.alpha, p.alpha_tilde, s.kappa_N, s.kappa_T, p.w2, p.kappa_bar);
    derive(p.alpha_star, p.alpha_tilde_star, s.kappa_N_star, s.kappa_F_star, p.w2_star, p.kappa_bar_star);
    return s;
}

inline LiuPappaWeights lp_weights(const LiuPappaParams& p) {
    const LiuPappaSlopes s = lp_slopes(p);
    return {lp_country_weights(p.alpha, p.alpha_tilde, s.kappa_N, s.kappa_T),
            lp_country_weights(p.alpha_star, p.alpha_tilde_star, s.kappa_N_star, s.kappa_F_star)};
}

inline void check_params(const LiuPappaParams& p) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvalidParams, "liu_pappa: " + what); };
    if (!(p.beta > 0.0 && p.beta < 1.0)) fail("beta must lie in (0,1)");
    for (double a : {p.alpha, p.alpha_star})
        if (!(a > 0.0 && a < 1.0)) fail("alpha must lie in (0,1)");
    for (double a : {p.alpha_tilde, p.alpha_tilde_star})
        if (!(a > 0.0)) fail("alpha_tilde must be positive");
    if (!(p.theta > 0.0)) fail("theta must be positive");
    if (!(p.rho_a >= 0.0 && p.rho_a < 1.0)) fail("rho_a must lie in [0,1)");
    if (!(p.sigma_a >= 0.0) || !std::isfinite(p.sigma_a)) fail("sigma_a must be non-negative");
    for (auto w : {p.w2, p.w2_star})
        if (w && !(*w > 0.0 && *w < 1.0)) fail("w2 must lie in (0,1)");
    for (auto k : {p.kappa_bar, p.kappa_bar_star})
        if (k && !(*k > 0.0)) fail("kappa_bar must be positive");
    const LiuPappaSlopes s = lp_slopes(p);
    for (double k : {s.kappa_N, s.kappa_T, s.kappa_N_star, s.kappa_F_star})
        if (!(k > 0.0) || !std::isfinite(k)) fail("sectoral slopes must be positive");
}

/// Per country: k = (gap lag, a_N, a_T, a_N lag, a_T lag) with gap = x_N - x_T,
/// f = (pi_N, pi_H), u = x_T; z = (x_N, pi_N, x_T, pi_H). Foreign blocks follow.
inline LQREModel build_liu_pappa(const LiuPappaParams& p) {
    check_params(p);
    const LiuPappaSlopes s = lp_slopes(p);

    LQREModel m;
    m.n_pre = 10;
    m.n_jump = 4;
    m.n_inst = 2;
    m.beta = p.beta;
    m.A_kk = Matrix::Zero(10, 10);
    m.A_kf = Matrix::Zero(10, 4);
    m.B_k = Matrix::Zero(10, 2);
    m.C = Matrix::Zero(10, 4);
    m.Sigma_eps = Matrix::Identity(4, 4);
    m.shock_scale = p.sigma_a;
    m.A_fE = p.beta * Matrix::Identity(4, 4);
    m.A_fk = Matrix::Zero(4, 10);
    m.A_ff = Matrix::Zero(4, 4);
    m.B_f = Matrix::Zero(4, 2);
    m.S_k = Matrix::Zero(8, 10);
    m.S_f = Matrix::Zero(8, 4);
    m.S_u = Matrix::Zero(8, 2);
    m.W = Matrix::Zero(8, 8);

    auto country = [&](int c, double alpha, double alpha_tilde, double kN, double kT, const std::string& sfx,
                       const std::string& traded_pi) {
        const int k0 = 5 * c, f0 = 2 * c, z0 = 4 * c;
        const int gap = k0, aN = k0 + 1, aT = k0 + 2, aN_lag = k0 + 3, aT_lag = k0 + 4;
        const int piN = f0, piT = f0 + 1;

        // gap_t = gap_{t-1} - pi_N + pi_T - (a_N - a_N lag) + (a_T - a_T lag)
        Eigen::RowVectorXd gap_k = Eigen::RowVectorXd::Zero(10);
        gap_k(gap) = 1.0;
        gap_k(aN) = -1.0;
        gap_k(aN_lag) = 1.0;
        gap_k(aT) = 1.0;
        gap_k(aT_lag) = -1.0;
        Eigen::RowVectorXd gap_f = Eigen::RowVectorXd::Zero(4);
        gap_f(piN) = -1.0;
        gap_f(piT) = 1.0;

        m.A_kk.row(gap) = gap_k;
        m.A_kf.row(gap) = gap_f;
        m.A_kk(aN, aN) = p.rho_a;
        m.A_kk(aT, aT) = p.rho_a;
        m.A_kk(aN_lag, aN) = 1.0;
        m.A_kk(aT_lag, aT) = 1.0;
        m.C(aN, 2 * c) = 1.0;
        m.C(aT, 2 * c + 1) = 1.0;

        // beta E pi_N' = pi_N - kappa_N (x_T + gap_t);  beta E pi_T' = pi_T - kappa_T x_T
        m.A_fk.row(piN) = -kN * gap_k;
        m.A_ff.row(piN) = -kN * gap_f;
        m.A_ff(piN, piN) += 1.0;
        m.B_f(piN, c) = -kN;
        m.A_ff(piT, piT) = 1.0;
        m.B_f(piT, c) = -kT;

        m.S_k.row(z0) = gap_k;
        m.S_f.row(z0) = gap_f;
        m.S_u(z0, c) = 1.0;
        m.S_f(z0 + 1, piN) = 1.0;
        m.S_u(z0 + 2, c) = 1.0;
        m.S_f(z0 + 3, piT) = 1.0;
        m.W(z0, z0) = 1.0 - alpha;
        m.W(z0 + 1, z0 + 1) = (1.0 - alpha) * p.theta / kN;
        m.W(z0 + 2, z0 + 2) = alpha_tilde;
        m.W(z0 + 3, z0 + 3) = alpha_tilde * p.theta / kT;

        for (const char* n : {"gap_lag", "a_N", "a_T", "a_N_lag", "a_T_lag"})
            m.names.predetermined.push_back(std::string(n) + sfx);
        m.names.jump.push_back("pi_N" + sfx);
        m.names.jump.push_back(traded_pi + sfx);
        m.names.instrument.push_back("x_T" + sfx);
        for (const std::string n : {"x_N", "pi_N", "x_T", traded_pi.c_str()}) m.names.target.push_back(n + sfx);
        m.targeting_pairs.emplace_back(piN, piT);
    };
    country(0, p.alpha, p.alpha_tilde, s.kappa_N, s.kappa_T, "", "pi_H");
    country(1, p.alpha_star, p.alpha_tilde_star, s.kappa_N_star, s.kappa_F_star, "_star", "pi_F");
    return m;
}

}  // namespace stabias
