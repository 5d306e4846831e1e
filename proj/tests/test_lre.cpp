#include <gtest/gtest.h>

#include <algorithm>

#include "stabias/lre.hpp"
#include "stabias/models.hpp"
#include "stabias/solvers.hpp"

using stabias::Error;
using stabias::ErrorKind;
using stabias::LQREModel;
using stabias::Matrix;

namespace {

/// f_t = a E_t f_{t+1} + b k_t, k_{t+1} = rho k_t + eps.
LQREModel scalar_forward(double a, double b, double rho) {
    LQREModel m;
    m.n_pre = 1;
    m.n_jump = 1;
    m.A_kk = Matrix::Constant(1, 1, rho);
    m.A_kf = Matrix::Zero(1, 1);
    m.B_k = Matrix(1, 0);
    m.A_fE = Matrix::Constant(1, 1, a);
    m.A_fk = Matrix::Constant(1, 1, -b);
    m.A_ff = Matrix::Identity(1, 1);
    m.B_f = Matrix(1, 0);
    m.C = Matrix::Identity(1, 1);
    m.Sigma_eps = Matrix::Identity(1, 1);
    m.S_k = Matrix::Zero(1, 1);
    m.S_f = Matrix::Identity(1, 1);
    m.S_u = Matrix(1, 0);
    m.W = Matrix::Identity(1, 1);
    m.names = {{"k"}, {"f"}, {}, {"f"}};
    return m;
}

bool has(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

Matrix rule_row(const LQREModel& m, double phi) {
    Matrix R_f = Matrix::Zero(1, m.n_jump);
    R_f(0, 0) = phi;
    R_f(0, 1) = 1.0 - phi;
    return R_f;
}

}  // namespace

TEST(Validate, WoodfordDefaultsAreValid) {
    EXPECT_TRUE(stabias::validate(stabias::build_woodford({})).empty());
    EXPECT_TRUE(stabias::validate(stabias::build_liu_pappa({})).empty());
}

TEST(Validate, BetaOutOfRange) {
    LQREModel m = stabias::build_woodford({});
    m.beta = 1.2;
    EXPECT_EQ(stabias::validate(m), std::vector<std::string>{"beta out of (0,1)"});
}

TEST(Validate, AsymmetricWeights) {
    LQREModel m = stabias::build_woodford({});
    m.W(0, 1) = 0.1;
    EXPECT_EQ(stabias::validate(m), std::vector<std::string>{"W not symmetric"});
}

TEST(Validate, ReportsShapeAndStructureProblems) {
    LQREModel m = stabias::build_woodford({});
    m.A_ff = Matrix::Zero(3, 3);
    EXPECT_FALSE(stabias::validate(m).empty());

    LQREModel n = stabias::build_woodford({});
    n.A_fE(1, 1) = 0.0;
    EXPECT_TRUE(has(stabias::validate(n), "A_fE not invertible (condition number >= 1e12)"));

    LQREModel w = stabias::build_woodford({});
    w.W(2, 2) = -1.0;
    EXPECT_TRUE(has(stabias::validate(w), "W not positive semidefinite"));

    LQREModel z = stabias::build_woodford({});
    z.S_u(2, 0) = 0.0;
    EXPECT_TRUE(has(stabias::validate(z), "target row 2 selects no variable"));

    LQREModel nm = stabias::build_woodford({});
    nm.names.jump.pop_back();
    EXPECT_TRUE(has(stabias::validate(nm), "names do not match dimensions"));
}

TEST(SolveRe, ScalarGeometricSum) {
    const auto sol = stabias::solve_re(scalar_forward(0.5, 1.0, 0.8));
    EXPECT_NEAR(sol.G_f(0, 0), 1.0 / (1.0 - 0.4), 1e-12);
    EXPECT_NEAR(sol.T(0, 0), 0.8, 1e-12);
    EXPECT_LE(sol.residual, 1e-9);
}

TEST(SolveRe, ExplosiveLeadIsNotDeterminate) {
    try {
        stabias::solve_re(scalar_forward(2.0, 1.0, 0.8));
        FAIL() << "expected a determinacy error";
    } catch (const stabias::DeterminacyError& e) {
        EXPECT_TRUE(e.kind() == ErrorKind::Indeterminacy || e.kind() == ErrorKind::NoStableSolution);
        EXPECT_EQ(e.stable_count(), 2);
        EXPECT_EQ(e.predetermined_count(), 1);
    }
}

TEST(SolveRe, PurelyBackward) {
    LQREModel m;
    m.n_pre = 2;
    m.A_kk.resize(2, 2);
    m.A_kk << 0.5, 0.1, 0.0, 0.3;
    m.A_kf = Matrix(2, 0);
    m.B_k = Matrix(2, 0);
    m.A_fk = Matrix(0, 2);
    m.A_ff = Matrix(0, 0);
    m.B_f = Matrix(0, 0);
    m.A_fE = Matrix(0, 0);
    m.C = Matrix::Identity(2, 2);
    m.Sigma_eps = Matrix::Identity(2, 2);
    m.S_k = Matrix::Identity(2, 2);
    m.S_f = Matrix(2, 0);
    m.S_u = Matrix(2, 0);
    m.W = Matrix::Identity(2, 2);
    m.names = {{"a", "b"}, {}, {}, {"a", "b"}};
    const auto sol = stabias::solve_re(m);
    EXPECT_EQ(sol.T, m.A_kk);
    EXPECT_EQ(sol.G_f.rows(), 0);
}

TEST(SolveRe, RejectsFreeInstruments) {
    EXPECT_THROW(stabias::solve_re(stabias::build_woodford({})), Error);
}

TEST(SolveRe, Deterministic) {
    const LQREModel m = stabias::build_woodford({});
    const auto c = stabias::close_with_rule(m, Matrix::Zero(1, 2), rule_row(m, 0.3), Matrix::Zero(1, 1));
    const auto a = stabias::solve_re(c.model), b = stabias::solve_re(c.model);
    EXPECT_EQ(a.T, b.T);
    EXPECT_EQ(a.G_f, b.G_f);
}

TEST(CloseWithRule, TargetingRuleBecomesStaticConstraint) {
    const LQREModel m = stabias::build_woodford({});
    const auto c = stabias::close_with_rule(m, Matrix::Zero(1, 2), rule_row(m, 0.5), Matrix::Zero(1, 1));
    EXPECT_EQ(c.model.n_inst, 0);
    EXPECT_EQ(c.model.n_jump, 3);
    EXPECT_EQ(c.model.n_static, 1);
    EXPECT_EQ(c.model.names.jump.back(), "x");
    // The static row is 0.5 pi_1 + 0.5 pi_2 = 0, the aggregate inflation index.
    EXPECT_EQ(c.model.A_ff(2, 0), 0.5);
    EXPECT_EQ(c.model.A_ff(2, 1), 0.5);
    EXPECT_EQ(c.model.A_ff(2, 2), 0.0);
    EXPECT_EQ(stabias::max_abs(c.model.A_fE.row(2)), 0.0);
    EXPECT_TRUE(stabias::validate(c.model).empty());
}

TEST(CloseWithRule, ZeroInstrumentRuleDropsInstrumentColumns) {
    const LQREModel m = stabias::build_woodford({});
    const auto c =
        stabias::close_with_rule(m, Matrix::Zero(1, 2), Matrix::Zero(1, 2), Matrix::Identity(1, 1));
    EXPECT_EQ(c.model.n_inst, 0);
    EXPECT_EQ(c.model.n_jump, 2);
    EXPECT_EQ(c.model.B_k.cols(), 0);
    EXPECT_EQ(c.model.B_f.cols(), 0);
    EXPECT_EQ(c.model.A_kk, m.A_kk);
    EXPECT_EQ(c.model.A_ff, m.A_ff);
    EXPECT_EQ(stabias::max_abs(c.u_from_k), 0.0);
}

TEST(CloseWithRule, DegenerateRuleIsSingular) {
    const LQREModel m = stabias::build_woodford({});
    try {
        stabias::close_with_rule(m, Matrix::Zero(1, 2), Matrix::Zero(1, 2), Matrix::Zero(1, 1));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::SingularRule);
    }
}

TEST(CloseWithRule, WrongRowCountRejected) {
    const LQREModel m = stabias::build_woodford({});
    EXPECT_THROW(stabias::close_with_rule(m, Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 1)), Error);
}

TEST(CloseWithRule, WoodfordRuleDeterminateAcrossWeightGrid) {
    for (int i = 1; i <= 19; ++i) {
        stabias::WoodfordParams p;
        p.w2 = i / 20.0;
        const LQREModel m = stabias::build_woodford(p);
        for (double phi : {0.1, 0.5, 0.9}) {
            const auto c = stabias::close_with_rule(m, Matrix::Zero(1, 2), rule_row(m, phi), Matrix::Zero(1, 1));
            const auto sol = stabias::solve_re(c.model);
            EXPECT_LE(sol.residual, 1e-9) << "w2 " << p.w2 << " phi " << phi;
            EXPECT_LT(stabias::spectral_radius(std::sqrt(m.beta) * sol.T), 1.0);
        }
    }
}

TEST(SolveRe, ResidualInvariantOnLiuPappaRule) {
    const LQREModel m = stabias::build_liu_pappa({});
    Matrix R_f = Matrix::Zero(2, 4);
    R_f << 0.6, 0.4, 0.0, 0.0, 0.0, 0.0, 0.2, 0.8;
    const auto c = stabias::close_with_rule(m, Matrix::Zero(2, 10), R_f, Matrix::Zero(2, 2));
    const auto sol = stabias::solve_re(c.model);
    const auto& cm = c.model;
    EXPECT_LE(stabias::max_abs(sol.T - cm.A_kk - cm.A_kf * sol.G_f), 1e-9);
    EXPECT_LE(stabias::max_abs(cm.A_fE * sol.G_f * sol.T - cm.A_fk - cm.A_ff * sol.G_f), 1e-9);
}
