#pragma once

#include <optional>
#include <string>

#include "stabias/lre.hpp"

namespace stabias {

enum class Regime { Commitment, Discretion, Rule };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::Commitment: return "commitment";
        case Regime::Discretion: return "discretion";
        case Regime::Rule: return "rule";
    }
    return "unknown";
}

struct SolveDiagnostics {
    int iterations = 0;
    /// Commitment: first-order-condition residual. Discretion: last Bellman
    /// update size. Rule: residual of the closed RE system.
    double residual = 0.0;
    int stable_roots = 0;
};

/// Closed-loop outcome of one policy regime.
///
/// The state s is k for discretion and rules, (k, lambda) for commitment,
/// where lambda are the multipliers on the forward-looking constraints.
/// Jumps, instruments and targets are all linear in s:
/// f = G_f s, u = G_u s, z = target_loading s.
struct PolicySolution {
    Regime regime = Regime::Commitment;
    StateSpaceSolution state_space;
    Matrix target_loading;
    std::optional<Vector> rule_weights;
    SolveDiagnostics diagnostics;

    const Matrix& T() const { return state_space.T; }
    const Matrix& G_f() const { return state_space.G_f; }
    const Matrix& G_u() const { return *state_space.G_u; }
};

}  // namespace stabias
